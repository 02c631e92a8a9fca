//! Line-based text format for term graphs with optional prefix or scope
//! annotations:
//!
//! ```text
//! # comment
//! sig 1 2
//! root a
//! a @ b c
//! b lam s
//! s S c b
//! c lam v
//! v 0 c
//! ```
//!
//! Higher-order documents may add `prefix v = c` or `scope c = {c v}` lines.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write;

use thiserror::Error;

use crate::graph::{GraphError, Label, Signature, TermGraph, VertexId};
use crate::ho::{PrefixFn, ScopeFn};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("line {}: {source}", .line.map_or("?".to_string(), |l| l.to_string()))]
    Graph {
        line: Option<usize>,
        source: GraphError,
    },
}

impl DocumentError {
    pub fn line(&self) -> Option<usize> {
        match self {
            DocumentError::Format { line, .. } => Some(*line),
            DocumentError::Graph { line, .. } => *line,
        }
    }
}

/// A parsed graph document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphDocument {
    pub graph: TermGraph,
    pub prefixes: Option<PrefixFn>,
    pub scopes: Option<ScopeFn>,
}

impl GraphDocument {
    pub fn plain(graph: TermGraph) -> Self {
        GraphDocument {
            graph,
            prefixes: None,
            scopes: None,
        }
    }
}

fn label_token(l: Label) -> &'static str {
    match l {
        Label::App => "@",
        Label::Abs => "lam",
        Label::Var => "0",
        Label::Del => "S",
    }
}

fn parse_label(tok: &str) -> Option<Label> {
    match tok {
        "@" => Some(Label::App),
        "lam" | "λ" => Some(Label::Abs),
        "0" => Some(Label::Var),
        "S" => Some(Label::Del),
        _ => None,
    }
}

fn format_err<T>(line: usize, message: impl Into<String>) -> Result<T, DocumentError> {
    Err(DocumentError::Format {
        line,
        message: message.into(),
    })
}

/// Parses a document. Graph construction is strict: unreachable vertices are
/// rejected.
pub fn parse_document(text: &str) -> Result<GraphDocument, DocumentError> {
    let mut sig: Option<Signature> = None;
    let mut root: Option<(String, usize)> = None;
    let mut vertices: Vec<(String, Label, Vec<String>)> = Vec::new();
    let mut vertex_line: HashMap<String, usize> = HashMap::new();
    let mut prefix_lines: Vec<(usize, String, Vec<String>)> = Vec::new();
    let mut scope_lines: Vec<(usize, String, Vec<String>)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some(&head) = tokens.first() else {
            continue;
        };
        match head {
            "sig" => {
                if sig.is_some() {
                    return format_err(line, "duplicate `sig` line");
                }
                let nums: Result<Vec<usize>, _> = tokens[1..].iter().map(|t| t.parse()).collect();
                let parsed = match nums.as_deref() {
                    Ok([i]) => Signature::higher_order(*i),
                    Ok([i, j]) => Signature::delimited(*i, *j),
                    _ => return format_err(line, "expected `sig i` or `sig i j`"),
                };
                sig = Some(parsed.map_err(|e| DocumentError::Graph {
                    line: Some(line),
                    source: e,
                })?);
            }
            "root" => {
                if root.is_some() {
                    return format_err(line, "duplicate `root` line");
                }
                let [_, name] = tokens[..] else {
                    return format_err(line, "expected `root NAME`");
                };
                root = Some((name.to_string(), line));
            }
            "prefix" | "scope" => {
                if tokens.len() < 3 || tokens[2] != "=" {
                    return format_err(line, format!("expected `{head} NAME = ...`"));
                }
                let mut rest: Vec<String> = tokens[3..].iter().map(|t| t.to_string()).collect();
                if head == "scope" {
                    let joined = rest.join(" ");
                    let inner = joined
                        .trim()
                        .strip_prefix('{')
                        .and_then(|s| s.strip_suffix('}'))
                        .ok_or(())
                        .or_else(|_| format_err(line, "scope must be written `{a b ...}`"))?;
                    rest = inner.split_whitespace().map(str::to_string).collect();
                    scope_lines.push((line, tokens[1].to_string(), rest));
                } else {
                    prefix_lines.push((line, tokens[1].to_string(), rest));
                }
            }
            name => {
                let Some(&label_tok) = tokens.get(1) else {
                    return format_err(line, "expected `NAME LABEL SUCCESSORS...`");
                };
                let Some(label) = parse_label(label_tok) else {
                    return format_err(line, format!("unknown label `{label_tok}`"));
                };
                if vertex_line.insert(name.to_string(), line).is_some() {
                    return Err(DocumentError::Graph {
                        line: Some(line),
                        source: GraphError::DuplicateVertex(name.to_string()),
                    });
                }
                let args = tokens[2..].iter().map(|t| t.to_string()).collect();
                vertices.push((name.to_string(), label, args));
            }
        }
    }

    let Some(sig) = sig else {
        return format_err(1, "missing `sig` line");
    };
    let Some((root, root_line)) = root else {
        return format_err(1, "missing `root` line");
    };
    let graph = TermGraph::build(sig, vertices, root).map_err(|e| {
        let line = match &e {
            GraphError::UnknownRoot(_) => Some(root_line),
            other => other.vertex().and_then(|v| vertex_line.get(v).copied()),
        };
        DocumentError::Graph { line, source: e }
    })?;

    let lookup = |line: usize, name: &str| {
        graph
            .vertex(name)
            .ok_or(())
            .or_else(|_| format_err(line, format!("unknown vertex `{name}`")))
    };
    let prefixes = if prefix_lines.is_empty() {
        None
    } else {
        let mut p = vec![Vec::new(); graph.len()];
        let mut seen = BTreeSet::new();
        for (line, v, word) in &prefix_lines {
            let v = lookup(*line, v)?;
            if !seen.insert(v) {
                return format_err(*line, "duplicate prefix line");
            }
            p[v.0] = word
                .iter()
                .map(|w| lookup(*line, w))
                .collect::<Result<_, _>>()?;
        }
        Some(PrefixFn::new(p))
    };
    let scopes = if scope_lines.is_empty() {
        None
    } else {
        let mut m: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
        for (line, v, set) in &scope_lines {
            let v = lookup(*line, v)?;
            let set = set
                .iter()
                .map(|w| lookup(*line, w))
                .collect::<Result<_, _>>()?;
            if m.insert(v, set).is_some() {
                return format_err(*line, "duplicate scope line");
            }
        }
        Some(ScopeFn::new(m))
    };
    Ok(GraphDocument {
        graph,
        prefixes,
        scopes,
    })
}

/// Canonical text of a document: `sig`, `root`, vertices in id order, then
/// prefix lines for every vertex and scope lines for every abstraction.
pub fn serialize_document(doc: &GraphDocument) -> String {
    let g = &doc.graph;
    let mut out = String::new();
    let sig = g.signature();
    match sig.del_arity() {
        Some(j) => writeln!(out, "sig {} {}", sig.var_arity(), j),
        None => writeln!(out, "sig {}", sig.var_arity()),
    }
    .unwrap();
    writeln!(out, "root {}", g.name(g.root())).unwrap();
    for v in g.vertices() {
        write!(out, "{} {}", g.name(v), label_token(g.label(v))).unwrap();
        for &a in g.args(v) {
            write!(out, " {}", g.name(a)).unwrap();
        }
        out.push('\n');
    }
    if let Some(p) = &doc.prefixes {
        for (v, word) in p.iter() {
            write!(out, "prefix {} =", g.name(v)).unwrap();
            for &w in word {
                write!(out, " {}", g.name(w)).unwrap();
            }
            out.push('\n');
        }
    }
    if let Some(sc) = &doc.scopes {
        for (v, set) in sc.iter() {
            let names: Vec<&str> = set.iter().map(|&w| g.name(w)).collect();
            writeln!(out, "scope {} = {{{}}}", g.name(v), names.join(" ")).unwrap();
        }
    }
    out
}

pub fn serialize_graph(g: &TermGraph) -> String {
    serialize_document(&GraphDocument::plain(g.clone()))
}

pub fn parse_graph(text: &str) -> Result<TermGraph, DocumentError> {
    parse_document(text).map(|d| d.graph)
}
