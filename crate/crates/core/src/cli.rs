//! Command-line front end. [`run`] is the whole program minus process I/O so
//! it can be driven from tests.

use std::io::Read;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::document::{parse_document, serialize_document, DocumentError, GraphDocument};
use crate::dot::{to_dot, DotOptions};
use crate::fo::{infer_prefix, validate_prefix_fo, EagerMode, FoLambdaGraph, Traversal};
use crate::graph::{Signature, TermGraph};
use crate::ho::{
    admits_prefix_function, validate_prefix_ho, validate_scope, ApHoTermGraph, HoError, HoTermGraph,
};
use crate::report::ValidationReport;
use crate::sharing::{are_bisimilar, collapse, max_share_fo};
use crate::term::{parse_term, Term};
use crate::transform::{insert_delimiters, prefix_to_scope, scope_to_prefix, strip_delimiters};
use crate::translate::term_to_graph;

#[derive(Parser, Debug)]
#[command(
    name = "lambda-graphs",
    version,
    about = "Term graph representations of cyclic λ-terms and maximal sharing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a graph document against a class of term graphs
    Validate {
        #[arg(long, value_enum)]
        class: Class,
        /// Signature as `i` or `i,j`
        #[arg(long)]
        variant: String,
        /// Print the verdict as JSON
        #[arg(long)]
        json: bool,
        /// Also hold delimiter vertices to the eager-scope condition
        #[arg(long)]
        strict_eager: bool,
        file: String,
    },
    /// Convert between representations
    Translate {
        #[arg(long, value_enum)]
        from: Repr,
        #[arg(long, value_enum)]
        to: Repr,
        /// Delimiter arity of ltg output (2 unless the input already has delimiters)
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        del_arity: Option<u8>,
        file: String,
    },
    /// Bisimulation collapse of a graph document
    Collapse { file: String },
    /// Maximally shared graph of a term
    Maxshare {
        #[arg(long, value_enum, default_value = "ltg")]
        to: Repr,
        file: String,
    },
    /// Whether two terms translate to bisimilar graphs
    Equiv { first: String, second: String },
    /// Print a graph document as a table or in DOT
    Render {
        #[arg(long)]
        dot: bool,
        file: String,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Class {
    Tg,
    Hotg,
    Aphotg,
    Ltg,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Repr {
    Term,
    Tg,
    Hotg,
    Aphotg,
    Ltg,
}

/// Exit code and captured output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    /// Exit 1: input is well formed but invalid, or terms are not equivalent.
    Negative { stdout: String, stderr: String },
    /// Exit 2: usage or parse error.
    Usage(String),
}

fn negative(msg: impl Into<String>) -> Failure {
    Failure::Negative {
        stdout: String::new(),
        stderr: msg.into(),
    }
}

struct Input<'a> {
    stdin: &'a mut dyn Read,
    consumed: bool,
}

impl Input<'_> {
    fn read(&mut self, path: &str) -> Result<String, Failure> {
        if path == "-" {
            if self.consumed {
                return Err(Failure::Usage(
                    "standard input can only be read once".into(),
                ));
            }
            self.consumed = true;
            let mut s = String::new();
            self.stdin
                .read_to_string(&mut s)
                .map_err(|e| Failure::Usage(format!("reading standard input: {e}")))?;
            Ok(s)
        } else {
            std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))
        }
    }

    fn document(&mut self, path: &str) -> Result<GraphDocument, Failure> {
        let text = self.read(path)?;
        parse_document(&text).map_err(|e| match e {
            DocumentError::Format { .. } => Failure::Usage(format!("{path}: {e}")),
            DocumentError::Graph { .. } => negative(format!("{path}: {e}")),
        })
    }

    fn term(&mut self, path: &str) -> Result<Term, Failure> {
        let text = self.read(path)?;
        parse_term(&text).map_err(|e| Failure::Usage(format!("{path}: {e}")))
    }
}

/// Runs the program on `args` (including the program name).
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let mut input = Input {
        stdin,
        consumed: false,
    };
    match execute(cli.command, &mut input) {
        Ok(stdout) => Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        },
        Err(Failure::Negative { stdout, stderr }) => Outcome {
            code: 1,
            stdout,
            stderr,
        },
        Err(Failure::Usage(msg)) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: msg + "\n",
        },
    }
}

fn execute(cmd: Command, input: &mut Input) -> Result<String, Failure> {
    match cmd {
        Command::Validate {
            class,
            variant,
            json,
            strict_eager,
            file,
        } => {
            let sig = parse_variant(&variant)?;
            let mode = if strict_eager {
                EagerMode::Strict
            } else {
                EagerMode::Exempt
            };
            validate(class, sig, json, mode, input, &file)
        }
        Command::Translate {
            from,
            to,
            del_arity,
            file,
        } => {
            let value = load(from, input, &file)?;
            Ok(serialize_document(&convert(
                value,
                to,
                del_arity.map(usize::from),
            )?))
        }
        Command::Collapse { file } => {
            let doc = input.document(&file)?;
            let (c, _) = collapse(&doc.graph);
            Ok(serialize_document(&GraphDocument::plain(c)))
        }
        Command::Maxshare { to, file } => {
            let term = input.term(&file)?;
            let f = term_to_graph(&term).map_err(|e| negative(e.to_string()))?;
            let shared =
                max_share_fo(&f, EagerMode::Exempt).map_err(|e| negative(e.to_string()))?;
            Ok(serialize_document(&convert(Value::Fo(shared), to, None)?))
        }
        Command::Equiv { first, second } => {
            let mut graphs = Vec::new();
            for path in [&first, &second] {
                let t = input.term(path)?;
                let f = term_to_graph(&t).map_err(|e| negative(format!("{path}: {e}")))?;
                graphs.push(f.into_graph());
            }
            if are_bisimilar(&graphs[0], &graphs[1]) {
                Ok("equivalent\n".into())
            } else {
                Err(Failure::Negative {
                    stdout: "not equivalent\n".into(),
                    stderr: String::new(),
                })
            }
        }
        Command::Render { dot, file } => {
            let doc = input.document(&file)?;
            if dot {
                let opts = DotOptions {
                    prefixes: doc.prefixes.as_ref(),
                    scopes: doc.scopes.as_ref(),
                };
                Ok(to_dot(&doc.graph, opts))
            } else {
                Ok(render_table(&doc))
            }
        }
    }
}

fn parse_variant(s: &str) -> Result<Signature, Failure> {
    let parts: Result<Vec<usize>, _> = s.split(',').map(|p| p.trim().parse()).collect();
    let sig = match parts.as_deref() {
        Ok([i]) => Signature::higher_order(*i),
        Ok([i, j]) => Signature::delimited(*i, *j),
        _ => {
            return Err(Failure::Usage(format!(
                "bad variant `{s}`, expected `i` or `i,j`"
            )))
        }
    };
    sig.map_err(|e| Failure::Usage(e.to_string()))
}

#[derive(Serialize)]
struct JsonViolation {
    condition: String,
    witnesses: Vec<String>,
}

#[derive(Serialize)]
struct JsonVerdict {
    class: String,
    valid: bool,
    violations: Vec<JsonViolation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eager_scope: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fully_back_linked: Option<bool>,
}

fn validate(
    class: Class,
    sig: Signature,
    json: bool,
    mode: EagerMode,
    input: &mut Input,
    file: &str,
) -> Result<String, Failure> {
    let class_name = format!("{class:?}").to_lowercase();
    let doc = match input.document(file) {
        Ok(d) => Ok(d),
        Err(Failure::Negative { stderr, .. }) => Err(stderr),
        Err(usage) => return Err(usage),
    };
    let mut verdict = JsonVerdict {
        class: class_name,
        valid: false,
        violations: Vec::new(),
        error: None,
        eager_scope: None,
        fully_back_linked: None,
    };
    match doc {
        Err(msg) => verdict.error = Some(msg),
        Ok(doc) => check_document(class, sig, mode, &doc, &mut verdict)?,
    }
    let text = if json {
        serde_json::to_string_pretty(&verdict).expect("verdicts serialize") + "\n"
    } else {
        let mut out = String::from(if verdict.valid {
            "valid\n"
        } else {
            "invalid\n"
        });
        if let Some(e) = &verdict.error {
            out += &format!("{e}\n");
        }
        for v in &verdict.violations {
            out += &format!("{} at {}\n", v.condition, v.witnesses.join(" "));
        }
        if let Some(e) = verdict.eager_scope {
            out += &format!("eager-scope: {}\n", if e { "yes" } else { "no" });
        }
        if let Some(b) = verdict.fully_back_linked {
            out += &format!("fully-back-linked: {}\n", if b { "yes" } else { "no" });
        }
        out
    };
    if verdict.valid {
        Ok(text)
    } else {
        Err(Failure::Negative {
            stdout: text,
            stderr: String::new(),
        })
    }
}

fn check_document(
    class: Class,
    sig: Signature,
    mode: EagerMode,
    doc: &GraphDocument,
    verdict: &mut JsonVerdict,
) -> Result<(), Failure> {
    let g = &doc.graph;
    if g.signature() != sig {
        verdict.error = Some(format!(
            "document has signature {}, expected {sig}",
            g.signature()
        ));
        return Ok(());
    }
    let report: Result<ValidationReport, String> = match class {
        Class::Tg => Ok(ValidationReport::new()),
        Class::Hotg => {
            let sc = doc
                .scopes
                .as_ref()
                .ok_or_else(|| Failure::Usage("document has no scope lines".into()))?;
            validate_scope(g, sc).map_err(|e| e.to_string())
        }
        Class::Aphotg => {
            let p = doc
                .prefixes
                .as_ref()
                .ok_or_else(|| Failure::Usage("document has no prefix lines".into()))?;
            validate_prefix_ho(g, p).map_err(|e| e.to_string())
        }
        Class::Ltg => {
            if !sig.has_delimiters() {
                return Err(Failure::Usage("class ltg needs a variant `i,j`".into()));
            }
            match &doc.prefixes {
                Some(p) => validate_prefix_fo(g, p).map_err(|e| e.to_string()),
                None => Ok(infer_prefix(g, Traversal::DepthFirst)
                    .err()
                    .unwrap_or_default()),
            }
        }
    };
    match report {
        Err(msg) => verdict.error = Some(msg),
        Ok(r) => {
            verdict.valid = r.is_pass();
            verdict.violations = r
                .violations()
                .iter()
                .map(|v| JsonViolation {
                    condition: v.condition.name().to_string(),
                    witnesses: v.witnesses.iter().map(|&w| g.name(w).to_string()).collect(),
                })
                .collect();
        }
    }
    if class == Class::Ltg && verdict.valid {
        let f = FoLambdaGraph::new(g.clone()).expect("validated above");
        verdict.fully_back_linked = Some(f.is_fully_back_linked());
        verdict.eager_scope = f.is_eager_scope(mode).ok();
    }
    Ok(())
}

enum Value {
    Plain(TermGraph),
    Ho(HoTermGraph),
    ApHo(ApHoTermGraph),
    Fo(FoLambdaGraph),
}

fn invalid(e: impl std::fmt::Display, file: &str) -> Failure {
    negative(format!("{file}: {e}"))
}

fn describe_ho(e: HoError, g: &TermGraph) -> String {
    match e {
        HoError::Invalid(r) => format!("invalid\n{}", r.describe(g)),
        other => other.to_string(),
    }
}

fn load(from: Repr, input: &mut Input, file: &str) -> Result<Value, Failure> {
    if from == Repr::Term {
        let t = input.term(file)?;
        return term_to_graph(&t)
            .map(Value::Fo)
            .map_err(|e| invalid(e, file));
    }
    let doc = input.document(file)?;
    let g = doc.graph;
    match from {
        Repr::Term => unreachable!(),
        Repr::Tg => Ok(Value::Plain(g)),
        Repr::Hotg => {
            let sc = doc
                .scopes
                .ok_or_else(|| Failure::Usage(format!("{file}: no scope lines")))?;
            HoTermGraph::new(g.clone(), sc)
                .map(Value::Ho)
                .map_err(|e| invalid(describe_ho(e, &g), file))
        }
        Repr::Aphotg => {
            let p = doc
                .prefixes
                .ok_or_else(|| Failure::Usage(format!("{file}: no prefix lines")))?;
            ApHoTermGraph::new(g.clone(), p)
                .map(Value::ApHo)
                .map_err(|e| invalid(describe_ho(e, &g), file))
        }
        Repr::Ltg => FoLambdaGraph::new(g)
            .map(Value::Fo)
            .map_err(|e| invalid(e, file)),
    }
}

fn to_apho(v: Value) -> Result<ApHoTermGraph, Failure> {
    match v {
        Value::Ho(h) => Ok(scope_to_prefix(&h)),
        Value::ApHo(a) => Ok(a),
        Value::Fo(f) => Ok(strip_delimiters(&f)),
        Value::Plain(g) => {
            if g.signature().has_delimiters() {
                let f = FoLambdaGraph::new(g).map_err(|e| negative(e.to_string()))?;
                return Ok(strip_delimiters(&f));
            }
            match admits_prefix_function(&g) {
                Ok(Some(p)) => {
                    Ok(ApHoTermGraph::new(g, p).expect("least prefix function is correct"))
                }
                Ok(None) => Err(negative(
                    "graph admits no correct abstraction-prefix function",
                )),
                Err(e) => Err(negative(e.to_string())),
            }
        }
    }
}

fn convert(v: Value, to: Repr, del_arity: Option<usize>) -> Result<GraphDocument, Failure> {
    Ok(match to {
        Repr::Term => {
            return Err(Failure::Usage(
                "cannot translate a graph back to a term".into(),
            ))
        }
        Repr::Tg => GraphDocument::plain(match v {
            Value::Plain(g) => g,
            Value::Ho(h) => h.into_parts().0,
            Value::ApHo(a) => a.into_parts().0,
            Value::Fo(f) => f.into_graph(),
        }),
        Repr::Ltg => {
            let keep = |sig: Signature| del_arity.is_none_or(|j| sig.del_arity() == Some(j));
            GraphDocument::plain(match v {
                Value::Fo(f) if keep(f.graph().signature()) => f.into_graph(),
                Value::Plain(g) if g.signature().has_delimiters() && keep(g.signature()) => {
                    FoLambdaGraph::new(g)
                        .map_err(|e| negative(e.to_string()))?
                        .into_graph()
                }
                other => insert_delimiters(&to_apho(other)?, del_arity.unwrap_or(2)).into_graph(),
            })
        }
        Repr::Aphotg => {
            let (graph, p) = to_apho(v)?.into_parts();
            GraphDocument {
                graph,
                prefixes: Some(p),
                scopes: None,
            }
        }
        Repr::Hotg => {
            let (graph, sc) = match v {
                Value::Ho(h) => h.into_parts(),
                other => prefix_to_scope(&to_apho(other)?).into_parts(),
            };
            GraphDocument {
                graph,
                prefixes: None,
                scopes: Some(sc),
            }
        }
    })
}

fn render_table(doc: &GraphDocument) -> String {
    let g = &doc.graph;
    let width = g
        .names()
        .iter()
        .map(|n| n.chars().count())
        .max()
        .unwrap_or(1);
    let mut out = format!(
        "signature {}, {} vertices, root {}\n",
        g.signature(),
        g.len(),
        g.name(g.root())
    );
    for v in g.vertices() {
        let args: Vec<&str> = g.args(v).iter().map(|&a| g.name(a)).collect();
        let mut line = format!("{:width$}  {}", g.name(v), g.label(v).symbol());
        if !args.is_empty() {
            line += &format!("  -> {}", args.join(" "));
        }
        if let Some(p) = &doc.prefixes {
            let word: Vec<&str> = p.get(v).iter().map(|&w| g.name(w)).collect();
            line += &format!("  [{}]", word.join(" "));
        }
        if let Some(sc) = doc.scopes.as_ref().and_then(|s| s.get(v)) {
            let set: Vec<&str> = sc.iter().map(|&w| g.name(w)).collect();
            line += &format!("  scope {{{}}}", set.join(" "));
        }
        out += line.trim_end();
        out.push('\n');
    }
    out
}
