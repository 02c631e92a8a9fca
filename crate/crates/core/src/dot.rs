//! Graphviz output. Back-links are dashed, delimiters are boxes, prefixes
//! are superscripts and scopes become nested clusters.

use std::fmt::Write;

use crate::graph::{Label, TermGraph, VertexId};
use crate::ho::{binders_in, PrefixFn, ScopeFn};

#[derive(Debug, Clone, Copy, Default)]
pub struct DotOptions<'a> {
    pub prefixes: Option<&'a PrefixFn>,
    pub scopes: Option<&'a ScopeFn>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn node_line(g: &TermGraph, v: VertexId, opts: &DotOptions, indent: &str) -> String {
    let mut label = escape(g.label(v).symbol());
    if let Some(p) = opts.prefixes {
        let word: Vec<String> = p.get(v).iter().map(|&w| escape(g.name(w))).collect();
        if !word.is_empty() {
            write!(label, "<SUP>{}</SUP>", word.join(" ")).unwrap();
        }
    }
    let shape = if g.label(v) == Label::Del {
        "box"
    } else {
        "circle"
    };
    format!(
        "{indent}n{} [label=<{label}>, shape={shape}, tooltip=\"{}\"];\n",
        v.0,
        g.name(v).replace('"', "\\\"")
    )
}

/// Renders `g` in the DOT language.
pub fn to_dot(g: &TermGraph, opts: DotOptions) -> String {
    let mut out = String::from("digraph G {\n  node [fontname=\"serif\"];\n");
    match opts.scopes {
        Some(sc) => {
            // scopes are nested, so each vertex goes into the cluster of its innermost binder
            let innermost: Vec<Option<VertexId>> = g
                .vertices()
                .map(|w| binders_in(sc, w).last().copied())
                .collect();
            let parent = |v: VertexId| binders_in(sc, v).into_iter().rev().find(|&b| b != v);
            for v in g.vertices().filter(|&v| innermost[v.0].is_none()) {
                out.push_str(&node_line(g, v, &opts, "  "));
            }
            for top in sc.domain().filter(|&v| parent(v).is_none()) {
                write_cluster(g, sc, top, &innermost, &parent, &opts, 1, &mut out);
            }
        }
        None => {
            for v in g.vertices() {
                out.push_str(&node_line(g, v, &opts, "  "));
            }
        }
    }
    for (v, k, t) in g.edges() {
        let style = if g.is_backlink(v, k) {
            ", style=dashed"
        } else {
            ""
        };
        writeln!(out, "  n{} -> n{} [label=\"{k}\"{style}];", v.0, t.0).unwrap();
    }
    out.push_str("}\n");
    out
}

#[allow(clippy::too_many_arguments)]
fn write_cluster(
    g: &TermGraph,
    sc: &ScopeFn,
    v: VertexId,
    innermost: &[Option<VertexId>],
    parent: &dyn Fn(VertexId) -> Option<VertexId>,
    opts: &DotOptions,
    depth: usize,
    out: &mut String,
) {
    let indent = "  ".repeat(depth + 1);
    writeln!(out, "{}subgraph cluster_{} {{", "  ".repeat(depth), v.0).unwrap();
    writeln!(out, "{indent}style=filled; color=\"#00000022\";").unwrap();
    for w in g.vertices().filter(|&w| innermost[w.0] == Some(v)) {
        out.push_str(&node_line(g, w, opts, &indent));
    }
    for child in sc.domain().filter(|&c| c != v && parent(c) == Some(v)) {
        write_cluster(g, sc, child, innermost, parent, opts, depth + 1, out);
    }
    writeln!(out, "{}}}", "  ".repeat(depth)).unwrap();
}
