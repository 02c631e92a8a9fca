//! Translations between the scope-function, abstraction-prefix and
//! delimiter representations.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::fo::FoLambdaGraph;
use crate::graph::{Label, Signature, TermGraph, VertexId};
use crate::ho::{binders_in, ApHoTermGraph, HoTermGraph, Prefix, PrefixFn, ScopeFn};

/// Anything with an underlying first-order term graph.
pub trait Carrier {
    fn carrier(&self) -> &TermGraph;
}

impl Carrier for TermGraph {
    fn carrier(&self) -> &TermGraph {
        self
    }
}

impl Carrier for HoTermGraph {
    fn carrier(&self) -> &TermGraph {
        self.graph()
    }
}

impl Carrier for ApHoTermGraph {
    fn carrier(&self) -> &TermGraph {
        self.graph()
    }
}

impl Carrier for FoLambdaGraph {
    fn carrier(&self) -> &TermGraph {
        self.graph()
    }
}

/// Drops the scope or prefix annotation.
pub fn forget<C: Carrier>(x: &C) -> TermGraph {
    x.carrier().clone()
}

/// Prefix of each vertex: its binders other than itself, outermost first.
pub fn scope_to_prefix(h: &HoTermGraph) -> ApHoTermGraph {
    let g = h.graph();
    let prefixes = g
        .vertices()
        .map(|w| {
            binders_in(h.scopes(), w)
                .into_iter()
                .filter(|&v| v != w)
                .collect()
        })
        .collect();
    ApHoTermGraph::new_unchecked(g.clone(), PrefixFn::new(prefixes))
}

/// Scope of each abstraction `v`: `v` itself and every vertex whose prefix mentions `v`.
pub fn prefix_to_scope(a: &ApHoTermGraph) -> HoTermGraph {
    let g = a.graph();
    let mut scopes: BTreeMap<VertexId, BTreeSet<VertexId>> = g
        .vertices_labelled(Label::Abs)
        .map(|v| (v, BTreeSet::from([v])))
        .collect();
    for (w, p) in a.prefixes().iter() {
        for v in p {
            scopes
                .get_mut(v)
                .expect("prefix entries are abstractions")
                .insert(w);
        }
    }
    HoTermGraph::new_unchecked(g.clone(), ScopeFn::new(scopes))
}

/// Number of delimiters needed on the edge `w →k w'`.
///
/// # Panics
/// If `w` has no `k`-th successor.
pub fn num_delimiters(a: &ApHoTermGraph, w: VertexId, k: usize) -> usize {
    let g = a.graph();
    let target = g.args(w)[k];
    let (pw, pt) = (a.prefix(w).len(), a.prefix(target).len());
    match g.label(w) {
        Label::App => pw - pt,
        Label::Abs => pw + 1 - pt,
        Label::Var | Label::Del => 0,
    }
}

/// An edge that receives a chain of `count` delimiters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DelimiterChainRecord {
    pub source: VertexId,
    pub index: usize,
    pub target: VertexId,
    pub count: usize,
}

/// All edges of `a` with a positive delimiter count.
pub fn delimiter_chains(a: &ApHoTermGraph) -> Vec<DelimiterChainRecord> {
    a.graph()
        .edges()
        .map(|(source, index, target)| DelimiterChainRecord {
            source,
            index,
            target,
            count: num_delimiters(a, source, index),
        })
        .filter(|r| r.count > 0)
        .collect()
}

/// Interposes a fresh chain of delimiter vertices on every edge that leaves
/// one or more scopes. Original vertices keep their ids; delimiters follow.
/// With `del_arity == 2` a delimiter whose prefix is `p·v` links back to `v`.
///
/// # Panics
/// If `del_arity` is not 1 or 2.
pub fn insert_delimiters(a: &ApHoTermGraph, del_arity: usize) -> FoLambdaGraph {
    let g = a.graph();
    let sig = Signature::delimited(g.signature().var_arity(), del_arity)
        .expect("delimiter arity is 1 or 2");
    let mut labels: Vec<Label> = g.vertices().map(|v| g.label(v)).collect();
    let mut args: Vec<Vec<VertexId>> = g.vertices().map(|v| g.args(v).to_vec()).collect();
    let mut names: Vec<String> = g.names().to_vec();
    let mut prefixes: Vec<Prefix> = g.vertices().map(|v| a.prefix(v).to_vec()).collect();
    let mut taken: HashSet<String> = names.iter().cloned().collect();

    for chain in delimiter_chains(a) {
        let w = chain.source;
        let mut word = a.prefix(w).to_vec();
        if g.label(w) == Label::Abs {
            word.push(w);
        }
        let first = VertexId(labels.len());
        for m in 0..chain.count {
            let id = VertexId(labels.len());
            let v = *word.last().expect("chain never outruns the prefix");
            let next = if m + 1 == chain.count {
                chain.target
            } else {
                VertexId(id.0 + 1)
            };
            labels.push(Label::Del);
            args.push(if del_arity == 2 {
                vec![next, v]
            } else {
                vec![next]
            });
            names.push(fresh_name(
                &mut taken,
                &format!("{}.{}.s{}", g.name(w), chain.index, m),
            ));
            prefixes.push(word.clone());
            word.pop();
        }
        args[w.0][chain.index] = first;
    }
    let graph = TermGraph::from_parts(sig, labels, args, names, g.root())
        .expect("delimiter insertion keeps the graph well formed");
    FoLambdaGraph::new_unchecked(graph, PrefixFn::new(prefixes))
}

fn fresh_name(taken: &mut HashSet<String>, base: &str) -> String {
    let mut name = base.to_string();
    let mut n = 1;
    while taken.contains(&name) {
        name = format!("{base}~{n}");
        n += 1;
    }
    taken.insert(name.clone());
    name
}

/// Erases delimiter vertices: every edge is redirected past the delimiter
/// chain it enters, and the prefix function is restricted.
pub fn strip_delimiters(f: &FoLambdaGraph) -> ApHoTermGraph {
    let g = f.graph();
    let keep: Vec<VertexId> = g.vertices().filter(|&v| g.label(v) != Label::Del).collect();
    let mut new_id = vec![usize::MAX; g.len()];
    for (i, v) in keep.iter().enumerate() {
        new_id[v.0] = i;
    }
    let skip = |mut t: VertexId| {
        while g.label(t) == Label::Del {
            t = g.args(t)[0];
        }
        VertexId(new_id[t.0])
    };
    let labels = keep.iter().map(|&v| g.label(v)).collect();
    let args = keep
        .iter()
        .map(|&v| g.args(v).iter().map(|&t| skip(t)).collect())
        .collect();
    let names = keep.iter().map(|&v| g.name(v).to_string()).collect();
    let sig = g.signature().without_delimiters();
    let graph = TermGraph::from_parts(sig, labels, args, names, skip(g.root()))
        .expect("delimiter erasure keeps every vertex reachable");
    let prefixes = keep
        .iter()
        .map(|&v| f.prefix(v).iter().map(|u| VertexId(new_id[u.0])).collect())
        .collect();
    ApHoTermGraph::new_unchecked(graph, PrefixFn::new(prefixes))
}
