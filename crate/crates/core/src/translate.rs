//! Translation of closed letrec-terms into eager-scope λ-term-graphs over Σ^λ_{1,2}.
//!
//! The traversal carries the current abstraction prefix. Before each subterm is
//! entered, trailing prefix entries whose variable does not occur (effectively)
//! free in it are closed with one delimiter each. Occurrences of letrec names
//! become plain edges to the binding's entry vertex, so recursion yields cycles
//! instead of copies.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::fo::{EagerMode, FoLambdaGraph};
use crate::graph::{Label, Signature, TermGraph, VertexId};
use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("letrec binding `{0}` is defined only in terms of itself")]
    UnguardedRecursion(String),
    #[error("translation produced an invalid graph: {0}")]
    InternalValidationFailure(String),
}

type NodeId = usize;

enum Node {
    Var(usize),
    Rec(usize),
    App(NodeId, NodeId),
    Abs(usize, NodeId),
    Letrec(NodeId),
}

#[derive(Clone, Copy)]
enum Binder {
    Lam(usize),
    Rec(usize),
}

/// The term with every name resolved to a unique binder.
#[derive(Default)]
struct Resolved {
    nodes: Vec<Node>,
    lam_names: Vec<String>,
    rec_names: Vec<String>,
    rec_rhs: Vec<NodeId>,
}

impl Resolved {
    fn push(&mut self, n: Node) -> NodeId {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    /// Children are allocated before their parents.
    fn resolve(&mut self, t: &Term, env: &mut Vec<(String, Binder)>) -> NodeId {
        match t {
            Term::Var(x) => {
                let (_, b) = env
                    .iter()
                    .rev()
                    .find(|(n, _)| n == x)
                    .expect("parsed terms are closed");
                match *b {
                    Binder::Lam(id) => self.push(Node::Var(id)),
                    Binder::Rec(id) => self.push(Node::Rec(id)),
                }
            }
            Term::App(f, a) => {
                let f = self.resolve(f, env);
                let a = self.resolve(a, env);
                self.push(Node::App(f, a))
            }
            Term::Abs(x, body) => {
                let id = self.lam_names.len();
                self.lam_names.push(x.clone());
                env.push((x.clone(), Binder::Lam(id)));
                let body = self.resolve(body, env);
                env.pop();
                self.push(Node::Abs(id, body))
            }
            Term::Letrec(bindings, body) => {
                let first = self.rec_names.len();
                for (i, (name, _)) in bindings.iter().enumerate() {
                    self.rec_names.push(name.clone());
                    self.rec_rhs.push(usize::MAX);
                    env.push((name.clone(), Binder::Rec(first + i)));
                }
                for (i, (_, rhs)) in bindings.iter().enumerate() {
                    self.rec_rhs[first + i] = self.resolve(rhs, env);
                }
                let body = self.resolve(body, env);
                env.truncate(env.len() - bindings.len());
                self.push(Node::Letrec(body))
            }
        }
    }

    /// λ-variables occurring free in each node, where a letrec name counts
    /// with the free variables of its right-hand side (least fixpoint).
    fn free_variables(&self) -> Vec<BTreeSet<usize>> {
        let mut free: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.nodes.len()];
        loop {
            let mut changed = false;
            for (i, n) in self.nodes.iter().enumerate() {
                let next: BTreeSet<usize> = match *n {
                    Node::Var(x) => BTreeSet::from([x]),
                    Node::Rec(g) => free[self.rec_rhs[g]].clone(),
                    Node::App(f, a) => free[f].union(&free[a]).copied().collect(),
                    Node::Abs(x, b) => free[b].iter().copied().filter(|&y| y != x).collect(),
                    Node::Letrec(b) => free[b].clone(),
                };
                if next != free[i] {
                    free[i] = next;
                    changed = true;
                }
            }
            if !changed {
                return free;
            }
        }
    }
}

const PENDING: usize = usize::MAX;

struct Builder<'a> {
    term: &'a Resolved,
    free: Vec<BTreeSet<usize>>,
    // `None` marks an indirection standing for a letrec binding's entry
    labels: Vec<Option<Label>>,
    args: Vec<Vec<usize>>,
    names: Vec<String>,
    taken: HashSet<String>,
    abs_vertex: Vec<usize>,
    rec_entry: Vec<Option<usize>>,
    work: Vec<(usize, Vec<usize>)>,
}

impl Builder<'_> {
    fn vertex(&mut self, label: Option<Label>, args: Vec<usize>, base: String) -> usize {
        let mut name = base.clone();
        let mut n = 1;
        while self.taken.contains(&name) {
            n += 1;
            name = format!("{base}{n}");
        }
        self.taken.insert(name.clone());
        self.labels.push(label);
        self.args.push(args);
        self.names.push(name);
        self.labels.len() - 1
    }

    fn emit(&mut self, n: NodeId, mut prefix: Vec<usize>) -> usize {
        let mut chain = Vec::new();
        while let Some(&x) = prefix.last() {
            if self.free[n].contains(&x) {
                break;
            }
            let back = self.abs_vertex[x];
            chain.push(self.vertex(Some(Label::Del), vec![PENDING, back], "s".into()));
            prefix.pop();
        }
        let v = match self.term.nodes[n] {
            Node::Var(x) => {
                let back = self.abs_vertex[x];
                let base = format!("v{}", self.term.lam_names[x]);
                self.vertex(Some(Label::Var), vec![back], base)
            }
            Node::App(f, a) => {
                let v = self.vertex(Some(Label::App), vec![PENDING, PENDING], "a".into());
                self.args[v][0] = self.emit(f, prefix.clone());
                self.args[v][1] = self.emit(a, prefix);
                v
            }
            Node::Abs(x, body) => {
                let base = format!("l{}", self.term.lam_names[x]);
                let v = self.vertex(Some(Label::Abs), vec![PENDING], base);
                self.abs_vertex[x] = v;
                prefix.push(x);
                self.args[v][0] = self.emit(body, prefix);
                v
            }
            Node::Rec(g) => match self.rec_entry[g] {
                Some(ind) => ind,
                None => {
                    let ind = self.vertex(None, vec![PENDING], self.term.rec_names[g].clone());
                    self.rec_entry[g] = Some(ind);
                    self.work.push((g, prefix));
                    ind
                }
            },
            Node::Letrec(body) => self.emit(body, prefix),
        };
        for i in 0..chain.len() {
            let next = chain.get(i + 1).copied().unwrap_or(v);
            self.args[chain[i]][0] = next;
        }
        chain.first().copied().unwrap_or(v)
    }

    /// Follows indirections from `v` to a proper vertex.
    fn resolve(&self, mut v: usize) -> Result<usize, TranslateError> {
        let start = v;
        let mut steps = 0;
        while self.labels[v].is_none() {
            v = self.args[v][0];
            steps += 1;
            if steps > self.labels.len() {
                return Err(TranslateError::UnguardedRecursion(
                    self.names[start].clone(),
                ));
            }
        }
        Ok(v)
    }
}

/// Translates a closed term into an eager-scope λ-term-graph over Σ^λ_{1,2}.
/// The result is validated before it is returned.
pub fn term_to_graph(t: &Term) -> Result<FoLambdaGraph, TranslateError> {
    let mut resolved = Resolved::default();
    let top = resolved.resolve(t, &mut Vec::new());
    let mut b = Builder {
        term: &resolved,
        free: resolved.free_variables(),
        labels: Vec::new(),
        args: Vec::new(),
        names: Vec::new(),
        taken: HashSet::new(),
        abs_vertex: vec![PENDING; resolved.lam_names.len()],
        rec_entry: vec![None; resolved.rec_names.len()],
        work: Vec::new(),
    };
    let root = b.emit(top, Vec::new());
    while let Some((g, prefix)) = b.work.pop() {
        let entry = b.emit(resolved.rec_rhs[g], prefix);
        let ind = b.rec_entry[g].expect("queued bindings have an entry");
        b.args[ind][0] = entry;
    }

    let root = b.resolve(root)?;
    let mut new_id = vec![PENDING; b.labels.len()];
    let keep: Vec<usize> = (0..b.labels.len())
        .filter(|&v| b.labels[v].is_some())
        .collect();
    for (i, &v) in keep.iter().enumerate() {
        new_id[v] = i;
    }
    let mut args = Vec::with_capacity(keep.len());
    for &v in &keep {
        let row = b.args[v]
            .iter()
            .map(|&a| b.resolve(a).map(|a| VertexId(new_id[a])))
            .collect::<Result<Vec<_>, _>>()?;
        args.push(row);
    }
    let labels = keep.iter().map(|&v| b.labels[v].unwrap()).collect();
    let names = keep.iter().map(|&v| b.names[v].clone()).collect();
    let sig = Signature::delimited(1, 2).unwrap();
    let (graph, _) = TermGraph::from_parts_pruned(sig, labels, args, names, VertexId(new_id[root]))
        .map_err(|e| TranslateError::InternalValidationFailure(e.to_string()))?;

    let f = FoLambdaGraph::new(graph).map_err(|e| match e {
        crate::fo::FoError::NotLambdaTermGraph(r) => {
            TranslateError::InternalValidationFailure(format!("{:?}", r.conditions()))
        }
        other => TranslateError::InternalValidationFailure(other.to_string()),
    })?;
    let lazy = f
        .eager_violations(EagerMode::Exempt)
        .map_err(|e| TranslateError::InternalValidationFailure(e.to_string()))?;
    if !lazy.is_empty() {
        return Err(TranslateError::InternalValidationFailure(format!(
            "{} vertices without eager scope",
            lazy.len()
        )));
    }
    Ok(f)
}
