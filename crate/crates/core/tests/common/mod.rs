//! Random generators and brute-force oracles shared by the integration tests.
//! The oracles deliberately avoid the library's algorithms: they enumerate.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use lambda_graphs::document::{parse_document, GraphDocument};
use lambda_graphs::sharing::{collapse, merge_closure, quotient};
use lambda_graphs::term::Term;
use lambda_graphs::transform::{insert_delimiters, strip_delimiters};
use lambda_graphs::translate::term_to_graph;
use lambda_graphs::{
    ApHoTermGraph, FoLambdaGraph, Label, PrefixFn, ScopeFn, Signature, TermGraph, VertexId,
};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_dir().join(name))
        .unwrap_or_else(|e| panic!("cannot read fixture {name}: {e}"))
}

pub fn fixture(name: &str) -> GraphDocument {
    parse_document(&fixture_text(name)).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

/// Every graph document in the corpus, by file name.
pub fn corpus() -> Vec<(String, GraphDocument)> {
    let mut names: Vec<String> = std::fs::read_dir(fixture_dir())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".tg"))
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|n| {
            let doc = fixture(&n);
            (n, doc)
        })
        .collect()
}

// ---------------------------------------------------------------- terms

/// A random closed term. Letrec bindings are abstractions or applications,
/// so recursion is always guarded.
pub fn random_term(rng: &mut StdRng, depth: usize, max_bindings: usize) -> Term {
    let mut fresh = 0;
    gen_term(rng, depth, &mut Vec::new(), max_bindings, &mut fresh)
}

fn fresh_name(prefix: &str, fresh: &mut usize) -> String {
    *fresh += 1;
    format!("{prefix}{fresh}")
}

fn gen_term(
    rng: &mut StdRng,
    depth: usize,
    env: &mut Vec<String>,
    bindings_left: usize,
    fresh: &mut usize,
) -> Term {
    let roll: f64 = rng.gen();
    if depth == 0 || (roll < 0.25 && !env.is_empty()) {
        return match env.choose(rng) {
            Some(x) => Term::Var(x.clone()),
            None => {
                let x = fresh_name("x", fresh);
                Term::abs(&x, Term::var(&x))
            }
        };
    }
    if roll < 0.55 {
        let f = gen_term(rng, depth - 1, env, bindings_left, fresh);
        let a = gen_term(rng, depth - 1, env, bindings_left, fresh);
        Term::app(f, a)
    } else if roll < 0.85 || bindings_left == 0 {
        gen_abs(rng, depth, env, bindings_left, fresh)
    } else {
        let n = rng.gen_range(1..=bindings_left.min(2));
        let names: Vec<String> = (0..n).map(|_| fresh_name("f", fresh)).collect();
        env.extend(names.iter().cloned());
        let rest = bindings_left - n;
        let bound: Vec<(String, Term)> = names
            .iter()
            .map(|f| {
                let rhs = if rng.gen_bool(0.7) {
                    gen_abs(rng, depth - 1, env, rest, fresh)
                } else {
                    let a = gen_term(rng, depth.saturating_sub(2), env, rest, fresh);
                    let b = gen_term(rng, depth.saturating_sub(2), env, rest, fresh);
                    Term::app(a, b)
                };
                (f.clone(), rhs)
            })
            .collect();
        let body = gen_term(rng, depth - 1, env, rest, fresh);
        env.truncate(env.len() - n);
        Term::Letrec(bound, Box::new(body))
    }
}

fn gen_abs(
    rng: &mut StdRng,
    depth: usize,
    env: &mut Vec<String>,
    bindings_left: usize,
    fresh: &mut usize,
) -> Term {
    let x = fresh_name("x", fresh);
    env.push(x.clone());
    let body = gen_term(rng, depth.saturating_sub(1), env, bindings_left, fresh);
    env.pop();
    Term::abs(&x, body)
}

/// A random closed term without letrec, as a de Bruijn-level tree.
#[derive(Debug, Clone)]
pub enum Tree {
    Var(usize),
    App(Box<Tree>, Box<Tree>),
    Abs(Box<Tree>),
}

impl Tree {
    fn free(&self, depth: usize, out: &mut BTreeSet<usize>) {
        match self {
            Tree::Var(k) => {
                out.insert(*k);
            }
            Tree::App(a, b) => {
                a.free(depth, out);
                b.free(depth, out);
            }
            Tree::Abs(b) => {
                let mut inner = BTreeSet::new();
                b.free(depth + 1, &mut inner);
                out.extend(inner.into_iter().filter(|&k| k < depth));
            }
        }
    }
}

pub fn random_tree(rng: &mut StdRng, depth: usize, bound: usize) -> Tree {
    let roll: f64 = rng.gen();
    if bound > 0 && (depth == 0 || roll < 0.3) {
        Tree::Var(rng.gen_range(0..bound))
    } else if depth > 0 && roll < 0.6 && bound > 0 {
        Tree::App(
            Box::new(random_tree(rng, depth - 1, bound)),
            Box::new(random_tree(rng, depth - 1, bound)),
        )
    } else {
        Tree::Abs(Box::new(random_tree(
            rng,
            depth.saturating_sub(1),
            bound + 1,
        )))
    }
}

/// Translates a tree into a term graph over Σ^λ_i with a correct
/// abstraction-prefix function whose scopes are extended by a random amount
/// past the last variable occurrence. Unused trailing binders are dropped at
/// random points; at a variable everything above its binder must go.
pub fn lazy_aphotg(rng: &mut StdRng, t: &Tree, var_arity: usize) -> ApHoTermGraph {
    struct Out {
        labels: Vec<Label>,
        args: Vec<Vec<VertexId>>,
        prefixes: Vec<Vec<VertexId>>,
        binder: Vec<VertexId>,
    }
    fn go(
        rng: &mut StdRng,
        t: &Tree,
        stack: &[usize],
        depth: usize,
        i: usize,
        out: &mut Out,
    ) -> VertexId {
        let mut free = BTreeSet::new();
        t.free(depth, &mut free);
        let droppable = stack.iter().rev().take_while(|x| !free.contains(x)).count();
        let drop = match t {
            Tree::Var(_) => droppable,
            _ if rng.gen_bool(0.5) => 0,
            _ => rng.gen_range(0..=droppable),
        };
        let stack = &stack[..stack.len() - drop];
        let id = VertexId(out.labels.len());
        out.prefixes
            .push(stack.iter().map(|&x| out.binder[x]).collect());
        match t {
            Tree::Var(k) => {
                out.labels.push(Label::Var);
                out.args
                    .push(if i == 1 { vec![out.binder[*k]] } else { vec![] });
            }
            Tree::App(a, b) => {
                out.labels.push(Label::App);
                out.args.push(vec![]);
                let x = go(rng, a, stack, depth, i, out);
                let y = go(rng, b, stack, depth, i, out);
                out.args[id.0] = vec![x, y];
            }
            Tree::Abs(b) => {
                out.labels.push(Label::Abs);
                out.args.push(vec![]);
                out.binder.truncate(depth);
                out.binder.push(id);
                let mut inner = stack.to_vec();
                inner.push(depth);
                let x = go(rng, b, &inner, depth + 1, i, out);
                out.args[id.0] = vec![x];
            }
        }
        id
    }
    let mut out = Out {
        labels: vec![],
        args: vec![],
        prefixes: vec![],
        binder: vec![],
    };
    go(rng, t, &[], 0, var_arity, &mut out);
    let n = out.labels.len();
    let names = (0..n).map(|k| format!("n{k}")).collect();
    let g = TermGraph::from_parts(
        Signature::higher_order(var_arity).unwrap(),
        out.labels,
        out.args,
        names,
        VertexId(0),
    )
    .unwrap();
    ApHoTermGraph::new(g, PrefixFn::new(out.prefixes)).expect("lazy translation is correct")
}

/// Re-signs a Σ^λ_1 graph as Σ^λ_0 by dropping variable back-links.
pub fn drop_var_backlinks(a: &ApHoTermGraph) -> ApHoTermGraph {
    let g = a.graph();
    let args = g
        .vertices()
        .map(|v| match g.label(v) {
            Label::Var => vec![],
            _ => g.args(v).to_vec(),
        })
        .collect();
    let g0 = TermGraph::from_parts(
        Signature::higher_order(0).unwrap(),
        g.vertices().map(|v| g.label(v)).collect(),
        args,
        g.names().to_vec(),
        g.root(),
    )
    .expect("variables are never the only path to a binder");
    ApHoTermGraph::new(g0, a.prefixes().clone()).unwrap()
}

/// A random correct ApHoTermGraph over Σ^λ_i with at most `max_len` vertices.
/// Half come from lazy tree translation, half from translating terms with
/// letrec (which gives sharing and cycles).
pub fn random_aphotg(rng: &mut StdRng, var_arity: usize, max_len: usize) -> ApHoTermGraph {
    loop {
        let a = if rng.gen_bool(0.5) {
            let depth = rng.gen_range(1..=5);
            let t = random_tree(rng, depth, 0);
            lazy_aphotg(rng, &t, 1)
        } else {
            let depth = rng.gen_range(1..=5);
            let t = random_term(rng, depth, 3);
            strip_delimiters(&term_to_graph(&t).unwrap())
        };
        if a.graph().len() > max_len {
            continue;
        }
        return if var_arity == 0 {
            drop_var_backlinks(&a)
        } else {
            a
        };
    }
}

/// A random FoLambdaGraph over Σ^λ_{i,j}. Either delimiters are inserted
/// into a random (often lazily scoped) ApHoTermGraph, or a translated term is collapsed (which
/// shares delimiters). Back-links missing from the target signature are
/// dropped, and then delimiters with identical successors and prefixes are
/// shared at random. The prefix check matters when j = 1: two delimiters
/// closing different binders could otherwise merge.
pub fn random_fo(rng: &mut StdRng, var_arity: usize, del_arity: usize) -> FoLambdaGraph {
    let f = loop {
        let roll: f64 = rng.gen();
        let f = if roll < 0.4 {
            let depth = rng.gen_range(2..=5);
            let t = random_tree(rng, depth, 0);
            insert_delimiters(&lazy_aphotg(rng, &t, 1), 2)
        } else if roll < 0.6 {
            insert_delimiters(&random_aphotg(rng, 1, 12), 2)
        } else {
            let depth = rng.gen_range(1..=5);
            let mut t = random_term(rng, depth, 3);
            if roll > 0.85 {
                // λx. x t t': both copies leave the scope of x through delimiters
                // that the collapse merges
                let copy = alpha_rename(&t, "c");
                t = Term::abs("x", Term::app(Term::app(Term::var("x"), t), copy));
            }
            let (c, _) = collapse(term_to_graph(&t).unwrap().graph());
            FoLambdaGraph::new(c).unwrap()
        };
        if f.graph().len() <= 16 {
            break f;
        }
    };
    share_some_delimiters(rng, &resign(&f, var_arity, del_arity))
}

/// Drops the back-links that Σ^λ_{i,j} does not have.
pub fn resign(f: &FoLambdaGraph, var_arity: usize, del_arity: usize) -> FoLambdaGraph {
    let g = f.graph();
    let sig = Signature::delimited(var_arity, del_arity).unwrap();
    let args = g
        .vertices()
        .map(|v| {
            let keep = sig.arity(g.label(v)).unwrap();
            g.args(v)[..keep].to_vec()
        })
        .collect();
    let h = TermGraph::from_parts(
        sig,
        g.vertices().map(|v| g.label(v)).collect(),
        args,
        g.names().to_vec(),
        g.root(),
    )
    .expect("forward edges reach every vertex");
    FoLambdaGraph::new(h).expect("dropping back-links keeps the prefix function correct")
}

pub fn share_some_delimiters(rng: &mut StdRng, f: &FoLambdaGraph) -> FoLambdaGraph {
    let mut f = f.clone();
    // merging the ends of two chains makes their predecessors identical, so repeat
    loop {
        let g = f.graph();
        let dels: Vec<VertexId> = g.vertices_labelled(Label::Del).collect();
        let mut pairs = Vec::new();
        for (k, &a) in dels.iter().enumerate() {
            for &b in &dels[k + 1..] {
                if g.args(a) == g.args(b) && f.prefix(a) == f.prefix(b) && rng.gen_bool(0.7) {
                    pairs.push((a, b));
                }
            }
        }
        if pairs.is_empty() {
            return f;
        }
        let part = merge_closure(g, &pairs).expect("equal labels");
        let (q, _) = quotient(g, &part).unwrap();
        f = FoLambdaGraph::new(q).expect("sharing identical delimiters keeps correctness");
    }
}

/// A random term graph with at most `max_len` vertices over a random signature.
pub fn random_graph(rng: &mut StdRng, max_len: usize) -> TermGraph {
    let sig = match rng.gen_range(0..6) {
        0 => Signature::higher_order(0),
        1 => Signature::higher_order(1),
        2 => Signature::delimited(0, 1),
        3 => Signature::delimited(0, 2),
        4 => Signature::delimited(1, 1),
        _ => Signature::delimited(1, 2),
    }
    .unwrap();
    let n = rng.gen_range(1..=max_len);
    let mut labels = vec![Label::App, Label::Abs, Label::Var];
    if sig.has_delimiters() {
        labels.push(Label::Del);
    }
    let vertices: Vec<(String, Label, Vec<String>)> = (0..n)
        .map(|v| {
            let l = *labels.choose(rng).unwrap();
            let arity = sig.arity(l).unwrap();
            let args = (0..arity)
                .map(|_| format!("v{}", rng.gen_range(0..n)))
                .collect();
            (format!("v{v}"), l, args)
        })
        .collect();
    TermGraph::build_pruned(sig, vertices, "v0".into())
        .unwrap()
        .0
}

// ---------------------------------------------------------------- oracles

/// All set partitions of `0..n` as block-index vectors (restricted growth strings).
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if k == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max + 1 {
            cur.push(b);
            rec(k + 1, n, cur, max.max(b), out);
            cur.pop();
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut cur = vec![0];
    rec(1, n, &mut cur, 0, &mut out);
    out
}

/// Whether the block assignment is a bisimulation equivalence: related
/// vertices agree on labels and on the blocks of all their successors.
pub fn is_bisimulation_oracle(g: &TermGraph, blocks: &[usize]) -> bool {
    for u in g.vertices() {
        for w in g.vertices() {
            if blocks[u.0] != blocks[w.0] {
                continue;
            }
            if g.label(u) != g.label(w) {
                return false;
            }
            let same = g
                .args(u)
                .iter()
                .zip(g.args(w))
                .all(|(a, b)| blocks[a.0] == blocks[b.0]);
            if !same {
                return false;
            }
        }
    }
    true
}

/// The coarsest bisimulation equivalence, by trying every set partition.
pub fn coarsest_bisimulation_oracle(g: &TermGraph) -> Vec<usize> {
    set_partitions(g.len())
        .into_iter()
        .filter(|b| is_bisimulation_oracle(g, b))
        .min_by_key(|b| b.iter().max().map_or(0, |m| m + 1))
        .unwrap()
}

/// Every homomorphism from `g1` to `g2`, by trying every vertex map.
pub fn all_homomorphisms(g1: &TermGraph, g2: &TermGraph) -> Vec<Vec<usize>> {
    let (n1, n2) = (g1.len(), g2.len());
    let mut out = Vec::new();
    if g1.signature() != g2.signature() {
        return out;
    }
    let mut map = vec![0usize; n1];
    loop {
        let ok = map[g1.root().0] == g2.root().0
            && g1.vertices().all(|v| {
                let t = VertexId(map[v.0]);
                g1.label(v) == g2.label(t)
                    && g1
                        .args(v)
                        .iter()
                        .zip(g2.args(t))
                        .all(|(a, b)| map[a.0] == b.0)
            });
        if ok {
            out.push(map.clone());
        }
        // odometer
        let mut k = 0;
        loop {
            if k == n1 {
                return out;
            }
            map[k] += 1;
            if map[k] < n2 {
                break;
            }
            map[k] = 0;
            k += 1;
        }
    }
}

fn subsets<T: Copy + Ord>(items: &[T]) -> Vec<BTreeSet<T>> {
    (0u32..(1 << items.len()))
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(k, _)| mask & (1 << k) != 0)
                .map(|(_, &x)| x)
                .collect()
        })
        .collect()
}

/// Checks the scope-function conditions directly from their definitions.
pub fn scope_valid_oracle(g: &TermGraph, sc: &BTreeMap<VertexId, BTreeSet<VertexId>>) -> bool {
    let abs: Vec<VertexId> = g.vertices_labelled(Label::Abs).collect();
    let proper = |v: VertexId, w: VertexId| w != v && sc[&v].contains(&w);
    for &v in &abs {
        if proper(v, g.root()) || !sc[&v].contains(&v) {
            return false;
        }
        for &v1 in &abs {
            if proper(v, v1) && !sc[&v1].iter().all(|&w| proper(v, w)) {
                return false;
            }
        }
        for (w, _, t) in g.edges() {
            if proper(v, t) && !sc[&v].contains(&w) {
                return false;
            }
        }
    }
    for w in g.vertices_labelled(Label::Var) {
        if !abs.iter().any(|&v| proper(v, w)) {
            return false;
        }
        if g.signature().var_backlinks() {
            let b = g.args(w)[0];
            if g.label(b) != Label::Abs {
                return false;
            }
            if abs
                .iter()
                .any(|&v| sc[&v].contains(&w) != sc[&v].contains(&b))
            {
                return false;
            }
        }
    }
    true
}

/// Every valid scope function of `g`, by enumerating a candidate set per
/// abstraction and filtering the product.
pub fn all_scope_functions(g: &TermGraph) -> Vec<ScopeFn> {
    let abs: Vec<VertexId> = g.vertices_labelled(Label::Abs).collect();
    let per_abs: Vec<Vec<BTreeSet<VertexId>>> = abs
        .iter()
        .map(|&v| {
            let others: Vec<VertexId> = g.vertices().filter(|&w| w != v && w != g.root()).collect();
            subsets(&others)
                .into_iter()
                .map(|mut s| {
                    s.insert(v);
                    s
                })
                // (closed) only involves one abstraction, so prune early
                .filter(|s| {
                    g.edges()
                        .all(|(w, _, t)| t == v || !s.contains(&t) || s.contains(&w))
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut pick = vec![0usize; abs.len()];
    if per_abs.iter().any(Vec::is_empty) {
        return out;
    }
    loop {
        let sc: BTreeMap<VertexId, BTreeSet<VertexId>> = abs
            .iter()
            .zip(&pick)
            .zip(&per_abs)
            .map(|((&v, &k), cands)| (v, cands[k].clone()))
            .collect();
        if scope_valid_oracle(g, &sc) {
            out.push(ScopeFn::new(sc));
        }
        let mut k = 0;
        loop {
            if k == abs.len() {
                return out;
            }
            pick[k] += 1;
            if pick[k] < per_abs[k].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
    }
}

/// All simple paths from the root to `target`, as vertex sequences.
pub fn simple_root_paths(g: &TermGraph, target: VertexId) -> Vec<Vec<VertexId>> {
    fn rec(g: &TermGraph, cur: &mut Vec<VertexId>, target: VertexId, out: &mut Vec<Vec<VertexId>>) {
        let last = *cur.last().unwrap();
        if last == target {
            out.push(cur.clone());
            return;
        }
        for &a in g.args(last) {
            if !cur.contains(&a) {
                cur.push(a);
                rec(g, cur, target, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(g, &mut vec![g.root()], target, &mut out);
    out
}

/// Renames every bound name (λ and letrec) to a fresh one, respecting shadowing.
pub fn alpha_rename(t: &Term, tag: &str) -> Term {
    fn go(t: &Term, env: &mut Vec<(String, String)>, tag: &str, n: &mut usize) -> Term {
        let lookup = |env: &[(String, String)], x: &str| {
            env.iter()
                .rev()
                .find(|(old, _)| old == x)
                .map(|(_, new)| new.clone())
                .unwrap_or_else(|| x.to_string())
        };
        let fresh = |n: &mut usize| {
            *n += 1;
            format!("{tag}{n}")
        };
        match t {
            Term::Var(x) => Term::Var(lookup(env, x)),
            Term::App(f, a) => Term::app(go(f, env, tag, n), go(a, env, tag, n)),
            Term::Abs(x, b) => {
                let y = fresh(n);
                env.push((x.clone(), y.clone()));
                let body = go(b, env, tag, n);
                env.pop();
                Term::Abs(y, Box::new(body))
            }
            Term::Letrec(bs, body) => {
                let renamed: Vec<String> = bs.iter().map(|_| fresh(n)).collect();
                for ((x, _), y) in bs.iter().zip(&renamed) {
                    env.push((x.clone(), y.clone()));
                }
                let bs2 = bs
                    .iter()
                    .zip(&renamed)
                    .map(|((_, rhs), y)| (y.clone(), go(rhs, env, tag, n)))
                    .collect();
                let body2 = go(body, env, tag, n);
                env.truncate(env.len() - bs.len());
                Term::Letrec(bs2, Box::new(body2))
            }
        }
    }
    go(t, &mut Vec::new(), tag, &mut 0)
}

/// Property-test configuration without on-disk failure persistence.
pub fn config(cases: u32) -> proptest::prelude::ProptestConfig {
    proptest::prelude::ProptestConfig {
        cases,
        failure_persistence: None,
        ..Default::default()
    }
}
