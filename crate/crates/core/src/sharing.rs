//! Homomorphisms, bisimulation collapse and maximal sharing.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::fo::{EagerMode, FoError, FoLambdaGraph};
use crate::graph::{Label, Signature, TermGraph, VertexId, VertexMap};
use crate::ho::{ApHoTermGraph, HoTermGraph};
use crate::report::ValidationReport;
use crate::transform::{insert_delimiters, prefix_to_scope, scope_to_prefix, strip_delimiters};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SharingError {
    #[error("maximal sharing needs variable back-links, got signature {0}")]
    VariantMismatch(Signature),
    #[error("input is not eager-scope (offending vertices: {})", .0.join(", "))]
    NotEagerScope(Vec<String>),
    #[error("partition is not a congruence: vertices {0} and {1} cannot share")]
    NotCongruence(String, String),
    #[error("collapsed graph is not a λ-term-graph")]
    Invalid(ValidationReport),
}

/// The unique homomorphism `g1 ↠ g2`, if one exists.
pub fn find_homomorphism(g1: &TermGraph, g2: &TermGraph) -> Option<VertexMap> {
    if g1.signature() != g2.signature() {
        return None;
    }
    let mut map: Vec<Option<VertexId>> = vec![None; g1.len()];
    let mut queue = VecDeque::from([(g1.root(), g2.root())]);
    map[g1.root().0] = Some(g2.root());
    while let Some((u, w)) = queue.pop_front() {
        if g1.label(u) != g2.label(w) {
            return None;
        }
        for (&a, &b) in g1.args(u).iter().zip(g2.args(w)) {
            match map[a.0] {
                None => {
                    map[a.0] = Some(b);
                    queue.push_back((a, b));
                }
                Some(x) if x != b => return None,
                Some(_) => {}
            }
        }
    }
    map.into_iter()
        .collect::<Option<Vec<_>>>()
        .map(VertexMap::new)
}

/// Whether `h` preserves labels, arguments and the root.
pub fn is_homomorphism(h: &VertexMap, g1: &TermGraph, g2: &TermGraph) -> bool {
    h.len() == g1.len()
        && g1.signature() == g2.signature()
        && h.iter().all(|(_, t)| g2.contains(t))
        && h.get(g1.root()) == g2.root()
        && g1.vertices().all(|v| {
            let t = h.get(v);
            g1.label(v) == g2.label(t)
                && g1
                    .args(v)
                    .iter()
                    .zip(g2.args(t))
                    .all(|(&a, &b)| h.get(a) == b)
        })
}

/// Annotated graphs whose homomorphisms must also respect the annotation.
pub trait Lift {
    fn carrier_graph(&self) -> &TermGraph;

    /// Whether the carrier homomorphism `h` respects the annotations of `self` and `target`.
    fn respects(&self, h: &VertexMap, target: &Self) -> bool;
}

impl Lift for HoTermGraph {
    fn carrier_graph(&self) -> &TermGraph {
        self.graph()
    }

    fn respects(&self, h: &VertexMap, target: &Self) -> bool {
        self.scopes().iter().all(|(v, sc)| {
            let image: BTreeSet<VertexId> = sc.iter().map(|&w| h.get(w)).collect();
            target.scopes().get(h.get(v)) == Some(&image)
        })
    }
}

impl Lift for ApHoTermGraph {
    fn carrier_graph(&self) -> &TermGraph {
        self.graph()
    }

    fn respects(&self, h: &VertexMap, target: &Self) -> bool {
        self.prefixes()
            .iter()
            .all(|(v, p)| h.map_word(p) == target.prefix(h.get(v)))
    }
}

impl Lift for FoLambdaGraph {
    fn carrier_graph(&self) -> &TermGraph {
        self.graph()
    }

    fn respects(&self, _: &VertexMap, _: &Self) -> bool {
        true
    }
}

/// Whether the carrier homomorphism `h` is also a homomorphism of the
/// annotated graphs.
pub fn lift_homomorphism<T: Lift>(h: &VertexMap, x1: &T, x2: &T) -> bool {
    is_homomorphism(h, x1.carrier_graph(), x2.carrier_graph()) && x1.respects(h, x2)
}

/// Whether `h` identifies only vertices labelled `label`.
pub fn is_label_restricted(h: &VertexMap, g1: &TermGraph, label: Label) -> bool {
    let mut first: HashMap<VertexId, VertexId> = HashMap::new();
    let mut shared = vec![false; g1.len()];
    for (v, t) in h.iter() {
        if let Some(&u) = first.get(&t) {
            shared[u.0] = true;
            shared[v.0] = true;
        } else {
            first.insert(t, v);
        }
    }
    g1.vertices().all(|v| !shared[v.0] || g1.label(v) == label)
}

/// Equivalence on the vertices of a graph; block ids are numbered by first
/// occurrence in vertex order, so equal partitions compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    block_of: Vec<usize>,
    count: usize,
}

impl Partition {
    /// Partition from arbitrary block keys.
    pub fn new<K: std::hash::Hash + Eq>(keys: impl IntoIterator<Item = K>) -> Self {
        let mut ids = HashMap::new();
        let block_of = keys
            .into_iter()
            .map(|k| {
                let n = ids.len();
                *ids.entry(k).or_insert(n)
            })
            .collect();
        Partition {
            block_of,
            count: ids.len(),
        }
    }

    pub fn discrete(n: usize) -> Self {
        Partition::new(0..n)
    }

    pub fn block(&self, v: VertexId) -> usize {
        self.block_of[v.0]
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    pub fn same_block(&self, a: VertexId, b: VertexId) -> bool {
        self.block(a) == self.block(b)
    }

    pub fn blocks(&self) -> Vec<Vec<VertexId>> {
        let mut blocks = vec![Vec::new(); self.count];
        for (v, &b) in self.block_of.iter().enumerate() {
            blocks[b].push(VertexId(v));
        }
        blocks
    }

    /// Kernel of a vertex map.
    pub fn of_map(h: &VertexMap) -> Self {
        Partition::new(h.iter().map(|(_, t)| t))
    }

    /// Every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        let mut image: HashMap<usize, usize> = HashMap::new();
        self.block_of
            .iter()
            .zip(&coarser.block_of)
            .all(|(&a, &b)| *image.entry(a).or_insert(b) == b)
    }
}

/// The coarsest partition compatible with labels and index-wise successors,
/// by iterated signature refinement.
pub fn coarsest_bisimulation(g: &TermGraph) -> Partition {
    let mut part = Partition::new(g.vertices().map(|v| g.label(v)));
    loop {
        let next = Partition::new(g.vertices().map(|v| {
            let succ: Vec<usize> = g.args(v).iter().map(|&a| part.block(a)).collect();
            (part.block(v), succ)
        }));
        if next.count == part.count {
            return next;
        }
        part = next;
    }
}

/// Whether `part` identifies only vertices with equal labels and pairwise
/// equivalent successors.
fn check_congruence(g: &TermGraph, part: &Partition) -> Result<Vec<VertexId>, SharingError> {
    let mut rep: Vec<Option<VertexId>> = vec![None; part.count()];
    for v in g.vertices() {
        let b = part.block(v);
        match rep[b] {
            None => rep[b] = Some(v),
            Some(r) => {
                let same = g.label(r) == g.label(v)
                    && g.args(r)
                        .iter()
                        .zip(g.args(v))
                        .all(|(&x, &y)| part.same_block(x, y));
                if !same {
                    return Err(SharingError::NotCongruence(
                        g.name(r).into(),
                        g.name(v).into(),
                    ));
                }
            }
        }
    }
    Ok(rep
        .into_iter()
        .map(|r| r.expect("blocks are nonempty"))
        .collect())
}

/// Quotient of `g` by a congruence. Each block is represented by its least
/// vertex (whose name it keeps); the result is numbered in depth-first order
/// from the root. Returns the projection onto the quotient.
pub fn quotient(g: &TermGraph, part: &Partition) -> Result<(TermGraph, VertexMap), SharingError> {
    if part.len() != g.len() {
        return Err(SharingError::NotCongruence(
            format!("{} vertices", g.len()),
            format!("{} partition entries", part.len()),
        ));
    }
    let reps = check_congruence(g, part)?;
    // number blocks by depth-first preorder over the quotient, lowest index first
    let mut order = vec![usize::MAX; part.count()];
    let mut visit = Vec::with_capacity(part.count());
    let mut stack = vec![part.block(g.root())];
    while let Some(b) = stack.pop() {
        if order[b] != usize::MAX {
            continue;
        }
        order[b] = visit.len();
        visit.push(b);
        for &a in g.args(reps[b]).iter().rev() {
            if order[part.block(a)] == usize::MAX {
                stack.push(part.block(a));
            }
        }
    }
    let labels = visit.iter().map(|&b| g.label(reps[b])).collect();
    let args = visit
        .iter()
        .map(|&b| {
            g.args(reps[b])
                .iter()
                .map(|&a| VertexId(order[part.block(a)]))
                .collect()
        })
        .collect();
    let names = visit.iter().map(|&b| g.name(reps[b]).to_string()).collect();
    let q = TermGraph::from_parts(g.signature(), labels, args, names, VertexId(0))
        .expect("quotient of a term graph is a term graph");
    let h = VertexMap::new(
        g.vertices()
            .map(|v| VertexId(order[part.block(v)]))
            .collect(),
    );
    Ok((q, h))
}

/// Bisimulation collapse: the maximally shared homomorphic image of `g`,
/// with the projection onto it.
pub fn collapse(g: &TermGraph) -> (TermGraph, VertexMap) {
    quotient(g, &coarsest_bisimulation(g)).expect("the coarsest bisimulation is a congruence")
}

/// Least congruence identifying every given pair, or `None` if that would
/// identify vertices with different labels.
pub fn merge_closure(g: &TermGraph, pairs: &[(VertexId, VertexId)]) -> Option<Partition> {
    let mut parent: Vec<usize> = (0..g.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut work: Vec<(VertexId, VertexId)> = pairs.to_vec();
    while let Some((a, b)) = work.pop() {
        let (ra, rb) = (find(&mut parent, a.0), find(&mut parent, b.0));
        if ra == rb {
            continue;
        }
        let (ra, rb) = (VertexId(ra), VertexId(rb));
        if g.label(ra) != g.label(rb) {
            return None;
        }
        parent[rb.0] = ra.0;
        work.extend(g.args(ra).iter().copied().zip(g.args(rb).iter().copied()));
    }
    Some(Partition::new((0..g.len()).map(|v| find(&mut parent, v))))
}

/// Whether the two graphs have isomorphic collapses.
pub fn are_bisimilar(g1: &TermGraph, g2: &TermGraph) -> bool {
    g1.signature() == g2.signature() && collapse(g1).0.isomorphic(&collapse(g2).0).is_some()
}

/// Maximal sharing of a first-order λ-term-graph with eager scope. The
/// collapse stays inside the class, so its prefix function is re-inferred.
pub fn max_share_fo(f: &FoLambdaGraph, mode: EagerMode) -> Result<FoLambdaGraph, SharingError> {
    let sig = f.graph().signature();
    let violations = f
        .eager_violations(mode)
        .map_err(|_| SharingError::VariantMismatch(sig))?;
    if !violations.is_empty() {
        let names = violations
            .iter()
            .map(|&v| f.graph().name(v).to_string())
            .collect();
        return Err(SharingError::NotEagerScope(names));
    }
    let (c, _) = collapse(f.graph());
    FoLambdaGraph::new(c).map_err(|e| match e {
        FoError::NotLambdaTermGraph(r) => SharingError::Invalid(r),
        other => unreachable!("collapse keeps the signature: {other}"),
    })
}

/// Maximally shared form of a higher-order term graph, computed through the
/// delimiter representation: prefix, insert delimiters, collapse, strip
/// delimiters, scope.
pub fn max_share_ho(h: &HoTermGraph, mode: EagerMode) -> Result<HoTermGraph, SharingError> {
    let sig = h.graph().signature();
    if !sig.var_backlinks() {
        return Err(SharingError::VariantMismatch(sig));
    }
    let f = insert_delimiters(&scope_to_prefix(h), 2);
    let shared = max_share_fo(&f, mode)?;
    Ok(prefix_to_scope(&strip_delimiters(&shared)))
}
