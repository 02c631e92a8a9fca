//! First-order λ-term-graphs with scope delimiters over Σ^λ_{i,j}.

use std::collections::VecDeque;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::graph::{Label, Signature, TermGraph, VertexId};
use crate::ho::{
    check_prefix_conditions, check_prefix_domain, HoError, Prefix, PrefixFn, PrefixMode,
};
use crate::report::{Condition, ValidationReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FoError {
    #[error("expected a signature with delimiters, got {0}")]
    NoDelimiters(Signature),
    #[error("eager scope is only defined with variable back-links, got signature {0}")]
    VariantMismatch(Signature),
    #[error("graph admits no correct abstraction-prefix function")]
    NotLambdaTermGraph(ValidationReport),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
}

impl From<HoError> for FoError {
    fn from(e: HoError) -> Self {
        match e {
            HoError::DomainMismatch(m) => FoError::DomainMismatch(m),
            HoError::Invalid(r) => FoError::NotLambdaTermGraph(r),
            other => FoError::DomainMismatch(other.to_string()),
        }
    }
}

/// Checks the first-order prefix conditions: (root), (λ) and (@) as
/// equalities, (0)₀, (0)₁, (S)₁ and, with delimiter back-links, (S)₂.
pub fn validate_prefix_fo(g: &TermGraph, p: &PrefixFn) -> Result<ValidationReport, FoError> {
    check_prefix_domain(g, p)?;
    Ok(check_prefix_conditions(g, p, PrefixMode::Exact))
}

/// Order in which [`infer_prefix`] visits its worklist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Traversal {
    DepthFirst,
    BreadthFirst,
    Random(u64),
}

/// The prefix a forward edge `u →k c` forces on `c`, or `None` for back-links
/// and for a delimiter with an empty prefix.
fn forced_prefix(g: &TermGraph, pu: &[VertexId], u: VertexId, k: usize) -> Option<Option<Prefix>> {
    if g.is_backlink(u, k) {
        return None;
    }
    Some(match g.label(u) {
        Label::Abs => {
            let mut w = pu.to_vec();
            w.push(u);
            Some(w)
        }
        Label::App => Some(pu.to_vec()),
        Label::Del => pu.split_last().map(|(_, rest)| rest.to_vec()),
        Label::Var => unreachable!("variable edges are back-links"),
    })
}

/// Computes the unique correct abstraction-prefix function by propagating the
/// forced equalities from the root, then re-validating every condition.
/// On failure the report lists the conflicts found or the violated conditions.
pub fn infer_prefix(g: &TermGraph, order: Traversal) -> Result<PrefixFn, ValidationReport> {
    let mut assigned: Vec<Option<Prefix>> = vec![None; g.len()];
    let mut report = ValidationReport::new();
    let mut rng = match order {
        Traversal::Random(seed) => Some(StdRng::seed_from_u64(seed)),
        _ => None,
    };
    let mut work: VecDeque<VertexId> = VecDeque::new();
    assigned[g.root().0] = Some(Vec::new());
    work.push_back(g.root());

    while !work.is_empty() {
        let u = match order {
            Traversal::DepthFirst => work.pop_back(),
            Traversal::BreadthFirst => work.pop_front(),
            Traversal::Random(_) => {
                let i = rng.as_mut().unwrap().gen_range(0..work.len());
                work.swap_remove_back(i)
            }
        }
        .unwrap();
        let pu = assigned[u.0].clone().unwrap();
        for (k, &c) in g.args(u).iter().enumerate() {
            match forced_prefix(g, &pu, u, k) {
                None => {}
                Some(None) => report.push(Condition::PrefixDel1, [u, c]),
                Some(Some(q)) => match &assigned[c.0] {
                    None => {
                        assigned[c.0] = Some(q);
                        work.push_back(c);
                    }
                    Some(existing) if *existing != q => report.push(Condition::Conflict, [u, c]),
                    Some(_) => {}
                },
            }
        }
    }
    for v in g.vertices() {
        if assigned[v.0].is_none() {
            report.push(Condition::Unreached, [v]);
        }
    }
    if !report.is_pass() {
        return Err(report);
    }
    let p = PrefixFn::new(assigned.into_iter().map(Option::unwrap).collect());
    let check = check_prefix_conditions(g, &p, PrefixMode::Exact);
    if check.is_pass() {
        Ok(p)
    } else {
        Err(check)
    }
}

/// Whether `g` admits a correct abstraction-prefix function.
pub fn is_lambda_term_graph(g: &TermGraph) -> bool {
    infer_prefix(g, Traversal::DepthFirst).is_ok()
}

/// How [`FoLambdaGraph::is_eager_scope`] treats delimiter vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EagerMode {
    /// Delimiter vertices carry no obligation of their own.
    #[default]
    Exempt,
    /// Every vertex with a nonempty prefix, delimiters included.
    Strict,
}

/// A term graph over Σ^λ_{i,j} together with its (unique) correct
/// abstraction-prefix function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoLambdaGraph {
    graph: TermGraph,
    prefixes: PrefixFn,
}

impl FoLambdaGraph {
    pub fn new(graph: TermGraph) -> Result<Self, FoError> {
        if !graph.signature().has_delimiters() {
            return Err(FoError::NoDelimiters(graph.signature()));
        }
        let prefixes =
            infer_prefix(&graph, Traversal::DepthFirst).map_err(FoError::NotLambdaTermGraph)?;
        Ok(FoLambdaGraph { graph, prefixes })
    }

    pub(crate) fn new_unchecked(graph: TermGraph, prefixes: PrefixFn) -> Self {
        debug_assert!(validate_prefix_fo(&graph, &prefixes).is_ok_and(|r| r.is_pass()));
        FoLambdaGraph { graph, prefixes }
    }

    pub fn graph(&self) -> &TermGraph {
        &self.graph
    }

    pub fn prefixes(&self) -> &PrefixFn {
        &self.prefixes
    }

    pub fn prefix(&self, v: VertexId) -> &[VertexId] {
        self.prefixes.get(v)
    }

    pub fn into_graph(self) -> TermGraph {
        self.graph
    }

    /// Every vertex whose prefix ends in `v` reaches `v`.
    pub fn is_fully_back_linked(&self) -> bool {
        self.graph.vertices().all(|w| match self.prefix(w).last() {
            Some(&v) => self.graph.reaches_properly(w, v),
            None => true,
        })
    }

    /// Vertices violating the eager-scope condition.
    pub fn eager_violations(&self, mode: EagerMode) -> Result<Vec<VertexId>, FoError> {
        let g = &self.graph;
        if !g.signature().var_backlinks() {
            return Err(FoError::VariantMismatch(g.signature()));
        }
        Ok(g.vertices()
            .filter(|&w| !(mode == EagerMode::Exempt && g.label(w) == Label::Del))
            .filter(|&w| !self.reaches_own_variable(w))
            .collect())
    }

    /// Eager scope: every vertex `w` with prefix `p·v` reaches, through
    /// vertices whose prefix extends `p·v`, a variable vertex bound by `v`.
    pub fn is_eager_scope(&self, mode: EagerMode) -> Result<bool, FoError> {
        Ok(self.eager_violations(mode)?.is_empty())
    }

    fn reaches_own_variable(&self, w: VertexId) -> bool {
        let g = &self.graph;
        let pw = self.prefix(w);
        let Some(&v) = pw.last() else { return true };
        let mut seen = vec![false; g.len()];
        let mut stack = vec![w];
        seen[w.0] = true;
        while let Some(u) = stack.pop() {
            if g.label(u) == Label::Var && g.args(u)[0] == v {
                return true;
            }
            for &c in g.args(u) {
                if !seen[c.0] && self.prefix(c).starts_with(pw) {
                    seen[c.0] = true;
                    stack.push(c);
                }
            }
        }
        false
    }
}
