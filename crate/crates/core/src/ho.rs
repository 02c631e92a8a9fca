//! Higher-order term graphs: graphs over Σ^λ_i endowed with a scope function
//! ([`HoTermGraph`]) or with an abstraction-prefix function ([`ApHoTermGraph`]).

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::{Label, Signature, TermGraph, VertexId};
use crate::report::{Condition, ValidationReport};

/// A word of abstraction vertices.
pub type Prefix = Vec<VertexId>;

/// Abstraction-prefix function: a word of vertices for every vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrefixFn(Vec<Prefix>);

impl PrefixFn {
    pub fn new(prefixes: Vec<Prefix>) -> Self {
        PrefixFn(prefixes)
    }

    /// Prefix function built from vertex names; vertices not mentioned get `ε`.
    pub fn from_names(g: &TermGraph, entries: &[(&str, &[&str])]) -> Result<Self, HoError> {
        let mut p = vec![Vec::new(); g.len()];
        for (v, word) in entries {
            let v = lookup(g, v)?;
            p[v.0] = word
                .iter()
                .map(|w| lookup(g, w))
                .collect::<Result<_, _>>()?;
        }
        Ok(PrefixFn(p))
    }

    pub fn get(&self, v: VertexId) -> &[VertexId] {
        &self.0[v.0]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, &[VertexId])> + '_ {
        self.0
            .iter()
            .enumerate()
            .map(|(i, p)| (VertexId(i), p.as_slice()))
    }

    pub fn into_inner(self) -> Vec<Prefix> {
        self.0
    }
}

/// Scope function: a set of vertices for every abstraction vertex.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScopeFn(BTreeMap<VertexId, BTreeSet<VertexId>>);

impl ScopeFn {
    pub fn new(scopes: BTreeMap<VertexId, BTreeSet<VertexId>>) -> Self {
        ScopeFn(scopes)
    }

    pub fn from_names(g: &TermGraph, entries: &[(&str, &[&str])]) -> Result<Self, HoError> {
        let mut m = BTreeMap::new();
        for (v, set) in entries {
            let set = set.iter().map(|w| lookup(g, w)).collect::<Result<_, _>>()?;
            m.insert(lookup(g, v)?, set);
        }
        Ok(ScopeFn(m))
    }

    pub fn get(&self, v: VertexId) -> Option<&BTreeSet<VertexId>> {
        self.0.get(&v)
    }

    /// `Sc(v)`; panics if `v` is not in the domain.
    pub fn scope(&self, v: VertexId) -> &BTreeSet<VertexId> {
        &self.0[&v]
    }

    pub fn contains(&self, v: VertexId, w: VertexId) -> bool {
        self.0.get(&v).is_some_and(|s| s.contains(&w))
    }

    /// `w ∈ Sc(v) \ {v}`.
    pub fn contains_proper(&self, v: VertexId, w: VertexId) -> bool {
        v != w && self.contains(v, w)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, &BTreeSet<VertexId>)> + '_ {
        self.0.iter().map(|(v, s)| (*v, s))
    }

    pub fn domain(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.0.keys().copied()
    }

    pub fn insert(&mut self, v: VertexId, scope: BTreeSet<VertexId>) {
        self.0.insert(v, scope);
    }
}

fn lookup(g: &TermGraph, name: &str) -> Result<VertexId, HoError> {
    g.vertex(name)
        .ok_or_else(|| HoError::DomainMismatch(format!("no vertex named `{name}`")))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HoError {
    #[error("expected a graph over Σ^λ_i without delimiters, got signature {0}")]
    DelimitedSignature(Signature),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("operation needs variable back-links (i = 1), got signature {0}")]
    NeedsBacklinks(Signature),
    #[error("validation failed")]
    Invalid(ValidationReport),
}

fn require_higher_order(g: &TermGraph) -> Result<(), HoError> {
    if g.signature().has_delimiters() {
        Err(HoError::DelimitedSignature(g.signature()))
    } else {
        Ok(())
    }
}

fn check_scope_domain(g: &TermGraph, sc: &ScopeFn) -> Result<(), HoError> {
    let abs: BTreeSet<VertexId> = g.vertices_labelled(Label::Abs).collect();
    let dom: BTreeSet<VertexId> = sc.domain().collect();
    if abs != dom {
        return Err(HoError::DomainMismatch(
            "scope function domain differs from the abstraction vertices".into(),
        ));
    }
    if sc.iter().any(|(_, s)| s.iter().any(|w| !g.contains(*w))) {
        return Err(HoError::DomainMismatch(
            "scope contains an unknown vertex".into(),
        ));
    }
    Ok(())
}

/// Checks the scope-function conditions (root), (self), (nest), (closed),
/// (scope)₀ and, for graphs with variable back-links, (scope)₁.
pub fn validate_scope(g: &TermGraph, sc: &ScopeFn) -> Result<ValidationReport, HoError> {
    require_higher_order(g)?;
    check_scope_domain(g, sc)?;
    let mut report = ValidationReport::new();
    let abs: Vec<VertexId> = sc.domain().collect();
    let root = g.root();

    for &v in &abs {
        if sc.contains_proper(v, root) {
            report.push(Condition::ScopeRoot, [v, root]);
        }
        if !sc.contains(v, v) {
            report.push(Condition::ScopeSelf, [v]);
        }
    }
    for &v0 in &abs {
        for &v1 in &abs {
            if sc.contains_proper(v0, v1)
                && sc.scope(v1).iter().any(|w| !sc.contains_proper(v0, *w))
            {
                report.push(Condition::ScopeNest, [v0, v1]);
            }
        }
    }
    for (w, _, wk) in g.edges() {
        for &v in &abs {
            if sc.contains_proper(v, wk) && !sc.contains(v, w) {
                report.push(Condition::ScopeClosed, [v, w, wk]);
            }
        }
    }
    for w in g.vertices_labelled(Label::Var) {
        if !abs.iter().any(|&v0| sc.contains_proper(v0, w)) {
            report.push(Condition::Scope0, [w]);
        }
        if g.signature().var_backlinks() {
            let w0 = g.args(w)[0];
            if g.label(w0) != Label::Abs {
                report.push(Condition::Scope1, [w, w0]);
                continue;
            }
            for &v in &abs {
                if sc.contains(v, w) != sc.contains(v, w0) {
                    report.push(Condition::Scope1, [w, w0, v]);
                }
            }
        }
    }
    Ok(report)
}

/// Whether the prefix conditions are the `≤` forms (higher-order graphs) or the
/// equalities required on graphs with delimiters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum PrefixMode {
    Bounded,
    Exact,
}

pub(crate) fn check_prefix_domain(g: &TermGraph, p: &PrefixFn) -> Result<(), HoError> {
    if p.len() != g.len() {
        return Err(HoError::DomainMismatch(format!(
            "prefix function has {} entries for {} vertices",
            p.len(),
            g.len()
        )));
    }
    if p.iter()
        .any(|(_, word)| word.iter().any(|v| !g.contains(*v)))
    {
        return Err(HoError::DomainMismatch(
            "prefix contains an unknown vertex".into(),
        ));
    }
    Ok(())
}

fn is_word_prefix(short: &[VertexId], long: &[VertexId]) -> bool {
    long.starts_with(short)
}

fn concat(p: &[VertexId], v: VertexId) -> Prefix {
    let mut w = p.to_vec();
    w.push(v);
    w
}

/// Shared prefix-condition checker. The domain must already be checked.
pub(crate) fn check_prefix_conditions(
    g: &TermGraph,
    p: &PrefixFn,
    mode: PrefixMode,
) -> ValidationReport {
    let mut report = ValidationReport::new();
    let sig = g.signature();
    if !p.get(g.root()).is_empty() {
        report.push(Condition::PrefixRoot, [g.root()]);
    }
    for w in g.vertices() {
        let pw = p.get(w);
        match g.label(w) {
            Label::Abs => {
                let w0 = g.args(w)[0];
                let bound = concat(pw, w);
                let ok = match mode {
                    PrefixMode::Bounded => is_word_prefix(p.get(w0), &bound),
                    PrefixMode::Exact => p.get(w0) == bound.as_slice(),
                };
                if !ok {
                    report.push(Condition::PrefixAbs, [w, w0]);
                }
            }
            Label::App => {
                for &wk in g.args(w) {
                    let ok = match mode {
                        PrefixMode::Bounded => is_word_prefix(p.get(wk), pw),
                        PrefixMode::Exact => p.get(wk) == pw,
                    };
                    if !ok {
                        report.push(Condition::PrefixApp, [w, wk]);
                    }
                }
            }
            Label::Var => {
                if pw.is_empty() {
                    report.push(Condition::PrefixVar0, [w]);
                }
                if sig.var_backlinks() {
                    let w0 = g.args(w)[0];
                    if g.label(w0) != Label::Abs || concat(p.get(w0), w0) != pw {
                        report.push(Condition::PrefixVar1, [w, w0]);
                    }
                }
            }
            Label::Del => {
                let w0 = g.args(w)[0];
                let pw0 = p.get(w0);
                if pw.len() != pw0.len() + 1 || !pw.starts_with(pw0) {
                    report.push(Condition::PrefixDel1, [w, w0]);
                }
                if sig.del_backlinks() {
                    let w1 = g.args(w)[1];
                    if g.label(w1) != Label::Abs || concat(p.get(w1), w1) != pw {
                        report.push(Condition::PrefixDel2, [w, w1]);
                    }
                }
            }
        }
        // entries are abstractions, pairwise distinct, and never the vertex itself
        let mut seen = BTreeSet::new();
        for &e in pw {
            if g.label(e) != Label::Abs || e == w || !seen.insert(e) {
                report.push(Condition::PrefixEntries, [w, e]);
            }
        }
    }
    report
}

/// Checks the (≤-form) abstraction-prefix conditions (root), (λ), (@), (0)₀
/// and, with variable back-links, (0)₁.
pub fn validate_prefix_ho(g: &TermGraph, p: &PrefixFn) -> Result<ValidationReport, HoError> {
    require_higher_order(g)?;
    check_prefix_domain(g, p)?;
    Ok(check_prefix_conditions(g, p, PrefixMode::Bounded))
}

/// Binders of `w` (abstractions whose scope contains `w`), outermost first.
pub fn binders_in(sc: &ScopeFn, w: VertexId) -> Vec<VertexId> {
    let mut b: Vec<VertexId> = sc
        .iter()
        .filter(|(_, s)| s.contains(&w))
        .map(|(v, _)| v)
        .collect();
    b.sort_by_key(|v| (std::cmp::Reverse(sc.scope(*v).len()), *v));
    b
}

/// Checks the consequences of the scope conditions: overlapping scopes are
/// nested, and every vertex in `Sc(v)` is dominated by `v` (every path from the
/// root to it visits `v`).
pub fn check_scope_nesting(g: &TermGraph, sc: &ScopeFn) -> ValidationReport {
    let mut report = ValidationReport::new();
    let abs: Vec<VertexId> = sc.domain().collect();
    for (i, &v1) in abs.iter().enumerate() {
        for &v2 in &abs[i + 1..] {
            let s1 = sc.scope(v1);
            let s2 = sc.scope(v2);
            if s1.is_disjoint(s2) {
                continue;
            }
            let in_proper = |a: &BTreeSet<VertexId>, owner: VertexId| {
                a.iter().all(|w| sc.contains_proper(owner, *w))
            };
            if !in_proper(s1, v2) && !in_proper(s2, v1) {
                report.push(Condition::Nesting, [v1, v2]);
            }
        }
    }
    for &v in &abs {
        let avoiding = reachable_avoiding(g, v);
        for &w in sc.scope(v) {
            if w != v && g.contains(w) && avoiding[w.0] {
                report.push(Condition::Dominance, [v, w]);
            }
        }
    }
    report
}

/// Vertices reachable from the root without passing through `avoid`.
fn reachable_avoiding(g: &TermGraph, avoid: VertexId) -> Vec<bool> {
    let mut seen = vec![false; g.len()];
    if g.root() == avoid {
        return seen;
    }
    let mut stack = vec![g.root()];
    seen[g.root().0] = true;
    while let Some(u) = stack.pop() {
        for &w in g.args(u) {
            if w != avoid && !seen[w.0] {
                seen[w.0] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// A term graph over Σ^λ_i with a correct scope function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoTermGraph {
    graph: TermGraph,
    scopes: ScopeFn,
}

impl HoTermGraph {
    pub fn new(graph: TermGraph, scopes: ScopeFn) -> Result<Self, HoError> {
        let report = validate_scope(&graph, &scopes)?;
        if !report.is_pass() {
            return Err(HoError::Invalid(report));
        }
        Ok(HoTermGraph { graph, scopes })
    }

    pub(crate) fn new_unchecked(graph: TermGraph, scopes: ScopeFn) -> Self {
        debug_assert!(validate_scope(&graph, &scopes).is_ok_and(|r| r.is_pass()));
        HoTermGraph { graph, scopes }
    }

    pub fn graph(&self) -> &TermGraph {
        &self.graph
    }

    pub fn scopes(&self) -> &ScopeFn {
        &self.scopes
    }

    pub fn into_parts(self) -> (TermGraph, ScopeFn) {
        (self.graph, self.scopes)
    }

    /// Binders of `w`, outermost (largest scope) first. The order is the chain
    /// of strict scope inclusions.
    pub fn binders(&self, w: VertexId) -> Vec<VertexId> {
        binders_in(&self.scopes, w)
    }

    pub fn check_scope_nesting(&self) -> ValidationReport {
        check_scope_nesting(&self.graph, &self.scopes)
    }
}

/// A term graph over Σ^λ_i with a correct abstraction-prefix function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApHoTermGraph {
    graph: TermGraph,
    prefixes: PrefixFn,
}

impl ApHoTermGraph {
    pub fn new(graph: TermGraph, prefixes: PrefixFn) -> Result<Self, HoError> {
        let report = validate_prefix_ho(&graph, &prefixes)?;
        if !report.is_pass() {
            return Err(HoError::Invalid(report));
        }
        Ok(ApHoTermGraph { graph, prefixes })
    }

    pub(crate) fn new_unchecked(graph: TermGraph, prefixes: PrefixFn) -> Self {
        debug_assert!(validate_prefix_ho(&graph, &prefixes).is_ok_and(|r| r.is_pass()));
        ApHoTermGraph { graph, prefixes }
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

    pub fn into_parts(self) -> (TermGraph, PrefixFn) {
        (self.graph, self.prefixes)
    }
}

/// Membership test for λ-term-graphs over Σ^λ_1 (no delimiters): computes the
/// least abstraction-prefix function satisfying the lower bounds imposed by the
/// conditions, then validates it. Returns `None` when no correct function exists.
pub fn admits_prefix_function(g: &TermGraph) -> Result<Option<PrefixFn>, HoError> {
    require_higher_order(g)?;
    if !g.signature().var_backlinks() {
        return Err(HoError::NeedsBacklinks(g.signature()));
    }
    let n_abs = g.vertices_labelled(Label::Abs).count();
    let mut p: Vec<Prefix> = vec![Vec::new(); g.len()];

    // raise p[u] to at least `q`; false on incomparable words
    fn raise(p: &mut [Prefix], u: VertexId, q: &[VertexId], changed: &mut bool) -> bool {
        let cur = &p[u.0];
        if cur.starts_with(q) {
            true
        } else if q.starts_with(cur) {
            p[u.0] = q.to_vec();
            *changed = true;
            true
        } else {
            false
        }
    }

    loop {
        let mut changed = false;
        for u in g.vertices() {
            for &c in g.args(u) {
                let q: Prefix = match g.label(u) {
                    Label::App => p[c.0].clone(),
                    Label::Abs => {
                        let pc = &p[c.0];
                        if pc.last() == Some(&u) {
                            pc[..pc.len() - 1].to_vec()
                        } else {
                            pc.clone()
                        }
                    }
                    Label::Var => concat(&p[c.0], c),
                    Label::Del => unreachable!("no delimiters in Σ^λ_1"),
                };
                if !raise(&mut p, u, &q, &mut changed) {
                    return Ok(None);
                }
                if p[u.0].len() > n_abs {
                    return Ok(None);
                }
            }
        }
        if !changed {
            break;
        }
    }
    let p = PrefixFn(p);
    Ok(check_prefix_conditions(g, &p, PrefixMode::Bounded)
        .is_pass()
        .then_some(p))
}
