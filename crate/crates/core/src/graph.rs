//! Finite rooted term graphs over the λ-signatures.
//!
//! A [`TermGraph`] is a rooted graph whose vertices carry a [`Label`] and an
//! ordered list of successors whose length is fixed by the label's arity in the
//! graph's [`Signature`]. Every vertex must be reachable from the root.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

/// Vertex labels: application, abstraction, variable occurrence and scope delimiter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    App,
    Abs,
    Var,
    Del,
}

impl Label {
    pub const ALL: [Label; 4] = [Label::App, Label::Abs, Label::Var, Label::Del];

    /// The symbol used in figures and DOT output.
    pub fn symbol(self) -> &'static str {
        match self {
            Label::App => "@",
            Label::Abs => "λ",
            Label::Var => "0",
            Label::Del => "S",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Which variant of the λ-signature a graph lives in.
///
/// `var_arity` is 0 or 1 (variable back-links absent or present).
/// `del_arity` is `None` when delimiter vertices are not admitted, otherwise
/// 1 or 2 (delimiter back-links absent or present).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature {
    var_arity: usize,
    del_arity: Option<usize>,
}

impl Signature {
    pub fn new(var_arity: usize, del_arity: Option<usize>) -> Result<Self, GraphError> {
        if var_arity > 1 || matches!(del_arity, Some(j) if !(1..=2).contains(&j)) {
            return Err(GraphError::BadSignature {
                var_arity,
                del_arity,
            });
        }
        Ok(Signature {
            var_arity,
            del_arity,
        })
    }

    /// Signature without delimiters, variables of arity `i`.
    pub fn higher_order(i: usize) -> Result<Self, GraphError> {
        Self::new(i, None)
    }

    /// Signature with delimiters of arity `j`, variables of arity `i`.
    pub fn delimited(i: usize, j: usize) -> Result<Self, GraphError> {
        Self::new(i, Some(j))
    }

    pub fn var_arity(self) -> usize {
        self.var_arity
    }

    pub fn del_arity(self) -> Option<usize> {
        self.del_arity
    }

    pub fn var_backlinks(self) -> bool {
        self.var_arity == 1
    }

    pub fn del_backlinks(self) -> bool {
        self.del_arity == Some(2)
    }

    pub fn has_delimiters(self) -> bool {
        self.del_arity.is_some()
    }

    /// The same variable arity with delimiters removed.
    pub fn without_delimiters(self) -> Signature {
        Signature {
            var_arity: self.var_arity,
            del_arity: None,
        }
    }

    /// Arity of `label`, or `None` if the label is not part of this signature.
    pub fn arity(self, label: Label) -> Option<usize> {
        match label {
            Label::App => Some(2),
            Label::Abs => Some(1),
            Label::Var => Some(self.var_arity),
            Label::Del => self.del_arity,
        }
    }

    /// Whether the edge `k` out of a vertex labelled `label` is a back-link.
    pub fn is_backlink(self, label: Label, k: usize) -> bool {
        match label {
            Label::Var => self.var_backlinks() && k == 0,
            Label::Del => self.del_backlinks() && k == 1,
            _ => false,
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.del_arity {
            Some(j) => write!(f, "({},{})", self.var_arity, j),
            None => write!(f, "({})", self.var_arity),
        }
    }
}

/// Dense vertex index, unique within one graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invalid signature: variable arity {var_arity}, delimiter arity {del_arity:?}")]
    BadSignature {
        var_arity: usize,
        del_arity: Option<usize>,
    },
    #[error("vertex `{0}` is defined more than once")]
    DuplicateVertex(String),
    #[error("root `{0}` is not a defined vertex")]
    UnknownRoot(String),
    #[error("vertex `{vertex}` has {found} successors but `{label}` has arity {expected}")]
    ArityMismatch {
        vertex: String,
        label: Label,
        expected: usize,
        found: usize,
    },
    #[error("successor {index} of vertex `{vertex}` refers to undefined vertex `{target}`")]
    DanglingSuccessor {
        vertex: String,
        index: usize,
        target: String,
    },
    #[error("vertex `{0}` is not reachable from the root")]
    UnreachableVertex(String),
    #[error("label `{label}` of vertex `{vertex}` is not admitted by signature {signature}")]
    ForbiddenLabel {
        vertex: String,
        label: Label,
        signature: Signature,
    },
    #[error("vertex `{vertex}` has no successor {index} (arity {arity})")]
    IndexOutOfRange {
        vertex: String,
        index: usize,
        arity: usize,
    },
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
}

impl GraphError {
    /// Name of the vertex the error is about, if any.
    pub fn vertex(&self) -> Option<&str> {
        match self {
            GraphError::BadSignature { .. } | GraphError::UnknownRoot(_) => None,
            GraphError::DuplicateVertex(v)
            | GraphError::UnreachableVertex(v)
            | GraphError::UnknownVertex(v) => Some(v),
            GraphError::ArityMismatch { vertex, .. }
            | GraphError::DanglingSuccessor { vertex, .. }
            | GraphError::ForbiddenLabel { vertex, .. }
            | GraphError::IndexOutOfRange { vertex, .. } => Some(vertex),
        }
    }
}

/// A finite rooted term graph.
///
/// Vertex ids are dense (`0..len()`) and each vertex has a printable name.
/// Equality is structural, including names and id order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermGraph {
    signature: Signature,
    labels: Vec<Label>,
    args: Vec<Vec<VertexId>>,
    names: Vec<String>,
    root: VertexId,
}

/// Raw vertex description accepted by [`TermGraph::build`].
pub type VertexSpec<N> = (N, Label, Vec<N>);

impl TermGraph {
    /// Builds a graph from named vertex descriptions, rejecting unreachable vertices.
    ///
    /// Vertex ids follow the order of `vertices`.
    pub fn build<N: AsRef<str>>(
        signature: Signature,
        vertices: impl IntoIterator<Item = VertexSpec<N>>,
        root: N,
    ) -> Result<Self, GraphError> {
        let (labels, args, names, root) = resolve_names(vertices, root)?;
        Self::from_parts(signature, labels, args, names, root)
    }

    /// Like [`TermGraph::build`], but drops unreachable vertices instead of failing.
    /// Returns the names of the dropped vertices.
    pub fn build_pruned<N: AsRef<str>>(
        signature: Signature,
        vertices: impl IntoIterator<Item = VertexSpec<N>>,
        root: N,
    ) -> Result<(Self, Vec<String>), GraphError> {
        let (labels, args, names, root) = resolve_names(vertices, root)?;
        Self::from_parts_pruned(signature, labels, args, names, root)
    }

    /// Strict constructor over dense ids.
    pub fn from_parts(
        signature: Signature,
        labels: Vec<Label>,
        args: Vec<Vec<VertexId>>,
        names: Vec<String>,
        root: VertexId,
    ) -> Result<Self, GraphError> {
        let graph = Self::checked_unrooted(signature, labels, args, names, root)?;
        let reach = graph.reachable_from(graph.root);
        if let Some(v) = reach.iter().position(|r| !r) {
            return Err(GraphError::UnreachableVertex(graph.names[v].clone()));
        }
        Ok(graph)
    }

    /// Lenient constructor over dense ids: unreachable vertices are removed and
    /// the remaining ones renumbered in their original relative order.
    pub fn from_parts_pruned(
        signature: Signature,
        labels: Vec<Label>,
        args: Vec<Vec<VertexId>>,
        names: Vec<String>,
        root: VertexId,
    ) -> Result<(Self, Vec<String>), GraphError> {
        let graph = Self::checked_unrooted(signature, labels, args, names, root)?;
        let reach = graph.reachable_from(graph.root);
        let dropped: Vec<String> = graph
            .vertices()
            .filter(|v| !reach[v.0])
            .map(|v| graph.names[v.0].clone())
            .collect();
        if dropped.is_empty() {
            return Ok((graph, dropped));
        }
        let keep: Vec<VertexId> = graph.vertices().filter(|v| reach[v.0]).collect();
        Ok((graph.restrict(&keep), dropped))
    }

    fn checked_unrooted(
        signature: Signature,
        labels: Vec<Label>,
        args: Vec<Vec<VertexId>>,
        names: Vec<String>,
        root: VertexId,
    ) -> Result<Self, GraphError> {
        let n = labels.len();
        assert_eq!(args.len(), n, "label and successor tables differ in length");
        assert_eq!(names.len(), n, "label and name tables differ in length");
        if root.0 >= n {
            return Err(GraphError::UnknownRoot(root.to_string()));
        }
        for v in 0..n {
            let label = labels[v];
            let expected = signature
                .arity(label)
                .ok_or_else(|| GraphError::ForbiddenLabel {
                    vertex: names[v].clone(),
                    label,
                    signature,
                })?;
            if args[v].len() != expected {
                return Err(GraphError::ArityMismatch {
                    vertex: names[v].clone(),
                    label,
                    expected,
                    found: args[v].len(),
                });
            }
            if let Some((index, target)) = args[v].iter().enumerate().find(|(_, t)| t.0 >= n) {
                return Err(GraphError::DanglingSuccessor {
                    vertex: names[v].clone(),
                    index,
                    target: target.to_string(),
                });
            }
        }
        Ok(TermGraph {
            signature,
            labels,
            args,
            names,
            root,
        })
    }

    /// Sub-graph on `keep` (must be closed under successors and contain the root),
    /// renumbered in the order given.
    fn restrict(&self, keep: &[VertexId]) -> TermGraph {
        let mut new_id = vec![usize::MAX; self.len()];
        for (i, v) in keep.iter().enumerate() {
            new_id[v.0] = i;
        }
        TermGraph {
            signature: self.signature,
            labels: keep.iter().map(|v| self.labels[v.0]).collect(),
            args: keep
                .iter()
                .map(|v| {
                    self.args[v.0]
                        .iter()
                        .map(|a| VertexId(new_id[a.0]))
                        .collect()
                })
                .collect(),
            names: keep.iter().map(|v| self.names[v.0].clone()).collect(),
            root: VertexId(new_id[self.root.0]),
        }
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.labels.len()).map(VertexId)
    }

    pub fn vertices_labelled(&self, label: Label) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices().filter(move |v| self.labels[v.0] == label)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.0 < self.len()
    }

    pub fn label(&self, v: VertexId) -> Label {
        self.labels[v.0]
    }

    pub fn args(&self, v: VertexId) -> &[VertexId] {
        &self.args[v.0]
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Looks a vertex up by name.
    pub fn vertex(&self, name: &str) -> Option<VertexId> {
        self.names.iter().position(|n| n == name).map(VertexId)
    }

    /// The `k`-th successor of `v`.
    pub fn successor(&self, v: VertexId, k: usize) -> Result<VertexId, GraphError> {
        if !self.contains(v) {
            return Err(GraphError::UnknownVertex(v.to_string()));
        }
        self.args[v.0]
            .get(k)
            .copied()
            .ok_or_else(|| GraphError::IndexOutOfRange {
                vertex: self.names[v.0].clone(),
                index: k,
                arity: self.args[v.0].len(),
            })
    }

    /// All indexed edges `(source, index, target)`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, usize, VertexId)> + '_ {
        self.vertices().flat_map(move |v| {
            self.args[v.0]
                .iter()
                .enumerate()
                .map(move |(k, &t)| (v, k, t))
        })
    }

    pub fn is_backlink(&self, v: VertexId, k: usize) -> bool {
        self.signature.is_backlink(self.label(v), k)
    }

    /// Returns a copy with every vertex renamed by `rename`.
    pub fn renamed(&self, mut rename: impl FnMut(VertexId, &str) -> String) -> TermGraph {
        let mut g = self.clone();
        g.names = self
            .vertices()
            .map(|v| rename(v, &self.names[v.0]))
            .collect();
        g
    }

    /// Reachability (in zero or more steps) from `start`, indexed by vertex id.
    pub fn reachable_from(&self, start: VertexId) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![start];
        seen[start.0] = true;
        while let Some(v) = stack.pop() {
            for &w in &self.args[v.0] {
                if !seen[w.0] {
                    seen[w.0] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Whether `to` can be reached from `from` by a path with at least one edge.
    pub fn reaches_properly(&self, from: VertexId, to: VertexId) -> bool {
        let mut seen = vec![false; self.len()];
        let mut stack: Vec<VertexId> = self.args[from.0].clone();
        while let Some(v) = stack.pop() {
            if v == to {
                return true;
            }
            if !seen[v.0] {
                seen[v.0] = true;
                stack.extend(self.args[v.0].iter().copied());
            }
        }
        false
    }

    /// An access path of `v`: starts at the root, ends in `v`, repeats no vertex.
    ///
    /// Deterministic: the branch of the depth-first search tree (lowest edge
    /// index first) that leads to `v`.
    pub fn access_path(&self, v: VertexId) -> Path {
        assert!(self.contains(v), "access_path: unknown vertex {v}");
        let mut parent: Vec<Option<(VertexId, usize)>> = vec![None; self.len()];
        let mut seen = vec![false; self.len()];
        seen[self.root.0] = true;
        // explicit stack of (vertex, next edge index) to keep lowest-index-first order
        let mut stack = vec![(self.root, 0usize)];
        while let Some(top) = stack.last_mut() {
            let (u, k) = *top;
            if u == v {
                break;
            }
            if let Some(&w) = self.args[u.0].get(k) {
                top.1 += 1;
                if !seen[w.0] {
                    seen[w.0] = true;
                    parent[w.0] = Some((u, k));
                    stack.push((w, 0));
                }
            } else {
                stack.pop();
            }
        }
        let mut vertices = vec![v];
        let mut indices = Vec::new();
        let mut cur = v;
        while let Some((p, k)) = parent[cur.0] {
            vertices.push(p);
            indices.push(k);
            cur = p;
        }
        vertices.reverse();
        indices.reverse();
        Path { vertices, indices }
    }

    /// Root-, label- and argument-preserving bijection onto `other`, if any.
    pub fn isomorphic(&self, other: &TermGraph) -> Option<VertexMap> {
        if self.signature != other.signature || self.len() != other.len() {
            return None;
        }
        let mut fwd = vec![None; self.len()];
        let mut bwd = vec![None; other.len()];
        let mut queue = VecDeque::new();
        fwd[self.root.0] = Some(other.root);
        bwd[other.root.0] = Some(self.root);
        queue.push_back((self.root, other.root));
        while let Some((u, w)) = queue.pop_front() {
            if self.label(u) != other.label(w) {
                return None;
            }
            for (&a, &b) in self.args(u).iter().zip(other.args(w)) {
                match (fwd[a.0], bwd[b.0]) {
                    (None, None) => {
                        fwd[a.0] = Some(b);
                        bwd[b.0] = Some(a);
                        queue.push_back((a, b));
                    }
                    (Some(x), Some(y)) if x == b && y == a => {}
                    _ => return None,
                }
            }
        }
        fwd.into_iter().collect::<Option<Vec<_>>>().map(VertexMap)
    }
}

type Resolved = (Vec<Label>, Vec<Vec<VertexId>>, Vec<String>, VertexId);

fn resolve_names<N: AsRef<str>>(
    vertices: impl IntoIterator<Item = VertexSpec<N>>,
    root: N,
) -> Result<Resolved, GraphError> {
    let specs: Vec<VertexSpec<N>> = vertices.into_iter().collect();
    let mut ids = HashMap::with_capacity(specs.len());
    for (i, (name, _, _)) in specs.iter().enumerate() {
        if ids.insert(name.as_ref().to_owned(), VertexId(i)).is_some() {
            return Err(GraphError::DuplicateVertex(name.as_ref().to_owned()));
        }
    }
    let root = *ids
        .get(root.as_ref())
        .ok_or_else(|| GraphError::UnknownRoot(root.as_ref().to_owned()))?;
    let mut labels = Vec::with_capacity(specs.len());
    let mut args = Vec::with_capacity(specs.len());
    let mut names = Vec::with_capacity(specs.len());
    for (name, label, succ) in specs {
        let mut resolved = Vec::with_capacity(succ.len());
        for (index, s) in succ.iter().enumerate() {
            let id = ids
                .get(s.as_ref())
                .ok_or_else(|| GraphError::DanglingSuccessor {
                    vertex: name.as_ref().to_owned(),
                    index,
                    target: s.as_ref().to_owned(),
                })?;
            resolved.push(*id);
        }
        labels.push(label);
        args.push(resolved);
        names.push(name.as_ref().to_owned());
    }
    Ok((labels, args, names, root))
}

/// An alternating sequence `v0, k0, v1, k1, …, vn` of vertices and edge indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    vertices: Vec<VertexId>,
    indices: Vec<usize>,
}

impl Path {
    /// Path from explicit parts; `vertices` must be exactly one longer than `indices`.
    pub fn new(vertices: Vec<VertexId>, indices: Vec<usize>) -> Self {
        assert_eq!(vertices.len(), indices.len() + 1, "malformed path");
        Path { vertices, indices }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn start(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn end(&self) -> VertexId {
        *self.vertices.last().unwrap()
    }

    /// Number of edges.
    pub fn steps(&self) -> usize {
        self.indices.len()
    }

    /// Every step `v_m ->k_m v_{m+1}` is an edge of `g`.
    pub fn is_path_in(&self, g: &TermGraph) -> bool {
        self.vertices.iter().all(|&v| g.contains(v))
            && self
                .indices
                .iter()
                .enumerate()
                .all(|(m, &k)| g.args(self.vertices[m]).get(k) == Some(&self.vertices[m + 1]))
    }

    /// A path in `g` that starts at the root and visits no vertex twice.
    pub fn is_access_path_in(&self, g: &TermGraph) -> bool {
        let mut seen = vec![false; g.len()];
        self.is_path_in(g)
            && self.start() == g.root()
            && self
                .vertices
                .iter()
                .all(|v| !std::mem::replace(&mut seen[v.0], true))
    }
}

/// A total map from the vertices of one graph to the vertices of another.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexMap(Vec<VertexId>);

impl VertexMap {
    pub fn new(targets: Vec<VertexId>) -> Self {
        VertexMap(targets)
    }

    pub fn identity(n: usize) -> Self {
        VertexMap((0..n).map(VertexId).collect())
    }

    pub fn get(&self, v: VertexId) -> VertexId {
        self.0[v.0]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.0.iter().enumerate().map(|(i, &t)| (VertexId(i), t))
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.0.len());
        self.0.iter().all(|t| seen.insert(*t))
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &VertexMap) -> VertexMap {
        VertexMap(self.0.iter().map(|&t| then.get(t)).collect())
    }

    /// Inverse of a bijection onto `0..len()`.
    pub fn inverse(&self) -> Option<VertexMap> {
        let mut inv = vec![None; self.0.len()];
        for (i, &t) in self.0.iter().enumerate() {
            match inv.get_mut(t.0) {
                Some(slot @ None) => *slot = Some(VertexId(i)),
                _ => return None,
            }
        }
        inv.into_iter().collect::<Option<Vec<_>>>().map(VertexMap)
    }

    /// Image of a word of vertices.
    pub fn map_word(&self, word: &[VertexId]) -> Vec<VertexId> {
        word.iter().map(|&v| self.get(v)).collect()
    }
}
