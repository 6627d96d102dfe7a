//! Public-private graph model.
//!
//! A [`PPGraph`] holds one public graph visible to everybody plus, for each
//! owner vertex `u`, a private graph `G_u` whose edges only `u` can see. What
//! `u` actually sees is the overlay `G ∪ G_u`, exposed here as a [`UserView`]
//! that never materializes a copy of the public graph.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};

/// Dense vertex index in `0..n`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> Self {
        VertexId(u32::try_from(i).expect("vertex index exceeds u32"))
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Undirected edge stored with `lo < hi`.
pub type Edge = (VertexId, VertexId);

#[inline]
pub fn ordered_edge(a: VertexId, b: VertexId) -> Edge {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Read-only adjacency access shared by the public graph and user views.
pub trait Topology: Sync {
    fn vertex_count(&self) -> usize;
    fn neighbors(&self, v: VertexId) -> Neighbors<'_>;

    fn degree(&self, v: VertexId) -> usize {
        self.neighbors(v).len()
    }

    fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v.index() < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::InvalidVertex(v, self.vertex_count()))
        }
    }
}

/// Neighbor iterator: public adjacency followed by the viewer's private
/// adjacency. The two slices are disjoint because `E_u ∩ E = ∅`.
#[derive(Clone, Debug)]
pub struct Neighbors<'a> {
    public: std::slice::Iter<'a, VertexId>,
    private: std::slice::Iter<'a, VertexId>,
}

impl<'a> Neighbors<'a> {
    fn new(public: &'a [VertexId], private: &'a [VertexId]) -> Self {
        Neighbors {
            public: public.iter(),
            private: private.iter(),
        }
    }
}

impl Iterator for Neighbors<'_> {
    type Item = VertexId;

    #[inline]
    fn next(&mut self) -> Option<VertexId> {
        self.public.next().or_else(|| self.private.next()).copied()
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.public.len() + self.private.len();
        (n, Some(n))
    }
}

impl ExactSizeIterator for Neighbors<'_> {}

/// Simple undirected graph in compressed sparse row form with sorted rows.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PublicGraph {
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
}

impl PublicGraph {
    /// Builds the graph from undirected edges. Duplicates collapse; self-loops
    /// and out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = Edge>,
    {
        let mut list: Vec<Edge> = Vec::new();
        for (a, b) in edges {
            for v in [a, b] {
                if v.index() >= n {
                    return Err(Error::InvalidVertex(v, n));
                }
            }
            if a == b {
                return Err(Error::Invariant(format!("self-loop at {a}")));
            }
            list.push(ordered_edge(a, b));
        }
        list.sort_unstable();
        list.dedup();
        Ok(Self::from_sorted_unique(n, &list))
    }

    /// `edges` must be sorted, deduplicated, loop-free and ordered `lo < hi`.
    pub(crate) fn from_sorted_unique(n: usize, edges: &[Edge]) -> Self {
        let mut degree = vec![0usize; n];
        for &(a, b) in edges {
            degree[a.index()] += 1;
            degree[b.index()] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0usize;
        offsets.push(0);
        for d in &degree {
            acc += d;
            offsets.push(acc);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![VertexId(0); acc];
        // Sorted (lo, hi) input fills every row in ascending order: a row `v`
        // receives all its smaller neighbors (as `hi`) before any larger one.
        for &(a, b) in edges {
            targets[cursor[b.index()]] = a;
            cursor[b.index()] += 1;
        }
        for &(a, b) in edges {
            targets[cursor[a.index()]] = b;
            cursor[a.index()] += 1;
        }
        PublicGraph { offsets, targets }
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn adjacency(&self, v: VertexId) -> &[VertexId] {
        &self.targets[self.offsets[v.index()]..self.offsets[v.index() + 1]]
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        a.index() < self.vertex_count() && self.adjacency(a).binary_search(&b).is_ok()
    }

    /// All edges as `(lo, hi)` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.vertex_count()).flat_map(move |i| {
            let v = VertexId::from_index(i);
            self.adjacency(v)
                .iter()
                .filter(move |&&w| w > v)
                .map(move |&w| (v, w))
        })
    }
}

impl Topology for PublicGraph {
    fn vertex_count(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    fn neighbors(&self, v: VertexId) -> Neighbors<'_> {
        Neighbors::new(self.adjacency(v), &[])
    }

    fn degree(&self, v: VertexId) -> usize {
        self.offsets[v.index() + 1] - self.offsets[v.index()]
    }
}

/// The private graph `G_u` of one owner.
///
/// `vertices` is `{owner} ∪ endpoints(E_u)`, sorted; the local adjacency rows
/// are aligned with it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrivateGraph {
    owner: VertexId,
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
}

impl PrivateGraph {
    pub fn new<I>(owner: VertexId, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = Edge>,
    {
        let mut list = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::Invariant(format!(
                    "self-loop at {a} in private graph of {owner}"
                )));
            }
            list.push(ordered_edge(a, b));
        }
        list.sort_unstable();
        list.dedup();
        Ok(Self::from_sorted_unique(owner, list))
    }

    pub(crate) fn from_sorted_unique(owner: VertexId, edges: Vec<Edge>) -> Self {
        let mut vertices: Vec<VertexId> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
        vertices.push(owner);
        vertices.sort_unstable();
        vertices.dedup();

        let mut degree = vec![0usize; vertices.len()];
        let local = |v: VertexId| vertices.binary_search(&v).expect("endpoint indexed");
        for &(a, b) in &edges {
            degree[local(a)] += 1;
            degree[local(b)] += 1;
        }
        let mut offsets = Vec::with_capacity(vertices.len() + 1);
        offsets.push(0);
        let mut acc = 0;
        for d in &degree {
            acc += d;
            offsets.push(acc);
        }
        let mut cursor = offsets[..vertices.len()].to_vec();
        let mut targets = vec![VertexId(0); acc];
        for &(a, b) in &edges {
            let lb = local(b);
            targets[cursor[lb]] = a;
            cursor[lb] += 1;
        }
        for &(a, b) in &edges {
            let la = local(a);
            targets[cursor[la]] = b;
            cursor[la] += 1;
        }
        PrivateGraph {
            owner,
            vertices,
            edges,
            offsets,
            targets,
        }
    }

    pub fn owner(&self) -> VertexId {
        self.owner
    }

    /// `V_u`, including the owner.
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    /// `E_u` as sorted `(lo, hi)` pairs.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.edges.binary_search(&ordered_edge(a, b)).is_ok()
    }

    /// Private neighbors of `v` (empty when `v ∉ V_u`).
    pub fn adjacency(&self, v: VertexId) -> &[VertexId] {
        match self.vertices.binary_search(&v) {
            Ok(i) => &self.targets[self.offsets[i]..self.offsets[i + 1]],
            Err(_) => &[],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Maximum number of keywords kept per attribute set.
pub const MAX_KEYWORDS: usize = 5;

/// A keyword attribute set holding at most [`MAX_KEYWORDS`] entries.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct KeywordSet(BTreeSet<String>);

impl KeywordSet {
    pub fn new<I, S>(keywords: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = keywords.into_iter().map(Into::into).collect();
        if set.len() > MAX_KEYWORDS {
            return Err(Error::Invariant(format!(
                "keyword set of size {} exceeds cap {MAX_KEYWORDS}",
                set.len()
            )));
        }
        Ok(KeywordSet(set))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, keyword: &str) -> bool {
        self.0.contains(keyword)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> + '_ {
        self.0.iter().map(String::as_str)
    }

    pub fn as_set(&self) -> &BTreeSet<String> {
        &self.0
    }
}

/// Public sets `A(v)` and owner-scoped private sets `A_u(v)`. Empty sets are
/// not stored; a missing entry reads as `∅`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AttributeStore {
    public: BTreeMap<VertexId, KeywordSet>,
    private: BTreeMap<(VertexId, VertexId), KeywordSet>,
}

impl AttributeStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_public(&mut self, v: VertexId, keywords: KeywordSet) {
        if keywords.is_empty() {
            self.public.remove(&v);
        } else {
            self.public.insert(v, keywords);
        }
    }

    pub fn set_private(&mut self, owner: VertexId, v: VertexId, keywords: KeywordSet) {
        if keywords.is_empty() {
            self.private.remove(&(owner, v));
        } else {
            self.private.insert((owner, v), keywords);
        }
    }

    pub fn public(&self, v: VertexId) -> Option<&KeywordSet> {
        self.public.get(&v)
    }

    pub fn private(&self, owner: VertexId, v: VertexId) -> Option<&KeywordSet> {
        self.private.get(&(owner, v))
    }

    pub fn public_entries(&self) -> impl Iterator<Item = (VertexId, &KeywordSet)> + '_ {
        self.public.iter().map(|(&v, k)| (v, k))
    }

    pub fn private_entries(
        &self,
    ) -> impl Iterator<Item = ((VertexId, VertexId), &KeywordSet)> + '_ {
        self.private.iter().map(|(&k, s)| (k, s))
    }
}

/// Attributed public-private graph. Immutable once constructed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PPGraph {
    names: Vec<String>,
    public: PublicGraph,
    private: BTreeMap<VertexId, PrivateGraph>,
    attributes: AttributeStore,
}

impl PPGraph {
    /// Validates every model invariant and prunes empty private graphs.
    pub fn new<I>(
        names: Vec<String>,
        public: PublicGraph,
        private_graphs: I,
        attributes: AttributeStore,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = PrivateGraph>,
    {
        let n = public.vertex_count();
        if names.len() != n {
            return Err(Error::Invariant(format!(
                "{} names for {n} vertices",
                names.len()
            )));
        }
        let mut seen = HashSet::with_capacity(n);
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::Invariant(format!("duplicate vertex name {name:?}")));
            }
        }
        drop(seen);

        let mut private = BTreeMap::new();
        for pg in private_graphs {
            if pg.is_empty() {
                continue;
            }
            for &v in pg.vertices() {
                if v.index() >= n {
                    return Err(Error::InvalidVertex(v, n));
                }
            }
            if let Some(&(a, b)) = pg.edges().iter().find(|&&(a, b)| public.has_edge(a, b)) {
                return Err(Error::Invariant(format!(
                    "private edge ({a}, {b}) of owner {} duplicates a public edge",
                    pg.owner()
                )));
            }
            let owner = pg.owner();
            if private.insert(owner, pg).is_some() {
                return Err(Error::Invariant(format!("duplicate private graph for {owner}")));
            }
        }

        if let Some((v, _)) = attributes.public.iter().find(|(v, _)| v.index() >= n) {
            return Err(Error::InvalidVertex(*v, n));
        }
        for &(owner, v) in attributes.private.keys() {
            let ok = private
                .get(&owner)
                .is_some_and(|pg: &PrivateGraph| pg.contains_vertex(v));
            if !ok {
                return Err(Error::Invariant(format!(
                    "private attributes for ({owner}, {v}) but {v} is not in V_{owner}"
                )));
            }
        }

        Ok(PPGraph {
            names,
            public,
            private,
            attributes,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.public.vertex_count()
    }

    pub fn public(&self) -> &PublicGraph {
        &self.public
    }

    pub fn attributes(&self) -> &AttributeStore {
        &self.attributes
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: VertexId) -> Option<&str> {
        self.names.get(v.index()).map(String::as_str)
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(VertexId::from_index)
    }

    pub fn private_graph(&self, owner: VertexId) -> Option<&PrivateGraph> {
        self.private.get(&owner)
    }

    pub fn private_graphs(&self) -> impl Iterator<Item = &PrivateGraph> + '_ {
        self.private.values()
    }

    /// `V_private`, ascending.
    pub fn private_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.private.keys().copied()
    }

    pub fn private_vertex_count(&self) -> usize {
        self.private.len()
    }

    /// `E_private`: union of all private edge sets, each pair once, sorted.
    pub fn private_edges(&self) -> Vec<Edge> {
        let mut all: Vec<Edge> = self
            .private
            .values()
            .flat_map(|pg| pg.edges().iter().copied())
            .collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    fn check(&self, v: VertexId) -> Result<()> {
        self.public.check_vertex(v)
    }
}

/// The graph `G ∪ G_u` as seen by one viewer.
#[derive(Clone, Copy, Debug)]
pub struct UserView<'a> {
    graph: &'a PPGraph,
    viewer: VertexId,
    overlay: Option<&'a PrivateGraph>,
}

impl<'a> UserView<'a> {
    pub fn viewer(&self) -> VertexId {
        self.viewer
    }

    pub fn graph(&self) -> &'a PPGraph {
        self.graph
    }

    /// The viewer's private graph, if it has one.
    pub fn overlay(&self) -> Option<&'a PrivateGraph> {
        self.overlay
    }

    pub fn private_neighbors(&self, v: VertexId) -> &'a [VertexId] {
        self.overlay.map_or(&[], |pg| pg.adjacency(v))
    }
}

impl Topology for UserView<'_> {
    fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    fn neighbors(&self, v: VertexId) -> Neighbors<'_> {
        Neighbors::new(self.graph.public.adjacency(v), self.private_neighbors(v))
    }

    fn degree(&self, v: VertexId) -> usize {
        self.graph.public.degree(v) + self.private_neighbors(v).len()
    }
}

/// The view of `u`: public edges plus `u`'s private edges.
pub fn view(g: &PPGraph, u: VertexId) -> Result<UserView<'_>> {
    g.check(u)?;
    Ok(UserView {
        graph: g,
        viewer: u,
        overlay: g.private.get(&u),
    })
}

/// `A(v) ∪ A_u(v)` as visible to viewer `u`.
pub fn merged_attributes(g: &PPGraph, u: VertexId, v: VertexId) -> Result<BTreeSet<String>> {
    g.check(u)?;
    g.check(v)?;
    let mut out = BTreeSet::new();
    for set in [g.attributes.public(v), g.attributes.private(u, v)]
        .into_iter()
        .flatten()
    {
        out.extend(set.iter().map(str::to_owned));
    }
    Ok(out)
}

/// `|E_private|`, counting a pair present in several private graphs once.
pub fn private_edge_count(g: &PPGraph) -> usize {
    g.private_edges().len()
}
