//! Shortest-path queries on user views.
//!
//! The exact engine is a breadth-first search over `G ∪ G_u`. The fast
//! engine precomputes distance sketches on the public graph alone: for each
//! of `r` repetitions and each level `i = 0..=⌊log2 n⌋` a uniform seed set of
//! size `min(2^i, n)` is drawn, and every vertex records its nearest seed and
//! the distance to it. Two vertices are then compared through the seeds their
//! sketches share. At query time the viewer's private edges are explored
//! first (they are few) and each privately reachable vertex is combined with
//! its public sketch.
//!
//! Every estimate is the length of an actual walk in the view, so it never
//! undercuts the true distance.

use std::collections::{HashMap, VecDeque};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{PublicGraph, Topology, UserView, VertexId};
use crate::par::Parallelism;

const UNSEEN: u32 = u32::MAX;

/// Exact hop distance from `s` to `t` in any topology; `None` if unreachable.
pub fn exact_distance<T: Topology + ?Sized>(g: &T, s: VertexId, t: VertexId) -> Result<Option<u32>> {
    let mut work = 0;
    exact_distance_counted(g, s, t, &mut work)
}

/// [`exact_distance`] that also adds the number of scanned adjacency entries
/// to `work`.
pub fn exact_distance_counted<T: Topology + ?Sized>(
    g: &T,
    s: VertexId,
    t: VertexId,
    work: &mut u64,
) -> Result<Option<u32>> {
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    if s == t {
        return Ok(Some(0));
    }
    let mut dist = vec![UNSEEN; g.vertex_count()];
    let mut queue = VecDeque::new();
    dist[s.index()] = 0;
    queue.push_back(s);
    while let Some(x) = queue.pop_front() {
        let d = dist[x.index()] + 1;
        for y in g.neighbors(x) {
            *work += 1;
            if dist[y.index()] == UNSEEN {
                if y == t {
                    return Ok(Some(d));
                }
                dist[y.index()] = d;
                queue.push_back(y);
            }
        }
    }
    Ok(None)
}

/// Distances from `s` to every vertex (`None` where unreachable).
pub fn bfs_distances<T: Topology + ?Sized>(g: &T, s: VertexId) -> Result<Vec<Option<u32>>> {
    g.check_vertex(s)?;
    let mut dist = vec![UNSEEN; g.vertex_count()];
    let mut queue = VecDeque::new();
    dist[s.index()] = 0;
    queue.push_back(s);
    while let Some(x) = queue.pop_front() {
        let d = dist[x.index()] + 1;
        for y in g.neighbors(x) {
            if dist[y.index()] == UNSEEN {
                dist[y.index()] = d;
                queue.push_back(y);
            }
        }
    }
    Ok(dist.into_iter().map(|d| (d != UNSEEN).then_some(d)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SketchEntry {
    pub seed: VertexId,
    pub dist: u32,
}

/// Number of repetitions for a multiplicative factor `m ∈ (0, 1]`: `⌈1/m⌉`.
pub fn repetitions_for(factor: f64) -> Result<u32> {
    if !(factor > 0.0 && factor <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "multiplicative factor must lie in (0, 1], got {factor}"
        )));
    }
    // Guard against 1/0.25 style values landing a hair above an integer.
    let r = (1.0 / factor - 1e-9).ceil();
    if r > u32::MAX as f64 {
        return Err(Error::InvalidParameter(format!("factor {factor} too small")));
    }
    Ok(r.max(1.0) as u32)
}

/// Number of seed levels for `n` vertices: `⌊log2 n⌋ + 1`.
pub fn level_count(n: usize) -> u32 {
    if n == 0 {
        0
    } else {
        usize::BITS - n.leading_zeros()
    }
}

/// Per-vertex `(seed, distance)` lists precomputed on the public graph.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceSketchSet {
    factor: f64,
    repetitions: u32,
    rng_seed: u64,
    offsets: Vec<usize>,
    entries: Vec<SketchEntry>,
}

impl DistanceSketchSet {
    pub(crate) fn from_parts(
        factor: f64,
        repetitions: u32,
        rng_seed: u64,
        offsets: Vec<usize>,
        entries: Vec<SketchEntry>,
    ) -> Result<Self> {
        let ok = !offsets.is_empty()
            && offsets[0] == 0
            && offsets.windows(2).all(|w| w[0] <= w[1])
            && *offsets.last().unwrap() == entries.len();
        if !ok {
            return Err(Error::InvalidParameter("inconsistent sketch offsets".into()));
        }
        Ok(DistanceSketchSet {
            factor,
            repetitions,
            rng_seed,
            offsets,
            entries,
        })
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }

    pub fn repetitions(&self) -> u32 {
        self.repetitions
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn total_entries(&self) -> usize {
        self.entries.len()
    }

    pub fn mean_entries(&self) -> f64 {
        let n = self.vertex_count();
        if n == 0 {
            0.0
        } else {
            self.entries.len() as f64 / n as f64
        }
    }

    pub(crate) fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub(crate) fn all_entries(&self) -> &[SketchEntry] {
        &self.entries
    }

    /// Entries of `v`, sorted by seed.
    pub fn entries(&self, v: VertexId) -> Result<&[SketchEntry]> {
        if v.index() >= self.vertex_count() {
            return Err(Error::InvalidVertex(v, self.vertex_count()));
        }
        Ok(&self.entries[self.offsets[v.index()]..self.offsets[v.index() + 1]])
    }
}

/// Multi-source BFS: for every vertex, its nearest seed and the distance.
/// Seeds are expanded in ascending order, so ties go to the smaller seed that
/// reaches first.
fn nearest_seed(g: &PublicGraph, seeds: &[VertexId]) -> Vec<(u32, u32)> {
    let mut best = vec![(UNSEEN, UNSEEN); g.vertex_count()];
    let mut queue = VecDeque::with_capacity(seeds.len());
    for &s in seeds {
        best[s.index()] = (s.0, 0);
        queue.push_back(s);
    }
    while let Some(x) = queue.pop_front() {
        let (seed, d) = best[x.index()];
        for &y in g.adjacency(x) {
            if best[y.index()].1 == UNSEEN {
                best[y.index()] = (seed, d + 1);
                queue.push_back(y);
            }
        }
    }
    best
}

/// Offline sketch construction on the public graph.
pub fn build_sketches(
    g: &PublicGraph,
    factor: f64,
    rng_seed: u64,
    par: Parallelism,
) -> Result<DistanceSketchSet> {
    let repetitions = repetitions_for(factor)?;
    let n = g.vertex_count();
    let levels = level_count(n);

    let per_rep: Vec<Vec<(VertexId, SketchEntry)>> =
        par.map_range(repetitions as usize, |rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            rng.set_stream(rep as u64);
            let mut out = Vec::with_capacity(n * levels as usize);
            for level in 0..levels {
                let size = (1usize << level).min(n);
                let mut seeds: Vec<VertexId> = sample(&mut rng, n, size)
                    .into_iter()
                    .map(VertexId::from_index)
                    .collect();
                seeds.sort_unstable();
                for (v, (seed, dist)) in nearest_seed(g, &seeds).into_iter().enumerate() {
                    if dist != UNSEEN {
                        out.push((
                            VertexId::from_index(v),
                            SketchEntry {
                                seed: VertexId(seed),
                                dist,
                            },
                        ));
                    }
                }
            }
            out
        });

    let mut all: Vec<(VertexId, SketchEntry)> = per_rep.into_iter().flatten().collect();
    par.sort_unstable(&mut all);
    // Sorted by (vertex, seed, dist): keeping the first of each (vertex, seed)
    // keeps the minimum distance.
    all.dedup_by(|b, a| a.0 == b.0 && a.1.seed == b.1.seed);

    let mut offsets = vec![0usize; n + 1];
    for &(v, _) in &all {
        offsets[v.index() + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let entries = all.into_iter().map(|(_, e)| e).collect();
    DistanceSketchSet::from_parts(factor, repetitions, rng_seed, offsets, entries)
}

fn common_seed_min(a: &[SketchEntry], b: &[SketchEntry], work: &mut u64) -> Option<u32> {
    let (mut i, mut j) = (0, 0);
    let mut best: Option<u32> = None;
    while i < a.len() && j < b.len() {
        *work += 1;
        match a[i].seed.cmp(&b[j].seed) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                let d = a[i].dist + b[j].dist;
                best = Some(best.map_or(d, |x| x.min(d)));
                i += 1;
                j += 1;
            }
        }
    }
    best
}

/// Estimated public distance: min over shared seeds `w` of `d(s,w) + d(w,t)`.
/// `None` when the sketches share no seed.
pub fn sketch_distance(sk: &DistanceSketchSet, s: VertexId, t: VertexId) -> Result<Option<u32>> {
    let mut work = 0;
    sketch_distance_counted(sk, s, t, &mut work)
}

pub fn sketch_distance_counted(
    sk: &DistanceSketchSet,
    s: VertexId,
    t: VertexId,
    work: &mut u64,
) -> Result<Option<u32>> {
    let a = sk.entries(s)?;
    let b = sk.entries(t)?;
    if s == t {
        return Ok(Some(0));
    }
    Ok(common_seed_min(a, b, work))
}

/// Estimate from the viewer to `t` in `G ∪ G_viewer`: private-edge BFS from the
/// viewer, then `min_x D_p(x) + sketch_distance(x, t)`.
pub fn private_sketch_distance(
    sk: &DistanceSketchSet,
    view: &UserView<'_>,
    t: VertexId,
) -> Result<Option<u32>> {
    let mut work = 0;
    private_sketch_distance_counted(sk, view, t, &mut work)
}

pub fn private_sketch_distance_counted(
    sk: &DistanceSketchSet,
    view: &UserView<'_>,
    t: VertexId,
    work: &mut u64,
) -> Result<Option<u32>> {
    private_sketch_between_counted(sk, view, view.viewer(), t, work)
}

/// Same merge for an arbitrary source `s` inside the viewer's view: the
/// private-edge BFS starts at `s` instead of the viewer.
pub fn private_sketch_between(
    sk: &DistanceSketchSet,
    view: &UserView<'_>,
    s: VertexId,
    t: VertexId,
) -> Result<Option<u32>> {
    let mut work = 0;
    private_sketch_between_counted(sk, view, s, t, &mut work)
}

pub fn private_sketch_between_counted(
    sk: &DistanceSketchSet,
    view: &UserView<'_>,
    s: VertexId,
    t: VertexId,
    work: &mut u64,
) -> Result<Option<u32>> {
    if sk.vertex_count() != view.vertex_count() {
        return Err(Error::ParameterMismatch(format!(
            "sketches cover {} vertices, view has {}",
            sk.vertex_count(),
            view.vertex_count()
        )));
    }
    view.check_vertex(s)?;
    view.check_vertex(t)?;
    let Some(pg) = view.overlay().filter(|pg| pg.contains_vertex(s)) else {
        return sketch_distance_counted(sk, s, t, work);
    };

    let mut private_dist: HashMap<VertexId, u32> = HashMap::with_capacity(pg.vertices().len());
    let mut order = Vec::with_capacity(pg.vertices().len());
    let mut queue = VecDeque::new();
    private_dist.insert(s, 0);
    queue.push_back(s);
    while let Some(x) = queue.pop_front() {
        let d = private_dist[&x];
        order.push((x, d));
        for &y in pg.adjacency(x) {
            *work += 1;
            private_dist.entry(y).or_insert_with(|| {
                queue.push_back(y);
                d + 1
            });
        }
    }

    let target = sk.entries(t)?;
    let mut best: Option<u32> = None;
    for (x, dx) in order {
        if best.is_some_and(|b| dx >= b) {
            break;
        }
        let est = if x == t {
            Some(0)
        } else {
            common_seed_min(sk.entries(x)?, target, work)
        };
        if let Some(e) = est {
            let cand = dx + e;
            best = Some(best.map_or(cand, |b| b.min(cand)));
        }
    }
    Ok(best)
}
