//! Personalized PageRank on user views.
//!
//! Three engines share one random-walk model: with probability `alpha` the
//! walk restarts at the source, otherwise it moves to a uniform neighbor. A
//! vertex without neighbors sends its whole mass back to the source.
//!
//! * [`ppr_power`]: dense power iteration, the accuracy oracle;
//! * [`ppr_push`]: local residual push with per-vertex error at most
//!   `eps·deg(v)`, the baseline run directly on the view;
//! * [`ppr_heuristic`]: one fixed-point step from the source over vectors
//!   precomputed on the public graph ([`precompute_public_ppr`]).

use std::cell::RefCell;
use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::model::{PublicGraph, Topology, UserView, VertexId};
use crate::par::Parallelism;

pub const DEFAULT_ALPHA: f64 = 0.15;
pub const DEFAULT_EPS: f64 = 1e-4;
pub const DEFAULT_TOL: f64 = 1e-10;

const MAX_POWER_ITERATIONS: usize = 1_000_000;

/// Sparse nonnegative scores for one source, sorted by vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct PPRVector {
    pub source: VertexId,
    pub alpha: f64,
    scores: Vec<(VertexId, f64)>,
}

impl PPRVector {
    fn from_unsorted(source: VertexId, alpha: f64, mut scores: Vec<(VertexId, f64)>) -> Self {
        scores.retain(|&(_, s)| s > 0.0);
        scores.sort_unstable_by_key(|&(v, _)| v);
        PPRVector {
            source,
            alpha,
            scores,
        }
    }

    pub fn unit(source: VertexId, alpha: f64) -> Self {
        PPRVector {
            source,
            alpha,
            scores: vec![(source, 1.0)],
        }
    }

    pub fn scores(&self) -> &[(VertexId, f64)] {
        &self.scores
    }

    pub fn get(&self, v: VertexId) -> f64 {
        self.scores
            .binary_search_by_key(&v, |&(x, _)| x)
            .map_or(0.0, |i| self.scores[i].1)
    }

    pub fn nnz(&self) -> usize {
        self.scores.len()
    }

    pub fn sum(&self) -> f64 {
        self.scores.iter().map(|&(_, s)| s).sum()
    }

    /// Dense vector over `n` vertices; absent entries are 0.
    pub fn to_dense(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for &(v, s) in &self.scores {
            out[v.index()] = s;
        }
        out
    }

    /// Vertices by descending score, ties by ascending id.
    pub fn ranking(&self) -> Vec<VertexId> {
        self.top_k(usize::MAX).into_iter().map(|(v, _)| v).collect()
    }

    pub fn top_k(&self, k: usize) -> Vec<(VertexId, f64)> {
        let mut sorted = self.scores.clone();
        sorted.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        sorted.truncate(k);
        sorted
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {x}")))
    }
}

/// Power iteration of `π = α·e_u + (1−α)·π·P` until the L1 change drops
/// below `tol`.
pub fn ppr_power<T: Topology + ?Sized>(g: &T, u: VertexId, alpha: f64, tol: f64) -> Result<PPRVector> {
    check_alpha(alpha)?;
    check_positive("tol", tol)?;
    g.check_vertex(u)?;
    let n = g.vertex_count();
    let mut pi = vec![0.0; n];
    pi[u.index()] = 1.0;
    let mut next = vec![0.0; n];
    for _ in 0..MAX_POWER_ITERATIONS {
        next.iter_mut().for_each(|x| *x = 0.0);
        next[u.index()] = alpha;
        for (i, &mass) in pi.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let x = VertexId::from_index(i);
            let deg = g.degree(x);
            let walk = (1.0 - alpha) * mass;
            if deg == 0 {
                next[u.index()] += walk;
            } else {
                let share = walk / deg as f64;
                for y in g.neighbors(x) {
                    next[y.index()] += share;
                }
            }
        }
        let diff: f64 = pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut pi, &mut next);
        if diff < tol {
            let scores = pi
                .into_iter()
                .enumerate()
                .map(|(i, s)| (VertexId::from_index(i), s))
                .collect();
            return Ok(PPRVector::from_unsorted(u, alpha, scores));
        }
    }
    Err(Error::InvalidParameter(format!(
        "power iteration did not reach tol {tol} in {MAX_POWER_ITERATIONS} rounds"
    )))
}

#[derive(Clone, Copy, Default)]
struct PushState {
    estimate: f64,
    residual: f64,
    queued: bool,
}

/// Local push approximation; see [`ppr_push_counted`].
pub fn ppr_push<T: Topology + ?Sized>(g: &T, u: VertexId, alpha: f64, eps: f64) -> Result<PPRVector> {
    let mut work = 0;
    ppr_push_counted(g, u, alpha, eps, &mut work)
}

/// Local push from `u`. Vertices whose residual reaches `eps·deg(v)` are
/// processed in FIFO order: `α·r(v)` settles into the estimate and the rest
/// spreads evenly over the neighbors. On exit `|p(v) − π(v)| ≤ eps·deg(v)`.
/// `work` accumulates the number of residual updates.
pub fn ppr_push_counted<T: Topology + ?Sized>(
    g: &T,
    u: VertexId,
    alpha: f64,
    eps: f64,
    work: &mut u64,
) -> Result<PPRVector> {
    check_alpha(alpha)?;
    check_positive("eps", eps)?;
    g.check_vertex(u)?;

    let mut state: HashMap<VertexId, PushState> = HashMap::new();
    let mut queue = VecDeque::new();
    state.insert(
        u,
        PushState {
            estimate: 0.0,
            residual: 1.0,
            queued: true,
        },
    );
    queue.push_back(u);

    while let Some(v) = queue.pop_front() {
        let sv = state.get_mut(&v).expect("queued vertex has state");
        sv.queued = false;
        let rv = std::mem::take(&mut sv.residual);
        let deg = g.degree(v);
        if deg == 0 {
            // Only an isolated source can get here; its walk returns to
            // itself forever, so the whole residual settles.
            sv.estimate += rv;
            *work += 1;
            continue;
        }
        sv.estimate += alpha * rv;
        let share = (1.0 - alpha) * rv / deg as f64;
        for w in g.neighbors(v) {
            *work += 1;
            let sw = state.entry(w).or_default();
            sw.residual += share;
            if !sw.queued && sw.residual >= eps * g.degree(w) as f64 {
                sw.queued = true;
                queue.push_back(w);
            }
        }
    }
    let scores = state
        .into_iter()
        .map(|(v, st)| (v, st.estimate))
        .collect();
    Ok(PPRVector::from_unsorted(u, alpha, scores))
}

/// Push vectors for every vertex of the public graph, stored in CSR form.
#[derive(Clone, Debug, PartialEq)]
pub struct PprStore {
    alpha: f64,
    eps: f64,
    offsets: Vec<usize>,
    entries: Vec<(VertexId, f64)>,
}

impl PprStore {
    pub(crate) fn from_parts(
        alpha: f64,
        eps: f64,
        offsets: Vec<usize>,
        entries: Vec<(VertexId, f64)>,
    ) -> Result<Self> {
        let ok = !offsets.is_empty()
            && offsets[0] == 0
            && offsets.windows(2).all(|w| w[0] <= w[1])
            && *offsets.last().unwrap() == entries.len();
        if !ok {
            return Err(Error::InvalidParameter("inconsistent store offsets".into()));
        }
        Ok(PprStore {
            alpha,
            eps,
            offsets,
            entries,
        })
    }

    /// Assembles a store from per-vertex vectors (index `i` is source `i`).
    pub fn from_vectors(alpha: f64, eps: f64, vectors: Vec<PPRVector>) -> Result<Self> {
        let mut offsets = Vec::with_capacity(vectors.len() + 1);
        offsets.push(0);
        let mut entries = Vec::new();
        for (i, vec) in vectors.into_iter().enumerate() {
            if vec.source.index() != i {
                return Err(Error::InvalidParameter(format!(
                    "vector {i} has source {}",
                    vec.source
                )));
            }
            entries.extend(vec.scores);
            offsets.push(entries.len());
        }
        Self::from_parts(alpha, eps, offsets, entries)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn total_entries(&self) -> usize {
        self.entries.len()
    }

    pub(crate) fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub(crate) fn all_entries(&self) -> &[(VertexId, f64)] {
        &self.entries
    }

    /// Stored vector of `v`, sorted by vertex.
    pub fn vector(&self, v: VertexId) -> Result<&[(VertexId, f64)]> {
        if v.index() >= self.vertex_count() {
            return Err(Error::InvalidVertex(v, self.vertex_count()));
        }
        Ok(&self.entries[self.offsets[v.index()]..self.offsets[v.index() + 1]])
    }

    pub fn get(&self, v: VertexId) -> Result<PPRVector> {
        Ok(PPRVector {
            source: v,
            alpha: self.alpha,
            scores: self.vector(v)?.to_vec(),
        })
    }
}

/// Offline pass: [`ppr_push`] from every public vertex.
pub fn precompute_public_ppr(
    g: &PublicGraph,
    alpha: f64,
    eps: f64,
    par: Parallelism,
) -> Result<PprStore> {
    check_alpha(alpha)?;
    check_positive("eps", eps)?;
    let vectors = par.map_range(g.vertex_count(), |i| {
        ppr_push(g, VertexId::from_index(i), alpha, eps).expect("validated parameters")
    });
    PprStore::from_vectors(alpha, eps, vectors)
}

thread_local! {
    // Dense accumulator reused across heuristic queries; entries are reset to
    // zero after each use so only touched slots cost anything.
    static SCRATCH: RefCell<Vec<f64>> = const { RefCell::new(Vec::new()) };
}

pub fn ppr_heuristic(store: &PprStore, view: &UserView<'_>, u: VertexId, alpha: f64) -> Result<PPRVector> {
    let mut work = 0;
    ppr_heuristic_counted(store, view, u, alpha, &mut work)
}

/// Online step: `π̂ = α·e_u + (1−α)/|N(u)| · Σ_{v ∈ N(u)} store[v]` where `N(u)`
/// are `u`'s public and private neighbors in the view.
pub fn ppr_heuristic_counted(
    store: &PprStore,
    view: &UserView<'_>,
    u: VertexId,
    alpha: f64,
    work: &mut u64,
) -> Result<PPRVector> {
    check_alpha(alpha)?;
    if (store.alpha - alpha).abs() > 1e-12 {
        return Err(Error::ParameterMismatch(format!(
            "store built with alpha {} but query uses {alpha}",
            store.alpha
        )));
    }
    if store.vertex_count() != view.vertex_count() {
        return Err(Error::ParameterMismatch(format!(
            "store covers {} vertices, view has {}",
            store.vertex_count(),
            view.vertex_count()
        )));
    }
    view.check_vertex(u)?;
    let deg = view.degree(u);
    if deg == 0 {
        return Ok(PPRVector::unit(u, alpha));
    }

    let weight = (1.0 - alpha) / deg as f64;
    let mut rows = Vec::with_capacity(deg);
    for v in view.neighbors(u) {
        rows.push(store.vector(v)?);
    }
    SCRATCH.with(|cell| {
        let mut acc = cell.borrow_mut();
        if acc.len() < view.vertex_count() {
            acc.resize(view.vertex_count(), 0.0);
        }
        let mut touched = vec![u.0];
        acc[u.index()] = alpha;
        for row in rows {
            *work += row.len() as u64;
            for &(x, s) in row {
                let slot = &mut acc[x.index()];
                if *slot == 0.0 {
                    touched.push(x.0);
                }
                *slot += weight * s;
            }
        }
        let n = view.vertex_count();
        // Output must be in vertex order: sort the k touched ids (k·log k) or
        // sweep the whole accumulator (n), whichever is cheaper.
        let k = touched.len();
        let scores = if k.saturating_mul(k.ilog2() as usize + 1) >= n {
            acc[..n]
                .iter_mut()
                .enumerate()
                .filter(|(_, s)| **s != 0.0)
                .map(|(i, s)| (VertexId::from_index(i), std::mem::take(s)))
                .collect()
        } else {
            touched.sort_unstable();
            touched
                .into_iter()
                .map(|i| (VertexId(i), std::mem::take(&mut acc[i as usize])))
                .collect()
        };
        Ok(PPRVector::from_unsorted(u, alpha, scores))
    })
}
