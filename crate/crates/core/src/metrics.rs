//! Dataset statistics and accuracy measures for query evaluation.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{private_edge_count, KeywordSet, PPGraph, Topology, VertexId};

/// Jaccard overlap `|a ∩ b| / |a ∪ b|`, 0 when both are empty.
pub fn overlap_ratio(a_pub: &BTreeSet<String>, a_priv: &BTreeSet<String>) -> f64 {
    let inter = a_pub.intersection(a_priv).count();
    let union = a_pub.len() + a_priv.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

fn keywords(set: Option<&KeywordSet>) -> &BTreeSet<String> {
    static EMPTY: BTreeSet<String> = BTreeSet::new();
    set.map_or(&EMPTY, KeywordSet::as_set)
}

/// Mean overlap between `A(v)` and `A_u(v)` over `v ∈ V_u`.
pub fn delta_u(g: &PPGraph, u: VertexId) -> Result<f64> {
    g.public().check_vertex(u)?;
    let pg = g.private_graph(u).ok_or(Error::UndefinedOwner(u))?;
    let attrs = g.attributes();
    let total: f64 = pg
        .vertices()
        .iter()
        .map(|&v| overlap_ratio(keywords(attrs.public(v)), keywords(attrs.private(u, v))))
        .sum();
    Ok(total / pg.vertices().len() as f64)
}

/// Mean of [`delta_u`] over all private owners; `None` without owners.
pub fn delta_graph(g: &PPGraph) -> Option<f64> {
    let n = g.private_vertex_count();
    if n == 0 {
        return None;
    }
    let total: f64 = g
        .private_vertices()
        .map(|u| delta_u(g, u).expect("owner"))
        .sum();
    Some(total / n as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NetworkStats {
    pub n_vertices: usize,
    pub n_public_edges: usize,
    pub n_private_vertices: usize,
    pub n_private_edges: usize,
    pub delta_g: Option<f64>,
}

impl NetworkStats {
    pub const TSV_HEADER: &'static str =
        "n_vertices\tn_public_edges\tn_private_vertices\tn_private_edges\tdelta_g";

    /// Single data row matching [`Self::TSV_HEADER`]; absent δ prints `NA`.
    pub fn tsv_row(&self) -> String {
        let delta = self
            .delta_g
            .map_or_else(|| "NA".to_owned(), |d| format!("{d:.6}"));
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.n_vertices, self.n_public_edges, self.n_private_vertices, self.n_private_edges, delta
        )
    }
}

impl fmt::Display for NetworkStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", Self::TSV_HEADER)?;
        write!(f, "{}", self.tsv_row())
    }
}

pub fn network_stats(g: &PPGraph) -> NetworkStats {
    NetworkStats {
        n_vertices: g.vertex_count(),
        n_public_edges: g.public().edge_count(),
        n_private_vertices: g.private_vertex_count(),
        n_private_edges: private_edge_count(g),
        delta_g: delta_graph(g),
    }
}

fn check_dims(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(x.len(), y.len()));
    }
    Ok(())
}

pub fn rmse(x: &[f64], y: &[f64]) -> Result<f64> {
    check_dims(x, y)?;
    if x.is_empty() {
        return Ok(0.0);
    }
    let sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((sq / x.len() as f64).sqrt())
}

pub fn cosine(x: &[f64], y: &[f64]) -> Result<f64> {
    check_dims(x, y)?;
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let nx = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    let ny = y.iter().map(|b| b * b).sum::<f64>().sqrt();
    if nx == 0.0 && ny == 0.0 {
        return Err(Error::ZeroVector);
    }
    if nx == 0.0 || ny == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (nx * ny)).clamp(-1.0, 1.0))
}

/// Kendall τ over the first `k` entries of `truth`.
///
/// For each pair among those `m ≤ k` items the relative order in `test` is
/// compared with the order in `truth`. Items absent from `test` rank after
/// all present ones; a pair where both are absent is a tie and contributes
/// nothing. Returns 1 when fewer than two items are available.
pub fn kendall_tau_at_k(truth: &[VertexId], test: &[VertexId], k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("τ@k needs k ≥ 2, got {k}")));
    }
    let top = &truth[..truth.len().min(k)];
    let m = top.len();
    if m < 2 {
        return Ok(1.0);
    }
    let pos: HashMap<VertexId, usize> = test.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let missing = test.len();
    let ranks: Vec<usize> = top
        .iter()
        .map(|v| pos.get(v).copied().unwrap_or(missing))
        .collect();
    let mut score: i64 = 0;
    for i in 0..m {
        for j in i + 1..m {
            // truth places i before j
            match ranks[i].cmp(&ranks[j]) {
                std::cmp::Ordering::Less => score += 1,
                std::cmp::Ordering::Greater => score -= 1,
                std::cmp::Ordering::Equal => {}
            }
        }
    }
    let pairs = (m * (m - 1) / 2) as f64;
    Ok(score as f64 / pairs)
}

/// `approx / exact`; both zero counts as a perfect answer.
pub fn approximation_ratio(approx: u32, exact: u32) -> Result<f64> {
    match (approx, exact) {
        (0, 0) => Ok(1.0),
        (a, 0) => Err(Error::UnreachableMismatch(a)),
        (a, e) => Ok(a as f64 / e as f64),
    }
}

/// Accuracy of a ranking against the ground truth.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankingAccuracy {
    pub rmse: f64,
    pub cosine: f64,
    pub kendall_tau_at_k: f64,
    pub k: usize,
}
