use std::collections::{BTreeMap, BTreeSet, VecDeque};

use chrono::NaiveDate;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ppgk::builder::{build, Corpus};
use ppgk::ingest::{CutoffTimestamp, PaperRecord};
use ppgk::metrics::network_stats;
use ppgk::model::Topology;
use ppgk::ppr::{precompute_public_ppr, ppr_heuristic, ppr_power, ppr_push, PprStore};
use ppgk::sketch::{build_sketches, private_sketch_distance, sketch_distance};
use ppgk::synth::{random_edges, random_pp_graph, random_records, PrivateConfig, RecordConfig};
use ppgk::{io as fileset, persist, view, PPGraph, Parallelism, VertexId};

fn records(seed: u64, papers: usize) -> Vec<PaperRecord> {
    let cfg = RecordConfig {
        authors: 15,
        papers,
        ..Default::default()
    };
    random_records(&mut ChaCha8Rng::seed_from_u64(seed), &cfg)
}

fn pp_graph(seed: u64, n: usize, degree: f64, cfg: &PrivateConfig) -> PPGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = random_edges(&mut rng, n, degree);
    random_pp_graph(&mut rng, n, &edges, cfg).unwrap()
}

fn year(y: i32) -> CutoffTimestamp {
    CutoffTimestamp(NaiveDate::from_ymd_opt(y, 1, 1).unwrap())
}

fn by_name(g: &PPGraph, a: VertexId, b: VertexId) -> (String, String) {
    let (a, b) = (g.name(a).unwrap().to_owned(), g.name(b).unwrap().to_owned());
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

type NamedEdges = BTreeSet<(String, String)>;

/// Public edges, and private edges per owner, computed straight from records.
fn construction_oracle(recs: &[PaperRecord], y: CutoffTimestamp) -> (NamedEdges, BTreeMap<String, NamedEdges>) {
    let pair = |a: &String, b: &String| if a < b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    let mut public = BTreeSet::new();
    for r in recs.iter().filter(|r| r.date < y.0) {
        for (i, a) in r.authors.iter().enumerate() {
            for b in &r.authors[i + 1..] {
                public.insert(pair(a, b));
            }
        }
    }
    let mut private: BTreeMap<String, NamedEdges> = BTreeMap::new();
    for r in recs.iter().filter(|r| r.date >= y.0) {
        for (i, a) in r.authors.iter().enumerate() {
            for b in &r.authors[i + 1..] {
                let e = pair(a, b);
                if public.contains(&e) {
                    continue;
                }
                for owner in &r.authors {
                    private.entry(owner.clone()).or_default().insert(e.clone());
                }
            }
        }
    }
    (public, private)
}

fn bfs_oracle<T: Topology>(g: &T, s: VertexId) -> Vec<Option<u32>> {
    let mut dist = vec![None; g.vertex_count()];
    dist[s.index()] = Some(0);
    let mut q = VecDeque::from([s]);
    while let Some(x) = q.pop_front() {
        let d = dist[x.index()].unwrap();
        for y in g.neighbors(x) {
            if dist[y.index()].is_none() {
                dist[y.index()] = Some(d + 1);
                q.push_back(y);
            }
        }
    }
    dist
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn construction_matches_oracle(seed in any::<u64>(), papers in 1usize..80, y in 2007i32..2019) {
        let recs = records(seed, papers);
        let cutoff = year(y);
        let g = build(&Corpus::from_records(recs.clone()), cutoff, Parallelism::Sequential).unwrap();
        let (public, private) = construction_oracle(&recs, cutoff);

        let got_public: NamedEdges = g.public().edges().map(|(a, b)| by_name(&g, a, b)).collect();
        prop_assert_eq!(&got_public, &public);
        let got_private: BTreeMap<String, NamedEdges> = g
            .private_graphs()
            .map(|pg| {
                let es = pg.edges().iter().map(|&(a, b)| by_name(&g, a, b)).collect();
                (g.name(pg.owner()).unwrap().to_owned(), es)
            })
            .collect();
        prop_assert_eq!(&got_private, &private);
        let union: NamedEdges = private.values().flatten().cloned().collect();
        prop_assert!(union.is_disjoint(&public));
        prop_assert_eq!(network_stats(&g).n_private_edges, union.len());
    }

    #[test]
    fn later_cutoff_moves_edges_to_public(seed in any::<u64>(), papers in 1usize..80) {
        let corpus = Corpus::from_records(records(seed, papers));
        let stats: Vec<_> = [2009, 2012, 2014, 2016]
            .into_iter()
            .map(|y| network_stats(&build(&corpus, year(y), Parallelism::Sequential).unwrap()))
            .collect();
        for w in stats.windows(2) {
            prop_assert_eq!(w[0].n_vertices, w[1].n_vertices);
            prop_assert!(w[0].n_public_edges <= w[1].n_public_edges);
            prop_assert!(w[0].n_private_edges >= w[1].n_private_edges);
        }
    }

    #[test]
    fn build_ignores_record_order(seed in any::<u64>(), papers in 1usize..60) {
        let recs = records(seed, papers);
        let mut rev = recs.clone();
        rev.reverse();
        let a = build(&Corpus::from_records(recs), year(2013), Parallelism::Sequential).unwrap();
        let b = build(&Corpus::from_records(rev), year(2013), Parallelism::Parallel).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn file_set_round_trip(seed in any::<u64>(), n in 1usize..60, degree in 0.0f64..6.0) {
        let cfg = PrivateConfig { owner_fraction: 0.3, attributes: true, ..Default::default() };
        let g = pp_graph(seed, n, degree, &cfg);
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("g");
        fileset::save(&g, &out, None).unwrap();
        let (back, _) = fileset::load(&out).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn sketch_estimates_never_undershoot(seed in any::<u64>(), factor in prop::sample::select(vec![1.0, 0.5, 0.25])) {
        let g = pp_graph(seed, 120, 3.0, &PrivateConfig { owner_fraction: 0.2, ..Default::default() });
        let sk = build_sketches(g.public(), factor, seed, Parallelism::Sequential).unwrap();
        for s in (0..120).step_by(17).map(VertexId) {
            let exact = bfs_oracle(g.public(), s);
            for t in (0..120).map(VertexId) {
                match (sketch_distance(&sk, s, t).unwrap(), exact[t.index()]) {
                    (Some(est), Some(d)) => prop_assert!(est >= d),
                    (Some(_), None) => prop_assert!(false, "estimate for unreachable pair"),
                    _ => {}
                }
            }
        }
        for u in g.private_vertices() {
            let vw = view(&g, u).unwrap();
            let exact = bfs_oracle(&vw, u);
            for t in (0..120).map(VertexId) {
                if let Some(est) = private_sketch_distance(&sk, &vw, t).unwrap() {
                    prop_assert!(est >= exact[t.index()].unwrap());
                }
            }
        }
    }

    #[test]
    fn push_within_error_bound(seed in any::<u64>(), eps in prop::sample::select(vec![1e-2, 1e-3, 1e-4])) {
        let g = pp_graph(seed, 80, 3.0, &PrivateConfig::default());
        let u = g.private_vertices().next().unwrap_or(VertexId(0));
        let vw = view(&g, u).unwrap();
        let truth = ppr_power(&vw, u, 0.15, 1e-12).unwrap();
        prop_assert!((truth.sum() - 1.0).abs() < 1e-9);
        let p = ppr_push(&vw, u, 0.15, eps).unwrap();
        for v in (0..80).map(VertexId) {
            let err = (p.get(v) - truth.get(v)).abs();
            prop_assert!(err <= eps * vw.degree(v) as f64 + 1e-12, "v={v} err={err}");
        }
    }

    #[test]
    fn heuristic_exact_without_private_edges(seed in any::<u64>(), alpha in 0.1f64..0.5) {
        let g = pp_graph(seed, 40, 3.0, &PrivateConfig { owner_fraction: 0.0, ..Default::default() });
        let vectors = (0..40)
            .map(|i| ppr_power(g.public(), VertexId(i), alpha, 1e-13).unwrap())
            .collect();
        let store = PprStore::from_vectors(alpha, 0.0, vectors).unwrap();
        for u in (0..40).map(VertexId) {
            let vw = view(&g, u).unwrap();
            let h = ppr_heuristic(&store, &vw, u, alpha).unwrap();
            let truth = ppr_power(&vw, u, alpha, 1e-13).unwrap();
            for v in (0..40).map(VertexId) {
                prop_assert!((h.get(v) - truth.get(v)).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn artifacts_round_trip_and_reject_other_graphs() {
    let g = pp_graph(3, 200, 4.0, &PrivateConfig::default());
    let other = pp_graph(4, 200, 4.0, &PrivateConfig::default());
    let dir = tempfile::tempdir().unwrap();
    let sum = fileset::save(&g, &dir.path().join("g"), None).unwrap();
    let other_sum = fileset::graph_checksum(&other);
    assert_ne!(sum, other_sum);

    let sk = build_sketches(g.public(), 0.5, 11, Parallelism::default()).unwrap();
    let p = dir.path().join("sk.bin");
    persist::save_sketches(&sk, sum, &p).unwrap();
    assert_eq!(persist::load_sketches(&p, sum, 0.5, 11).unwrap(), sk);
    assert!(persist::load_sketches(&p, other_sum, 0.5, 11).is_err());

    let store = precompute_public_ppr(g.public(), 0.15, 1e-3, Parallelism::default()).unwrap();
    let p = dir.path().join("ppr.bin");
    persist::save_store(&store, sum, &p).unwrap();
    assert_eq!(persist::load_store(&p, sum, 0.15, 1e-3).unwrap(), store);
    assert!(persist::load_store(&p, sum, 0.15, 1e-4).is_err());
}

#[test]
fn parallel_and_sequential_agree() {
    let g = pp_graph(8, 500, 5.0, &PrivateConfig::default());
    let a = build_sketches(g.public(), 0.25, 2, Parallelism::Sequential).unwrap();
    let b = build_sketches(g.public(), 0.25, 2, Parallelism::Parallel).unwrap();
    assert_eq!(a, b);
    let a = precompute_public_ppr(g.public(), 0.2, 1e-3, Parallelism::Sequential).unwrap();
    let b = precompute_public_ppr(g.public(), 0.2, 1e-3, Parallelism::Parallel).unwrap();
    assert_eq!(a, b);
}
