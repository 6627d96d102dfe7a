//! End-to-end acceptance checks. Each criterion prints one PASS / FAIL / SKIP
//! line with its measurements; the process fails if any criterion fails.
//!
//! Criterion 3 needs a DBLP snapshot: set `PPGK_DBLP_SNAPSHOT` to the path of
//! a (optionally gzipped) `dblp.xml` from 2017 to run it.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ppgk::builder::{build, Corpus};
use ppgk::ingest::{for_each_record, CutoffTimestamp, InputFormat, PaperRecord};
use ppgk::metrics::{
    approximation_ratio, cosine, delta_graph, delta_u, kendall_tau_at_k, network_stats, overlap_ratio, rmse,
};
use ppgk::model::{AttributeStore, KeywordSet, Topology};
use ppgk::ppr::{ppr_heuristic, ppr_power, ppr_push, precompute_public_ppr};
use ppgk::sketch::{build_sketches, private_sketch_distance, sketch_distance};
use ppgk::synth::{random_edges, random_pp_graph, random_records, small_world_edges, PrivateConfig, RecordConfig};
use ppgk::{io as fileset, view, PPGraph, Parallelism, PrivateGraph, PublicGraph, VertexId};

enum Status {
    Pass,
    Fail,
    Skip,
}

struct Outcome {
    status: Status,
    detail: String,
}

impl Outcome {
    fn check(ok: bool, detail: String) -> Self {
        Outcome {
            status: if ok { Status::Pass } else { Status::Fail },
            detail,
        }
    }
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name)
}

fn fixture_records() -> Vec<PaperRecord> {
    let mut recs = Vec::new();
    for_each_record(&data("fixture20.tsv"), InputFormat::Fixture, |r| recs.push(r)).unwrap();
    recs
}

fn cutoff(s: &str) -> CutoffTimestamp {
    s.parse().unwrap()
}

fn bfs(g: &impl Topology, s: VertexId) -> Vec<Option<u32>> {
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

/// Early-exit BFS from `s` to `t`, the baseline whose latency is compared.
fn bfs_to(g: &impl Topology, s: VertexId, t: VertexId) -> Option<u32> {
    if s == t {
        return Some(0);
    }
    let mut dist = vec![u32::MAX; g.vertex_count()];
    dist[s.index()] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(x) = q.pop_front() {
        let d = dist[x.index()];
        for y in g.neighbors(x) {
            if dist[y.index()] == u32::MAX {
                if y == t {
                    return Some(d + 1);
                }
                dist[y.index()] = d + 1;
                q.push_back(y);
            }
        }
    }
    None
}

fn pp_graph(rng: &mut ChaCha8Rng, n: usize, edges: &[(VertexId, VertexId)], cfg: &PrivateConfig) -> PPGraph {
    random_pp_graph(rng, n, edges, cfg).unwrap()
}

type Pair = (String, String);

fn pair(a: &str, b: &str) -> Pair {
    if a < b {
        (a.to_owned(), b.to_owned())
    } else {
        (b.to_owned(), a.to_owned())
    }
}

/// Checks the construction invariants of `g` directly against `recs`.
fn construction_violations(recs: &[PaperRecord], y: CutoffTimestamp, g: &PPGraph) -> Vec<String> {
    let mut out = Vec::new();
    let name = |v: VertexId| g.name(v).unwrap();
    let public: BTreeSet<Pair> = g.public().edges().map(|(a, b)| pair(name(a), name(b))).collect();
    let mut witnesses: BTreeMap<Pair, Vec<&PaperRecord>> = BTreeMap::new();
    for r in recs.iter().filter(|r| r.date >= y.date()) {
        for (i, a) in r.authors.iter().enumerate() {
            for b in &r.authors[i + 1..] {
                witnesses.entry(pair(a, b)).or_default().push(r);
            }
        }
    }
    let mut union = BTreeSet::new();
    let mut per_owner: BTreeMap<String, BTreeSet<Pair>> = BTreeMap::new();
    for pg in g.private_graphs() {
        let owner = name(pg.owner()).to_owned();
        for &(a, b) in pg.edges() {
            let e = pair(name(a), name(b));
            if public.contains(&e) {
                out.push(format!("private edge {e:?} is also public"));
            }
            if !witnesses.contains_key(&e) {
                out.push(format!("private edge {e:?} has no co-authored paper on or after the cutoff"));
            }
            per_owner.entry(owner.clone()).or_default().insert(e.clone());
            union.insert(e);
        }
    }
    for (e, papers) in &witnesses {
        if public.contains(e) {
            continue;
        }
        for r in papers {
            for a in &r.authors {
                if !per_owner.get(a).is_some_and(|s| s.contains(e)) {
                    out.push(format!("{e:?} missing from the private graph of co-author {a}"));
                }
            }
        }
    }
    if network_stats(g).n_private_edges != union.len() {
        out.push("private edge count does not deduplicate across owners".into());
    }
    out
}

fn criterion_1() -> Outcome {
    let mut violations = Vec::new();
    let fixture = fixture_records();
    let y = cutoff("2015-01-01");
    let g = build(&Corpus::from_records(fixture.clone()), y, Parallelism::default()).unwrap();
    violations.extend(construction_violations(&fixture, y, &g));

    let years = ["2009-01-01", "2011-07-01", "2013-01-01", "2015-01-01", "2017-01-01"];
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = RecordConfig {
            authors: rng.gen_range(2..40),
            papers: rng.gen_range(1..80),
            ..Default::default()
        };
        let recs = random_records(&mut rng, &cfg);
        let y = cutoff(years[seed as usize % years.len()]);
        let g = build(&Corpus::from_records(recs.clone()), y, Parallelism::Sequential).unwrap();
        violations.extend(construction_violations(&recs, y, &g));
    }
    Outcome::check(
        violations.is_empty(),
        format!("fixture + 1000 random record sets, {} violations {:?}", violations.len(), violations.first()),
    )
}

fn criterion_2() -> Outcome {
    let cutoffs = ["2013-01-01", "2014-01-01", "2015-01-01", "2016-01-01"].map(cutoff);
    let mut sets = vec![fixture_records()];
    for seed in 0..200u64 {
        sets.push(random_records(&mut ChaCha8Rng::seed_from_u64(seed), &RecordConfig::default()));
    }
    let mut bad = 0;
    for recs in sets {
        let corpus = Corpus::from_records(recs);
        let stats: Vec<_> = cutoffs
            .iter()
            .map(|&y| network_stats(&build(&corpus, y, Parallelism::Sequential).unwrap()))
            .collect();
        for w in stats.windows(2) {
            if w[0].n_vertices != w[1].n_vertices
                || w[0].n_public_edges > w[1].n_public_edges
                || w[0].n_private_edges < w[1].n_private_edges
            {
                bad += 1;
            }
        }
    }
    Outcome::check(bad == 0, format!("201 record sets x 4 cutoffs, {bad} non-monotone steps"))
}

fn criterion_3() -> Outcome {
    let Some(path) = std::env::var_os("PPGK_DBLP_SNAPSHOT") else {
        return Outcome {
            status: Status::Skip,
            detail: "PPGK_DBLP_SNAPSHOT not set".into(),
        };
    };
    let mut corpus = ppgk::builder::CorpusBuilder::new();
    if let Err(e) = for_each_record(Path::new(&path), InputFormat::DblpXml, |r| corpus.push(r)) {
        return Outcome::check(false, format!("cannot read snapshot: {e}"));
    }
    let g = build(&corpus.finish(), cutoff("2016-01-01"), Parallelism::default()).unwrap();
    let s = network_stats(&g);
    let within = |got: usize, want: f64| ((got as f64 - want) / want).abs() <= 0.02;
    let delta = s.delta_g.unwrap_or(f64::NAN);
    let ok = within(s.n_vertices, 1_791_688.0)
        && within(s.n_public_edges, 7_378_090.0)
        && within(s.n_private_vertices, 263_937.0)
        && within(s.n_private_edges, 445_505.0)
        && (delta - 0.083).abs() <= 0.02;
    Outcome::check(
        ok,
        format!(
            "|V|={} |E|={} |V_private|={} |E_private|={} delta={delta:.4}",
            s.n_vertices, s.n_public_edges, s.n_private_vertices, s.n_private_edges
        ),
    )
}

fn criterion_4() -> Outcome {
    let (mut checked, mut violations) = (0u64, 0u64);
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 1000;
        let edges = random_edges(&mut rng, n, 8.0);
        let g = pp_graph(&mut rng, n, &edges, &PrivateConfig::default());
        let sk = build_sketches(g.public(), 0.5, seed, Parallelism::default()).unwrap();
        for _ in 0..5 {
            let s = VertexId(rng.gen_range(0..n as u32));
            let exact = bfs(g.public(), s);
            for t in (0..n).map(VertexId::from_index) {
                if let Some(est) = sketch_distance(&sk, s, t).unwrap() {
                    checked += 1;
                    if exact[t.index()].is_none_or(|d| est < d) {
                        violations += 1;
                    }
                }
            }
        }
        let owners: Vec<VertexId> = g.private_vertices().collect();
        for &u in owners.choose_multiple(&mut rng, 5) {
            let vw = view(&g, u).unwrap();
            let exact = bfs(&vw, u);
            for t in (0..n).map(VertexId::from_index) {
                if let Some(est) = private_sketch_distance(&sk, &vw, t).unwrap() {
                    checked += 1;
                    if exact[t.index()].is_none_or(|d| est < d) {
                        violations += 1;
                    }
                }
            }
        }
    }
    Outcome::check(
        violations == 0,
        format!("100 graphs, {checked} estimates, {violations} below the exact distance"),
    )
}

/// Owners paired with a reachable target, drawn with a seeded RNG.
fn sample_queries(g: &PPGraph, count: usize, rng: &mut ChaCha8Rng) -> Vec<(VertexId, VertexId, u32)> {
    let owners: Vec<VertexId> = g.private_vertices().collect();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u = *owners.choose(rng).unwrap();
        let dist = bfs(&view(g, u).unwrap(), u);
        let reach: Vec<(usize, u32)> = dist
            .iter()
            .enumerate()
            .filter_map(|(i, d)| d.filter(|&d| d > 0).map(|d| (i, d)))
            .collect();
        if let Some(&(t, d)) = reach.choose(rng) {
            out.push((u, VertexId::from_index(t), d));
        }
    }
    out
}

fn star_config() -> PrivateConfig {
    PrivateConfig {
        owner_fraction: 0.05,
        star_edges: 4,
        extra_edges: 0,
        attributes: false,
    }
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let n = 10_000;
    let edges = small_world_edges(&mut rng, n, 8, 0.1);
    let g = pp_graph(&mut rng, n, &edges, &star_config());
    let queries = sample_queries(&g, 50, &mut rng);
    let mean_ratio = |factor: f64| {
        let sk = build_sketches(g.public(), factor, 7, Parallelism::default()).unwrap();
        let ratios: Vec<f64> = queries
            .iter()
            .map(|&(u, t, d)| {
                let est = private_sketch_distance(&sk, &view(&g, u).unwrap(), t).unwrap();
                est.map_or(f64::INFINITY, |e| approximation_ratio(e, d).unwrap())
            })
            .collect();
        ratios.iter().sum::<f64>() / ratios.len() as f64
    };
    let (r1, r025) = (mean_ratio(1.0), mean_ratio(0.25));

    let n = 100_000;
    let edges = small_world_edges(&mut rng, n, 8, 0.1);
    let big = pp_graph(&mut rng, n, &edges, &star_config());
    let queries = sample_queries(&big, 50, &mut rng);
    let sk = build_sketches(big.public(), 0.25, 7, Parallelism::default()).unwrap();
    let views: Vec<_> = queries.iter().map(|&(u, _, _)| view(&big, u).unwrap()).collect();
    let start = Instant::now();
    for (vw, &(u, t, d)) in views.iter().zip(&queries) {
        assert_eq!(bfs_to(vw, u, t), Some(d));
    }
    let exact = start.elapsed() / queries.len() as u32;
    let start = Instant::now();
    for (vw, &(_, t, _)) in views.iter().zip(&queries) {
        std::hint::black_box(private_sketch_distance(&sk, vw, t).unwrap());
    }
    let fast = start.elapsed() / queries.len() as u32;

    let ok = r025 <= 2.0 && r025 <= r1 + 0.05 && fast * 10 <= exact;
    Outcome::check(
        ok,
        format!(
            "n=10k mean ratio m=1: {r1:.3}, m=0.25: {r025:.3}; n=100k latency bfs {exact:?} vs sketch {fast:?} ({:.0}x)",
            exact.as_secs_f64() / fast.as_secs_f64().max(1e-12)
        ),
    )
}

fn criterion_6() -> Outcome {
    let (mut worst_excess, mut worst_sum) = (f64::NEG_INFINITY, 0.0f64);
    let mut violations = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 200;
        let degree = rng.gen_range(1.0..8.0);
        let edges = random_edges(&mut rng, n, degree);
        let g = pp_graph(&mut rng, n, &edges, &PrivateConfig::default());
        let u = VertexId(rng.gen_range(0..n as u32));
        let vw = view(&g, u).unwrap();
        let eps = [1e-3, 1e-4, 1e-5][seed as usize % 3];
        let truth = ppr_power(&vw, u, 0.15, 1e-12).unwrap();
        worst_sum = worst_sum.max((truth.sum() - 1.0).abs());
        let p = ppr_push(&vw, u, 0.15, eps).unwrap();
        for v in (0..n).map(VertexId::from_index) {
            let excess = (p.get(v) - truth.get(v)).abs() - eps * vw.degree(v) as f64;
            worst_excess = worst_excess.max(excess);
            if excess > 1e-12 {
                violations += 1;
            }
        }
    }
    Outcome::check(
        violations == 0 && worst_sum <= 1e-9,
        format!("100 graphs, {violations} bound violations, max |sum-1| {worst_sum:.2e}, max slack used {worst_excess:.2e}"),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let n = 10_000;
    let alpha = 0.15;
    let edges = random_edges(&mut rng, n, 8.0);
    let g = pp_graph(&mut rng, n, &edges, &star_config());
    let store = precompute_public_ppr(g.public(), alpha, 1e-3, Parallelism::default()).unwrap();
    let owners: Vec<VertexId> = g.private_vertices().collect();
    let sources: Vec<VertexId> = (0..50).map(|_| *owners.choose(&mut rng).unwrap()).collect();

    let (mut cos, mut err, mut tau) = (0.0, 0.0, 0.0);
    for &u in &sources {
        let vw = view(&g, u).unwrap();
        let truth = ppr_power(&vw, u, alpha, 1e-10).unwrap();
        let h = ppr_heuristic(&store, &vw, u, alpha).unwrap();
        let (x, y) = (truth.to_dense(n), h.to_dense(n));
        cos += cosine(&x, &y).unwrap();
        err += rmse(&x, &y).unwrap();
        tau += kendall_tau_at_k(&truth.ranking(), &h.ranking(), 50).unwrap();
    }
    let m = sources.len() as f64;
    let (cos, err, tau) = (cos / m, err / m, tau / m);

    // Latency: each engine answers the whole batch in its own loop.
    let views: Vec<_> = sources.iter().map(|&u| view(&g, u).unwrap()).collect();
    let start = Instant::now();
    for (vw, &u) in views.iter().zip(&sources) {
        std::hint::black_box(ppr_push(vw, u, alpha, 1e-4).unwrap());
    }
    let t_push = start.elapsed();
    let start = Instant::now();
    for (vw, &u) in views.iter().zip(&sources) {
        std::hint::black_box(ppr_heuristic(&store, vw, u, alpha).unwrap());
    }
    let t_heur = start.elapsed();
    let ok = cos >= 0.85 && err <= 0.02 && t_heur * 10 <= t_push;
    Outcome::check(
        ok,
        format!(
            "cosine {cos:.4}, rmse {err:.5}, tau@50 {tau:.4}; latency push {:?} vs heuristic {:?} ({:.0}x)",
            t_push / 50,
            t_heur / 50,
            t_push.as_secs_f64() / t_heur.as_secs_f64().max(1e-12)
        ),
    )
}

fn criterion_8() -> Outcome {
    let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
    let v = VertexId;
    let mut failures = Vec::new();
    let mut expect = |name: &str, ok: bool| {
        if !ok {
            failures.push(name.to_owned());
        }
    };
    expect("theta disjoint", overlap_ratio(&set(&["Skyline"]), &set(&["XML"])) == 0.0);
    expect("theta identical", overlap_ratio(&set(&["a", "b"]), &set(&["a", "b"])) == 1.0);
    expect("theta 1/3", overlap_ratio(&set(&["a", "b"]), &set(&["b", "c"])) == 1.0 / 3.0);
    expect("theta empty", overlap_ratio(&set(&[]), &set(&[])) == 0.0);

    let kw = |xs: &[&str]| KeywordSet::new(xs.iter().copied()).unwrap();
    let public = PublicGraph::from_edges(4, []).unwrap();
    let a = PrivateGraph::new(v(0), [(v(0), v(1))]).unwrap();
    let b = PrivateGraph::new(v(2), [(v(2), v(3))]).unwrap();
    let mut attrs = AttributeStore::new();
    attrs.set_public(v(0), kw(&["x"]));
    attrs.set_private(v(0), v(0), kw(&["x"]));
    attrs.set_public(v(1), kw(&["y"]));
    attrs.set_private(v(0), v(1), kw(&["z"]));
    attrs.set_public(v(3), kw(&["q"]));
    let names = (0..4).map(|i| format!("v{i}")).collect();
    let g = PPGraph::new(names, public, [a, b], attrs).unwrap();
    expect("delta_u {0,1}", delta_u(&g, v(0)).unwrap() == 0.5);
    expect("delta_u all private empty", delta_u(&g, v(2)).unwrap() == 0.0);
    expect("delta_u non-owner", delta_u(&g, v(1)).is_err());
    expect("delta_graph mean", delta_graph(&g) == Some(0.25));

    expect("rmse equal", rmse(&[0.3, 0.7], &[0.3, 0.7]).unwrap() == 0.0);
    expect("cosine equal", (cosine(&[0.3, 0.7], &[0.3, 0.7]).unwrap() - 1.0).abs() < 1e-15);
    expect("rmse 0.1", (rmse(&[0.5, 0.5], &[0.4, 0.6]).unwrap() - 0.1).abs() < 1e-12);
    expect("cosine orthogonal", cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap() == 0.0);
    expect("cosine zero", cosine(&[0.0, 0.0], &[0.0, 0.0]).is_err());
    expect("rmse dims", rmse(&[1.0], &[1.0, 2.0]).is_err());

    let r: Vec<VertexId> = (0..6).map(v).collect();
    let rev: Vec<VertexId> = r.iter().rev().copied().collect();
    expect("tau identical", kendall_tau_at_k(&r, &r, 6).unwrap() == 1.0);
    expect("tau reversed", kendall_tau_at_k(&r, &rev, 6).unwrap() == -1.0);
    let swapped = [v(0), v(2), v(1), v(3)];
    expect("tau one swap", (kendall_tau_at_k(&r[..4], &swapped, 4).unwrap() - (1.0 - 2.0 / 6.0)).abs() < 1e-12);
    expect("tau k<2", kendall_tau_at_k(&r, &r, 1).is_err());

    expect("ratio 3/2", approximation_ratio(3, 2).unwrap() == 1.5);
    expect("ratio equal", approximation_ratio(4, 4).unwrap() == 1.0);
    expect("ratio 0/0", approximation_ratio(0, 0).unwrap() == 1.0);
    expect("ratio x/0", approximation_ratio(2, 0).is_err());
    Outcome::check(failures.is_empty(), format!("25 identities, failed: {failures:?}"))
}

fn ppgk(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ppgk"))
        .args(args)
        .env_remove("PPGK_THREADS")
        .output()
        .expect("spawn ppgk")
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut mismatches = 0;
    let mut graphs: Vec<PPGraph> = ["1900-01-01", "2013-01-01", "2015-01-01", "2100-01-01"]
        .iter()
        .map(|y| build(&Corpus::from_records(fixture_records()), cutoff(y), Parallelism::default()).unwrap())
        .collect();
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..300);
        let degree = rng.gen_range(0.0..6.0);
        let edges = random_edges(&mut rng, n, degree);
        let cfg = PrivateConfig {
            owner_fraction: rng.gen_range(0.0..0.5),
            attributes: true,
            ..Default::default()
        };
        graphs.push(pp_graph(&mut rng, n, &edges, &cfg));
    }
    for (i, g) in graphs.iter().enumerate() {
        let out = dir.path().join(format!("g{i}"));
        fileset::save(g, &out, None).unwrap();
        if fileset::load(&out).map(|(back, _)| back != *g).unwrap_or(true) {
            mismatches += 1;
        }
    }

    let graph = dir.path().join("bench");
    fileset::save(&graphs[2], &graph, Some(cutoff("2015-01-01").date())).unwrap();
    let graph = graph.to_str().unwrap();
    let mut identical = true;
    for task in ["sp", "ppr"] {
        let run = |threads: &str| {
            ppgk(&["bench", "--graph", graph, "--task", task, "--queries", "50", "--seed", "9", "--threads", threads]).stdout
        };
        let first = run("1");
        identical &= !first.is_empty() && first == run("1") && first == run("4");
    }
    Outcome::check(
        mismatches == 0 && identical,
        format!(
            "{} graphs, {mismatches} round-trip mismatches; bench CSV byte-identical: {identical}",
            graphs.len()
        ),
    )
}

/// Name, check, and time budget.
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("construction invariants", criterion_1, Duration::from_secs(10)),
        ("monotone in the cutoff", criterion_2, Duration::from_secs(10)),
        ("full-scale statistics", criterion_3, Duration::from_secs(3600)),
        ("sketch soundness", criterion_4, Duration::from_secs(120)),
        ("sketch quality and latency", criterion_5, Duration::from_secs(600)),
        ("push error bound", criterion_6, Duration::from_secs(120)),
        ("heuristic PageRank fidelity", criterion_7, Duration::from_secs(600)),
        ("metric identities", criterion_8, Duration::from_secs(1)),
        ("serialization and determinism", criterion_9, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let took = start.elapsed();
        if took > budget && matches!(outcome.status, Status::Pass) {
            outcome.status = Status::Fail;
            outcome.detail.push_str(&format!("; over budget {budget:?}"));
        }
        let tag = match outcome.status {
            Status::Pass => "PASS",
            Status::Fail => {
                failed += 1;
                "FAIL"
            }
            Status::Skip => "SKIP",
        };
        println!("criterion {} {tag} {name} [{took:.2?}]: {}", i + 1, outcome.detail);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
