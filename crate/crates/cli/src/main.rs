use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ppgk::bench::{self, BenchConfig, Task};
use ppgk::builder::{self, CorpusBuilder};
use ppgk::ingest::{for_each_record, CutoffTimestamp, InputFormat};
use ppgk::io::{self as fileset, GraphChecksum};
use ppgk::metrics::{network_stats, NetworkStats};
use ppgk::persist;
use ppgk::ppr::{self, PprStore, DEFAULT_ALPHA, DEFAULT_EPS, DEFAULT_TOL};
use ppgk::sketch::{self, DistanceSketchSet};
use ppgk::{view, Error, PPGraph, Parallelism, VertexId};

const EXIT_OTHER: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_OUTPUT: u8 = 3;
const EXIT_ARTIFACT: u8 = 4;
const EXIT_NO_OWNERS: u8 = 5;

#[derive(Parser)]
#[command(name = "ppgk", version, about = "Public-private graph toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a public-private graph from publication records.
    Generate(GenerateArgs),
    /// Answer one shortest-path or PageRank query.
    Query(QueryArgs),
    /// Run a seeded batch of queries and write a CSV report.
    Bench(BenchArgs),
    /// Print the network statistics row of a stored graph.
    Stats {
        #[arg(long)]
        graph: PathBuf,
    },
}

#[derive(clap::Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["input", "fixture"])))]
struct GenerateArgs {
    /// DBLP XML dump, optionally gzip-compressed.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Tab-separated fixture: date, `;`-separated authors, title.
    #[arg(long)]
    fixture: Option<PathBuf>,
    /// Papers strictly before this date are public.
    #[arg(long)]
    cutoff: CutoffTimestamp,
    #[arg(long)]
    out: PathBuf,
    /// Number of worker threads (0 = one per core).
    #[arg(long, env = "PPGK_THREADS", default_value_t = 0)]
    threads: usize,
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TaskArg {
    Sp,
    Ppr,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    /// sp: breadth-first search on the view.
    Exact,
    /// sp: public sketches merged with the private graph.
    Sketch,
    /// sp: exact and sketch.
    Both,
    /// ppr: power iteration on the view.
    Power,
    /// ppr: local push on the view.
    Push,
    /// ppr: precomputed public vectors plus the viewer's neighborhood.
    Heuristic,
}

#[derive(clap::Args)]
struct QueryArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum)]
    task: TaskArg,
    /// Vertex id (or author name) whose private graph is overlaid.
    #[arg(long)]
    viewer: String,
    #[arg(long)]
    source: String,
    #[arg(long)]
    target: Option<String>,
    /// Defaults to `exact` for sp and `push` for ppr.
    #[arg(long, value_enum)]
    engine: Option<Engine>,
    /// Compute and store missing sketch or PageRank artifacts.
    #[arg(long)]
    build: bool,
    /// Sketch multiplicative factor m in (0, 1].
    #[arg(long, default_value_t = 0.5)]
    factor: f64,
    /// Sketch sampling seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Push tolerance for the on-view baseline.
    #[arg(long, default_value_t = DEFAULT_EPS)]
    eps: f64,
    /// Push tolerance used for the precomputed public store.
    #[arg(long, default_value_t = 1e-3)]
    store_eps: f64,
    #[arg(long, default_value_t = 20)]
    top_k: usize,
    #[arg(long, env = "PPGK_THREADS", default_value_t = 0)]
    threads: usize,
}

#[derive(clap::Args)]
struct BenchArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum)]
    task: TaskArg,
    #[arg(long, default_value_t = 50)]
    queries: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Comma-separated sketch factors to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.5, 0.25])]
    factors: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    eps: f64,
    #[arg(long, default_value_t = 1e-3)]
    store_eps: f64,
    #[arg(long, default_value_t = 50)]
    top_k: usize,
    #[arg(long, env = "PPGK_THREADS", default_value_t = 0)]
    threads: usize,
    /// Run query batches on the calling thread only.
    #[arg(long)]
    sequential: bool,
    /// Add wall-clock columns (the CSV is then no longer reproducible).
    #[arg(long)]
    timings: bool,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl std::fmt::Display) -> Self {
        Failure {
            code,
            message: message.to_string(),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn parallelism(sequential: bool) -> Parallelism {
    if sequential {
        Parallelism::Sequential
    } else {
        Parallelism::default()
    }
}

fn stdout_failure(e: io::Error) -> Failure {
    Failure::new(EXIT_OUTPUT, format!("writing output: {e}"))
}

fn print_stats(stats: &NetworkStats) -> CmdResult {
    let mut out = io::stdout().lock();
    writeln!(out, "{stats}").map_err(stdout_failure)
}

fn cmd_generate(args: GenerateArgs) -> CmdResult {
    let (path, format) = match (&args.input, &args.fixture) {
        (Some(p), _) => (p.as_path(), InputFormat::DblpXml),
        (None, Some(p)) => (p.as_path(), InputFormat::Fixture),
        (None, None) => unreachable!("clap enforces one input"),
    };
    let mut corpus = CorpusBuilder::new();
    let report = for_each_record(path, format, |r| corpus.push(r)).map_err(|e| Failure::new(EXIT_INPUT, e))?;
    eprintln!(
        "read {} publications: {} kept, {} without authors, {} without a usable date",
        report.encountered, report.emitted, report.missing_authors, report.missing_date
    );
    let par = parallelism(args.sequential);
    let corpus = corpus.finish();
    let g = par
        .install(args.threads, || builder::build(&corpus, args.cutoff, par))
        .map_err(|e| Failure::new(EXIT_OTHER, e))?;
    fileset::save(&g, &args.out, Some(args.cutoff.date())).map_err(|e| Failure::new(EXIT_OUTPUT, e))?;
    print_stats(&network_stats(&g))
}

fn load_graph(dir: &Path) -> Result<(PPGraph, fileset::Manifest), Failure> {
    fileset::load(dir).map_err(|e| Failure::new(EXIT_INPUT, e))
}

fn resolve(g: &PPGraph, flag: &str, s: &str) -> Result<VertexId, Failure> {
    let v = match s.parse::<u32>() {
        Ok(i) => VertexId(i),
        Err(_) => g
            .vertex_by_name(s)
            .ok_or_else(|| Failure::new(EXIT_INPUT, format!("--{flag}: no vertex named {s:?}")))?,
    };
    if v.index() >= g.vertex_count() {
        return Err(Failure::new(
            EXIT_INPUT,
            format!("--{flag}: vertex {v} out of range (graph has {} vertices)", g.vertex_count()),
        ));
    }
    Ok(v)
}

fn sketch_path(dir: &Path, factor: f64, seed: u64) -> PathBuf {
    dir.join(format!("sketch-m{factor}-s{seed}.bin"))
}

fn store_path(dir: &Path, alpha: f64, eps: f64) -> PathBuf {
    dir.join(format!("ppr-a{alpha}-e{eps}.bin"))
}

/// Loads an artifact, rebuilding it when allowed. A missing, stale or
/// mismatched file without `--build` is reported with the artifact exit code.
fn artifact<T>(
    path: &Path,
    build: bool,
    load: impl FnOnce() -> ppgk::Result<T>,
    compute: impl FnOnce() -> ppgk::Result<T>,
    save: impl FnOnce(&T) -> ppgk::Result<()>,
) -> Result<T, Failure> {
    let loaded = if path.exists() { Some(load()) } else { None };
    match loaded {
        Some(Ok(x)) => return Ok(x),
        Some(Err(e)) if !build => {
            return Err(Failure::new(EXIT_ARTIFACT, format!("{e}; rerun with --build")));
        }
        None if !build => {
            return Err(Failure::new(
                EXIT_ARTIFACT,
                format!("{} not found; rerun with --build", path.display()),
            ));
        }
        _ => {}
    }
    eprintln!("building {}", path.display());
    let x = compute().map_err(|e| Failure::new(EXIT_OTHER, e))?;
    save(&x).map_err(|e| Failure::new(EXIT_OUTPUT, e))?;
    Ok(x)
}

fn load_sketches(args: &QueryArgs, g: &PPGraph, sum: GraphChecksum) -> Result<DistanceSketchSet, Failure> {
    let path = sketch_path(&args.graph, args.factor, args.seed);
    let par = Parallelism::default();
    artifact(
        &path,
        args.build,
        || persist::load_sketches(&path, sum, args.factor, args.seed),
        || par.install(args.threads, || sketch::build_sketches(g.public(), args.factor, args.seed, par)),
        |sk| persist::save_sketches(sk, sum, &path),
    )
}

fn load_store(args: &QueryArgs, g: &PPGraph, sum: GraphChecksum) -> Result<PprStore, Failure> {
    let path = store_path(&args.graph, args.alpha, args.store_eps);
    let par = Parallelism::default();
    artifact(
        &path,
        args.build,
        || persist::load_store(&path, sum, args.alpha, args.store_eps),
        || par.install(args.threads, || ppr::precompute_public_ppr(g.public(), args.alpha, args.store_eps, par)),
        |st| persist::save_store(st, sum, &path),
    )
}

fn fmt_distance(d: Option<u32>) -> String {
    d.map_or_else(|| "inf".to_owned(), |d| d.to_string())
}

fn cmd_query(args: QueryArgs) -> CmdResult {
    let (g, manifest) = load_graph(&args.graph)?;
    let viewer = resolve(&g, "viewer", &args.viewer)?;
    let source = resolve(&g, "source", &args.source)?;
    let vw = view(&g, viewer).map_err(|e| Failure::new(EXIT_INPUT, e))?;
    let sum = manifest.graph_checksum;
    let mut out = io::stdout().lock();
    let other = |e: Error| Failure::new(EXIT_OTHER, e);

    match args.task {
        TaskArg::Sp => {
            let target = args
                .target
                .as_deref()
                .ok_or_else(|| Failure::new(EXIT_INPUT, "--task sp needs --target"))?;
            let target = resolve(&g, "target", target)?;
            let engine = args.engine.unwrap_or(Engine::Exact);
            if !matches!(engine, Engine::Exact | Engine::Sketch | Engine::Both) {
                return Err(Failure::new(EXIT_INPUT, "sp engines are exact, sketch and both"));
            }
            if matches!(engine, Engine::Exact | Engine::Both) {
                let d = sketch::exact_distance(&vw, source, target).map_err(other)?;
                writeln!(out, "exact\t{}", fmt_distance(d)).map_err(stdout_failure)?;
            }
            if matches!(engine, Engine::Sketch | Engine::Both) {
                let sk = load_sketches(&args, &g, sum)?;
                let d = sketch::private_sketch_between(&sk, &vw, source, target).map_err(other)?;
                writeln!(out, "sketch\t{}", fmt_distance(d)).map_err(stdout_failure)?;
            }
        }
        TaskArg::Ppr => {
            let engine = args.engine.unwrap_or(Engine::Push);
            let p = match engine {
                Engine::Power => ppr::ppr_power(&vw, source, args.alpha, DEFAULT_TOL).map_err(other)?,
                Engine::Push => ppr::ppr_push(&vw, source, args.alpha, args.eps).map_err(other)?,
                Engine::Heuristic => {
                    let store = load_store(&args, &g, sum)?;
                    ppr::ppr_heuristic(&store, &vw, source, args.alpha).map_err(other)?
                }
                _ => return Err(Failure::new(EXIT_INPUT, "ppr engines are power, push and heuristic")),
            };
            for (v, s) in p.top_k(args.top_k) {
                writeln!(out, "{v}\t{s:.6}").map_err(stdout_failure)?;
            }
        }
    }
    out.flush().map_err(stdout_failure)
}

fn cmd_bench(args: BenchArgs) -> CmdResult {
    let (g, manifest) = load_graph(&args.graph)?;
    let cfg = BenchConfig {
        queries: args.queries,
        seed: args.seed,
        factors: args.factors,
        alpha: args.alpha,
        eps: args.eps,
        store_eps: args.store_eps,
        top_k: args.top_k,
        timings: args.timings,
        threads: args.threads,
        parallelism: parallelism(args.sequential),
    };
    let task = match args.task {
        TaskArg::Sp => Task::ShortestPath,
        TaskArg::Ppr => Task::PageRank,
    };
    let report = bench::run(&g, manifest.cutoff, task, &cfg).map_err(|e| match e {
        Error::NoPrivateOwners => Failure::new(EXIT_NO_OWNERS, e),
        Error::InvalidParameter(_) => Failure::new(EXIT_INPUT, e),
        e => Failure::new(EXIT_OTHER, e),
    })?;
    let written = match &args.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| Failure::new(EXIT_OUTPUT, format!("{}: {e}", path.display())))?;
            report.write_csv(BufWriter::new(file), args.timings)
        }
        None => report.write_csv(io::stdout().lock(), args.timings),
    };
    written.map_err(|e| Failure::new(EXIT_OUTPUT, e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Query(a) => cmd_query(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Stats { graph } => load_graph(&graph).and_then(|(g, _)| print_stats(&network_stats(&g))),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ppgk: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
