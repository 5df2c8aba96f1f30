//! Command implementations behind the `subtraj` binary.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use subtraj::{
    brute_force_all, generate, load_csv, oracle, quality_metrics, search_database, top_k_search, write_csv,
    Algorithm, BoundingBox, CostModel, Dataset, Error, GeneratorSpec, KpfMode, ModelSpec, PruneConfig, PruneStats,
    SearchResult, Trajectory, WalkModel,
};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DATA: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "subtraj", version, about = "Exact similar-subtrajectory search")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Best subtrajectory over a database, as JSON.
    Search(SearchArgs),
    /// The K best trajectories, as JSON.
    Topk(TopkArgs),
    /// Compare an algorithm's answers with brute force, as CSV.
    Verify(VerifyArgs),
    /// Time algorithms over a sweep of data lengths, as CSV.
    Bench(BenchArgs),
    /// Write a synthetic dataset as CSV.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Database CSV (`traj_id,seq,x,y` or `traj_id,seq,label`).
    #[arg(long)]
    pub data: PathBuf,
    /// Query CSV; every trajectory in it is a query unless `--query-id` picks one.
    #[arg(long)]
    pub query: PathBuf,
    #[arg(long)]
    pub query_id: Option<String>,
    /// dtw, frechet, edr:eps=<v>, erp:cx=<v>,cy=<v> or wed:unit.
    #[arg(long, default_value = "dtw")]
    pub model: ModelSpec,
    #[arg(long, value_enum, default_value_t = AlgoArg::Cma)]
    pub algo: AlgoArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Exacts,
    Spring,
    Gb,
    Cma,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Exacts => Algorithm::ExactS,
            AlgoArg::Spring => Algorithm::Spring,
            AlgoArg::Gb => Algorithm::GreedyBacktracking,
            AlgoArg::Cma => Algorithm::Cma,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KpfModeArg {
    Safe,
    Estimated,
}

#[derive(Debug, Args)]
pub struct PruneArgs {
    /// GBP keeps trajectories with at least mu*m close query points.
    #[arg(long, default_value_t = PruneConfig::DEFAULT_MU)]
    pub mu: f64,
    /// GBP cell side in coordinate units. GBP runs only when this is given.
    #[arg(long)]
    pub grid_eps: Option<f64>,
    #[arg(long, default_value_t = PruneConfig::DEFAULT_RATE)]
    pub kpf_rate: f64,
    #[arg(long, value_enum, default_value_t = KpfModeArg::Safe)]
    pub kpf_mode: KpfModeArg,
    #[arg(long)]
    pub no_gbp: bool,
    #[arg(long)]
    pub no_kpf: bool,
    /// Worker threads; 1 gives deterministic tie-breaking.
    #[arg(long)]
    pub threads: Option<usize>,
}

impl PruneArgs {
    pub fn config(&self, algo: AlgoArg) -> PruneConfig {
        PruneConfig {
            mu: self.mu,
            rate: self.kpf_rate,
            kpf_mode: match self.kpf_mode {
                KpfModeArg::Safe => KpfMode::Safe,
                KpfModeArg::Estimated => KpfMode::Estimated,
            },
            enable_gbp: self.grid_eps.is_some() && !self.no_gbp,
            enable_kpf: !self.no_kpf,
            grid_epsilon: self.grid_eps.unwrap_or(PruneConfig::DEFAULT_GRID_EPSILON),
            parallel: self.threads != Some(1),
            algorithm: algo.into(),
        }
    }
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub prune: PruneArgs,
    /// Report the K best trajectories instead of the single best.
    #[arg(long)]
    pub topk: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TopkArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub prune: PruneArgs,
    #[arg(long, short = 'k', default_value_t = 10)]
    pub k: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "cma,exacts")]
    pub algos: Vec<AlgoArg>,
    #[arg(long, default_value = "dtw")]
    pub model: ModelSpec,
    #[arg(long, short = 'm', default_value_t = 32)]
    pub m: usize,
    #[arg(long, short = 'n', value_delimiter = ',', default_value = "1000,2000,4000")]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WalkArg {
    Random,
    Clustered,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 50)]
    pub min_len: usize,
    #[arg(long, default_value_t = 200)]
    pub max_len: usize,
    #[arg(long, value_enum, default_value_t = WalkArg::Random)]
    pub walk: WalkArg,
    /// Step scale of each move.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 5)]
    pub centers: usize,
    #[arg(long, default_value_t = 5.0)]
    pub spread: f64,
    /// `min_x,min_y,max_x,max_y`.
    #[arg(long, value_delimiter = ',', num_args = 4, default_values_t = [0.0, 0.0, 100.0, 100.0])]
    pub bbox: Vec<f64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl GenArgs {
    pub fn spec(&self) -> GeneratorSpec {
        GeneratorSpec {
            seed: self.seed,
            count: self.count,
            min_len: self.min_len,
            max_len: self.max_len,
            model: match self.walk {
                WalkArg::Random => WalkModel::RandomWalk { sigma: self.sigma },
                WalkArg::Clustered => WalkModel::Clustered {
                    centers: self.centers,
                    spread: self.spread,
                    step: self.sigma,
                },
            },
            bbox: BoundingBox {
                min_x: self.bbox[0],
                min_y: self.bbox[1],
                max_x: self.bbox[2],
                max_y: self.bbox[3],
            },
        }
    }
}

/// Exit status for a library error.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::InvalidConfig(_)
        | Error::InvalidModelSpec { .. }
        | Error::NonPositiveEpsilon(_)
        | Error::WrongFamily { .. } => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

#[derive(Debug, Serialize)]
pub struct Hit {
    pub data_id: String,
    pub start: usize,
    pub end: usize,
    pub distance: f64,
}

impl From<SearchResult> for Hit {
    fn from(r: SearchResult) -> Self {
        Hit {
            data_id: r.data_id,
            start: r.range.start,
            end: r.range.end,
            distance: r.distance,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SearchReport {
    pub query_id: String,
    pub best: Option<Hit>,
    pub pruning: PruneStats,
    pub wall_ms: f64,
}

#[derive(Debug, Serialize)]
pub struct TopkReport {
    pub query_id: String,
    pub k: usize,
    pub results: Vec<Hit>,
    pub pruning: PruneStats,
    pub wall_ms: f64,
}

struct Inputs {
    database: Dataset,
    queries: Vec<Trajectory>,
    model: CostModel,
}

fn load(path: &Path) -> subtraj::Result<Dataset> {
    load_csv(path).map_err(|e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
        other => other,
    })
}

fn load_inputs(input: &InputArgs) -> subtraj::Result<Inputs> {
    let model = input.model.build()?;
    let database = load(&input.data)?;
    let queries = load(&input.query)?.into_trajectories();
    let queries = match &input.query_id {
        Some(id) => {
            let q = queries
                .into_iter()
                .find(|t| t.id() == id)
                .ok_or_else(|| Error::InvalidConfig(format!("no query with id `{id}`")))?;
            vec![q]
        }
        None => queries,
    };
    Ok(Inputs {
        database,
        queries,
        model,
    })
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> subtraj::Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::InvalidConfig("--threads must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidConfig(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn json_line(out: &mut impl Write, value: &impl Serialize) -> subtraj::Result<()> {
    serde_json::to_writer(&mut *out, value).map_err(|e| Error::Io(e.into()))?;
    writeln!(out)?;
    Ok(())
}

/// One JSON object per query, one per line.
pub fn run_search_command(args: &SearchArgs, out: &mut impl Write) -> subtraj::Result<()> {
    if let Some(k) = args.topk {
        return run_topk(&args.input, &args.prune, k, out);
    }
    let inputs = load_inputs(&args.input)?;
    let config = args.prune.config(args.input.algo);
    for q in &inputs.queries {
        let t0 = Instant::now();
        let outcome = with_threads(args.prune.threads, || {
            search_database(q, inputs.database.trajectories(), &inputs.model, &config)
        })??;
        let report = SearchReport {
            query_id: q.id().to_string(),
            best: outcome.best.map(Hit::from),
            pruning: outcome.stats,
            wall_ms: t0.elapsed().as_secs_f64() * 1e3,
        };
        json_line(out, &report)?;
    }
    Ok(())
}

pub fn run_topk_command(args: &TopkArgs, out: &mut impl Write) -> subtraj::Result<()> {
    run_topk(&args.input, &args.prune, args.k, out)
}

fn run_topk(input: &InputArgs, prune: &PruneArgs, k: usize, out: &mut impl Write) -> subtraj::Result<()> {
    let inputs = load_inputs(input)?;
    let config = prune.config(input.algo);
    for q in &inputs.queries {
        let t0 = Instant::now();
        let outcome = with_threads(prune.threads, || {
            top_k_search(q, inputs.database.trajectories(), &inputs.model, k, &config)
        })??;
        let report = TopkReport {
            query_id: q.id().to_string(),
            k,
            results: outcome.results.into_iter().map(Hit::from).collect(),
            pruning: outcome.stats,
            wall_ms: t0.elapsed().as_secs_f64() * 1e3,
        };
        json_line(out, &report)?;
    }
    Ok(())
}

/// One CSV row per (query, data trajectory) pair. The ranking budget comes
/// from `SUBTRAJ_BUDGET`.
pub fn run_verify_command(args: &VerifyArgs, out: &mut impl Write) -> subtraj::Result<()> {
    let inputs = load_inputs(&args.input)?;
    let budget = oracle::budget_from_env();
    let algo: Algorithm = args.input.algo.into();
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["query_id", "data_id", "algo", "model", "distance", "optimum", "ar", "mr", "rr"])?;
    for q in &inputs.queries {
        for d in inputs.database.trajectories() {
            let truth = brute_force_all(q, d, &inputs.model, budget)?;
            let found = algo.search(q, d, &inputs.model)?;
            let m = quality_metrics(&found, &truth)?;
            wtr.write_record([
                q.id(),
                d.id(),
                algo.name(),
                inputs.model.name(),
                &found.distance.to_string(),
                &truth.head().distance.to_string(),
                &m.ar.to_string(),
                &m.mr.to_string(),
                &m.rr.to_string(),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

fn mean_stddev(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = if samples.len() > 1 {
        samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

/// Times each algorithm on a seeded random walk of each length in the
/// sweep against a fixed query of length `m`. Runs single-threaded.
pub fn run_bench_command(args: &BenchArgs, out: &mut impl Write) -> subtraj::Result<()> {
    if args.reps == 0 || args.m == 0 || args.n.contains(&0) {
        return Err(Error::InvalidConfig("m, n and reps must be positive".into()));
    }
    let model = args.model.build()?;
    let walk = |seed: u64, len: usize| -> subtraj::Result<Trajectory> {
        let spec = GeneratorSpec {
            seed,
            count: 1,
            min_len: len,
            max_len: len,
            model: WalkModel::RandomWalk { sigma: 1.0 },
            bbox: BoundingBox::default(),
        };
        Ok(generate(&spec)?.into_trajectories().remove(0))
    };
    let query = walk(args.seed, args.m)?.with_id("query");
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["algo", "model", "m", "n", "mean_ms", "stddev_ms"])?;
    for &n in &args.n {
        let data = walk(args.seed.wrapping_add(1 + n as u64), n)?;
        for &algo in &args.algos {
            let algo: Algorithm = algo.into();
            algo.search(&query, &data, &model)?;
            let samples: Vec<f64> = (0..args.reps)
                .map(|_| {
                    let t0 = Instant::now();
                    let r = algo.search(&query, &data, &model);
                    std::hint::black_box(r).map(|_| t0.elapsed().as_secs_f64() * 1e3)
                })
                .collect::<subtraj::Result<_>>()?;
            let (mean, sd) = mean_stddev(&samples);
            wtr.write_record([
                algo.name(),
                model.name(),
                &args.m.to_string(),
                &n.to_string(),
                &format!("{mean:.4}"),
                &format!("{sd:.4}"),
            ])?;
        }
        wtr.flush()?;
    }
    Ok(())
}

pub fn run_gen_command(args: &GenArgs, out: &mut impl Write) -> subtraj::Result<()> {
    let dataset = generate(&args.spec())?;
    match &args.out {
        Some(path) => subtraj::save_csv(&dataset, path),
        None => write_csv(dataset.trajectories(), out),
    }
}

pub fn run(cli: &Cli, out: &mut impl Write) -> subtraj::Result<()> {
    match &cli.command {
        Command::Search(a) => run_search_command(a, out),
        Command::Topk(a) => run_topk_command(a, out),
        Command::Verify(a) => run_verify_command(a, out),
        Command::Bench(a) => run_bench_command(a, out),
        Command::Gen(a) => run_gen_command(a, out),
    }
}
