//! `corrmetric` subcommands.
//!
//! Exit codes: 0 success, 1 a sweep found a triple needing a constant above
//! `--k`, 2 usage or parse error, 3 degenerate (constant) data.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use corrmetric_core::{
    find_counterexample, pairwise_matrix, Error, IndexConfig, QmIndex, RatioReport, RelaxConfig,
    Strategy,
};
use rayon::prelude::*;

use crate::dataset::{read_dataset, CsvOptions, Dataset};
use crate::parallel::{par_sweep_grid, par_sweep_random, thread_count_from_env, thread_pool};
use crate::report::{KnnLineJson, RatioReportJson, WitnessJson};
use crate::{fmt, index_io, CliError};

#[derive(Debug, Parser)]
#[command(
    name = "corrmetric",
    version,
    about = "Absolute correlation distance tools"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pairwise distance matrix of the rows of a CSV file.
    Dist(DistArgs),
    /// Sweep ratios d(x,z) / (d(x,y) + d(y,z)) and compare against K.
    Verify(VerifyArgs),
    /// Write three vectors violating the relaxed inequality for K < 2.
    Counterexample(CounterexampleArgs),
    /// Build a search index from a CSV file and store it as JSON.
    BuildIndex(BuildIndexArgs),
    /// k nearest neighbours of every query row.
    Knn(KnnArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct CsvArgs {
    /// The first line is a header.
    #[arg(long)]
    pub header: bool,
    /// The first column holds row ids.
    #[arg(long)]
    pub id_col: bool,
}

impl From<CsvArgs> for CsvOptions {
    fn from(a: CsvArgs) -> Self {
        CsvOptions {
            header: a.header,
            id_col: a.id_col,
        }
    }
}

#[derive(Debug, Args)]
pub struct DistArgs {
    pub input: PathBuf,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub csv: CsvArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Grid,
    Random,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Grid step in radians (grid mode).
    #[arg(long)]
    pub step: Option<f64>,
    /// Number of random triples (random mode).
    #[arg(long)]
    pub trials: Option<u64>,
    /// Sample dimension (random mode).
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2.0)]
    pub k: f64,
    /// Report JSON; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    #[arg(long)]
    pub k: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    RelaxedK,
    ProjectiveAngle,
    Brute,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::RelaxedK => Strategy::RelaxedK,
            StrategyArg::ProjectiveAngle => Strategy::ProjectiveAngle,
            StrategyArg::Brute => Strategy::Brute,
        }
    }
}

#[derive(Debug, Args)]
pub struct IndexBuildArgs {
    #[arg(long, default_value_t = 16)]
    pub leaf_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relaxation constant for relaxed-k pruning; must be at least 2.
    #[arg(long, default_value_t = 2.0)]
    pub k_constant: f64,
}

#[derive(Debug, Args)]
pub struct BuildIndexArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = StrategyArg::RelaxedK)]
    pub strategy: StrategyArg,
    #[command(flatten)]
    pub build: IndexBuildArgs,
    #[command(flatten)]
    pub csv: CsvArgs,
}

#[derive(Debug, Args)]
pub struct KnnArgs {
    /// Stored index (from `build-index`).
    #[arg(long, conflicts_with = "data", required_unless_present = "data")]
    pub index: Option<PathBuf>,
    /// Corpus CSV, indexed on the fly.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub query: PathBuf,
    #[arg(long)]
    pub k: usize,
    /// Overrides the strategy stored in the index.
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyArg>,
    #[command(flatten)]
    pub build: IndexBuildArgs,
    /// JSON lines output; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub csv: CsvArgs,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Dist(a) => cmd_dist(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Counterexample(a) => cmd_counterexample(a),
        Command::BuildIndex(a) => cmd_build_index(a),
        Command::Knn(a) => cmd_knn(a),
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::io(p.display().to_string(), e))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_all(path: Option<&Path>, body: &str) -> Result<(), CliError> {
    let name = path.map_or_else(|| "stdout".to_string(), |p| p.display().to_string());
    let mut out = output(path)?;
    out.write_all(body.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io(name, e))
}

/// Maps a core error on dataset row `i` to the CLI error classes.
fn data_error(e: Error, what: &str, data: &Dataset) -> CliError {
    let id = |i: Option<usize>| {
        i.and_then(|i| data.samples.get(i))
            .and_then(|s| s.id())
            .unwrap_or("?")
            .to_string()
    };
    match e {
        Error::ZeroVariance { index } => CliError::Degenerate(format!(
            "{what} row {} is constant; correlation is undefined",
            id(index)
        )),
        Error::DimensionMismatch { index, .. } => {
            CliError::Parse(format!("{what} row {}: {e}", id(index)))
        }
        e => CliError::Usage(format!("{what}: {e}")),
    }
}

fn warn_if_two_dimensional(data: &Dataset) {
    if data.dimension == 2 {
        eprintln!(
            "warning: samples have 2 values; after centering every pair is collinear and all distances are 0"
        );
    }
}

fn cmd_dist(a: DistArgs) -> Result<i32, CliError> {
    let data = read_dataset(&a.input, a.csv.into())?;
    warn_if_two_dimensional(&data);
    let matrix = pairwise_matrix(&data.samples).map_err(|e| data_error(e, "input", &data))?;
    let mut body = String::new();
    for i in 0..matrix.len() {
        let row: Vec<String> = matrix.row(i).iter().map(|&v| fmt::sig12(v)).collect();
        body.push_str(&row.join(","));
        body.push('\n');
    }
    write_all(a.out.as_deref(), &body)?;
    Ok(0)
}

fn summary(r: &RatioReport) {
    match (r.max_ratio, r.argmax) {
        (Some(max), Some(t)) => eprintln!(
            "max ratio {max:.12} at (alpha, beta, gamma) = ({:.6}, {:.6}, {:.6}); {} evaluated, {} skipped; K = {} {}",
            t.alpha,
            t.beta,
            t.gamma,
            r.evaluated,
            r.skipped,
            r.k,
            if r.is_violation() { "violated" } else { "holds" }
        ),
        _ => eprintln!("no defined ratios; {} skipped", r.skipped),
    }
}

fn cmd_verify(a: VerifyArgs) -> Result<i32, CliError> {
    let cfg = RelaxConfig::with_k(a.k).map_err(|e| CliError::Usage(format!("--k: {e}")))?;
    let pool = thread_pool(thread_count_from_env()?)?;
    let report = match a.mode {
        Mode::Grid => {
            if a.trials.is_some() || a.dim.is_some() {
                return Err(CliError::Usage(
                    "--trials/--dim apply to --mode random".into(),
                ));
            }
            let step = a
                .step
                .ok_or_else(|| CliError::Usage("--mode grid needs --step".into()))?;
            par_sweep_grid(&pool, step, &cfg)
        }
        Mode::Random => {
            if a.step.is_some() {
                return Err(CliError::Usage("--step applies to --mode grid".into()));
            }
            let (Some(trials), Some(dim)) = (a.trials, a.dim) else {
                return Err(CliError::Usage(
                    "--mode random needs --trials and --dim".into(),
                ));
            };
            par_sweep_random(&pool, dim, trials, a.seed, &cfg)
        }
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;

    let mut body =
        serde_json::to_string_pretty(&RatioReportJson::from(&report)).expect("report serializes");
    body.push('\n');
    write_all(a.out.as_deref(), &body)?;
    summary(&report);
    Ok(if report.is_violation() { 1 } else { 0 })
}

fn cmd_counterexample(a: CounterexampleArgs) -> Result<i32, CliError> {
    if a.k >= 2.0 {
        return Err(CliError::Usage(
            "no counterexample exists: K=2 is sharp".into(),
        ));
    }
    let c = find_counterexample(a.k).map_err(|e| CliError::Usage(format!("--k: {e}")))?;
    let mut body =
        serde_json::to_string_pretty(&WitnessJson::from(&c)).expect("witness serializes");
    body.push('\n');
    write_all(a.out.as_deref(), &body)?;
    eprintln!(
        "ratio {:.12} > {} at alpha = beta = {:.9}, gamma = {:.9}",
        c.ratio, a.k, c.triple.alpha, c.triple.gamma
    );
    Ok(0)
}

fn build_index(
    data: &Dataset,
    strategy: Strategy,
    b: &IndexBuildArgs,
) -> Result<QmIndex, CliError> {
    let cfg = IndexConfig {
        strategy,
        k_constant: b.k_constant,
        leaf_size: b.leaf_size,
        seed: b.seed,
    };
    QmIndex::build(&data.samples, cfg).map_err(|e| data_error(e, "corpus", data))
}

fn cmd_build_index(a: BuildIndexArgs) -> Result<i32, CliError> {
    let data = read_dataset(&a.data, a.csv.into())?;
    warn_if_two_dimensional(&data);
    let index = build_index(&data, a.strategy.into(), &a.build)?;
    write_all(Some(&a.out), &index_io::to_json(&index))?;
    Ok(0)
}

fn cmd_knn(a: KnnArgs) -> Result<i32, CliError> {
    if a.k == 0 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    let mut index = match (&a.index, &a.data) {
        (Some(path), _) => index_io::load(path)?,
        (None, Some(path)) => {
            let data = read_dataset(path, a.csv.into())?;
            warn_if_two_dimensional(&data);
            let strategy = a.strategy.map_or(Strategy::RelaxedK, Into::into);
            build_index(&data, strategy, &a.build)?
        }
        (None, None) => {
            return Err(CliError::Usage(
                "one of --index or --data is required".into(),
            ))
        }
    };
    if let Some(s) = a.strategy {
        index
            .set_strategy(s.into())
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let ids: Vec<String> = index
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| p.source_id().map_or_else(|| i.to_string(), Into::into))
        .collect();

    let queries = read_dataset(&a.query, a.csv.into())?;
    if queries.dimension != index.dimension() {
        return Err(CliError::Parse(format!(
            "query rows have {} values, corpus has {}",
            queries.dimension,
            index.dimension()
        )));
    }
    let pool = thread_pool(thread_count_from_env()?)?;
    let lines: Vec<Result<String, CliError>> = pool.install(|| {
        queries
            .samples
            .par_iter()
            .enumerate()
            .map(|(i, q)| {
                let result = index.knn(q, a.k).map_err(|e| {
                    let e = match e {
                        Error::ZeroVariance { .. } => Error::ZeroVariance { index: Some(i) },
                        e => e,
                    };
                    data_error(e, "query", &queries)
                })?;
                let line = KnnLineJson::new(q.id().unwrap_or(""), &result, &ids);
                Ok(serde_json::to_string(&line).expect("knn line serializes"))
            })
            .collect()
    });
    let mut body = String::new();
    for line in lines {
        body.push_str(&line?);
        body.push('\n');
    }
    write_all(a.out.as_deref(), &body)?;
    Ok(0)
}
