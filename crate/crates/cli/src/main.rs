use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use ssac_core::experiment::{write_aggregate_csv, write_results_csv};
use ssac_core::{
    aggregate, generate, parse_results, read_csv, run_experiment, solve_exact, write_csv, Algorithm, Error, GenKind,
    GenSpec, RunRequest,
};

const SCALE_ENV: &str = "SSAC_DEFAULT_SCALE";

#[derive(Parser)]
#[command(name = "ssac", version, about = "k-means with same-cluster queries: generate, run, solve, report")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance with a planted labeling.
    Gen(GenArgs),
    /// Run an algorithm on a CSV instance and print one row per repeat plus a `best` row.
    Run(RunArgs),
    /// Solve a tiny instance exactly and print the solution as JSON.
    Exact(ExactArgs),
    /// Aggregate result files into per-configuration summaries.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value = "gaussian-mixture")]
    kind: GenKind,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 10)]
    n_per_cluster: usize,
    #[arg(long, default_value_t = 10.0)]
    separation: f64,
    /// Noise sigma (gaussian kinds) or ball radius (margin-balls).
    #[arg(long, visible_alias = "sigma", visible_alias = "radius", default_value_t = 1.0)]
    spread: f64,
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct RunArgs {
    /// kmeans++, query-kmeans++, query-kmeans or faulty-query-kmeans.
    algorithm: Algorithm,
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Oracle error rate for faulty-query-kmeans.
    #[arg(long, default_value_t = 0.0)]
    q: f64,
    /// Multiplier on the sample-size constants, in (0, 1]. Falls back to SSAC_DEFAULT_SCALE, then 1.
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    algo_seed: u64,
    #[arg(long, default_value_t = 0)]
    oracle_seed: u64,
    /// Seed the instance was generated with, recorded verbatim.
    #[arg(long)]
    data_seed: Option<u64>,
    /// Instance id for the output rows; defaults to the input file name.
    #[arg(long)]
    instance: Option<String>,
    /// Use the reduced ε that carries the guarantee without irreducibility.
    #[arg(long)]
    general_mode: bool,
    /// Also report the cost after Lloyd refinement in `lloyd_cost`.
    #[arg(long)]
    lloyd_refine: bool,
    /// Record wall-clock time. Output is then no longer byte-reproducible.
    #[arg(long)]
    timing: bool,
    /// Worker threads for repeats (0 = all cores).
    #[arg(long, default_value_t = 0)]
    parallel: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long)]
    k: usize,
}

#[derive(Args)]
struct ReportArgs {
    /// Files produced by `run` (CSV or JSON lines).
    files: Vec<PathBuf>,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DegenerateDistribution | Error::NoCenters | Error::EmptySet => 3,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::from(Error::from(e))
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Run(a) => cmd_run(a),
        Command::Exact(a) => cmd_exact(a),
        Command::Report(a) => cmd_report(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path).map(BufReader::new).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn cmd_gen(a: GenArgs) -> CmdResult {
    let spec = GenSpec {
        kind: a.kind,
        k: a.k,
        d: a.d,
        n_per_cluster: a.n_per_cluster,
        separation: a.separation,
        spread: a.spread,
        gamma: a.gamma,
        seed: a.seed,
    };
    let (data, labels) = generate(&spec)?;
    match a.output {
        Some(path) => {
            let file =
                File::create(&path).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
            write_csv(BufWriter::new(file), &data, Some(&labels))?;
        }
        None => write_csv(io::stdout().lock(), &data, Some(&labels))?,
    }
    Ok(())
}

fn resolve_scale(flag: Option<f64>) -> Result<f64, Failure> {
    let scale = match flag {
        Some(s) => s,
        None => match std::env::var(SCALE_ENV) {
            Ok(v) => {
                v.trim().parse::<f64>().map_err(|_| Failure::usage(format!("{SCALE_ENV}={v:?} is not a number")))?
            }
            Err(_) => 1.0,
        },
    };
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(Failure::usage(format!("scale must lie in (0, 1], got {scale}")));
    }
    Ok(scale)
}

fn cmd_run(a: RunArgs) -> CmdResult {
    let scale = resolve_scale(a.scale)?;
    let (data, labels) = read_csv(open(&a.input)?)?;
    if a.algorithm.uses_oracle() && labels.is_none() {
        return Err(Failure::usage(format!(
            "{} simulates its oracle from the ground truth, but {} has no `label` column",
            a.algorithm,
            a.input.display()
        )));
    }
    let instance = a.instance.unwrap_or_else(|| {
        a.input.file_name().map_or_else(|| a.input.display().to_string(), |n| n.to_string_lossy().into_owned())
    });
    let req = RunRequest {
        algorithm: a.algorithm,
        k: a.k,
        eps: a.eps,
        q: a.q,
        scale,
        repeats: a.repeats,
        general_mode: a.general_mode,
        algo_seed: a.algo_seed,
        oracle_seed: a.oracle_seed,
        instance,
        data_seed: a.data_seed,
        lloyd_refine: a.lloyd_refine,
        timing: a.timing,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.parallel)
        .build()
        .map_err(|e| Failure::usage(format!("cannot start {} workers: {e}", a.parallel)))?;
    let rows = pool.install(|| run_experiment(&data, labels.as_ref(), &req))?;

    let mut out = io::stdout().lock();
    match a.format {
        Format::Csv => write_results_csv(&mut out, &rows)?,
        Format::Json => {
            for r in &rows {
                let line = serde_json::to_string(r).expect("rows serialize");
                writeln!(out, "{line}")?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_exact(a: ExactArgs) -> CmdResult {
    let (data, _) = read_csv(open(&a.input)?)?;
    let sol = solve_exact(&data, a.k)?;
    let out = json!({
        "k": a.k,
        "optimal_cost": sol.optimal_cost,
        "labeling": sol.labeling.labels(),
        "centers": sol.centers.to_rows(),
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("json value serializes"));
    Ok(())
}

fn cmd_report(a: ReportArgs) -> CmdResult {
    let mut rows = Vec::new();
    let mut bad = Vec::new();
    for path in &a.files {
        let text = io::read_to_string(open(path)?)?;
        match parse_results(&text) {
            Ok(mut r) => rows.append(&mut r),
            Err(lines) => bad.extend(lines.into_iter().map(|l| format!("{}:{l}", path.display()))),
        }
    }
    if !bad.is_empty() {
        return Err(Failure::usage(format!("malformed result rows at {}", bad.join(", "))));
    }
    let mut out = io::stdout().lock();
    write_aggregate_csv(&mut out, &aggregate(&rows))?;
    out.flush()?;
    Ok(())
}
