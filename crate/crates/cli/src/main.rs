//! Command-line surface for total-variation regularized Fréchet regression:
//! fitting, cross-validation, jump-targeted λ selection and the seeded
//! simulation harness.
//!
//! Exit codes: 0 success, 2 invalid input or parse failure, 3 the solver
//! stopped on its cycle budget (a partial result document is still
//! written). Every error path prints a single `error: `-prefixed line to
//! stderr.

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use tvfrechet::io::{self, FitDocument, PointCodec, SCHEMA_VERSION};
use tvfrechet::sim::{log_spaced, run_experiment, SimConfig};
use tvfrechet::{
    cross_validate, fit, select_lambda_by_jumps, Error, FitResult, Result, SolverConfig, SpdMetric,
};

/// Environment variable consulted for the default worker thread count when
/// `--parallel` is not given.
const THREADS_ENV: &str = "TVFRECHET_THREADS";

#[derive(Parser)]
#[command(
    name = "tvfrechet",
    about = "Total-variation regularized Fréchet regression for metric-space valued time series",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SpaceArg {
    /// Vectors in ℝᵏ; CSV rows are coordinate vectors.
    Euclidean,
    /// SPD matrices, affine-invariant metric; CSV rows are row-major m×m.
    SpdAi,
    /// SPD matrices, Log-Euclidean metric; CSV rows are row-major m×m.
    SpdLe,
    /// Distributions on ℝ as quantile functions; CSV rows are quantile
    /// values, or pass a directory of per-time-point sample files.
    Wasserstein,
}

#[derive(Subcommand)]
enum Command {
    /// Fit at a fixed regularization strength λ.
    Fit {
        #[arg(long, value_enum)]
        space: SpaceArg,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        lambda: f64,
        /// Quantile grid size when reading Wasserstein sample directories.
        #[arg(long, default_value_t = tvfrechet::wasserstein::DEFAULT_GRID)]
        quantile_grid: usize,
        /// Multiply every input value on ingestion.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 500)]
        max_cycles: usize,
    },
    /// Select λ by K-fold cross-validation over a grid, then fit.
    Cv {
        #[arg(long, value_enum)]
        space: SpaceArg,
        #[arg(long)]
        input: PathBuf,
        /// Grid specification "lo:hi:count:log".
        #[arg(long)]
        lambda_grid: String,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = tvfrechet::wasserstein::DEFAULT_GRID)]
        quantile_grid: usize,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 500)]
        max_cycles: usize,
    },
    /// Find the smallest λ whose fit has a target number of jumps.
    Jumps {
        #[arg(long, value_enum)]
        space: SpaceArg,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        target_jumps: usize,
        /// Bracket "LO:HI" for the λ search.
        #[arg(long)]
        lambda_range: String,
        #[arg(long, default_value_t = tvfrechet::wasserstein::DEFAULT_GRID)]
        quantile_grid: usize,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 500)]
        max_cycles: usize,
    },
    /// Run one simulation cell from a JSON config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Directory receiving report.json and replicates.csv.
        #[arg(long)]
        output: PathBuf,
        /// Worker threads; defaults to $TVFRECHET_THREADS, then all cores.
        #[arg(long)]
        parallel: Option<usize>,
    },
}

/// Cross-validation output document.
#[derive(Debug, Serialize, Deserialize)]
struct CvDocument {
    schema_version: u32,
    space: String,
    folds: usize,
    seed: u64,
    best_lambda: f64,
    /// (λ, summed held-out squared distance) per grid point, ascending λ.
    cv_errors: Vec<(f64, f64)>,
    fit: FitDocument,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::ConvergenceFailure { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

/// Dispatch a closure over the concrete space selected on the command line.
macro_rules! with_series {
    ($space:expr, $input:expr, $scale:expr, $qgrid:expr, |$sp:ident, $series:ident| $body:expr) => {
        match $space {
            SpaceArg::Euclidean => {
                let ($sp, $series) = io::load_euclidean($input, $scale)?;
                $body
            }
            SpaceArg::SpdAi => {
                let ($sp, $series) = io::load_spd($input, SpdMetric::AffineInvariant, $scale)?;
                $body
            }
            SpaceArg::SpdLe => {
                let ($sp, $series) = io::load_spd($input, SpdMetric::LogEuclidean, $scale)?;
                $body
            }
            SpaceArg::Wasserstein => {
                let ($sp, $series) = if $input.is_dir() {
                    io::load_wasserstein_samples($input, $qgrid, $scale)?
                } else {
                    io::load_wasserstein($input, $scale)?
                };
                $body
            }
        }
    };
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Fit {
            space,
            input,
            lambda,
            quantile_grid,
            scale,
            output,
            max_cycles,
        } => with_series!(space, &input, scale, quantile_grid, |sp, series| {
            let cfg = SolverConfig {
                lambda,
                max_cycles,
                ..SolverConfig::default()
            };
            let res = fit(&series, &sp, &cfg)?;
            let doc = FitDocument::from_result(&sp, &res);
            io::write_json(&output, &doc)?;
            finish_fit(&res, &output)
        }),

        Command::Cv {
            space,
            input,
            lambda_grid,
            folds,
            seed,
            quantile_grid,
            scale,
            output,
            max_cycles,
        } => with_series!(space, &input, scale, quantile_grid, |sp, series| {
            let grid = parse_grid_spec(&lambda_grid)?;
            let base = SolverConfig {
                max_cycles,
                ..SolverConfig::default()
            };
            let cv = cross_validate(&series, &sp, &grid, folds, seed, &base)?;
            let res = fit(
                &series,
                &sp,
                &SolverConfig {
                    lambda: cv.best_lambda,
                    ..base
                },
            )?;
            let doc = CvDocument {
                schema_version: SCHEMA_VERSION,
                space: sp.space_name(),
                folds,
                seed,
                best_lambda: cv.best_lambda,
                cv_errors: cv.errors,
                fit: FitDocument::from_result(&sp, &res),
            };
            io::write_json(&output, &doc)?;
            println!("selected lambda = {}", cv.best_lambda);
            finish_fit(&res, &output)
        }),

        Command::Jumps {
            space,
            input,
            target_jumps,
            lambda_range,
            quantile_grid,
            scale,
            output,
            max_cycles,
        } => with_series!(space, &input, scale, quantile_grid, |sp, series| {
            let range = parse_lambda_range(&lambda_range)?;
            let cfg = SolverConfig {
                max_cycles,
                ..SolverConfig::default()
            };
            let sel = select_lambda_by_jumps(&series, &sp, target_jumps, range, &cfg)?;
            let mut doc = FitDocument::from_result(&sp, &sel.result);
            doc.target_jumps = Some(target_jumps);
            doc.achieved_jumps = Some(sel.achieved);
            doc.exact_jump_count = Some(sel.exact);
            io::write_json(&output, &doc)?;
            println!(
                "lambda = {}, jumps = {:?}{}",
                sel.lambda,
                sel.result.jumps,
                if sel.exact { "" } else { " (closest achievable count)" }
            );
            finish_fit(&sel.result, &output)
        }),

        Command::Simulate {
            config,
            output,
            parallel,
        } => {
            let threads = parallel.or_else(|| {
                std::env::var(THREADS_ENV)
                    .ok()
                    .and_then(|v| v.parse().ok())
            });
            if let Some(t) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build_global()
                    .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
            }
            let cfg: SimConfig = io::read_json(&config)?;
            let report = run_experiment(&cfg)?;
            std::fs::create_dir_all(&output)?;
            io::write_json(&output.join("report.json"), &report)?;
            let rows: Vec<Vec<f64>> = report
                .rise_values
                .iter()
                .zip(&report.selected_lambdas)
                .enumerate()
                .map(|(i, (&r, &l))| vec![i as f64, r, l])
                .collect();
            io::write_csv(&output.join("replicates.csv"), &rows)?;
            println!(
                "{:?} {:?} n={}: RISE {:.3} ({:.3}) over {} replicates",
                report.config_space,
                report.config_setting,
                report.n,
                report.mean_rise,
                report.sd_rise,
                report.replicates
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Exit 0 when the fit converged; otherwise print the diagnostic and exit 3
/// (the partial result has already been written).
fn finish_fit<P>(res: &FitResult<P>, output: &Path) -> Result<ExitCode> {
    if res.converged {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "error: solver stopped after {} cycles without meeting its tolerance; partial result in {}",
            res.cycles_run,
            output.display()
        );
        Ok(ExitCode::from(3))
    }
}

/// Parse a λ-grid specification "lo:hi:count:log".
fn parse_grid_spec(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 4 {
        return Err(Error::Parse(format!(
            "lambda grid must be \"lo:hi:count:log\", got {spec:?}"
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| Error::Parse(format!("bad grid lower bound {:?}", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| Error::Parse(format!("bad grid upper bound {:?}", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| Error::Parse(format!("bad grid count {:?}", parts[2])))?;
    match parts[3] {
        "log" => log_spaced(lo, hi, count),
        other => Err(Error::Parse(format!(
            "unsupported grid spacing {other:?} (expected \"log\")"
        ))),
    }
}

/// Parse a bracket "LO:HI".
fn parse_lambda_range(spec: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 2 {
        return Err(Error::Parse(format!(
            "lambda range must be \"LO:HI\", got {spec:?}"
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| Error::Parse(format!("bad range lower bound {:?}", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| Error::Parse(format!("bad range upper bound {:?}", parts[1])))?;
    Ok((lo, hi))
}
