mod commands;
mod config;
mod error;
mod ingest;
mod manifest;

use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand};

use crate::config::FileConfig;
use crate::error::CliError;

/// Simulation experiments on spurious correlation between serially
/// dependent series, and rolling forecasts with ARMA-filtered LASSO.
#[derive(Debug, Parser)]
#[command(name = "sercorr", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Config file (JSON object or key = value lines); flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory [default: $SERCORR_OUT or ./sercorr-out].
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads [default: all cores].
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Replications (default 500, or 5000 with --full-scale).
    #[arg(long, global = true)]
    pub reps: Option<usize>,
    /// Full-scale defaults: 5000 replications, ARMA order maxima 12.
    #[arg(long, global = true)]
    pub full_scale: bool,
    /// Maximal AR order of the covariate filters (default 3, 12 at full scale).
    #[arg(long, global = true)]
    pub p_max: Option<usize>,
    /// Maximal MA order of the covariate filters (default 3, 12 at full scale).
    #[arg(long, global = true)]
    pub q_max: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form and simulated densities of the sample correlation.
    Density(DensityArgs),
    /// Largest spurious correlation and smallest eigenvalue versus persistence.
    ToyEigen(ToyEigenArgs),
    /// NW, Cochrane-Orcutt, dynamic regression and filtered OLS on a scenario.
    Estimators(EstimatorArgs),
    /// Filtered versus raw LASSO on the sparse design.
    LassoSim(LassoSimArgs),
    /// Spurious t-statistic rates of five regression methods.
    Tstat(TstatArgs),
    /// Rolling direct forecasts: AR, LASSO and filtered LASSO.
    Forecast(ForecastArgs),
    /// Validate a panel CSV and report the aligned sample.
    IngestCheck(IngestArgs),
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    /// Sample length.
    #[arg(long = "T")]
    pub t: Option<usize>,
    /// AR coefficients of the two series.
    #[arg(long, num_args = 2, allow_negative_numbers = true)]
    pub phi: Option<Vec<f64>>,
    /// Points of the closed-form grid.
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ToyEigenArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "T")]
    pub t: Option<usize>,
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    pub phi: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct EstimatorArgs {
    #[arg(long)]
    pub scenario: Option<u8>,
    #[arg(long = "T")]
    pub t: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LassoSimArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "T")]
    pub t: Option<usize>,
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    pub phi: Option<Vec<f64>>,
    /// Number of relevant covariates.
    #[arg(long)]
    pub sparsity: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TstatArgs {
    #[arg(long = "T", num_args = 1..)]
    pub t: Option<Vec<usize>>,
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    pub phi: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct ForecastArgs {
    /// Panel CSV (dates, header, tcode row, observations).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Price-index column forecast as the inflation target.
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub h: Option<usize>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub y_lag_max: Option<usize>,
    /// Leave the own lags unpenalized in the LASSO designs.
    #[arg(long)]
    pub unpenalized_lags: bool,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.global.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let threads = file.pick(cli.global.threads, "threads")?;
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".to_string()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure threads: {e}")))?;
    }
    commands::dispatch(&cli, &file)
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        if matches!(e, CliError::Usage(_)) {
            eprintln!("{}", Cli::command().render_usage());
        }
        std::process::exit(e.exit_code());
    }
}
