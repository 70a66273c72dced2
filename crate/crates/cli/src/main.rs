//! `kw`: batch front end to the Kotz-Wishart library.
//!
//! Exit codes: 0 success, 1 selftest failure, 2 invalid input,
//! 3 precondition unmet, 4 numeric non-convergence.

mod commands;
mod output;
mod selftest;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kotz_wishart::kotz::KotzParams;
use kotz_wishart::kw::KWDist;
use kotz_wishart::matops::{parse_matrix, SpdMatrix};
use kotz_wishart::zonal::DEFAULT_MAX_DEGREE;
use kotz_wishart::Error;
use serde::Serialize;

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "kw", version, about = "Kotz-Wishart samplers, densities, moments, eigenvalue cdfs, risk and Varma transforms")]
struct Cli {
    /// Master seed for every Monte Carlo stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for Monte Carlo commands; output depends on (seed, workers).
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Relative tolerance for quadrature-based results.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Truncation degree for zonal series.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_DEGREE)]
    max_degree: usize,
    /// Sample budget for Monte Carlo estimates.
    #[arg(long, global = true, default_value_t = 20_000)]
    mc_samples: usize,
    #[command(subcommand)]
    command: Command,
}

/// A Kotz-Wishart law, from a JSON file or inline flags.
#[derive(Args, Debug, Clone)]
pub struct DistArgs {
    /// JSON file `{"p", "nu", "sigma", "q", "theta", "s"}`.
    #[arg(long, conflicts_with_all = ["p", "nu", "sigma"])]
    dist: Option<PathBuf>,
    #[arg(long)]
    p: Option<usize>,
    /// Degrees of freedom `n - 1`.
    #[arg(long)]
    nu: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    /// Scale matrix file (JSON or whitespace text); identity when omitted.
    #[arg(long)]
    sigma: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw SSP matrices.
    Sample {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Density and log-density at a matrix.
    Pdf {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, required_unless_present = "integrate")]
        matrix: Option<PathBuf>,
        /// Integrate the density over (0, inf) instead (p = 1 only).
        #[arg(long)]
        integrate: bool,
    },
    /// c_1, E(A), E(A^2) and E|A|^t.
    Moments {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0])]
        t: Vec<f64>,
    },
    /// Distribution of the smallest eigenvalue on a grid.
    Eig {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<f64>,
    },
    /// Efron-Morris risk of alpha A^{-1}, closed form and Monte Carlo.
    Risk {
        #[command(flatten)]
        dist: DistArgs,
        /// Multipliers; defaults to 0.8 c_0, c_0, 1.2 c_0.
        #[arg(long, value_delimiter = ',')]
        alpha: Vec<f64>,
    },
    /// A Varma transform, closed form next to numerical evaluation.
    Varma {
        #[arg(value_enum)]
        transform: Transform,
        /// Transform argument Z (JSON or whitespace text).
        #[arg(long)]
        z: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long)]
        n: Option<usize>,
        /// Partition such as "(2,1)".
        #[arg(long)]
        kappa: Option<String>,
        #[arg(long)]
        gamma: Option<f64>,
        /// Upper parameters (hypergeom) or `a` (psi).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        a: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        b: Vec<f64>,
        #[arg(long)]
        c: Option<f64>,
    },
    /// Run the built-in invariant checks.
    Selftest {
        #[arg(long, value_enum, default_value_t = Level::Quick)]
        level: Level,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transform {
    PowerDet,
    DetZonal,
    Hypergeom,
    Laguerre,
    Psi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

/// Settings echoed in every JSON envelope.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub workers: usize,
    pub format: Format,
    pub tol: Option<f64>,
    pub max_degree: usize,
    pub mc_samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dist: Option<KWDist>,
}

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Lib(Error),
    SelftestFailed(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::SelftestFailed(m) => write!(f, "selftest failed: {m}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::SelftestFailed(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Lib(e) => match e {
                Error::Precondition(_) => 3,
                Error::Convergence { .. } | Error::Divergence { .. } | Error::NoisyEstimate { .. } | Error::SingularSystem(_) => 4,
                Error::Domain(_)
                | Error::DimensionMismatch { .. }
                | Error::NotPositiveDefinite
                | Error::Singular
                | Error::UnsupportedDegree { .. }
                | Error::Parse(_) => 2,
            },
        }
    }
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))
}

pub fn read_spd(path: &Path) -> Result<SpdMatrix, CliError> {
    Ok(SpdMatrix::new(parse_matrix(&read_file(path)?)?)?)
}

impl DistArgs {
    pub fn build(&self) -> Result<KWDist, CliError> {
        if let Some(path) = &self.dist {
            return serde_json::from_str(&read_file(path)?)
                .map_err(|e| CliError::Invalid(format!("distribution file {}: {e}", path.display())));
        }
        let p = self.p.ok_or_else(|| CliError::Invalid("give --dist or --p and --nu".into()))?;
        let nu = self.nu.ok_or_else(|| CliError::Invalid("give --dist or --p and --nu".into()))?;
        let sigma = match &self.sigma {
            Some(path) => read_spd(path)?,
            None => SpdMatrix::identity(p),
        };
        Ok(KWDist::new(p, nu, sigma, KotzParams::new(self.q, self.theta, self.s)?)?)
    }
}

fn validate(cli: &Cli) -> Result<(), CliError> {
    if cli.workers == 0 {
        return Err(CliError::Invalid("--workers must be at least 1".into()));
    }
    if let Some(tol) = cli.tol {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(CliError::Invalid(format!("--tol must lie in (0, 1), got {tol}")));
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<String, CliError> {
    validate(&cli)?;
    let mut config = RunConfig {
        seed: cli.seed,
        workers: cli.workers,
        format: cli.format,
        tol: cli.tol,
        max_degree: cli.max_degree,
        mc_samples: cli.mc_samples,
        dist: None,
    };
    let (name, out) = match &cli.command {
        Command::Sample { dist, count } => {
            config.dist = Some(dist.build()?);
            ("sample", commands::sample(&config, *count)?)
        }
        Command::Pdf { dist, matrix, integrate } => {
            config.dist = Some(dist.build()?);
            ("pdf", commands::pdf(&config, matrix.as_deref(), *integrate)?)
        }
        Command::Moments { dist, t } => {
            config.dist = Some(dist.build()?);
            ("moments", commands::moments(&config, t)?)
        }
        Command::Eig { dist, grid } => {
            config.dist = Some(dist.build()?);
            ("eig", commands::eig(&config, grid)?)
        }
        Command::Risk { dist, alpha } => {
            config.dist = Some(dist.build()?);
            ("risk", commands::risk(&config, alpha)?)
        }
        Command::Varma {
            transform,
            z,
            q,
            n,
            kappa,
            gamma,
            a,
            b,
            c,
        } => {
            let args = commands::VarmaArgs {
                transform: *transform,
                z: read_spd(z)?,
                q: *q,
                n: *n,
                kappa: kappa.clone(),
                gamma: *gamma,
                a: a.clone(),
                b: b.clone(),
                c: *c,
            };
            ("varma", commands::varma(&config, &args)?)
        }
        Command::Selftest { level } => ("selftest", selftest::run(&config, *level)?),
    };
    let text = out.render(name, &config, cli.format);
    if name == "selftest" {
        let failed: Vec<String> = out
            .rows
            .iter()
            .filter(|r| matches!(r.get(1), Some(output::Cell::Bool(false))))
            .filter_map(|r| match r.first() {
                Some(output::Cell::Text(t)) => Some(t.clone()),
                _ => None,
            })
            .collect();
        if !failed.is_empty() {
            print!("{text}");
            return Err(CliError::SelftestFailed(failed.join(", ")));
        }
    }
    Ok(text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
