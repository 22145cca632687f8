//! Command-line front end: argument and config parsing, the subcommands, and
//! artifact writing.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::Config;
use crate::error::{config_err, CliResult};

/// Environment variable consulted for the seed when neither the flag nor the
/// config file sets one.
pub const SEED_ENV: &str = "FPM_SEED";

#[derive(Debug, Parser)]
#[command(name = "fpm", version, about = "Fractional Poisson measure toolkit")]
pub struct Cli {
    /// `key = value` file; flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file, written atomically. Standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// `csv` or `json`.
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// RNG seed (decimal u64).
    #[arg(long, global = true)]
    pub seed: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mittag-Leffler function E_β(z) or its k-th derivative.
    MlEval(MlEvalArgs),
    /// pmf of the scalar fractional Poisson law.
    FpmPmf(FpmPmfArgs),
    /// Moments m(1)..m(n).
    FpmMoments(FpmMomentsArgs),
    /// Sample configurations on a box window (JSON lines plus stats sidecar).
    SampleProcess(SampleProcessArgs),
    /// Non-orthogonality function F over a β grid.
    Figure31(Figure31Args),
    /// Moment, Appell and generalized Appell kernels as JSON.
    KernelsDump(KernelsDumpArgs),
    /// Pairing table of random dual and polynomial kernels.
    BiorthogonalityCheck(BiorthogonalityArgs),
    /// Run the acceptance checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    /// Target absolute error of series evaluations.
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub max_terms: Option<String>,
    /// Working precision in decimal digits.
    #[arg(long, allow_hyphen_values = true)]
    pub digits: Option<String>,
}

#[derive(Debug, Args)]
pub struct MlEvalArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    /// Arguments, comma separated, e.g. `--z -1,0.5+2i`.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Derivative order (real arguments only).
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Debug, Args)]
pub struct FpmPmfArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    /// Largest k; defaults to the moment tail bound for `--tail`.
    #[arg(long, allow_hyphen_values = true)]
    pub kmax: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub tail: Option<String>,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Debug, Args)]
pub struct FpmMomentsArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub n: Option<String>,
}

#[derive(Debug, Args)]
pub struct SampleProcessArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub dim: Option<String>,
    /// Lower corner, one value per axis.
    #[arg(long, allow_hyphen_values = true)]
    pub lower: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub upper: Option<String>,
    /// Cells per axis; one value is used for every axis.
    #[arg(long, allow_hyphen_values = true)]
    pub cells: Option<String>,
    /// Constant density c (σ = c·Lebesgue).
    #[arg(long, allow_hyphen_values = true)]
    pub density: Option<String>,
    /// Per-cell masses, row-major.
    #[arg(long, allow_hyphen_values = true)]
    pub masses: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub samples: Option<String>,
    /// Stats sidecar path; defaults to `<out>.stats.json`.
    #[arg(long, allow_hyphen_values = true)]
    pub stats: Option<String>,
}

#[derive(Debug, Args)]
pub struct Figure31Args {
    /// `lo:hi:step`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Rate pairs, e.g. `--pairs 1,1 2,3 1,2`.
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    pub pairs: Vec<String>,
}

#[derive(Debug, Args)]
pub struct KernelsDumpArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub masses: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub order: Option<String>,
    /// Evaluation point for the C and P kernels (complex allowed).
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<String>,
}

#[derive(Debug, Args)]
pub struct BiorthogonalityArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub bins: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub nmax: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub masses: Option<String>,
    /// Relative tolerance for the residuals.
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<String>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Criterion ids to run; all when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub only: Option<String>,
}

fn joined(v: &[String]) -> Option<String> {
    if v.is_empty() {
        None
    } else {
        Some(v.join(" "))
    }
}

impl BudgetArgs {
    fn flags(&self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("tol", self.tol.clone()),
            ("max-terms", self.max_terms.clone()),
            ("digits", self.digits.clone()),
        ]
    }
}

impl Command {
    fn flags(&self) -> Vec<(&'static str, Option<String>)> {
        match self {
            Command::MlEval(a) => {
                let mut v = vec![("beta", a.beta.clone()), ("z", a.z.clone()), ("k", a.k.clone())];
                v.extend(a.budget.flags());
                v
            }
            Command::FpmPmf(a) => {
                let mut v = vec![
                    ("lambda", a.lambda.clone()),
                    ("beta", a.beta.clone()),
                    ("kmax", a.kmax.clone()),
                    ("tail", a.tail.clone()),
                ];
                v.extend(a.budget.flags());
                v
            }
            Command::FpmMoments(a) => vec![
                ("lambda", a.lambda.clone()),
                ("beta", a.beta.clone()),
                ("n", a.n.clone()),
            ],
            Command::SampleProcess(a) => vec![
                ("beta", a.beta.clone()),
                ("dim", a.dim.clone()),
                ("lower", a.lower.clone()),
                ("upper", a.upper.clone()),
                ("cells", a.cells.clone()),
                ("density", a.density.clone()),
                ("masses", a.masses.clone()),
                ("samples", a.samples.clone()),
                ("stats", a.stats.clone()),
            ],
            Command::Figure31(a) => vec![("grid", a.grid.clone()), ("pairs", joined(&a.pairs))],
            Command::KernelsDump(a) => vec![
                ("masses", a.masses.clone()),
                ("beta", a.beta.clone()),
                ("order", a.order.clone()),
                ("w", a.w.clone()),
            ],
            Command::BiorthogonalityCheck(a) => vec![
                ("bins", a.bins.clone()),
                ("nmax", a.nmax.clone()),
                ("beta", a.beta.clone()),
                ("masses", a.masses.clone()),
                ("tol", a.tol.clone()),
            ],
            Command::Selftest(a) => vec![("only", a.only.clone())],
        }
    }
}

const COMMON_KEYS: [&str; 3] = ["out", "format", "seed"];

/// Merge the config file, the flags and the environment into one parameter
/// set for the chosen command.
pub fn resolve(cli: &Cli) -> CliResult<Config> {
    let base = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| config_err(format!("cannot read config {}: {e}", p.display())))?;
            Config::parse(&text)?
        }
        None => Config::default(),
    };
    let flags = cli.command.flags();
    let mut allowed: Vec<&str> = flags.iter().map(|(k, _)| *k).collect();
    allowed.extend(COMMON_KEYS);
    base.check_keys(&allowed)?;
    let mut params = base.overlay(flags).overlay([
        ("out", cli.out.as_ref().map(|p| p.display().to_string())),
        ("format", cli.format.clone()),
        ("seed", cli.seed.clone()),
    ]);
    if params.get("seed").is_none() {
        if let Ok(s) = std::env::var(SEED_ENV) {
            params.set("seed", s);
        }
    }
    if let Some(s) = params.get("seed") {
        parse::parse_seed(s)?;
    }
    Ok(params)
}

pub fn run(cli: Cli) -> ExitCode {
    let result = resolve(&cli).and_then(|params| commands::dispatch(&cli.command, &params));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
