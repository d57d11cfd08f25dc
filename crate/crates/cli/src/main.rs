//! `lidarp`: instance generation, solver runs, validation and benchmarks.

mod bench;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Generate,
    Explicit,
    Bnp,
    RootHeuristic,
    Mpsp,
    Gadget,
    Validate,
    Bench,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Generate => "generate",
            Mode::Explicit => "explicit",
            Mode::Bnp => "bnp",
            Mode::RootHeuristic => "root-heuristic",
            Mode::Mpsp => "mpsp",
            Mode::Gadget => "gadget",
            Mode::Validate => "validate",
            Mode::Bench => "bench",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Asc,
    Desc,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "lidarp", version, about = "Exact and heuristic solvers for the line-based dial-a-ride problem")]
pub struct Cli {
    #[arg(long, value_enum)]
    pub mode: Mode,

    /// Instance file; bench accepts several files or directories.
    #[arg(long)]
    pub instance: Vec<PathBuf>,

    /// Output directory, or the CSV file in bench mode.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Wall-clock limit in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,

    /// Reward per accepted passenger; overrides the instance file.
    #[arg(long)]
    pub w_pax: Option<f64>,

    /// Weight of saved distance; overrides the instance file.
    #[arg(long)]
    pub w_dist: Option<f64>,

    /// Positions per vehicle as a fraction of twice the request count.
    #[arg(long)]
    pub positions_fraction: Option<f64>,

    #[arg(long)]
    pub no_symmetry_single_stop: bool,

    #[arg(long)]
    pub no_symmetry_tour_length: bool,

    #[arg(long)]
    pub require_all_requests: bool,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Initial patterns: standard, all or random:<k>.
    #[arg(long)]
    pub pool: Option<String>,

    /// Solution file for validate mode.
    #[arg(long)]
    pub solution: Option<PathBuf>,

    #[arg(long, default_value_t = 10)]
    pub stations: usize,

    #[arg(long, default_value_t = 20)]
    pub requests: usize,

    #[arg(long, default_value_t = 1)]
    pub vehicles: usize,

    #[arg(long, default_value_t = 3)]
    pub capacity: usize,

    /// Number of instances per size in generate mode.
    #[arg(long, default_value_t = 5)]
    pub versions: usize,

    /// Travel direction in mpsp mode.
    #[arg(long, value_enum, default_value_t = DirectionArg::Asc)]
    pub direction: DirectionArg,

    /// Ignore vehicle capacity in mpsp mode.
    #[arg(long)]
    pub uncapacitated: bool,

    /// Edge list such as `1-2,1-4,2-4` for gadget mode.
    #[arg(long, default_value = "")]
    pub graph: String,

    /// Vertex count in gadget mode; defaults to the largest edge endpoint.
    #[arg(long)]
    pub vertices: Option<usize>,

    #[arg(long, default_value_t = 3)]
    pub clique_size: usize,

    /// Solve the gadget exactly and compare with a direct clique search.
    #[arg(long)]
    pub verify: bool,

    /// Solver modes compared in bench mode.
    #[arg(long, value_delimiter = ',', default_value = "explicit,bnp,root-heuristic")]
    pub bench_modes: Vec<Mode>,

    /// Run branch-and-price under all four symmetry settings in bench mode.
    #[arg(long)]
    pub symmetry_grid: bool,
}

impl Cli {
    fn check(&self) -> Result<()> {
        if let Some(t) = self.time_limit {
            if !(t > 0.0) {
                bail!("--time-limit must be positive, got {t}");
            }
        }
        if let Some(f) = self.positions_fraction {
            if !(f > 0.0 && f <= 1.0) {
                bail!("--positions-fraction must lie in (0, 1], got {f}");
            }
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.check().and_then(|()| run::run(&cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
