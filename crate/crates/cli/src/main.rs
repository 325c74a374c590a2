use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

/// Cost optimization of reinforced-concrete frames by biogeography-based
/// optimization.
#[derive(Parser, Debug)]
#[command(name = "rcbbo", version, about)]
struct Cli {
    /// Worker threads for objective evaluations (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search the design space with BBO.
    Optimize(OptimizeArgs),
    /// Evaluate every candidate and certify the optimum.
    Enumerate(EnumerateArgs),
    /// Utility landscapes over BBO parameters.
    Tune(TuneArgs),
    /// Evaluate one fixed design with and without SSSI.
    Analyze(AnalyzeArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Inputs {
    /// Project JSON (structure, and optionally soil, spec, costs, config).
    #[arg(long)]
    pub model: PathBuf,
    /// Soil profile JSON, replacing the project's.
    #[arg(long)]
    pub soil: Option<PathBuf>,
    /// Design variable spec JSON, replacing the project's.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Unit costs JSON, replacing the project's.
    #[arg(long)]
    pub costs: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

impl Switch {
    pub fn on(self) -> bool {
        self == Switch::On
    }
}

#[derive(Args, Debug, Clone)]
pub struct BboArgs {
    #[arg(long)]
    pub popsize: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub mutprob: Option<f64>,
    #[arg(long)]
    pub keeprate: Option<f64>,
    /// Mutation step on the unit genome.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Iteration horizon.
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Stop after this many iterations without improvement.
    #[arg(long)]
    pub stall: Option<usize>,
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[arg(long, value_enum, default_value = "off")]
    pub sssi: Switch,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub bbo: BboArgs,
    /// Persistent evaluation cache file.
    #[arg(long, conflicts_with = "no_cache")]
    pub cache: Option<PathBuf>,
    /// Evaluate every habitat, even repeated candidates.
    #[arg(long)]
    pub no_cache: bool,
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[arg(long, value_enum, default_value = "off")]
    pub sssi: Switch,
    #[arg(long)]
    pub out: PathBuf,
    /// Largest candidate count accepted.
    #[arg(long, default_value_t = 100_000)]
    pub cap: u64,
    /// Rank only candidates that pass every check.
    #[arg(long)]
    pub feasible_only: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveKind {
    Ackley,
    Structural,
}

#[derive(Args, Debug)]
pub struct TuneArgs {
    #[arg(long, value_enum, default_value = "ackley")]
    pub objective: ObjectiveKind,
    /// Project inputs, for the structural objective.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub soil: Option<PathBuf>,
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub costs: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "off")]
    pub sssi: Switch,
    /// Ackley dimension.
    #[arg(long, default_value_t = 16)]
    pub dims: usize,
    /// Grid values per Ackley variable (odd keeps the origin on the grid).
    #[arg(long, default_value_t = 65)]
    pub bins: usize,
    /// Landscape axis as `name=v1,v2,...`; give one or two.
    #[arg(long = "axis", required = true)]
    pub axes: Vec<String>,
    /// Fixed parameter as `name=value`.
    #[arg(long = "fixed")]
    pub fixed: Vec<String>,
    #[arg(long, default_value_t = 30)]
    pub runs: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub bbo: BboArgs,
    /// Weight of utility A in utility C.
    #[arg(long, default_value_t = 4.0)]
    pub z: f64,
    #[arg(long, default_value_t = 14)]
    pub intervals: usize,
    /// Final value counted as a success.
    #[arg(long, default_value_t = 1e-3)]
    pub threshold: f64,
    /// Persistent evaluation cache file.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SssiMode {
    On,
    Off,
    Both,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    /// Design as `name=value,...`, one entry per variable.
    #[arg(long)]
    pub design: String,
    #[arg(long, value_enum, default_value = "both")]
    pub sssi: SssiMode,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write displacements and member station forces.
    #[arg(long)]
    pub dump_forces: bool,
}

/// Failure of a subcommand with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn infeasible(message: impl Into<String>) -> Self {
        CliError {
            code: 3,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        CliError {
            code: 4,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<rcbbo_core::Error> for CliError {
    fn from(e: rcbbo_core::Error) -> Self {
        use rcbbo_core::Error as E;
        match e {
            E::Singular { .. } | E::Domain(_) | E::Geometry(_) | E::BearingFailure { .. } => {
                CliError::numerical(e.to_string())
            }
            _ => CliError::config(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: cannot start {n} workers: {e}");
            return ExitCode::from(2);
        }
    }

    let result = match &cli.command {
        Command::Optimize(a) => commands::optimize(a),
        Command::Enumerate(a) => commands::enumerate(a),
        Command::Tune(a) => commands::tune(a),
        Command::Analyze(a) => commands::analyze(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
