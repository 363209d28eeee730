use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Freezing-point depression in a solvent/solute lattice model: phase
/// diagrams, the variational minimizer, Monte Carlo and exact checks.
#[derive(Debug, Parser)]
#[command(name = "brine", version)]
pub struct Cli {
    /// JSON file with default values for any flag (keys as in the flag names,
    /// e.g. "J", "kappa", "burn_in"). A run manifest is accepted as well.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Directory receiving the outputs and the run manifest.
    #[arg(long, global = true, value_name = "DIR", default_value = "brine-out")]
    pub out_dir: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the salt entropy, optimal split and the functionals at one point.
    Inspect(InspectArgs),
    /// Trace the phase boundaries h-(c) and h+(c); writes CSV and SVG.
    PhaseDiagram(PhaseDiagramArgs),
    /// Minimize G and classify the phase.
    Minimize(MinimizeArgs),
    /// Sample the lattice model by Markov chain Monte Carlo.
    Simulate(SimulateArgs),
    /// Cross-check sampler and analytic identities against exact enumeration.
    Validate(ValidateArgs),
    /// Tabulate the canonical free energy F(m).
    FreeEnergy(FreeEnergyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    /// Curie-Weiss closed form with gain 2dJ.
    MeanField,
    /// Exact square-lattice spontaneous magnetization.
    Onsager,
    /// Monotone interpolation of a measured "h,m" table.
    Tabulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Bc {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Magnetization model (default: onsager in d = 2, mean-field otherwise).
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// CSV table "h,m" for the tabulated model.
    #[arg(long, value_name = "PATH")]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PhysicsArgs {
    #[arg(long = "J")]
    pub j: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long, value_enum)]
    pub bc: Option<Bc>,
}

#[derive(Debug, Clone, Args)]
pub struct InspectArgs {
    #[command(flatten)]
    pub physics: PhysicsArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Magnetization.
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<f64>,
    /// Salt split at which to evaluate the unoptimized functional (default: optimal).
    #[arg(long)]
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct PhaseDiagramArgs {
    #[command(flatten)]
    pub physics: PhysicsArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Explicit comma-separated concentrations; overrides --c-max/--c-steps.
    #[arg(long, value_delimiter = ',')]
    pub c_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub c_max: Option<f64>,
    #[arg(long)]
    pub c_steps: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct MinimizeArgs {
    #[command(flatten)]
    pub physics: PhysicsArgs,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    /// Side length of the box.
    #[arg(long = "L")]
    pub side: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub physics: PhysicsArgs,
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long)]
    pub sweeps: Option<u64>,
    /// Default: 20% of the sweeps.
    #[arg(long)]
    pub burn_in: Option<u64>,
    #[arg(long)]
    pub thin: Option<u64>,
    #[arg(long)]
    pub chains: Option<u64>,
    /// Also write the per-sample trace "sweep,M,Q" of every chain.
    #[arg(long)]
    pub samples: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub physics: PhysicsArgs,
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Monte Carlo proposals (spin flips plus salt swaps).
    #[arg(long)]
    pub proposals: Option<u64>,
    /// Independent chains sharing the proposals.
    #[arg(long)]
    pub chains: Option<u64>,
    /// Largest accepted total variation distance.
    #[arg(long)]
    pub tv_tol: Option<f64>,
    /// Scale energy changes in the acceptance rule (negative control).
    #[arg(long, hide = true)]
    pub perturb_acceptance: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct FreeEnergyArgs {
    #[command(flatten)]
    pub physics: PhysicsArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Number of points on the symmetric grid.
    #[arg(long)]
    pub grid_size: Option<usize>,
}
