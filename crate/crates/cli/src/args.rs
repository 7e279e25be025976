use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exact magnon states, reduced density matrices, coherence and coherence
/// thermodynamics of the periodic ferromagnetic Heisenberg chain.
///
/// Exit codes: 0 success, 2 domain error (including divergences and null
/// states), 3 infeasible within the budget, 4 internal-consistency failure
/// or failed verification.
#[derive(Debug, Parser)]
#[command(name = "magnon", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalized amplitudes of an m-magnon state, as JSON.
    State(StateArgs),
    /// Reduced density matrix of a subsystem, block by block, as JSON.
    Reduce(ReduceArgs),
    /// Coherence measures of a reduced state, as JSON.
    Coherence(ReduceArgs),
    /// Thermodynamic curve (beta_c, u, heat capacity) on a grid, as CSV.
    Thermo(ThermoArgs),
    /// Runs the invariant suite and reports every family.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// Number of sites N.
    #[arg(long = "N", value_name = "N")]
    pub chain: usize,

    /// Number of magnons m; defaults to the number of wavenumber indices.
    #[arg(long = "m", value_name = "M")]
    pub magnons: Option<usize>,

    /// Wavenumber indices n_j (k_j = 2 pi n_j / N), comma separated. A single
    /// index is repeated m times.
    #[arg(long = "k", value_name = "LIST", value_delimiter = ',', required = true)]
    pub k: Vec<usize>,

    /// Exchange coupling J.
    #[arg(long = "J", value_name = "J", default_value_t = 1.0, allow_negative_numbers = true)]
    pub coupling: f64,

    /// Largest number of stored amplitudes (state entries or block entries).
    #[arg(long, value_name = "ENTRIES", default_value_t = 10_000_000)]
    pub budget: u64,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub state: StateArgs,

    /// Keep the first n sites.
    #[arg(long = "n", value_name = "N_A", conflicts_with = "sites")]
    pub n: Option<usize>,

    /// Keep these sites (1-based, comma separated).
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    pub sites: Option<Vec<usize>>,

    /// Use the single-mode closed form instead of building the state; needs
    /// all wavenumber indices equal and works for chains of any length.
    #[arg(long)]
    pub closed_form: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridKind {
    /// Grid over the inverse coherence temperature.
    Beta,
    /// Grid over the energy density, strictly inside (0, epsilon0).
    U,
}

#[derive(Debug, Args)]
pub struct ThermoArgs {
    /// Single-magnon energy epsilon0.
    #[arg(long, value_name = "E", default_value_t = 1.0)]
    pub epsilon0: f64,

    /// Grid variable.
    #[arg(long, value_enum, default_value_t = GridKind::Beta)]
    pub grid: GridKind,

    /// First grid value.
    #[arg(long, value_name = "X", default_value_t = -5.0, allow_negative_numbers = true)]
    pub from: f64,

    /// Last grid value.
    #[arg(long, value_name = "X", default_value_t = 5.0, allow_negative_numbers = true)]
    pub to: f64,

    /// Number of grid points, endpoints included.
    #[arg(long, value_name = "COUNT", default_value_t = 101)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Chain length for the suite (at most 14).
    #[arg(long = "N", value_name = "N", default_value_t = 8)]
    pub chain: usize,

    /// Magnon number for the suite.
    #[arg(long = "m", value_name = "M", default_value_t = 2)]
    pub magnons: usize,

    /// Exchange coupling J.
    #[arg(long = "J", value_name = "J", default_value_t = 1.0)]
    pub coupling: f64,

    /// Random specs per randomized family.
    #[arg(long, value_name = "COUNT", default_value_t = 50)]
    pub trials: usize,

    /// Seed for the random specs.
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,

    /// Append a family that always fails (checks the exit path).
    #[arg(long)]
    pub force_fail: bool,

    /// Print the report as JSON instead of one line per family.
    #[arg(long)]
    pub json: bool,
}
