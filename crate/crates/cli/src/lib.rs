//! Command implementations behind the `evfront` binary: CSV ingestion,
//! estimation over input grids, threshold-selection diagnostics,
//! stability plots, Monte Carlo simulation and dataset generation.
//!
//! Every number written to an output file is produced by a library
//! operation; this crate only parses flags, drives the library and
//! formats results. Outputs are byte-identical across runs for identical
//! inputs, flags and seed.

pub mod csvio;
pub mod run;

pub use run::{
    cmd_estimate, cmd_gen, cmd_pickands_plot, cmd_select_k, cmd_simulate, Command, EstimateArgs,
    GenArgs, PickandsPlotArgs, SelectKArgs, SimulateArgs,
};

/// Errors split by exit code: input problems (missing or malformed data,
/// exit 1) versus inconsistent configuration (exit 2).
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Config(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Config(m) => write!(f, "configuration error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Config(_) => 2,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
