//! Experiment runner for two-way channel quantizer designs: configuration,
//! SDR tables, figure dumps and saved systems.

pub mod config;
pub mod dump;
mod error;
pub mod experiment;
pub mod persist;

pub use config::{Channel, ExperimentConfig, Mode};
pub use dump::{dump_codebook, dump_partition, read_partition};
pub use error::{CliError, LoadError};
pub use experiment::{run_experiment, RowOutcome, RunSummary, TableRow};
pub use persist::{load_system, load_system_with_grid, save_system};
