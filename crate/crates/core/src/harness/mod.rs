//! Temperature sweeps, ensemble averaging and result persistence.

mod config;
mod emit;
mod sweep;

pub use config::{SweepConfig, TemperatureGrid};
pub use emit::{emit, load_json, OutputFormat, CSV_COLUMNS};
pub use sweep::{
    ensemble_average, oracle_sweep, run_sweep, run_sweep_with, PointStats, SweepResult, SweepRow,
};
