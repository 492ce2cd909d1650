//! Command-line driver for the dqdot solvers: configuration, presets,
//! parameter sweeps and CSV output.

pub mod cache;
pub mod config;
pub mod presets;
pub mod run;

pub use config::{parse_config, ConfigError, Overrides, RunConfig, Solver, Sources, Task};
pub use run::{run, NumericalFailure, Summary};
