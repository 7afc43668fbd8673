//! Command-line front end for `relaynet`: configuration, the `rate`,
//! `bound`, `simulate` and `gen-net` commands, and result serialization.
//!
//! Rate and bound reports are JSON documents that embed the configuration
//! that produced them. Simulation results are CSV tables; see [`table`].

pub mod commands;
pub mod config;
pub mod error;
pub mod table;

pub use commands::{cmd_bound, cmd_dry_run, cmd_rate, cmd_simulate, gen_net, BoundDocument, RateDocument};
pub use config::{ExperimentConfig, LadderPoint, Overrides, SimulationConfig};
pub use error::{CliError, Result};
pub use table::{SimRow, SimulationTable};
