//! Configuration, sweeps, verification suites and reports on top of
//! `spinboson-core`. All file and terminal I/O lives here.

pub mod config;
mod error;
pub mod info;
pub mod output;
pub mod sweep;
pub mod threshold;
pub mod verify;

pub use config::{parse_config, Format, RunConfig};
pub use error::{CliError, Outcome};
pub use sweep::{run_sweep, SweepRow};
