//! Command-line front end for `polthomas`: scenario files in, `report.json`
//! and `trajectory.csv` out.

pub mod commands;
pub mod error;
pub mod report;
pub mod scenario;

pub use commands::{run, write_error_report, CliConfig, Command, Overrides};
pub use error::{CliError, CliResult};
pub use scenario::{parse_scenario_file, parse_scenario_str};
