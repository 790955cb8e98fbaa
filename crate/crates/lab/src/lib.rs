//! Command-line front end for `ricci-lab-core`: JSON metric specs in,
//! reports, flow traces and fuzz campaigns out.

pub mod commands;
pub mod error;
pub mod output;
pub mod spec;

pub use commands::{run, Cli, Command, Outcome};
pub use error::{CliError, CliResult};
pub use spec::MetricSpec;

/// Exit status for a finished run.
pub fn exit_code(outcome: &Outcome, strict: bool) -> u8 {
    if strict && outcome.failed {
        2
    } else {
        0
    }
}
