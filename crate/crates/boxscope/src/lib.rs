//! Command-line front end for `boxscope-core`: argument parsing, output
//! formats, the JSON-lines result cache, the worker pool and the
//! acceptance suite.

pub mod acceptance;
pub mod cache;
pub mod cli;
pub mod commands;
pub mod output;
pub mod pool;

use boxscope_core::Error;

/// Exit status for a failed command: 2 for usage, validation and domain
/// errors, 3 for resource caps and exhausted searches, 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Usage(_) | Error::Domain(_) | Error::Validation(_) => 2,
                Error::ResourceCap { .. } | Error::Exhausted { .. } => 3,
                Error::Invariant(_) => 1,
            };
        }
    }
    1
}
