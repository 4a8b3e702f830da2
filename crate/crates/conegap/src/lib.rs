//! Configuration, file formats and command orchestration for `conegap-core`
//! experiments.
// negated comparisons such as `!(x > 0.0)` are used to reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod manifest;
pub mod output;

pub use commands::{run, Command, RunError};
pub use config::{Config, ConfigError};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "CONEGAP_THREADS";

/// Parses a worker-count override; `None` leaves the default in place.
pub fn parse_threads(value: Option<&str>) -> Result<Option<usize>, String> {
    match value.map(str::trim) {
        None | Some("") => Ok(None),
        Some(v) => match v.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("{THREADS_ENV} = {v:?}: requires a positive integer")),
        },
    }
}
