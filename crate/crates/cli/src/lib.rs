//! Configuration, presets and verb implementations behind the
//! `consolidate` binary.

pub mod commands;
pub mod config;
pub mod presets;
pub mod svg;

use consolidation::Error as SolverError;

pub use config::{Config, ConfigError};

/// Exit status for a failed run: 2 when the input was refused, 1 when a
/// solver failed.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.downcast_ref::<ConfigError>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<SolverError>() {
            return if e.is_refusal() { 2 } else { 1 };
        }
    }
    1
}
