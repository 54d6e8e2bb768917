//! Std companion of `qha-core`: file formats, run configuration, the
//! identity suite, experiment drivers and report rendering.

pub mod config;
pub mod error;
pub mod experiments;
pub mod io;
pub mod report;
pub mod suite;

pub use error::{Result, RunError};
pub use qha_core;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "QHA_THREADS";

/// Sizes the global thread pool from [`THREADS_ENV`]; unset or invalid values keep the default.
pub fn init_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}
