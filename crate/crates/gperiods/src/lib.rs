//! Gaussian period plots from the command line or over HTTP.
//!
//! Builds on [`gperiods_core`] and adds what needs `std`: a rayon driver for
//! the per-orbit sums, the CSV/JSON point formats, PNG output with per-class
//! layers, the `gperiods` command and a small caching HTTP API.

pub mod cli;
pub mod export;
pub mod parallel;
pub mod png_io;
pub mod service;
pub mod spec_args;

pub use gperiods_core as engine;

/// Size cap on `n`: `GP_MAX_N` if set and valid, else the engine default.
pub fn max_n_from_env() -> u64 {
    std::env::var("GP_MAX_N")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(engine::DEFAULT_MAX_N)
}
