//! Multi-threaded orbit evaluation.
//!
//! The orbit layout comes from the engine's sequential sweep; only the
//! per-orbit compensated sums are spread over threads. Each orbit is still
//! summed by one thread in traversal order, so the table is bit-identical to
//! the single-threaded one for any thread count.

use gperiods_core::periods::{orbit_layout, orbit_value};
use gperiods_core::{ColoringMode, Orbit, OrbitTable, PeriodParams, PeriodSet};
use rayon::prelude::*;

/// Orbit table computed on the current rayon pool.
pub fn compute_table(params: &PeriodParams) -> OrbitTable {
    let layout = orbit_layout(params);
    let orbits = layout
        .par_iter()
        .with_min_len(1024)
        .map(|&(rep, size)| Orbit {
            rep,
            size,
            value: orbit_value(params, rep, size),
        })
        .collect();
    OrbitTable::from_parts(*params, orbits)
}

/// Runs `f` on a dedicated pool of `threads` workers (`None`: rayon default).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        None => f(),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .expect("thread pool")
            .install(f),
    }
}

pub fn compute_period_set(
    params: &PeriodParams,
    c: u64,
    mode: ColoringMode,
    threads: Option<usize>,
) -> gperiods_core::Result<PeriodSet> {
    gperiods_core::color_classes(params.n(), params.omega() as i64, c, mode)?;
    with_threads(threads, || compute_table(params)).colorize(c, mode)
}
