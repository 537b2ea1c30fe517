//! Worker pool over Q values.

use anyhow::{anyhow, Result};
use rayon::prelude::*;

/// Apply `f` to every `q` on `workers` threads; results come back sorted by `q`.
pub fn map_sorted<T, F>(q_values: &[f64], workers: usize, f: F) -> Result<Vec<(f64, T)>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync,
{
    let mut qs = q_values.to_vec();
    qs.sort_by(f64::total_cmp);
    qs.dedup();
    let run = || -> Result<Vec<(f64, T)>> {
        qs.par_iter()
            .map(|&q| f(q).map(|v| (q, v)))
            .collect::<Result<Vec<_>>>()
    };
    if workers <= 1 {
        return qs.iter().map(|&q| f(q).map(|v| (q, v))).collect();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| anyhow!("building worker pool: {e}"))?
        .install(run)
}
