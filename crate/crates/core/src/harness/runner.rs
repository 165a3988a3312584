use rayon::prelude::*;
use rayon::ThreadPoolBuilder;

use crate::error::{Error, Result};

/// Seed stream of replicate `rep` of schedule entry `entry`.
pub fn replicate_stream(entry: usize, rep: u64) -> u64 {
    ((entry as u64) << 32) | rep
}

/// Runs `job(0..replicates)` on a pool of `workers` threads and returns the
/// results in replicate order, whatever order they finished in. With
/// per-replicate seed streams the output does not depend on `workers`.
pub fn run_replicates<T, F>(workers: usize, replicates: u64, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    if workers == 0 {
        return Err(Error::InvalidParameter("workers must be at least 1".into()));
    }
    if workers == 1 {
        return (0..replicates).map(job).collect();
    }
    let pool = ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..replicates).into_par_iter().map(job).collect())
}
