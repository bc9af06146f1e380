//! Trial ranges split into fixed-size shards, run on a rayon pool and
//! returned in shard order, so results do not depend on the worker count.

use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};

pub const SHARD: u64 = 256;

pub fn shards(trials: u64) -> Vec<Range<u64>> {
    (0..trials.div_ceil(SHARD)).map(|i| i * SHARD..((i + 1) * SHARD).min(trials)).collect()
}

/// Run `f` on every shard of `0..trials` with `workers` threads (0 = rayon
/// default) and return the per-shard results in order.
pub fn run_sharded<A, F>(trials: u64, workers: usize, f: F) -> Result<Vec<A>>
where
    A: Send,
    F: Fn(Range<u64>) -> Result<A> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| shards(trials).into_par_iter().map(&f).collect())
}
