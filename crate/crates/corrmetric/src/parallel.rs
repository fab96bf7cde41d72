//! Parallel sweeps. Work is split into the same units the sequential code
//! uses (grid rows, random blocks) and merged with the order-independent
//! accumulator, so reports match the sequential ones exactly.

use corrmetric_core::verify::{
    grid_angles, sweep_grid_rows, sweep_random_block, RatioAccumulator, RANDOM_BLOCK,
};
use corrmetric_core::{Error, RatioReport, RelaxConfig, SweepParams};
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::CliError;

/// Caps internal parallelism when set to a positive integer.
pub const THREADS_ENV: &str = "CORRMETRIC_THREADS";

pub fn thread_count_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

pub fn thread_pool(threads: Option<usize>) -> Result<ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

pub fn par_sweep_grid(
    pool: &ThreadPool,
    step: f64,
    cfg: &RelaxConfig,
) -> Result<RatioReport, Error> {
    let rows = grid_angles(step)?.len();
    let acc = pool.install(|| {
        (0..rows)
            .into_par_iter()
            .map(|i| sweep_grid_rows(step, cfg, i..i + 1))
            .try_reduce(RatioAccumulator::default, |a, b| Ok(a.merge(b)))
    })?;
    Ok(acc.finish(cfg, SweepParams::Grid { step }))
}

pub fn par_sweep_random(
    pool: &ThreadPool,
    n: usize,
    trials: u64,
    seed: u64,
    cfg: &RelaxConfig,
) -> Result<RatioReport, Error> {
    if n < 3 {
        return Err(Error::DimensionTooSmall {
            needed: 3,
            found: n,
        });
    }
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1"));
    }
    let blocks = trials.div_ceil(RANDOM_BLOCK);
    let acc = pool.install(|| {
        (0..blocks)
            .into_par_iter()
            .map(|b| sweep_random_block(n, trials, seed, b, cfg))
            .reduce(RatioAccumulator::default, RatioAccumulator::merge)
    });
    Ok(acc.finish(
        cfg,
        SweepParams::Random {
            trials,
            seed,
            dimension: n,
        },
    ))
}
