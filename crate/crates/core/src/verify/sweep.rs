use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;
use core::ops::Range;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::angles::{f_raw, feasible_angles, ratio_of, AngleTriple, RelaxConfig};
use crate::distance::{center_unit_in_place, unit_angle, unit_distance};
use crate::error::{Error, Result};

/// Reports flag a violation when `max_ratio > k + REPORT_TOLERANCE`.
pub const REPORT_TOLERANCE: f64 = 1e-9;

/// Coarsest accepted grid step.
pub const MAX_GRID_STEP: f64 = 0.5;

/// Trials per independent random stream in [`sweep_random`].
pub const RANDOM_BLOCK: u64 = 4096;

/// Random sweeps draw from `ChaCha8Rng::seed_from_u64(seed)` with the stream
/// set to the block number, and map the words to normals with the ziggurat
/// `StandardNormal` of `rand_distr`.
pub const GENERATOR_NAME: &str = "chacha8-stream-per-block/rand_distr-standard-normal";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepParams {
    Grid {
        step: f64,
    },
    Random {
        trials: u64,
        seed: u64,
        dimension: usize,
    },
}

/// Result of a ratio sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    pub k: f64,
    /// `None` when every sample was degenerate.
    pub max_ratio: Option<f64>,
    pub argmax: Option<AngleTriple>,
    pub evaluated: u64,
    pub skipped: u64,
    pub params: SweepParams,
}

impl RatioReport {
    /// Some evaluated triple needs a constant larger than `k`.
    pub fn is_violation(&self) -> bool {
        self.max_ratio
            .is_some_and(|r| r > self.k + REPORT_TOLERANCE)
    }

    pub fn generator_name(&self) -> Option<&'static str> {
        match self.params {
            SweepParams::Grid { .. } => None,
            SweepParams::Random { .. } => Some(GENERATOR_NAME),
        }
    }
}

/// Running maximum of a sweep. Merging is associative and commutative: ties
/// go to the lexicographically smallest triple, so any partition of the work
/// reduces to the same result.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RatioAccumulator {
    best: Option<(f64, AngleTriple)>,
    pub evaluated: u64,
    pub skipped: u64,
}

impl RatioAccumulator {
    fn offer(&mut self, ratio: Option<f64>, triple: impl FnOnce() -> AngleTriple) {
        let Some(r) = ratio else {
            self.skipped += 1;
            return;
        };
        self.evaluated += 1;
        match self.best {
            Some((best, _)) if r <= best => {
                if r == best {
                    let t = triple();
                    if let Some((_, cur)) = &mut self.best {
                        if t.lex_cmp(cur) == Ordering::Less {
                            *cur = t;
                        }
                    }
                }
            }
            _ => self.best = Some((r, triple())),
        }
    }

    pub fn merge(mut self, other: RatioAccumulator) -> RatioAccumulator {
        self.evaluated += other.evaluated;
        self.skipped += other.skipped;
        self.best = match (self.best, other.best) {
            (None, b) | (b, None) => b,
            (Some(a), Some(b)) => match a.0.total_cmp(&b.0) {
                Ordering::Greater => Some(a),
                Ordering::Less => Some(b),
                Ordering::Equal if b.1.lex_cmp(&a.1) == Ordering::Less => Some(b),
                Ordering::Equal => Some(a),
            },
        };
        self
    }

    pub fn max(&self) -> Option<(f64, AngleTriple)> {
        self.best
    }

    pub fn finish(self, cfg: &RelaxConfig, params: SweepParams) -> RatioReport {
        RatioReport {
            k: cfg.k,
            max_ratio: self.best.map(|b| b.0),
            argmax: self.best.map(|b| b.1),
            evaluated: self.evaluated,
            skipped: self.skipped,
            params,
        }
    }
}

fn check_grid_step(step: f64) -> Result<()> {
    if step > 0.0 && step <= MAX_GRID_STEP {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "grid step",
            value: step,
        })
    }
}

pub(crate) fn grid_angles_unchecked(step: f64) -> Vec<f64> {
    let mut m = libm::floor(PI / step) as usize;
    while (m as f64) * step > PI {
        m -= 1;
    }
    while ((m + 1) as f64) * step <= PI {
        m += 1;
    }
    (0..=m).map(|i| i as f64 * step).collect()
}

/// The lattice `{ i * step : i >= 0 } ∩ [0, pi]`.
pub fn grid_angles(step: f64) -> Result<Vec<f64>> {
    check_grid_step(step)?;
    Ok(grid_angles_unchecked(step))
}

/// Sweeps the grid triples whose `alpha` index lies in `rows`.
pub fn sweep_grid_rows(
    step: f64,
    cfg: &RelaxConfig,
    rows: Range<usize>,
) -> Result<RatioAccumulator> {
    check_grid_step(step)?;
    let angles = grid_angles_unchecked(step);
    let f: Vec<f64> = angles.iter().map(|&a| f_raw(a)).collect();
    let mut acc = RatioAccumulator::default();
    for i in rows.start..rows.end.min(angles.len()) {
        let a = angles[i];
        for (j, &b) in angles.iter().enumerate() {
            for (l, &c) in angles.iter().enumerate() {
                if !feasible_angles(a, b, c) {
                    continue;
                }
                acc.offer(ratio_of(f[l], f[i], f[j], cfg.denom_epsilon), || {
                    AngleTriple {
                        alpha: a,
                        beta: b,
                        gamma: c,
                    }
                });
            }
        }
    }
    Ok(acc)
}

/// Evaluates the ratio on every feasible triple of the closed lattice grid
/// in `[0, pi]^3`. Undefined ratios (zero denominator) are counted as skipped.
pub fn sweep_grid(step: f64, cfg: &RelaxConfig) -> Result<RatioReport> {
    let acc = sweep_grid_rows(step, cfg, 0..usize::MAX)?;
    Ok(acc.finish(cfg, SweepParams::Grid { step }))
}

/// Runs the trials of block `block` (trials `block * RANDOM_BLOCK ..` up to
/// `total_trials`). Each block owns an independent stream, so blocks can run
/// in any order or in parallel.
pub fn sweep_random_block(
    n: usize,
    total_trials: u64,
    seed: u64,
    block: u64,
    cfg: &RelaxConfig,
) -> RatioAccumulator {
    let start = block * RANDOM_BLOCK;
    let count = total_trials.saturating_sub(start).min(RANDOM_BLOCK);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    let mut acc = RatioAccumulator::default();
    let mut buf = [
        alloc::vec![0.0; n],
        alloc::vec![0.0; n],
        alloc::vec![0.0; n],
    ];
    for _ in 0..count {
        let mut ok = true;
        for v in buf.iter_mut() {
            v.iter_mut().for_each(|x| *x = rng.sample(StandardNormal));
            ok &= center_unit_in_place(v);
        }
        if !ok {
            acc.skipped += 1;
            continue;
        }
        let [x, y, z] = &buf;
        let ratio = ratio_of(
            unit_distance(x, z).get(),
            unit_distance(x, y).get(),
            unit_distance(y, z).get(),
            cfg.denom_epsilon,
        );
        acc.offer(ratio, || AngleTriple {
            alpha: unit_angle(x, y),
            beta: unit_angle(y, z),
            gamma: unit_angle(x, z),
        });
    }
    acc
}

pub(crate) fn random_blocks(trials: u64) -> u64 {
    trials.div_ceil(RANDOM_BLOCK)
}

/// Draws `trials` triples of standard-normal samples in `R^n` and records
/// the largest ratio, with its realized angle triple as the argmax.
pub fn sweep_random(n: usize, trials: u64, seed: u64, cfg: &RelaxConfig) -> Result<RatioReport> {
    if n < 3 {
        return Err(Error::DimensionTooSmall {
            needed: 3,
            found: n,
        });
    }
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1"));
    }
    let acc = (0..random_blocks(trials))
        .map(|b| sweep_random_block(n, trials, seed, b, cfg))
        .fold(RatioAccumulator::default(), RatioAccumulator::merge);
    Ok(acc.finish(
        cfg,
        SweepParams::Random {
            trials,
            seed,
            dimension: n,
        },
    ))
}
