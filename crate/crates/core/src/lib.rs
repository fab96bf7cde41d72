//! Absolute correlation distance `d(x, y) = 1 - |corr(x, y)|` and the tools built on it.
//!
//! `d` is not a metric, but it satisfies the relaxed triangle inequality
//!
//! ```text
//! d(x, z) <= K * (d(x, y) + d(y, z))      for every K >= 2
//! ```
//!
//! and no smaller constant works. This crate provides:
//!
//! * [`distance`]: the distance itself, on raw samples and on centered unit
//!   representatives, plus the folded (projective) angle.
//! * [`verify`]: numerical certification of the inequality (grid and random
//!   sweeps, the sharpness family, counterexamples for `K < 2`, and a
//!   realizer turning angle triples into vectors).
//! * [`index`]: an exact vantage-point tree whose pruning is justified by the
//!   `K = 2` bound, with an optional folded-angle bound.
//!
//! The crate is `no_std` and only needs `alloc`.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod distance;
mod error;
pub mod index;
mod linalg;
mod sample;
pub mod verify;

pub use distance::{
    abs_corr_distance, abs_corr_distance_unit, center_and_normalize, pairwise_matrix,
    projective_angle, DistanceMatrix,
};
pub use error::{Error, Result};
pub use index::{
    brute_force_knn, lower_bound_angle, lower_bound_relaxed, IndexConfig, Neighbor, Node, QmIndex,
    QueryResult, RangeResult, Strategy,
};
pub use sample::{CenteredUnit, Distance, Sample};
pub use verify::{
    f_gamma, find_counterexample, g_alpha_beta, planar_inequality_check, ratio_angles,
    ratio_vectors, realize_angles, sharpness_ratio, sweep_grid, sweep_random, AngleTriple,
    Counterexample, PlanarCheck, RatioReport, RelaxConfig, SweepParams,
};
