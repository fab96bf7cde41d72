//! Numerical certification of the relaxed triangle inequality
//! `d(x, z) <= K (d(x, y) + d(y, z))` with sharp constant `K = 2`.
//!
//! Everything is phrased in angles. For centered unit vectors with pairwise
//! angles `alpha = <XY`, `beta = <YZ`, `gamma = <XZ` the inequality reads
//! `f(gamma) <= g(alpha, beta)` with `f(t) = 1 - |cos t|` and
//! `g(a, b) = K (f(a) + f(b))`.

mod angles;
mod realize;
mod sweep;

pub use angles::{
    f_gamma, g_alpha_beta, planar_inequality_check, planar_margin, ratio_angles, ratio_vectors,
    sharpness_ratio, AngleTriple, PlanarCheck, RelaxConfig, FEASIBILITY_TOLERANCE,
    PLANAR_TOLERANCE,
};
pub use realize::{find_counterexample, realize_angles, Counterexample, PSD_TOLERANCE};
pub(crate) use sweep::grid_angles_unchecked;
pub use sweep::{
    grid_angles, sweep_grid, sweep_grid_rows, sweep_random, sweep_random_block, RatioAccumulator,
    RatioReport, SweepParams, GENERATOR_NAME, RANDOM_BLOCK, REPORT_TOLERANCE,
};
