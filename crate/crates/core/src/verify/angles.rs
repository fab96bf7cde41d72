use core::cmp::Ordering;
use core::f64::consts::{FRAC_PI_4, PI, TAU};

use crate::distance::abs_corr_distance;
use crate::error::{Error, Result};
use crate::sample::Sample;

/// Slack on the feasibility inequalities, absorbing rounding in angles that
/// were computed from vectors or as multiples of a grid step.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-12;

/// `planar_inequality_check` passes when every margin is at least `-PLANAR_TOLERANCE`.
pub const PLANAR_TOLERANCE: f64 = 1e-12;

fn check_angle(what: &'static str, value: f64) -> Result<f64> {
    if (0.0..=PI).contains(&value) {
        Ok(value)
    } else {
        Err(Error::Domain { what, value })
    }
}

/// Pairwise angles of three unit vectors X, Y, Z:
/// `alpha = <XY`, `beta = <YZ`, `gamma = <XZ`, each in `[0, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleTriple {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl AngleTriple {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        Ok(AngleTriple {
            alpha: check_angle("alpha", alpha)?,
            beta: check_angle("beta", beta)?,
            gamma: check_angle("gamma", gamma)?,
        })
    }

    /// Realizable as pairwise angles of three unit vectors: the spherical
    /// triangle inequality plus the perimeter cap `alpha + beta + gamma <= 2 pi`.
    pub fn is_feasible(&self) -> bool {
        feasible_angles(self.alpha, self.beta, self.gamma)
    }

    /// Lexicographic order on `(alpha, beta, gamma)`.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        self.alpha
            .total_cmp(&other.alpha)
            .then(self.beta.total_cmp(&other.beta))
            .then(self.gamma.total_cmp(&other.gamma))
    }
}

pub(crate) fn feasible_angles(alpha: f64, beta: f64, gamma: f64) -> bool {
    let tol = FEASIBILITY_TOLERANCE;
    libm::fabs(alpha - beta) <= gamma + tol
        && gamma <= alpha + beta + tol
        && alpha + beta + gamma <= TAU + tol
}

/// `K` of the relaxed inequality and the smallest denominator for which a
/// ratio is reported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxConfig {
    pub k: f64,
    pub denom_epsilon: f64,
}

impl Default for RelaxConfig {
    fn default() -> Self {
        RelaxConfig {
            k: 2.0,
            denom_epsilon: 1e-12,
        }
    }
}

impl RelaxConfig {
    pub fn with_k(k: f64) -> Result<Self> {
        RelaxConfig {
            k,
            ..Default::default()
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::InvalidConfig("k must be positive and finite"));
        }
        if self.denom_epsilon.is_nan() || self.denom_epsilon <= 0.0 {
            return Err(Error::InvalidConfig("denom_epsilon must be positive"));
        }
        Ok(self)
    }
}

#[inline]
pub(crate) fn f_raw(t: f64) -> f64 {
    1.0 - libm::fabs(libm::cos(t))
}

#[inline]
pub(crate) fn ratio_of(num: f64, a: f64, b: f64, eps: f64) -> Option<f64> {
    let den = a + b;
    if den < eps {
        None
    } else {
        Some(num / den)
    }
}

/// `f(gamma) = 1 - |cos gamma|`.
pub fn f_gamma(gamma: f64) -> Result<f64> {
    Ok(f_raw(check_angle("gamma", gamma)?))
}

/// `g(alpha, beta) = K (1 - |cos alpha| + 1 - |cos beta|)`.
pub fn g_alpha_beta(alpha: f64, beta: f64, cfg: &RelaxConfig) -> Result<f64> {
    let a = check_angle("alpha", alpha)?;
    let b = check_angle("beta", beta)?;
    Ok(cfg.k * (f_raw(a) + f_raw(b)))
}

/// `f(gamma) / (f(alpha) + f(beta))`, the smallest `K` that works for this
/// triple. `None` when the denominator is below `cfg.denom_epsilon`.
pub fn ratio_angles(t: &AngleTriple, cfg: &RelaxConfig) -> Result<Option<f64>> {
    if !t.is_feasible() {
        return Err(Error::Infeasible);
    }
    Ok(ratio_of(
        f_raw(t.gamma),
        f_raw(t.alpha),
        f_raw(t.beta),
        cfg.denom_epsilon,
    ))
}

/// `d(x, z) / (d(x, y) + d(y, z))` on raw samples, with the same `None` rule.
///
/// `ZeroVariance` and `DimensionMismatch` errors carry the argument position 0..=2.
pub fn ratio_vectors(x: &Sample, y: &Sample, z: &Sample, cfg: &RelaxConfig) -> Result<Option<f64>> {
    let at = |i: usize, e: Error| match e {
        Error::ZeroVariance { .. } => Error::ZeroVariance { index: Some(i) },
        Error::DimensionMismatch {
            expected, found, ..
        } => Error::DimensionMismatch {
            expected,
            found,
            index: Some(i),
        },
        e => e,
    };
    let xy = abs_corr_distance(x, y).map_err(|e| match e {
        Error::ZeroVariance { index } => at(index.unwrap_or(0), e),
        e => at(1, e),
    })?;
    let yz = abs_corr_distance(y, z).map_err(|e| match e {
        Error::ZeroVariance { index } => at(index.unwrap_or(0) + 1, e),
        e => at(2, e),
    })?;
    let xz = abs_corr_distance(x, z).map_err(|e| at(2, e))?;
    Ok(ratio_of(xz.get(), xy.get(), yz.get(), cfg.denom_epsilon))
}

/// Ratio along the family `alpha = beta`, `gamma = 2 alpha`:
/// `(1 - cos 2a) / (2 - 2 cos a)`, which equals `1 + cos a`.
///
/// Tends to 2 as `a -> 0` without reaching it. Evaluated through
/// `1 - cos t = 2 sin^2(t / 2)` to avoid cancellation for small `a`.
pub fn sharpness_ratio(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= FRAC_PI_4) {
        return Err(Error::Domain {
            what: "alpha",
            value: alpha,
        });
    }
    let s1 = libm::sin(alpha);
    let s2 = libm::sin(alpha / 2.0);
    Ok((s1 * s1) / (2.0 * s2 * s2))
}

/// Margin `g(alpha, beta) - f(gamma)` at `gamma = alpha + beta`, folded into
/// `[0, pi]` as `2 pi - (alpha + beta)` when the sum exceeds `pi`.
pub fn planar_margin(alpha: f64, beta: f64, cfg: &RelaxConfig) -> Result<f64> {
    let g = g_alpha_beta(alpha, beta, cfg)?;
    Ok(g - f_raw(fold_sum(alpha, beta)))
}

fn fold_sum(alpha: f64, beta: f64) -> f64 {
    let s = alpha + beta;
    if s > PI {
        TAU - s
    } else {
        s
    }
}

/// Outcome of [`planar_inequality_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarCheck {
    pub passed: bool,
    /// Smallest `g - f` over the grid.
    pub min_margin: f64,
    /// First grid point `(alpha, beta)`, in lexicographic order, whose margin
    /// is within `PLANAR_TOLERANCE` of `min_margin`.
    pub witness: (f64, f64),
    pub points: u64,
}

/// Checks `f(alpha + beta) <= g(alpha, beta)` on every point of the lattice
/// `(step Z)^2` inside `[0, pi]^2`.
///
/// Passes when the smallest margin is at least `-PLANAR_TOLERANCE`.
pub fn planar_inequality_check(step: f64, cfg: &RelaxConfig) -> Result<PlanarCheck> {
    if !(step > 0.0 && step <= 0.05) {
        return Err(Error::Domain {
            what: "planar step",
            value: step,
        });
    }
    let angles = super::grid_angles_unchecked(step);
    let f: alloc::vec::Vec<f64> = angles.iter().map(|&a| f_raw(a)).collect();
    let margin = |i: usize, j: usize| cfg.k * (f[i] + f[j]) - f_raw(fold_sum(angles[i], angles[j]));
    let m = angles.len();
    let mut min_margin = f64::INFINITY;
    for i in 0..m {
        for j in 0..m {
            min_margin = min_margin.min(margin(i, j));
        }
    }
    // mirror-image minima differ only by rounding; report the first one
    let (wi, wj) = (0..m)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .find(|&(i, j)| margin(i, j) <= min_margin + PLANAR_TOLERANCE)
        .unwrap_or((0, 0));
    let witness = (angles[wi], angles[wj]);
    let points = (m * m) as u64;
    Ok(PlanarCheck {
        passed: min_margin >= -PLANAR_TOLERANCE,
        min_margin,
        witness,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, SQRT_2};

    fn t(a: f64, b: f64, g: f64) -> AngleTriple {
        AngleTriple::new(a, b, g).unwrap()
    }

    #[test]
    fn f_examples() {
        assert!((f_gamma(FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(f_gamma(0.0).unwrap(), 0.0);
        assert!((f_gamma(FRAC_PI_4).unwrap() - (1.0 - FRAC_1_SQRT_2)).abs() < 1e-15);
        assert!(f_gamma(-0.1).is_err());
        assert!(f_gamma(PI + 1e-9).is_err());
        assert!(f_gamma(f64::NAN).is_err());
    }

    #[test]
    fn g_examples() {
        let cfg = RelaxConfig::default();
        let g = g_alpha_beta(FRAC_PI_4, FRAC_PI_4, &cfg).unwrap();
        assert!((g - 2.0 * (2.0 - SQRT_2)).abs() < 1e-12);
        assert!((g - 1.1715729).abs() < 1e-7);
        assert_eq!(
            g_alpha_beta(0.0, 0.0, &RelaxConfig::with_k(7.0).unwrap()).unwrap(),
            0.0
        );
        assert!((g_alpha_beta(FRAC_PI_2, FRAC_PI_2, &cfg).unwrap() - 4.0).abs() < 1e-15);
        assert!(g_alpha_beta(4.0, 0.0, &cfg).is_err());
    }

    #[test]
    fn feasibility_examples() {
        assert!(t(FRAC_PI_4, FRAC_PI_4, FRAC_PI_2).is_feasible());
        assert!(!t(0.1, 0.1, 1.0).is_feasible());
        assert!(!t(PI, PI, PI).is_feasible());
        assert!(t(2.0, 2.0, 2.0).is_feasible());
        assert!(AngleTriple::new(0.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn ratio_angle_examples() {
        let cfg = RelaxConfig::default();
        let r = ratio_angles(&t(FRAC_PI_4, FRAC_PI_4, FRAC_PI_2), &cfg)
            .unwrap()
            .unwrap();
        assert!((r - 1.0 / (2.0 - SQRT_2)).abs() < 1e-12);
        let r = ratio_angles(&t(0.1, 0.1, 0.2), &cfg).unwrap().unwrap();
        assert!((r - (1.0 + libm::cos(0.1))).abs() < 1e-12);
        assert!((r - 1.995_004_165_278_025_7).abs() < 1e-12);
        assert_eq!(ratio_angles(&t(0.0, 0.0, 0.0), &cfg).unwrap(), None);
        assert_eq!(
            ratio_angles(&t(0.1, 0.1, 1.0), &cfg),
            Err(Error::Infeasible)
        );
    }

    #[test]
    fn ratio_vector_examples() {
        let cfg = RelaxConfig::default();
        let x = Sample::new(vec![1.0, 0.0, -1.0]).unwrap();
        let y = Sample::new(vec![0.0, 1.0, -1.0]).unwrap();
        let r = ratio_vectors(&x, &y, &x, &cfg).unwrap().unwrap();
        assert_eq!(r, 0.0);
        assert_eq!(ratio_vectors(&x, &x, &x, &cfg).unwrap(), None);
        let c = Sample::new(vec![2.0, 2.0, 2.0]).unwrap();
        assert_eq!(
            ratio_vectors(&x, &y, &c, &cfg),
            Err(Error::ZeroVariance { index: Some(2) })
        );
    }

    #[test]
    fn sharpness_examples() {
        let r = sharpness_ratio(FRAC_PI_4).unwrap();
        assert!((r - (1.0 + FRAC_1_SQRT_2)).abs() < 1e-12);
        let r = sharpness_ratio(1e-3).unwrap();
        assert!((r - 1.999_999_500_000_041_7).abs() < 1e-12);
        assert!(r < 2.0);
        // agrees with the unsimplified quotient where that one is well conditioned
        for a in [0.05, 0.3, 0.7] {
            let direct = (1.0 - libm::cos(2.0 * a)) / (2.0 - 2.0 * libm::cos(a));
            assert!((sharpness_ratio(a).unwrap() - direct).abs() < 1e-12);
        }
        assert!(sharpness_ratio(0.0).is_err());
        assert!(sharpness_ratio(FRAC_PI_4 + 1e-9).is_err());
    }

    #[test]
    fn planar_checkpoint_at_quarter_pi() {
        let m = planar_margin(FRAC_PI_4, FRAC_PI_4, &RelaxConfig::default()).unwrap();
        assert!((m - (2.0 * (2.0 - SQRT_2) - 1.0)).abs() < 1e-12);
        assert!((m - 0.1715729).abs() < 1e-7);
    }

    #[test]
    fn planar_check_small_grid() {
        let ok = planar_inequality_check(0.05, &RelaxConfig::default()).unwrap();
        assert!(ok.passed);
        assert!(ok.min_margin >= -PLANAR_TOLERANCE);
        let bad = planar_inequality_check(0.05, &RelaxConfig::with_k(1.5).unwrap()).unwrap();
        assert!(!bad.passed);
        let (a, b) = bad.witness;
        assert_eq!(a, b);
        let k15 = RelaxConfig::with_k(1.5).unwrap();
        assert!(planar_margin(a, b, &k15).unwrap() < 0.0);
        assert_eq!(planar_margin(a, b, &k15).unwrap(), bad.min_margin);
        assert!(planar_inequality_check(0.06, &RelaxConfig::default()).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(RelaxConfig::with_k(0.0).is_err());
        assert!(RelaxConfig::with_k(f64::NAN).is_err());
        assert!(RelaxConfig {
            k: 2.0,
            denom_epsilon: 0.0
        }
        .validated()
        .is_err());
    }
}
