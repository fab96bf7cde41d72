use core::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::sample::Distance;

/// `max(d_qp / k - d_px, d_px / k - d_qp, 0)`.
///
/// From `d(q, p) <= k (d(q, x) + d(x, p))` and its mirror image. Sound (never
/// above the true `d(q, x)`) for every `k >= 2`.
pub fn lower_bound_relaxed(d_qp: f64, d_px: f64, k: f64) -> Result<Distance> {
    for (what, value) in [("d_qp", d_qp), ("d_px", d_px)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Domain { what, value });
        }
    }
    if !(k >= 2.0 && k.is_finite()) {
        return Err(Error::Domain {
            what: "k",
            value: k,
        });
    }
    Ok(Distance::clamped(relaxed(d_qp, d_px, k)))
}

/// `1 - cos |theta_qp - theta_px|`.
///
/// Folded angles are a metric on the projective sphere, and `1 - cos` is
/// increasing on `[0, pi/2]`, so this is a lower bound for `d(q, x)`.
pub fn lower_bound_angle(theta_qp: f64, theta_px: f64) -> Result<Distance> {
    for (what, value) in [("theta_qp", theta_qp), ("theta_px", theta_px)] {
        if !(0.0..=FRAC_PI_2).contains(&value) {
            return Err(Error::Domain { what, value });
        }
    }
    Ok(Distance::clamped(angle(theta_qp, theta_px)))
}

#[inline]
pub(crate) fn relaxed(d_qp: f64, d_px: f64, k: f64) -> f64 {
    (d_qp / k - d_px).max(d_px / k - d_qp).max(0.0)
}

#[inline]
pub(crate) fn angle(theta_qp: f64, theta_px: f64) -> f64 {
    let s = libm::sin(libm::fabs(theta_qp - theta_px) / 2.0);
    2.0 * s * s
}

// The pointwise bounds are convex in the second argument and vanish at
// `t = d_qp` (resp. `theta_qp`), so their minimum over an interval sits at
// the clamp of that point.

#[inline]
pub(crate) fn relaxed_over(d_qv: f64, lo: f64, hi: f64, k: f64) -> f64 {
    relaxed(d_qv, d_qv.clamp(lo, hi), k)
}

#[inline]
pub(crate) fn angle_over(theta_qv: f64, lo: f64, hi: f64) -> f64 {
    angle(theta_qv, theta_qv.clamp(lo, hi))
}
