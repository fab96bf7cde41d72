//! Absolute correlation distance and its angle-space view.
//!
//! For centered unit representatives `u`, `v` the distance is `1 - |<u, v>|`,
//! i.e. `1 - cos(theta)` where `theta` is the folded angle in `[0, pi/2]`.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::sample::{CenteredUnit, Distance, Sample};

/// Centered norms at or below this are treated as constant input.
///
/// Absolute, not relative to the input scale.
pub const ZERO_VARIANCE_NORM: f64 = 1e-12;

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc + x * y)
}

fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Subtracts the mean, with one refinement pass for the residual mean left by
/// rounding.
fn centered(values: &[f64]) -> Vec<f64> {
    let m = mean(values);
    let mut out: Vec<f64> = values.iter().map(|v| v - m).collect();
    let residual = mean(&out);
    if residual != 0.0 {
        out.iter_mut().for_each(|v| *v -= residual);
    }
    out
}

fn check_len(expected: usize, found: usize, index: Option<usize>) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected,
            found,
            index,
        })
    }
}

/// Centers and normalizes in place. Returns `false` (leaving `v` centered
/// but unscaled) when the centered norm is at or below [`ZERO_VARIANCE_NORM`].
pub(crate) fn center_unit_in_place(v: &mut [f64]) -> bool {
    let m = mean(v);
    v.iter_mut().for_each(|x| *x -= m);
    let residual = mean(v);
    if residual != 0.0 {
        v.iter_mut().for_each(|x| *x -= residual);
    }
    let n = norm(v);
    if n <= ZERO_VARIANCE_NORM {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= n);
    true
}

/// Projects `x` onto the zero-mean hyperplane and scales it to unit norm.
pub fn center_and_normalize(x: &Sample) -> Result<CenteredUnit> {
    let mut c = x.values().to_vec();
    if !center_unit_in_place(&mut c) {
        return Err(Error::ZeroVariance { index: None });
    }
    Ok(CenteredUnit::from_values_unchecked(
        c,
        x.id().map(Into::into),
    ))
}

/// `1 - |<x - mean(x), y - mean(y)>| / (|x - mean(x)| * |y - mean(y)|)`, clamped to `[0, 1]`.
///
/// Errors name the offending argument as index 0 or 1.
pub fn abs_corr_distance(x: &Sample, y: &Sample) -> Result<Distance> {
    check_len(x.len(), y.len(), Some(1))?;
    let xc = centered(x.values());
    let yc = centered(y.values());
    if norm(&xc) <= ZERO_VARIANCE_NORM {
        return Err(Error::ZeroVariance { index: Some(0) });
    }
    if norm(&yc) <= ZERO_VARIANCE_NORM {
        return Err(Error::ZeroVariance { index: Some(1) });
    }
    Ok(distance_from_sums(
        dot(&xc, &yc),
        dot(&xc, &xc),
        dot(&yc, &yc),
    ))
}

/// `1 - |xy| / sqrt(xx * yy)`. `sqrt(fl(a * a)) == a`, so identical inputs
/// give exactly 0.
fn distance_from_sums(xy: f64, xx: f64, yy: f64) -> Distance {
    let mut scale = libm::sqrt(xx * yy);
    if !scale.is_finite() || scale == 0.0 {
        scale = libm::sqrt(xx) * libm::sqrt(yy);
    }
    let corr = (libm::fabs(xy) / scale).min(1.0);
    Distance::clamped(1.0 - corr)
}

/// Distance between centered unit vectors. The norms are recomputed rather
/// than assumed to be 1 so that a point is at distance exactly 0 from itself.
pub(crate) fn unit_distance(u: &[f64], v: &[f64]) -> Distance {
    let (mut uv, mut uu, mut vv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        uv += a * b;
        uu += a * a;
        vv += b * b;
    }
    distance_from_sums(uv, uu, vv)
}

/// `1 - |<u, v>|` for centered unit representatives, clamped to `[0, 1]`.
pub fn abs_corr_distance_unit(u: &CenteredUnit, v: &CenteredUnit) -> Result<Distance> {
    check_len(u.len(), v.len(), Some(1))?;
    Ok(unit_distance(u.values(), v.values()))
}

/// Angle in `[0, pi]` between unit vectors, via `2 atan2(|u - v|, |u + v|)`.
///
/// Stays accurate near 0 and pi where `acos` of the dot product loses half
/// the digits.
pub(crate) fn unit_angle(u: &[f64], v: &[f64]) -> f64 {
    let (mut diff, mut sum) = (0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        diff += (a - b) * (a - b);
        sum += (a + b) * (a + b);
    }
    2.0 * libm::atan2(libm::sqrt(diff), libm::sqrt(sum))
}

pub(crate) fn folded_angle(u: &[f64], v: &[f64]) -> f64 {
    let theta = if dot(u, v) >= 0.0 {
        unit_angle(u, v)
    } else {
        let (mut diff, mut sum) = (0.0, 0.0);
        for (a, b) in u.iter().zip(v) {
            diff += (a + b) * (a + b);
            sum += (a - b) * (a - b);
        }
        2.0 * libm::atan2(libm::sqrt(diff), libm::sqrt(sum))
    };
    theta.clamp(0.0, FRAC_PI_2)
}

/// Folded angle `arccos |<u, v>|` in `[0, pi/2]`; `u` and `-u` are identified.
///
/// Satisfies `abs_corr_distance_unit(u, v) = 1 - cos(projective_angle(u, v))`.
pub fn projective_angle(u: &CenteredUnit, v: &CenteredUnit) -> Result<f64> {
    check_len(u.len(), v.len(), Some(1))?;
    Ok(folded_angle(u.values(), v.values()))
}

/// Dense symmetric matrix of pairwise distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> Distance {
        Distance::clamped(self.data[i * self.n + j])
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

/// All pairwise distances. Each unordered pair is computed once, so the
/// result is symmetric bit for bit with an exact zero diagonal.
pub fn pairwise_matrix(samples: &[Sample]) -> Result<DistanceMatrix> {
    let n = samples.len();
    let mut units = Vec::with_capacity(n);
    for (i, s) in samples.iter().enumerate() {
        check_len(samples[0].len(), s.len(), Some(i))?;
        let u = center_and_normalize(s).map_err(|_| Error::ZeroVariance { index: Some(i) })?;
        units.push(u);
    }
    let mut data = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = unit_distance(units[i].values(), units[j].values()).get();
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    Ok(DistanceMatrix { n, data })
}
