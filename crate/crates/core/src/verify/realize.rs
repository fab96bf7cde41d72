use alloc::vec::Vec;

use super::angles::{ratio_vectors, AngleTriple, RelaxConfig};
use crate::distance::dot;
use crate::error::{Error, Result};
use crate::linalg::{helmert, symmetric_eigen3};
use crate::sample::CenteredUnit;

/// Gram eigenvalues down to `-PSD_TOLERANCE` are treated as zero.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Three zero-mean unit vectors `[X, Y, Z]` in `R^n` with `<XY = alpha`,
/// `<YZ = beta` and `<XZ = gamma`.
///
/// The Gram matrix of cosines is factored by eigendecomposition and its
/// coordinates are placed on the Helmert basis of the zero-mean hyperplane,
/// which has dimension `n - 1`. A rank-3 configuration therefore needs
/// `n >= 4`; rank-2 ones (such as `gamma = alpha + beta`) fit in `n = 3`.
pub fn realize_angles(t: &AngleTriple, n: usize) -> Result<[CenteredUnit; 3]> {
    if n < 3 {
        return Err(Error::DimensionTooSmall {
            needed: 3,
            found: n,
        });
    }
    if !t.is_feasible() {
        return Err(Error::Infeasible);
    }
    let (ca, cb, cg) = (libm::cos(t.alpha), libm::cos(t.beta), libm::cos(t.gamma));
    let gram = [[1.0, ca, cg], [ca, 1.0, cb], [cg, cb, 1.0]];
    let (values, vectors) = symmetric_eigen3(&gram);
    if values[2] < -PSD_TOLERANCE {
        return Err(Error::Infeasible);
    }
    let keep = 3.min(n - 1);
    if let Some(&dropped) = values[keep..].first() {
        if dropped > PSD_TOLERANCE {
            let rank = values.iter().filter(|&&v| v > PSD_TOLERANCE).count();
            return Err(Error::DimensionTooSmall {
                needed: rank + 1,
                found: n,
            });
        }
    }
    let basis: Vec<Vec<f64>> = (1..=keep).map(|k| helmert(k, n)).collect();

    let realize = |row: usize| {
        let mut v = alloc::vec![0.0; n];
        for (c, h) in basis.iter().enumerate() {
            let coord = vectors[row][c] * libm::sqrt(values[c].max(0.0));
            v.iter_mut().zip(h).for_each(|(x, e)| *x += coord * e);
        }
        let norm = libm::sqrt(dot(&v, &v));
        v.iter_mut().for_each(|x| *x /= norm);
        CenteredUnit::from_values(v)
    };
    Ok([realize(0)?, realize(1)?, realize(2)?])
}

/// A configuration violating the relaxed inequality for some `k < 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub k: f64,
    pub triple: AngleTriple,
    /// Realized `[X, Y, Z]` in `R^3`.
    pub vectors: [CenteredUnit; 3],
    /// `d(X, Z) / (d(X, Y) + d(Y, Z))` measured on `vectors`.
    pub ratio: f64,
}

/// Builds a witness from the family `alpha = beta`, `gamma = 2 alpha` with
/// `alpha = acos(max(k - 1, 0)) / 2`, where the ratio `1 + cos alpha` exceeds `k`.
///
/// No witness exists for `k >= 2`.
pub fn find_counterexample(k: f64) -> Result<Counterexample> {
    if !(k > 0.0 && k < 2.0) {
        return Err(Error::Domain {
            what: "k",
            value: k,
        });
    }
    let alpha = 0.5 * libm::acos((k - 1.0).max(0.0));
    let triple = AngleTriple::new(alpha, alpha, 2.0 * alpha)?;
    let vectors = realize_angles(&triple, 3)?;
    let [x, y, z] = &vectors;
    let ratio = ratio_vectors(
        &x.to_sample(),
        &y.to_sample(),
        &z.to_sample(),
        &RelaxConfig::default(),
    )?
    .filter(|&r| r > k)
    // k this close to 2 leaves nothing above rounding noise
    .ok_or(Error::Domain {
        what: "k",
        value: k,
    })?;
    Ok(Counterexample {
        k,
        triple,
        vectors,
        ratio,
    })
}
