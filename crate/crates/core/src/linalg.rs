//! Small dense helpers: a 3x3 symmetric eigensolver and the Helmert basis of
//! the zero-mean hyperplane.

use alloc::vec::Vec;

pub(crate) type Mat3 = [[f64; 3]; 3];

/// Cyclic Jacobi eigendecomposition of a symmetric 3x3 matrix.
///
/// Returns eigenvalues sorted descending and the matching eigenvectors as
/// columns of the second matrix.
pub(crate) fn symmetric_eigen3(m: &Mat3) -> ([f64; 3], Mat3) {
    let mut a = *m;
    let mut v: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

    for _ in 0..64 {
        let off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        if off < 1e-34 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q] == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t =
                libm::copysign(1.0, theta) / (libm::fabs(theta) + libm::sqrt(theta * theta + 1.0));
            let c = 1.0 / libm::sqrt(t * t + 1.0);
            let s = t * c;
            for row in a.iter_mut() {
                let (akp, akq) = (row[p], row[q]);
                row[p] = c * akp - s * akq;
                row[q] = s * akp + c * akq;
            }
            let (row_p, row_q) = (a[p], a[q]);
            for (k, (&apk, &aqk)) in row_p.iter().zip(&row_q).enumerate() {
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for row in v.iter_mut() {
                let vp = row[p];
                let vq = row[q];
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
    }

    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = [
        a[order[0]][order[0]],
        a[order[1]][order[1]],
        a[order[2]][order[2]],
    ];
    let mut vectors = [[0.0; 3]; 3];
    for (col, &src) in order.iter().enumerate() {
        for row in 0..3 {
            vectors[row][col] = v[row][src];
        }
    }
    (values, vectors)
}

/// The `k`-th (1-based) Helmert vector in `R^n`:
/// `(1, ..., 1, -k, 0, ..., 0) / sqrt(k (k + 1))` with `k` leading ones.
///
/// Vectors `1..n` form an orthonormal basis of the zero-mean hyperplane.
pub(crate) fn helmert(k: usize, n: usize) -> Vec<f64> {
    debug_assert!(k >= 1 && k < n);
    let scale = 1.0 / libm::sqrt((k * (k + 1)) as f64);
    let mut out = alloc::vec![0.0; n];
    out[..k].iter_mut().for_each(|v| *v = scale);
    out[k] = -(k as f64) * scale;
    out
}
