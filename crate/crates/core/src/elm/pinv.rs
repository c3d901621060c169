use nalgebra::{DMatrix, DVector};

/// Relative cutoff factor: singular values at or below
/// `1e-12 · max(rows, cols) · σ_max` are treated as zero.
pub const PINV_RCOND: f64 = 1e-12;

/// Smallest |r_kk| / max |r_kk| for which the triangular QR solve is used
/// instead of the singular value decomposition.
const QR_DIAGONAL_RATIO: f64 = 1e-6;

struct ThinSvd {
    u: DMatrix<f64>,
    s_inv: DVector<f64>,
    v: DMatrix<f64>,
}

/// Thin SVD with reciprocal singular values, thresholded with the cutoff
/// for a matrix of `scale_dim` rows or columns.
fn thin_svd(h: &DMatrix<f64>, scale_dim: usize) -> Option<ThinSvd> {
    let (m, n) = h.shape();
    if m == 0 || n == 0 {
        return None;
    }
    let svd = faer::Mat::from_fn(m, n, |i, j| h[(i, j)]).thin_svd().ok()?;
    let k = m.min(n);
    let s = svd.S().column_vector();
    let s = DVector::from_fn(k, |i, _| s[i]);
    let cutoff = PINV_RCOND * scale_dim as f64 * s.max();
    let s_inv = s.map(|s| if s > cutoff { 1.0 / s } else { 0.0 });
    let (fu, fv) = (svd.U(), svd.V());
    let u = DMatrix::from_fn(m, k, |i, j| fu[(i, j)]);
    let v = DMatrix::from_fn(n, k, |i, j| fv[(i, j)]);
    Some(ThinSvd { u, s_inv, v })
}

/// Moore–Penrose generalized inverse via the singular value decomposition.
pub fn pseudoinverse(h: &DMatrix<f64>) -> DMatrix<f64> {
    match thin_svd(h, h.nrows().max(h.ncols())) {
        Some(ThinSvd { u, s_inv, mut v }) => {
            for (j, mut col) in v.column_iter_mut().enumerate() {
                col *= s_inv[j];
            }
            v * u.transpose()
        }
        None => DMatrix::zeros(h.ncols(), h.nrows()),
    }
}

/// Minimal-norm least-squares solution `H† y`, without forming `H†`.
///
/// A matrix with at least as many rows as columns is first reduced by a
/// Householder QR, `H = QR`. When R is comfortably nonsingular the
/// least-squares solution is unique and comes from back substitution;
/// otherwise R (which has the singular values of H) goes through the SVD.
pub fn min_norm_solve(h: &DMatrix<f64>, y: &DVector<f64>) -> DVector<f64> {
    let (m, n) = h.shape();
    if m == 0 || n == 0 {
        return DVector::zeros(n);
    }
    if m >= n {
        let qr = h.clone().qr();
        let mut qty = y.clone();
        qr.q_tr_mul(&mut qty);
        let rhs = qty.rows(0, n).into_owned();
        let r = qr.r();
        let diag = r.diagonal().map(f64::abs);
        if diag.min() > QR_DIAGONAL_RATIO * diag.max() {
            if let Some(beta) = r.solve_upper_triangular(&rhs) {
                return beta;
            }
        }
        return match thin_svd(&r, m) {
            Some(ThinSvd { u, s_inv, v }) => v * u.tr_mul(&rhs).component_mul(&s_inv),
            None => DVector::zeros(n),
        };
    }
    match thin_svd(h, n) {
        Some(ThinSvd { u, s_inv, v }) => v * u.tr_mul(y).component_mul(&s_inv),
        None => DVector::zeros(n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Largest relative violation among the four Moore–Penrose conditions.
    fn penrose_error(a: &DMatrix<f64>, p: &DMatrix<f64>) -> f64 {
        let rel = |x: DMatrix<f64>, y: &DMatrix<f64>| (x - y).norm() / y.norm().max(1.0);
        let ap = a * p;
        let pa = p * a;
        [
            rel(&ap * a, a),
            rel(&pa * p, p),
            rel(ap.transpose(), &ap),
            rel(pa.transpose(), &pa),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    #[test]
    fn diagonal() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 4.0]);
        let p = pseudoinverse(&a);
        assert!((p - DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.25])).amax() < 1e-15);
    }

    #[test]
    fn column_of_ones() {
        let a = DMatrix::from_row_slice(2, 1, &[1.0, 1.0]);
        let p = pseudoinverse(&a);
        assert_eq!(p.shape(), (1, 2));
        assert!((p[(0, 0)] - 0.5).abs() < 1e-15 && (p[(0, 1)] - 0.5).abs() < 1e-15);
        assert!(penrose_error(&a, &p) < 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let a = DMatrix::<f64>::zeros(3, 2);
        assert_eq!(pseudoinverse(&a), DMatrix::zeros(2, 3));
        assert_eq!(min_norm_solve(&a, &DVector::from_element(3, 1.0)), DVector::zeros(2));
    }

    #[test]
    fn rank_deficient_wide_and_tall() {
        // rank 1, 3x4
        let u = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let v = DVector::from_vec(vec![3.0, 0.0, 1.0, -1.0]);
        let a = &u * v.transpose();
        for m in [a.clone(), a.transpose()] {
            let p = pseudoinverse(&m);
            assert!(penrose_error(&m, &p) < 1e-12);
            let y = DVector::from_fn(m.nrows(), |i, _| i as f64 - 1.0);
            assert!((min_norm_solve(&m, &y) - &p * &y).amax() < 1e-12);
        }
    }

    #[test]
    fn tall_paths_match_pseudoinverse() {
        // 9x3 with a repeated column (rank 2): SVD of R
        let a = DMatrix::from_fn(9, 3, |i, j| {
            let c = if j == 2 { 0 } else { j };
            ((i * 7 + c * 3) % 5) as f64 - 2.0 + 0.1 * (i * c) as f64
        });
        let y = DVector::from_fn(9, |i, _| (i as f64).sin());
        let b = min_norm_solve(&a, &y);
        assert!((&b - pseudoinverse(&a) * &y).amax() < 1e-10);
        assert!((b[0] - b[2]).abs() < 1e-10);
        // full column rank: back substitution
        let a = DMatrix::from_fn(9, 3, |i, j| ((i + 1) as f64).powi(j as i32));
        assert!((min_norm_solve(&a, &y) - pseudoinverse(&a) * &y).amax() < 1e-10);
    }
}
