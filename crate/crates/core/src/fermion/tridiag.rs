//! Implicit QL with Wilkinson shifts for real symmetric tridiagonal
//! matrices.

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

/// Eigenpairs of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off.len() == diag.len() - 1`).
///
/// Returns ascending eigenvalues and the eigenvectors as columns of a
/// column-major `n x n` array.
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    if off.len() + 1 != n {
        return Err(Error::DimensionMismatch { expected: n - 1, got: off.len() });
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::Convergence {
                    iterations: sweeps,
                    residual: e[l].abs(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let (left, right) = z.split_at_mut((i + 1) * n);
                let col_i = &mut left[i * n..];
                let col_j = &mut right[..n];
                for k in 0..n {
                    let f = col_j[k];
                    col_j[k] = s * col_i[k] + c * f;
                    col_i[k] = c * col_i[k] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&k| d[k]).collect();
    let mut vectors = vec![0.0; n * n];
    for (dst, &src) in order.iter().enumerate() {
        vectors[dst * n..(dst + 1) * n].copy_from_slice(&z[src * n..(src + 1) * n]);
    }
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::symmetric_eigen;
    use nalgebra::DMatrix;

    fn check_decomposition(diag: &[f64], off: &[f64], tol: f64) {
        let n = diag.len();
        let (vals, vecs) = tridiagonal_eigen(diag, off).unwrap();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let mut t = DMatrix::zeros(n, n);
        for i in 0..n {
            t[(i, i)] = diag[i];
            if i + 1 < n {
                t[(i, i + 1)] = off[i];
                t[(i + 1, i)] = off[i];
            }
        }
        let (dense_vals, _) = symmetric_eigen(t.clone());
        for (a, b) in vals.iter().zip(&dense_vals) {
            assert!((a - b).abs() < tol, "{a} vs {b}");
        }
        let z = DMatrix::from_column_slice(n, n, &vecs);
        let ortho = z.transpose() * &z - DMatrix::identity(n, n);
        assert!(ortho.amax() < tol);
        let recon = &z * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vals)) * z.transpose();
        assert!((recon - t).amax() < tol);
    }

    #[test]
    fn free_chain_analytic() {
        let n = 50;
        let (vals, _) = tridiagonal_eigen(&vec![0.0; n], &vec![1.0; n - 1]).unwrap();
        for (k, v) in vals.iter().enumerate() {
            let want = -2.0 * (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((v - want).abs() < 1e-13);
        }
    }

    #[test]
    fn assorted_matrices() {
        check_decomposition(&[3.0], &[], 1e-15);
        check_decomposition(&[0.0, 0.0], &[0.5], 1e-15);
        check_decomposition(&[1.0, -2.0, 0.5, 4.0, 0.0], &[0.3, 0.0, 1e-9, 2.0], 1e-12);
        let n = 120;
        let diag: Vec<f64> = (0..n).map(|i| ((i * 37) % 11) as f64 * 0.1 - 0.5).collect();
        let off: Vec<f64> = (0..n - 1).map(|i| ((i * 17) % 7) as f64 * 0.2 + 1e-6).collect();
        check_decomposition(&diag, &off, 1e-11);
        let graded: Vec<f64> = (1..n).map(|l| (std::f64::consts::PI * l as f64 / n as f64).sin().powi(4)).collect();
        check_decomposition(&vec![0.0; n], &graded, 1e-12);
    }

    #[test]
    fn length_mismatch() {
        assert!(tridiagonal_eigen(&[0.0, 0.0], &[1.0, 1.0]).is_err());
    }
}
