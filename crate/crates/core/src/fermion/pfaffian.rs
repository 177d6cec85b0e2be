//! Pfaffian of a real antisymmetric matrix by skew-symmetric Gaussian
//! elimination with partial pivoting.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// `Pf(A)` for antisymmetric `A`. Each step eliminates a 2x2 block using
/// `Pf(A) = a * Pf(B + (v u^T - u v^T) / a)` after pivoting the largest
/// entry of the leading row into position `(0, 1)`.
pub fn pfaffian(a: &DMatrix<f64>) -> Result<f64> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.ncols() });
    }
    if n % 2 == 1 {
        return Err(Error::InvalidInput(format!(
            "Pfaffian needs an even dimension, got {n}"
        )));
    }
    let skew = (a + a.transpose()).amax();
    let size = a.amax().max(f64::MIN_POSITIVE);
    if skew > 1e-12 * size {
        return Err(Error::InvalidInput(format!(
            "matrix is not antisymmetric (|A + A^T| = {skew:.3e})"
        )));
    }
    let mut m = a.clone();
    let mut pf = 1.0;
    let mut k = 0;
    while k < n {
        let mut piv = k + 1;
        let mut best = m[(k, k + 1)].abs();
        for j in k + 2..n {
            if m[(k, j)].abs() > best {
                best = m[(k, j)].abs();
                piv = j;
            }
        }
        if best == 0.0 {
            return Ok(0.0);
        }
        if piv != k + 1 {
            m.swap_rows(k + 1, piv);
            m.swap_columns(k + 1, piv);
            pf = -pf;
        }
        let head = m[(k, k + 1)];
        pf *= head;
        for i in k + 2..n {
            let ui = m[(k, i)];
            let vi = m[(k + 1, i)];
            if ui == 0.0 && vi == 0.0 {
                continue;
            }
            for j in k + 2..n {
                let uj = m[(k, j)];
                let vj = m[(k + 1, j)];
                m[(i, j)] += (vi * uj - ui * vj) / head;
            }
        }
        k += 2;
    }
    Ok(pf)
}
