//! Small dense/vector helpers shared by the solvers.
//!
//! Reductions use a fixed chunk decomposition so results do not depend on
//! the number of worker threads.

use nalgebra::DMatrix;
use rayon::prelude::*;

const CHUNK: usize = 1 << 14;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.len() <= CHUNK {
        return a.iter().zip(b).map(|(x, y)| x * y).sum();
    }
    let partial: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .collect();
    partial.iter().sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += s * x`
pub fn axpy(s: f64, x: &[f64], y: &mut [f64]) {
    if y.len() <= CHUNK {
        y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += s * xi);
    } else {
        y.par_chunks_mut(CHUNK)
            .zip(x.par_chunks(CHUNK))
            .for_each(|(yc, xc)| yc.iter_mut().zip(xc).for_each(|(yi, xi)| *yi += s * xi));
    }
}

pub fn scale(s: f64, x: &mut [f64]) {
    x.iter_mut().for_each(|v| *v *= s);
}

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending
/// with eigenvectors in the matching columns.
pub fn symmetric_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, c| eig.eigenvectors[(i, order[c])]);
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunked_dot_matches_serial() {
        let a: Vec<f64> = (0..100_000u64).map(|i| ((i * 7919) % 1013) as f64 / 1013.0 - 0.5).collect();
        let b: Vec<f64> = (0..100_000u64).map(|i| ((i * 104_729) % 997) as f64 / 997.0 - 0.5).collect();
        let serial: f64 = a.chunks(CHUNK).zip(b.chunks(CHUNK)).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>()).sum();
        assert_eq!(dot(&a, &b), serial);
    }

    #[test]
    fn sorted_eigenpairs() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0]);
        let (vals, vecs) = symmetric_eigen(m.clone());
        let r2 = 2f64.sqrt();
        for (v, w) in vals.iter().zip([2.0 - r2, 2.0, 2.0 + r2]) {
            assert!((v - w).abs() < 1e-12);
        }
        for k in 0..3 {
            let col = vecs.column(k);
            let resid = &m * col - col * vals[k];
            assert!(resid.norm() < 1e-12);
        }
    }
}
