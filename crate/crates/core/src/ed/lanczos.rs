//! Thick-restart Lanczos for the lowest eigenpair of a real symmetric
//! operator.
//!
//! Every new Krylov vector is orthogonalized twice against the whole stored
//! basis, and the projected matrix is rebuilt from those Gram-Schmidt
//! coefficients. When the basis is full the lowest `keep` Ritz vectors and
//! the current residual direction seed the next cycle.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm, scale, symmetric_eigen};

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    /// Convergence threshold on `||H x - theta x||`, relative to `scale`.
    pub tol: f64,
    pub max_matvecs: usize,
    pub max_basis: usize,
    pub keep: usize,
    /// Cap on the number of stored doubles (basis vectors times dimension).
    pub memory_budget: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            tol: 1e-12,
            max_matvecs: 20_000,
            max_basis: 120,
            keep: 12,
            memory_budget: 1 << 27,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LanczosOutcome {
    pub value: f64,
    pub vector: Vec<f64>,
    /// Explicitly recomputed `||H x - theta x||`.
    pub residual: f64,
    pub matvecs: usize,
    /// Second-lowest Ritz value of the final projection, an upper bound on
    /// the first excited level reachable from the start vector.
    pub second: Option<f64>,
}

/// SplitMix64-derived amplitudes in `[-1/2, 1/2)`; a pure function of the
/// index.
pub fn seed_vector(dim: usize) -> Vec<f64> {
    (0..dim as u64)
        .map(|i| {
            let mut z = i.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

fn orthogonalize(basis: &[Vec<f64>], w: &mut [f64], coeffs: &mut [f64]) {
    coeffs.iter_mut().for_each(|c| *c = 0.0);
    for _ in 0..2 {
        for (c, v) in coeffs.iter_mut().zip(basis) {
            let h = dot(v, w);
            axpy(-h, v, w);
            *c += h;
        }
    }
}

fn combine(basis: &[Vec<f64>], weights: impl Iterator<Item = f64>, dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (v, s) in basis.iter().zip(weights) {
        axpy(s, v, &mut out);
    }
    out
}

/// Lowest eigenpair of the operator `apply` (`out = H x`) of dimension
/// `dim`. `spectral_scale` sets the unit for the residual tolerance.
pub fn lowest_eigenpair<F>(
    dim: usize,
    mut apply: F,
    start: Vec<f64>,
    spectral_scale: f64,
    opts: &LanczosOptions,
) -> Result<LanczosOutcome>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<()>,
{
    if start.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: start.len() });
    }
    if dim == 0 {
        return Err(Error::InvalidInput("empty operator".into()));
    }
    let cap = (opts.memory_budget / dim).max(8);
    let max_basis = opts.max_basis.min(cap).min(dim).max(1);
    let keep = opts.keep.min(max_basis.saturating_sub(2)).max(1);
    let threshold = opts.tol * spectral_scale;

    let mut q = start;
    let q_norm = norm(&q);
    if q_norm == 0.0 {
        return Err(Error::InvalidInput("zero start vector".into()));
    }
    scale(1.0 / q_norm, &mut q);

    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut t = DMatrix::<f64>::zeros(max_basis, max_basis);
    let mut w = vec![0.0; dim];
    let mut coeffs = vec![0.0; max_basis];
    let mut matvecs = 0;

    loop {
        let j = basis.len() - 1;
        apply(&basis[j], &mut w)?;
        matvecs += 1;
        orthogonalize(&basis, &mut w, &mut coeffs[..=j]);
        for i in 0..=j {
            t[(i, j)] = coeffs[i];
            t[(j, i)] = coeffs[i];
        }
        let beta = norm(&w);
        let m = j + 1;

        let (theta, s) = symmetric_eigen(t.view((0, 0), (m, m)).into_owned());
        let estimate = beta * s[(m - 1, 0)].abs();
        let exhausted = beta <= 1e-14 * spectral_scale.max(theta[0].abs()) || m == dim;

        if estimate <= threshold || exhausted {
            let mut x = combine(&basis, s.column(0).iter().copied(), dim);
            let nx = norm(&x);
            scale(1.0 / nx, &mut x);
            apply(&x, &mut w)?;
            matvecs += 1;
            let value = dot(&x, &w);
            axpy(-value, &x, &mut w);
            let residual = norm(&w);
            if residual <= threshold.max(estimate * 10.0) || exhausted {
                return Ok(LanczosOutcome {
                    value,
                    vector: x,
                    residual,
                    matvecs,
                    second: theta.get(1).copied(),
                });
            }
        }

        if matvecs >= opts.max_matvecs {
            return Err(Error::Convergence { iterations: matvecs, residual: estimate });
        }

        scale(1.0 / beta, &mut w);
        if m < max_basis {
            basis.push(w.clone());
            continue;
        }

        // thick restart
        let mut fresh: Vec<Vec<f64>> = (0..keep)
            .map(|c| combine(&basis, s.column(c).iter().copied(), dim))
            .collect();
        for v in fresh.iter_mut() {
            let nv = norm(v);
            scale(1.0 / nv, v);
        }
        t.fill(0.0);
        for c in 0..keep {
            t[(c, c)] = theta[c];
            t[(c, keep)] = beta * s[(m - 1, c)];
            t[(keep, c)] = beta * s[(m - 1, c)];
        }
        fresh.push(w.clone());
        basis = fresh;
    }
}
