//! Wootters concurrence of the two edge spins.
//!
//! Two routes are provided: the eigenvalue definition on a full 4x4 reduced
//! density matrix, and the closed form in terms of `M`, `C^x` and `C^z` that
//! holds for U(1)-symmetric states with `<S^z_1> = <S^z_N>`.

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::EdgeObservables;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-12;
/// Eigenvalues of `rho rho~` below this are treated as corrupt input.
const NONPHYSICAL_TOL: f64 = 1e-8;

/// Reduced density matrix of spins `(1, N)` in the basis
/// `{up-up, up-down, down-up, down-down}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSpinDM {
    rho: Matrix4<Complex64>,
}

impl TwoSpinDM {
    pub fn new(rho: Matrix4<Complex64>) -> Result<Self> {
        let herm = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidInput(format!("density matrix not Hermitian ({herm:.2e})")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidInput(format!("density matrix trace {tr}")));
        }
        let herm_part = (rho + rho.adjoint()).map(|z| z * 0.5);
        let min_eig = SymmetricEigen::new(herm_part)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidInput(format!(
                "density matrix has negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(TwoSpinDM { rho: herm_part })
    }

    pub fn from_real(entries: [[f64; 4]; 4]) -> Result<Self> {
        Self::new(Matrix4::from_fn(|i, j| Complex64::new(entries[i][j], 0.0)))
    }

    /// Pure state `|psi><psi|` from (unnormalized) amplitudes.
    pub fn pure(psi: [Complex64; 4]) -> Result<Self> {
        let n2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if n2 == 0.0 {
            return Err(Error::InvalidInput("zero state vector".into()));
        }
        Self::new(Matrix4::from_fn(|i, j| psi[i] * psi[j].conj() / n2))
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.rho
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.rho[(i, j)]
    }

    /// `M`, `C^x`, `C^z` read off the matrix elements.
    pub fn observables(&self, temperature: f64) -> EdgeObservables {
        let r = |i, j| self.rho[(i, j)].re;
        EdgeObservables {
            magnetization_m: 0.5 * (r(0, 0) + r(1, 1) - r(2, 2) - r(3, 3)),
            cx: 0.25 * (r(1, 2) + r(2, 1) + r(0, 3) + r(3, 0)),
            cz: 0.25 * (r(0, 0) - r(1, 1) - r(2, 2) + r(3, 3)),
            temperature,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConcurrenceMethod {
    EigenvalueDef,
    CorrelatorFormula,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceResult {
    pub value: f64,
    /// Square roots of the eigenvalues of `rho rho~`, descending.
    pub lambdas: [f64; 4],
    pub method: ConcurrenceMethod,
}

fn flip_matrix() -> Matrix4<Complex64> {
    // sigma^y (x) sigma^y
    let mut f = Matrix4::zeros();
    f[(0, 3)] = Complex64::new(-1.0, 0.0);
    f[(1, 2)] = Complex64::new(1.0, 0.0);
    f[(2, 1)] = Complex64::new(1.0, 0.0);
    f[(3, 0)] = Complex64::new(-1.0, 0.0);
    f
}

/// `(sigma^y (x) sigma^y) rho* (sigma^y (x) sigma^y)`.
pub fn spin_flipped_state(rho: &TwoSpinDM) -> Matrix4<Complex64> {
    let f = flip_matrix();
    f * rho.rho.conjugate() * f
}

fn sorted_desc(mut l: [f64; 4]) -> [f64; 4] {
    l.sort_by(|a, b| b.total_cmp(a));
    l
}

fn wootters_value(l: &[f64; 4]) -> f64 {
    (l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0)
}

/// Concurrence from the eigenvalues of `rho rho~`, computed through the
/// Hermitian matrix `sqrt(rho) rho~ sqrt(rho)` which has the same spectrum.
pub fn concurrence_from_dm(rho: &TwoSpinDM) -> Result<ConcurrenceResult> {
    let eig = SymmetricEigen::new(rho.rho);
    let mut sqrt_rho = Matrix4::<Complex64>::zeros();
    for k in 0..4 {
        let p = eig.eigenvalues[k].max(0.0).sqrt();
        let v = eig.eigenvectors.column(k);
        sqrt_rho += v * v.adjoint() * Complex64::new(p, 0.0);
    }
    let flipped = spin_flipped_state(rho);
    let r = sqrt_rho * flipped * sqrt_rho;
    let r = (r + r.adjoint()).map(|z| z * 0.5);
    let mu = SymmetricEigen::new(r).eigenvalues;
    let mut lambdas = [0.0; 4];
    for (l, &m) in lambdas.iter_mut().zip(mu.iter()) {
        if m < -NONPHYSICAL_TOL {
            return Err(Error::InvalidInput(format!(
                "rho rho~ has eigenvalue {m:.3e}; state is not physical"
            )));
        }
        *l = m.max(0.0).sqrt();
    }
    let lambdas = sorted_desc(lambdas);
    Ok(ConcurrenceResult {
        value: wootters_value(&lambdas),
        lambdas,
        method: ConcurrenceMethod::EigenvalueDef,
    })
}

/// `2|C^x| - sqrt((1/4 + C^z)^2 - M^2)`; the concurrence is twice its
/// positive part.
pub fn concurrence_argument(obs: &EdgeObservables) -> Result<f64> {
    let a = 0.25 + obs.cz;
    let disc = a * a - obs.magnetization_m * obs.magnetization_m;
    if disc < 0.0 {
        return Err(Error::Domain(format!(
            "(1/4 + C^z)^2 < M^2 (C^z = {}, M = {})",
            obs.cz, obs.magnetization_m
        )));
    }
    Ok(2.0 * obs.cx.abs() - disc.sqrt())
}

/// Closed-form concurrence for U(1)-symmetric edge states.
///
/// The reported `lambdas` are those of the X-shaped density matrix the
/// correlators define: `1/4 - C^z +- 2|C^x|` and `sqrt((1/4 + C^z)^2 - M^2)`
/// twice.
pub fn concurrence_from_correlators(obs: &EdgeObservables) -> Result<ConcurrenceResult> {
    let g = concurrence_argument(obs)?;
    let diag = 0.25 - obs.cz;
    let off = 2.0 * obs.cx.abs();
    let root = off - g;
    let lambdas = sorted_desc([diag + off, (diag - off).abs(), root, root]);
    Ok(ConcurrenceResult {
        value: (2.0 * g).clamp(0.0, 1.0),
        lambdas,
        method: ConcurrenceMethod::CorrelatorFormula,
    })
}
