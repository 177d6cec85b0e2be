//! Free-fermion solver for the XY point (`Delta = 0`).
//!
//! The Jordan-Wigner map `S^+_l = c_l^dag prod_{m<l}(1 - 2 n_m)` turns
//! `sum_l b_l (S^x S^x + S^y S^y)` into `sum_l (b_l / 2)(c_l^dag c_{l+1} + h.c.)`
//! on an open chain. The single-particle matrix therefore has off-diagonal
//! entries `+b_l / 2`, with this sign (no gauge transformation), so that
//! correlators come out with the sign of the spin model: the
//! antiferromagnetic two-site ground state has `C^x = -1/4`.
//!
//! Edge correlators follow from Wick's theorem applied to
//! `4 S^x_1 S^x_N = B_1 A_2 B_2 ... A_{N-1} B_{N-1} A_N`, with
//! `A_m = c_m^dag + c_m` and `B_m = c_m^dag - c_m`.

pub mod pfaffian;
pub mod tridiag;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{bond_profile, ChainSpec};
use crate::observables::EdgeObservables;

pub use pfaffian::pfaffian;
pub use tridiag::tridiagonal_eigen;

/// Modes with `|eps| <= ZERO_MODE_TOL` count as zero modes (half filled at
/// `T = 0`).
pub const ZERO_MODE_TOL: f64 = 1e-12;

/// Nearest-neighbour hopping of an open chain; the diagonal is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct HoppingMatrix {
    pub hoppings: Vec<f64>,
}

impl HoppingMatrix {
    pub fn size(&self) -> usize {
        self.hoppings.len() + 1
    }
}

pub fn hopping_matrix(spec: &ChainSpec) -> Result<HoppingMatrix> {
    spec.validate()?;
    if spec.delta != 0.0 {
        return Err(Error::EngineMismatch {
            engine: "free-fermion".into(),
            reason: format!("needs delta = 0, got {}", spec.delta),
        });
    }
    if spec.boundary.is_periodic() {
        return Err(Error::EngineMismatch {
            engine: "free-fermion".into(),
            reason: "periodic spin chains are not free fermions; use ring_modes with an explicit sector"
                .into(),
        });
    }
    Ok(HoppingMatrix {
        hoppings: bond_profile(spec).bonds.iter().map(|b| 0.5 * b).collect(),
    })
}

/// Single-particle eigenmodes, energies ascending.
#[derive(Debug, Clone)]
pub struct ModeSet {
    pub energies: Vec<f64>,
    /// Column-major `n x n`; column `k` is mode `k`.
    vectors: Vec<f64>,
}

impl ModeSet {
    pub fn from_hopping(h: &HoppingMatrix) -> Result<Self> {
        let n = h.size();
        let (energies, vectors) = tridiagonal_eigen(&vec![0.0; n], &h.hoppings)?;
        Ok(ModeSet { energies, vectors })
    }

    pub fn for_chain(spec: &ChainSpec) -> Result<Self> {
        Self::from_hopping(&hopping_matrix(spec)?)
    }

    pub fn size(&self) -> usize {
        self.energies.len()
    }

    /// Amplitude of mode `k` on site `i` (0-based).
    pub fn amplitude(&self, i: usize, k: usize) -> f64 {
        self.vectors[k * self.size() + i]
    }

    pub fn mode(&self, k: usize) -> &[f64] {
        let n = self.size();
        &self.vectors[k * n..(k + 1) * n]
    }
}

/// Fermion boundary condition of a closed ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RingSector {
    Periodic,
    Antiperiodic,
}

impl RingSector {
    pub fn as_str(self) -> &'static str {
        match self {
            RingSector::Periodic => "periodic",
            RingSector::Antiperiodic => "antiperiodic",
        }
    }
}

/// Modes of a uniform ring of `n` sites with hopping `t`, closing bond
/// `+t` (periodic) or `-t` (antiperiodic).
pub fn ring_modes(n: usize, t: f64, sector: RingSector) -> Result<ModeSet> {
    if n < 2 {
        return Err(Error::Domain(format!("ring needs at least 2 sites, got {n}")));
    }
    let mut h = DMatrix::<f64>::zeros(n, n);
    for l in 0..n - 1 {
        h[(l, l + 1)] += t;
        h[(l + 1, l)] += t;
    }
    let closing = match sector {
        RingSector::Periodic => t,
        RingSector::Antiperiodic => -t,
    };
    h[(n - 1, 0)] += closing;
    h[(0, n - 1)] += closing;
    let (energies, vecs) = crate::linalg::symmetric_eigen(h);
    Ok(ModeSet {
        energies,
        vectors: vecs.as_slice().to_vec(),
    })
}

/// Fermi occupation at `k_B T = temperature` (chemical potential zero).
pub fn occupation(energy: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        if energy.abs() <= ZERO_MODE_TOL {
            0.5
        } else if energy < 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 / (1.0 + (energy / temperature).exp())
    }
}

/// `G_ij = <c_i^dag c_j>`.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenFunction {
    n: usize,
    g: Vec<f64>,
}

impl GreenFunction {
    pub fn from_matrix(n: usize, g: Vec<f64>) -> Result<Self> {
        if g.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: g.len() });
        }
        Ok(GreenFunction { n, g })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// 0-based element access.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.g[i * self.n + j]
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.g)
    }
}

pub fn green_function(modes: &ModeSet, temperature: f64) -> Result<GreenFunction> {
    if !(temperature >= 0.0) {
        return Err(Error::Domain(format!("temperature must be non-negative, got {temperature}")));
    }
    let n = modes.size();
    let occ: Vec<f64> = modes.energies.iter().map(|&e| occupation(e, temperature)).collect();
    let mut g = vec![0.0; n * n];
    for (k, &nk) in occ.iter().enumerate() {
        if nk == 0.0 {
            continue;
        }
        let phi = modes.mode(k);
        for i in 0..n {
            let a = nk * phi[i];
            if a == 0.0 {
                continue;
            }
            let row = &mut g[i * n..(i + 1) * n];
            for (gij, &pj) in row.iter_mut().zip(phi) {
                *gij += a * pj;
            }
        }
    }
    // exact symmetry
    for i in 0..n {
        for j in i + 1..n {
            let s = 0.5 * (g[i * n + j] + g[j * n + i]);
            g[i * n + j] = s;
            g[j * n + i] = s;
        }
    }
    Ok(GreenFunction { n, g })
}

/// `<(n_1 - 1/2)(n_N - 1/2)> = (G_11 - 1/2)(G_NN - 1/2) - G_1N^2`.
pub fn edge_cz(g: &GreenFunction) -> f64 {
    let n = g.size();
    (g.get(0, 0) - 0.5) * (g.get(n - 1, n - 1) - 0.5) - g.get(0, n - 1) * g.get(n - 1, 0)
}

/// `<S^z_1> = G_11 - 1/2`.
pub fn edge_magnetization(g: &GreenFunction) -> f64 {
    g.get(0, 0) - 0.5
}

/// `D_jk = <B_j A_{k+1}> = 2 G_{j,k+1} - delta_{j,k+1}`, `j, k = 1..N-1`.
pub fn string_determinant_matrix(g: &GreenFunction) -> DMatrix<f64> {
    let m = g.size() - 1;
    DMatrix::from_fn(m, m, |j, k| {
        let col = k + 1;
        2.0 * g.get(j, col) - if j == col { 1.0 } else { 0.0 }
    })
}

/// `C^x_{1N} = det(D) / 4`.
pub fn edge_cx_determinant(g: &GreenFunction) -> f64 {
    0.25 * string_determinant_matrix(g).determinant()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Majorana {
    A(usize),
    B(usize),
}

fn contraction(x: Majorana, y: Majorana, g: &GreenFunction) -> f64 {
    let kd = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    match (x, y) {
        (Majorana::A(i), Majorana::A(j)) => kd(i, j),
        (Majorana::B(i), Majorana::B(j)) => -kd(i, j),
        (Majorana::B(i), Majorana::A(j)) => 2.0 * g.get(i, j) - kd(i, j),
        (Majorana::A(i), Majorana::B(j)) => kd(i, j) - 2.0 * g.get(j, i),
    }
}

/// Antisymmetric matrix of pairwise contractions `<x_a x_b>` (a < b) over
/// `(B_1, A_2, B_2, ..., A_{N-1}, B_{N-1}, A_N)`.
pub fn string_contraction_matrix(g: &GreenFunction) -> DMatrix<f64> {
    let n = g.size();
    let mut ops = Vec::with_capacity(2 * n - 2);
    ops.push(Majorana::B(0));
    for m in 1..n - 1 {
        ops.push(Majorana::A(m));
        ops.push(Majorana::B(m));
    }
    ops.push(Majorana::A(n - 1));
    let dim = ops.len();
    let mut mat = DMatrix::zeros(dim, dim);
    for a in 0..dim {
        for b in a + 1..dim {
            let v = contraction(ops[a], ops[b], g);
            mat[(a, b)] = v;
            mat[(b, a)] = -v;
        }
    }
    mat
}

/// `C^x_{1N} = Pf(M) / 4` over the full Majorana string.
pub fn edge_cx_pfaffian(g: &GreenFunction) -> Result<f64> {
    Ok(0.25 * pfaffian(&string_contraction_matrix(g))?)
}

/// Many-body ground energy: sum of the negative single-particle energies.
pub fn ground_energy_ff(modes: &ModeSet) -> f64 {
    modes
        .energies
        .iter()
        .filter(|&&e| e < -ZERO_MODE_TOL)
        .sum()
}

/// `M`, `C^x` (determinant path) and `C^z` at the given temperature.
pub fn edge_observables_ff(modes: &ModeSet, temperature: f64) -> Result<EdgeObservables> {
    let g = green_function(modes, temperature)?;
    Ok(EdgeObservables {
        magnetization_m: edge_magnetization(&g),
        cx: edge_cx_determinant(&g),
        cz: edge_cz(&g),
        temperature,
    })
}

/// `(C^x, C^z)` between neighbouring sites `l, l+1` (0-based `l`).
pub fn neighbour_correlators(g: &GreenFunction, l: usize) -> (f64, f64) {
    let r = l + 1;
    let cx = 0.5 * g.get(l, r);
    let cz = (g.get(l, l) - 0.5) * (g.get(r, r) - 0.5) - g.get(l, r) * g.get(r, l);
    (cx, cz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Boundary;

    fn xy(n: usize, alpha: f64) -> ChainSpec {
        ChainSpec::deformed(n, alpha, 0.0).unwrap()
    }

    #[test]
    fn hopping_examples() {
        assert_eq!(hopping_matrix(&xy(2, 2.0)).unwrap().hoppings, vec![0.5]);
        let h = hopping_matrix(&xy(4, 2.0)).unwrap().hoppings;
        for (a, b) in h.iter().zip([0.25, 0.5, 0.25]) {
            assert!((a - b).abs() < 1e-15);
        }
        for alpha in [0.0, 1.0, 2.0, 3.3] {
            let m = ModeSet::for_chain(&xy(3, alpha)).unwrap();
            assert!((m.energies[0] + m.energies[2]).abs() < 1e-15);
            assert!(m.energies[1].abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_interacting_and_periodic() {
        assert!(hopping_matrix(&ChainSpec::deformed(4, 2.0, 1.0).unwrap()).is_err());
        let ring = ChainSpec::new(4, 0.0, 0.0, 1.0, Boundary::UniformPeriodic).unwrap();
        assert!(hopping_matrix(&ring).is_err());
    }

    #[test]
    fn infinite_temperature_green_function() {
        let m = ModeSet::for_chain(&xy(6, 2.0)).unwrap();
        let g = green_function(&m, f64::INFINITY).unwrap();
        let half = DMatrix::identity(6, 6) * 0.5;
        assert!((g.to_matrix() - half).amax() < 1e-15);
        assert!(edge_cz(&g).abs() < 1e-15);
        assert!(edge_cx_determinant(&g).abs() < 1e-15);
        assert!(edge_cx_pfaffian(&g).unwrap().abs() < 1e-15);
    }

    #[test]
    fn two_site_ground_state() {
        let m = ModeSet::for_chain(&xy(2, 2.0)).unwrap();
        let g = green_function(&m, 0.0).unwrap();
        // bonding orbital (1, -1)/sqrt2 of the +t hopping is filled
        assert!((g.get(0, 0) - 0.5).abs() < 1e-15);
        assert!((g.get(0, 1) + 0.5).abs() < 1e-15);
        assert!((edge_cz(&g) + 0.25).abs() < 1e-15);
        assert!((edge_cx_determinant(&g) + 0.25).abs() < 1e-15);
        assert!((edge_cx_pfaffian(&g).unwrap() + 0.25).abs() < 1e-15);
        assert!((ground_energy_ff(&m) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn null_hopping_has_zero_energy() {
        let m = ModeSet::from_hopping(&HoppingMatrix { hoppings: vec![0.0; 5] }).unwrap();
        assert_eq!(ground_energy_ff(&m), 0.0);
        let g = green_function(&m, 0.0).unwrap();
        assert!((g.to_matrix() - DMatrix::identity(6, 6) * 0.5).amax() < 1e-15);
    }

    #[test]
    fn mode_invariants() {
        for n in [2usize, 5, 16, 33, 64] {
            for alpha in [0.0, 1.0, 2.0, 3.0] {
                let h = hopping_matrix(&xy(n, alpha)).unwrap();
                let m = ModeSet::from_hopping(&h).unwrap();
                for k in 0..n {
                    assert!((m.energies[k] + m.energies[n - 1 - k]).abs() < 1e-12);
                    for q in 0..n {
                        let d: f64 = (0..n).map(|i| m.amplitude(i, k) * m.amplitude(i, q)).sum();
                        let want = if k == q { 1.0 } else { 0.0 };
                        assert!((d - want).abs() < 1e-12);
                    }
                }
                for i in 0..n {
                    for j in 0..n {
                        let r: f64 = (0..n).map(|k| m.energies[k] * m.amplitude(i, k) * m.amplitude(j, k)).sum();
                        let want = if j == i + 1 {
                            h.hoppings[i]
                        } else if i == j + 1 {
                            h.hoppings[j]
                        } else {
                            0.0
                        };
                        assert!((r - want).abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn green_function_invariants() {
        for n in [4usize, 10, 31] {
            let m = ModeSet::for_chain(&xy(n, 2.0)).unwrap();
            for t in [0.0, 0.01, 0.3, 5.0] {
                let g = green_function(&m, t).unwrap();
                let gm = g.to_matrix();
                assert!((&gm - gm.transpose()).amax() == 0.0);
                assert!((gm.trace() - n as f64 / 2.0).abs() < 1e-10);
                let (vals, _) = crate::linalg::symmetric_eigen(gm.clone());
                assert!(vals[0] >= -1e-12 && vals[n - 1] <= 1.0 + 1e-12);
                assert!(edge_magnetization(&g).abs() < 1e-12);
            }
            if n % 2 == 0 {
                let gm = green_function(&m, 0.0).unwrap().to_matrix();
                assert!((&gm * &gm - &gm).amax() < 1e-10);
            }
        }
    }

    #[test]
    fn pfaffian_and_determinant_paths_agree() {
        for n in 2..=14 {
            for alpha in [1.0, 2.0, 3.0] {
                let m = ModeSet::for_chain(&xy(n, alpha)).unwrap();
                for t in [0.0, 0.1, 1.0] {
                    let g = green_function(&m, t).unwrap();
                    let det = edge_cx_determinant(&g);
                    let pf = edge_cx_pfaffian(&g).unwrap();
                    assert!((det - pf).abs() < 1e-10, "N={n} alpha={alpha} T={t}: {det} vs {pf}");
                }
            }
        }
    }

    #[test]
    fn ring_sectors() {
        // N = 4 antiperiodic: k = ±pi/4, ±3pi/4 -> energies ±2t cos(pi/4)
        let m = ring_modes(4, 0.5, RingSector::Antiperiodic).unwrap();
        let e = 2f64.sqrt() / 2.0;
        for (a, b) in m.energies.iter().zip([-e, -e, e, e]) {
            assert!((a - b).abs() < 1e-14);
        }
        let p = ring_modes(4, 0.5, RingSector::Periodic).unwrap();
        for (a, b) in p.energies.iter().zip([-1.0, 0.0, 0.0, 1.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        let two = ring_modes(2, 0.5, RingSector::Periodic).unwrap();
        assert!((two.energies[0] + 1.0).abs() < 1e-15);
    }
}
