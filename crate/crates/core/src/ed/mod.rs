//! Exact diagonalization of XXZ chains for arbitrary anisotropy.
//!
//! Total `S^z` is conserved, so every solve works inside one sector of fixed
//! up-spin count. Ground states come from Lanczos in the `n_up = N/2` sector;
//! thermal ensembles from dense diagonalization of every sector.

pub mod basis;
pub mod hamiltonian;
pub mod lanczos;

use std::sync::Arc;

use nalgebra::DMatrix;

pub use basis::SectorBasis;
pub use hamiltonian::{apply_hamiltonian, XxzOperator};
pub use lanczos::{LanczosOptions, LanczosOutcome};

use crate::entanglement::TwoSpinDM;
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::model::{bond_profile, ChainSpec};
use crate::observables::EdgeObservables;

/// Largest chain accepted for ground-state searches.
pub const MAX_GROUND_STATE_SITES: usize = 24;
/// Largest chain accepted for full-spectrum (thermal) diagonalization.
pub const MAX_FULL_SPECTRUM_SITES: usize = 14;
/// Levels closer than this to the lowest one count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct SpinState {
    pub basis: Arc<SectorBasis>,
    pub amplitudes: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub state: SpinState,
    pub residual: f64,
    pub matvecs: usize,
    /// Distance to the next Ritz value in the ground-state sector.
    pub gap_estimate: Option<f64>,
    pub near_degenerate: bool,
}

fn lanczos_options(spec: &ChainSpec) -> LanczosOptions {
    let mut opts = LanczosOptions::default();
    if spec.alpha >= 3.5 {
        opts.tol = 1e-13;
    }
    opts
}

/// Lowest eigenpair within the sector with `n_up` up spins.
pub fn sector_ground_state(spec: &ChainSpec, n_up: usize) -> Result<GroundState> {
    spec.validate()?;
    if spec.n_sites > MAX_GROUND_STATE_SITES {
        return Err(Error::SizeGuard {
            what: "exact-diagonalization ground state sites",
            limit: MAX_GROUND_STATE_SITES,
            requested: spec.n_sites,
        });
    }
    let basis = Arc::new(SectorBasis::new(spec.n_sites, n_up)?);
    let op = XxzOperator::new(&bond_profile(spec), spec.delta);
    let scale = op.scale();
    let opts = lanczos_options(spec);
    let out = lanczos::lowest_eigenpair(
        basis.dim(),
        |x, y| op.apply_into(&basis, x, y),
        lanczos::seed_vector(basis.dim()),
        scale,
        &opts,
    )?;
    if out.residual > 1e-10 * scale {
        return Err(Error::Convergence {
            iterations: out.matvecs,
            residual: out.residual,
        });
    }
    let gap_estimate = out.second.map(|s| s - out.value);
    let near_degenerate = gap_estimate.is_some_and(|g| g < DEGENERACY_TOL);
    if near_degenerate {
        log::warn!(
            "near-degenerate ground state for N={} alpha={} delta={}: gap estimate {:?}",
            spec.n_sites,
            spec.alpha,
            spec.delta,
            gap_estimate
        );
    }
    Ok(GroundState {
        energy: out.value,
        state: SpinState {
            basis,
            amplitudes: out.vector,
        },
        residual: out.residual,
        matvecs: out.matvecs,
        gap_estimate,
        near_degenerate,
    })
}

/// Ground state of an even-length chain in the zero-magnetization sector.
pub fn ground_state(spec: &ChainSpec) -> Result<GroundState> {
    if spec.n_sites % 2 != 0 {
        return Err(Error::Domain(format!(
            "ground-state search needs even N, got {}",
            spec.n_sites
        )));
    }
    sector_ground_state(spec, spec.n_sites / 2)
}

#[derive(Debug, Clone)]
pub struct SectorSpectrum {
    pub basis: Arc<SectorBasis>,
    /// Ascending.
    pub energies: Vec<f64>,
    /// Eigenvectors in columns.
    pub vectors: DMatrix<f64>,
}

/// Edge data of one eigenstate, cached for fast Boltzmann sums.
#[derive(Debug, Clone, Copy)]
struct LevelEdge {
    energy: f64,
    m: f64,
    cx: f64,
    cz: f64,
    rho: [[f64; 4]; 4],
}

/// All `2^N` eigenpairs, organized by magnetization sector.
#[derive(Debug, Clone)]
pub struct ThermalEnsemble {
    pub spec: ChainSpec,
    pub sectors: Vec<SectorSpectrum>,
    pub e_min: f64,
    levels: Vec<LevelEdge>,
}

pub fn full_spectrum(spec: &ChainSpec) -> Result<ThermalEnsemble> {
    spec.validate()?;
    let n = spec.n_sites;
    if n > MAX_FULL_SPECTRUM_SITES {
        return Err(Error::SizeGuard {
            what: "full-spectrum sites",
            limit: MAX_FULL_SPECTRUM_SITES,
            requested: n,
        });
    }
    let op = XxzOperator::new(&bond_profile(spec), spec.delta);
    let mut sectors = Vec::with_capacity(n + 1);
    let mut levels = Vec::with_capacity(1 << n);
    for n_up in 0..=n {
        let basis = Arc::new(SectorBasis::new(n, n_up)?);
        let (energies, vectors) = symmetric_eigen(op.dense(&basis));
        for (k, &energy) in energies.iter().enumerate() {
            let amps: Vec<f64> = vectors.column(k).iter().copied().collect();
            let obs = pure_observables(&basis, &amps);
            levels.push(LevelEdge {
                energy,
                m: obs.0,
                cx: obs.1,
                cz: obs.2,
                rho: pure_edge_rho(&basis, &amps),
            });
        }
        sectors.push(SectorSpectrum { basis, energies, vectors });
    }
    let e_min = levels.iter().map(|l| l.energy).fold(f64::INFINITY, f64::min);
    Ok(ThermalEnsemble { spec: *spec, sectors, e_min, levels })
}

impl ThermalEnsemble {
    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn energies(&self) -> impl Iterator<Item = f64> + '_ {
        self.levels.iter().map(|l| l.energy)
    }

    pub fn ground_degeneracy(&self) -> usize {
        self.levels
            .iter()
            .filter(|l| l.energy - self.e_min < DEGENERACY_TOL)
            .count()
    }

    /// Boltzmann weights `exp(-(E - E_min)/T)` in level order. At `T = 0`
    /// the lowest (possibly degenerate) manifold gets weight one.
    fn weights(&self, temperature: f64) -> Vec<f64> {
        self.levels
            .iter()
            .map(|l| {
                let de = l.energy - self.e_min;
                if temperature == 0.0 {
                    if de < DEGENERACY_TOL {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    (-de / temperature).exp()
                }
            })
            .collect()
    }

    /// Partition function with energies measured from `E_min`.
    pub fn partition_function(&self, temperature: f64) -> f64 {
        self.weights(temperature).iter().sum()
    }

    pub fn observables(&self, temperature: f64) -> Result<EdgeObservables> {
        check_temperature(temperature)?;
        let w = self.weights(temperature);
        let z: f64 = w.iter().sum();
        let (mut m, mut cx, mut cz) = (0.0, 0.0, 0.0);
        for (l, wi) in self.levels.iter().zip(&w) {
            m += wi * l.m;
            cx += wi * l.cx;
            cz += wi * l.cz;
        }
        Ok(EdgeObservables {
            magnetization_m: m / z,
            cx: cx / z,
            cz: cz / z,
            temperature,
        })
    }

    pub fn reduced_dm(&self, temperature: f64) -> Result<TwoSpinDM> {
        check_temperature(temperature)?;
        let w = self.weights(temperature);
        let z: f64 = w.iter().sum();
        let mut rho = [[0.0; 4]; 4];
        for (l, wi) in self.levels.iter().zip(&w) {
            for i in 0..4 {
                for j in 0..4 {
                    rho[i][j] += wi * l.rho[i][j];
                }
            }
        }
        rho.iter_mut().flatten().for_each(|x| *x /= z);
        TwoSpinDM::from_real(rho)
    }
}

fn check_temperature(t: f64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("temperature must be non-negative, got {t}")));
    }
    Ok(())
}

/// Either a pure eigenstate or a full thermal ensemble.
#[derive(Debug, Clone, Copy)]
pub enum EdState<'a> {
    Pure(&'a SpinState),
    Thermal(&'a ThermalEnsemble),
}

fn edge_index(config: u64, last: usize) -> usize {
    let s1 = (config & 1) as usize;
    let sn = ((config >> last) & 1) as usize;
    2 * (1 - s1) + (1 - sn)
}

fn sz(config: u64, site: usize) -> f64 {
    if (config >> site) & 1 == 1 {
        0.5
    } else {
        -0.5
    }
}

/// `(<S^z_i>, <S^x_i S^x_j>, <S^z_i S^z_j>)` of a real sector vector, from
/// the operator definitions.
fn pure_pair(basis: &SectorBasis, amps: &[f64], i: usize, j: usize) -> (f64, f64, f64) {
    let flip = (1u64 << i) | (1u64 << j);
    let (mut m, mut cx, mut cz) = (0.0, 0.0, 0.0);
    for (&c, &a) in basis.states().iter().zip(amps) {
        let p = a * a;
        let (si, sj) = (sz(c, i), sz(c, j));
        m += p * si;
        cz += p * si * sj;
        if si != sj {
            // S^+_i S^-_j + S^-_i S^+_j connects c with both spins flipped
            cx += a * amps[basis.rank(c ^ flip)];
        }
    }
    (m, 0.25 * cx, cz)
}

fn pure_observables(basis: &SectorBasis, amps: &[f64]) -> (f64, f64, f64) {
    pure_pair(basis, amps, 0, basis.n_sites() - 1)
}

/// `(C^x_ij, C^z_ij)` between two distinct sites of a pure state.
pub fn pair_correlators(state: &SpinState, i: usize, j: usize) -> Result<(f64, f64)> {
    let n = state.basis.n_sites();
    if i >= n || j >= n || i == j {
        return Err(Error::InvalidInput(format!("site pair ({i}, {j}) invalid for N = {n}")));
    }
    let (_, cx, cz) = pure_pair(&state.basis, &state.amplitudes, i, j);
    Ok((cx, cz))
}

/// Partial trace over sites `2..N-1` of a real sector vector.
fn pure_edge_rho(basis: &SectorBasis, amps: &[f64]) -> [[f64; 4]; 4] {
    let n = basis.n_sites();
    let last = n - 1;
    let edge_mask = 1u64 | (1u64 << last);
    let mut rho = [[0.0; 4]; 4];
    for (&c, &a) in basis.states().iter().zip(amps) {
        if a == 0.0 {
            continue;
        }
        let bulk = c & !edge_mask;
        let row = edge_index(c, last);
        for col in 0..4 {
            let up1 = col < 2;
            let upn = col % 2 == 0;
            let other = bulk | u64::from(up1) | (u64::from(upn) << last);
            if let Some(k) = basis.index(other) {
                rho[row][col] += a * amps[k];
            }
        }
    }
    rho
}

/// Edge observables of a pure state (`T = 0`) or an ensemble at `T >= 0`.
pub fn edge_observables(source: EdState<'_>, temperature: f64) -> Result<EdgeObservables> {
    match source {
        EdState::Pure(state) => {
            if temperature != 0.0 {
                return Err(Error::InvalidInput(
                    "a pure state only describes T = 0; pass a thermal ensemble".into(),
                ));
            }
            let (m, cx, cz) = pure_observables(&state.basis, &state.amplitudes);
            Ok(EdgeObservables { magnetization_m: m, cx, cz, temperature: 0.0 })
        }
        EdState::Thermal(ens) => ens.observables(temperature),
    }
}

pub fn reduced_dm_edges(source: EdState<'_>, temperature: f64) -> Result<TwoSpinDM> {
    match source {
        EdState::Pure(state) => {
            if temperature != 0.0 {
                return Err(Error::InvalidInput(
                    "a pure state only describes T = 0; pass a thermal ensemble".into(),
                ));
            }
            TwoSpinDM::from_real(pure_edge_rho(&state.basis, &state.amplitudes))
        }
        EdState::Thermal(ens) => ens.reduced_dm(temperature),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::{concurrence_from_correlators, concurrence_from_dm};
    use crate::model::Boundary;

    #[test]
    fn two_site_singlet() {
        let spec = ChainSpec::deformed(2, 2.0, 1.0).unwrap();
        let gs = ground_state(&spec).unwrap();
        assert!((gs.energy + 0.75).abs() < 1e-14);
        let a = &gs.state.amplitudes;
        assert!((a[0].abs() - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((a[0] + a[1]).abs() < 1e-14);
        let obs = edge_observables(EdState::Pure(&gs.state), 0.0).unwrap();
        assert!(obs.magnetization_m.abs() < 1e-15);
        assert!((obs.cx + 0.25).abs() < 1e-14);
        assert!((obs.cz + 0.25).abs() < 1e-14);
        let rho = reduced_dm_edges(EdState::Pure(&gs.state), 0.0).unwrap();
        let eig = nalgebra::SymmetricEigen::new(*rho.matrix()).eigenvalues;
        let mut e: Vec<f64> = eig.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        assert!((e[3] - 1.0).abs() < 1e-12 && e[..3].iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn heisenberg_ring_of_four() {
        let spec = ChainSpec::new(4, 0.0, 1.0, 1.0, Boundary::UniformPeriodic).unwrap();
        let gs = ground_state(&spec).unwrap();
        // dense oracle
        let ens = full_spectrum(&spec).unwrap();
        assert!((ens.e_min + 2.0).abs() < 1e-12);
        assert!((gs.energy + 2.0).abs() < 1e-12);
    }

    #[test]
    fn two_site_spectra() {
        let heis = full_spectrum(&ChainSpec::deformed(2, 2.0, 1.0).unwrap()).unwrap();
        let mut e: Vec<f64> = heis.energies().collect();
        e.sort_by(f64::total_cmp);
        for (a, b) in e.iter().zip([-0.75, 0.25, 0.25, 0.25]) {
            assert!((a - b).abs() < 1e-14);
        }
        let xy = full_spectrum(&ChainSpec::deformed(2, 2.0, 0.0).unwrap()).unwrap();
        let mut e: Vec<f64> = xy.energies().collect();
        e.sort_by(f64::total_cmp);
        for (a, b) in e.iter().zip([-0.5, 0.0, 0.0, 0.5]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn spectrum_is_traceless_and_complete() {
        let ens = full_spectrum(&ChainSpec::deformed(8, 2.0, 1.0).unwrap()).unwrap();
        assert_eq!(ens.n_levels(), 256);
        let dims: usize = ens.sectors.iter().map(|s| s.basis.dim()).sum();
        assert_eq!(dims, 256);
        assert!(ens.energies().sum::<f64>().abs() < 1e-10);
        for s in &ens.sectors {
            assert!(s.energies.windows(2).all(|w| w[0] <= w[1]));
        }
        let z = ens.partition_function(0.3);
        assert!(z.is_finite() && z >= ens.ground_degeneracy() as f64);
    }

    #[test]
    fn lanczos_matches_full_spectrum_and_half_filling_hosts_ground_state() {
        for n in [2usize, 4, 6, 8, 10, 12] {
            for delta in [0.0, 1.0] {
                for alpha in [0.0, 1.0, 2.0, 3.0] {
                    let spec = ChainSpec::deformed(n, alpha, delta).unwrap();
                    let ens = full_spectrum(&spec).unwrap();
                    let gs = ground_state(&spec).unwrap();
                    assert!(
                        (gs.energy - ens.e_min).abs() < 1e-9,
                        "N={n} delta={delta} alpha={alpha}: {} vs {}",
                        gs.energy,
                        ens.e_min
                    );
                    // no other sector lies lower
                    let half = &ens.sectors[n / 2];
                    assert!((half.energies[0] - ens.e_min).abs() < 1e-10);
                    assert!(gs.residual <= 1e-10 * bond_profile(&spec).bonds.iter().sum::<f64>());
                    let norm: f64 = gs.state.amplitudes.iter().map(|a| a * a).sum();
                    assert!((norm - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn lanczos_sector_energies_match_dense() {
        let spec = ChainSpec::deformed(10, 2.0, 1.0).unwrap();
        let ens = full_spectrum(&spec).unwrap();
        for n_up in 0..=10 {
            let gs = sector_ground_state(&spec, n_up).unwrap();
            assert!((gs.energy - ens.sectors[n_up].energies[0]).abs() < 1e-10);
        }
    }

    #[test]
    fn guards_and_mismatches() {
        let odd = ChainSpec::deformed(5, 2.0, 1.0).unwrap();
        assert!(matches!(ground_state(&odd), Err(Error::Domain(_))));
        let big = ChainSpec::deformed(16, 2.0, 1.0).unwrap();
        assert!(matches!(full_spectrum(&big), Err(Error::SizeGuard { .. })));
        let huge = ChainSpec::deformed(26, 2.0, 1.0).unwrap();
        assert!(matches!(ground_state(&huge), Err(Error::SizeGuard { .. })));
        let gs = ground_state(&ChainSpec::deformed(4, 2.0, 1.0).unwrap()).unwrap();
        assert!(edge_observables(EdState::Pure(&gs.state), 0.5).is_err());
        assert!(reduced_dm_edges(EdState::Pure(&gs.state), 0.5).is_err());
    }

    #[test]
    fn thermal_symmetries() {
        let spec = ChainSpec::deformed(8, 2.0, 1.0).unwrap();
        let ens = full_spectrum(&spec).unwrap();
        for t in [0.0, 0.05, 0.3, 2.0, f64::INFINITY] {
            let obs = ens.observables(t).unwrap();
            assert!(obs.magnetization_m.abs() < 1e-12, "M = {}", obs.magnetization_m);
            assert!(obs.is_physical());
            let rho = ens.reduced_dm(t).unwrap();
            // X shape: elements between different edge magnetizations vanish
            for (i, j) in [(0, 1), (0, 2), (1, 3), (2, 3), (1, 0), (2, 0), (3, 1), (3, 2)] {
                assert!(rho.get(i, j).norm() < 1e-12);
            }
            assert!(rho.get(0, 3).norm() < 1e-12);
            let from_rho = rho.observables(t);
            assert!((from_rho.cx - obs.cx).abs() < 1e-12);
            assert!((from_rho.cz - obs.cz).abs() < 1e-12);
        }
        let inf = ens.observables(f64::INFINITY).unwrap();
        assert!(inf.cx.abs() < 1e-14 && inf.cz.abs() < 1e-14);
    }

    #[test]
    fn product_state_reduces_to_product() {
        let basis = Arc::new(SectorBasis::new(6, 6).unwrap());
        let state = SpinState { basis, amplitudes: vec![1.0] };
        let rho = reduced_dm_edges(EdState::Pure(&state), 0.0).unwrap();
        assert!((rho.get(0, 0).re - 1.0).abs() < 1e-15);
        assert!((rho.matrix().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dual_concurrence_on_thermal_dm() {
        let spec = ChainSpec::deformed(8, 2.0, 1.0).unwrap();
        let ens = full_spectrum(&spec).unwrap();
        let rho = ens.reduced_dm(0.1).unwrap();
        let a = concurrence_from_dm(&rho).unwrap().value;
        let b = concurrence_from_correlators(&ens.observables(0.1).unwrap()).unwrap().value;
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn reflection_symmetric_nearest_neighbour_zz() {
        let spec = ChainSpec::deformed(10, 2.0, 1.0).unwrap();
        let gs = ground_state(&spec).unwrap();
        let zz = |a: usize, b: usize| pair_correlators(&gs.state, a, b).unwrap().1;
        assert!((zz(0, 1) - zz(8, 9)).abs() < 1e-10);
        let edge = edge_observables(EdState::Pure(&gs.state), 0.0).unwrap();
        assert_eq!(pair_correlators(&gs.state, 0, 9).unwrap(), (edge.cx, edge.cz));
        assert!(pair_correlators(&gs.state, 3, 3).is_err());
    }
}
