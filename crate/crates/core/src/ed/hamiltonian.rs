//! Matrix-free XXZ Hamiltonian on a magnetization sector.
//!
//! `H = sum_l b_l (S^x S^x + S^y S^y + Delta S^z S^z)` over the bonds of a
//! [`CouplingProfile`]. The flip-flop part acts as `(b_l / 2)(S^+ S^- + h.c.)`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::basis::SectorBasis;
use crate::error::{Error, Result};
use crate::model::CouplingProfile;

const PAR_THRESHOLD: usize = 1 << 12;

#[derive(Debug, Clone, Copy)]
struct Bond {
    mask: u64,
    a: u64,
    b: u64,
    strength: f64,
}

/// Bond list prepared for repeated application.
#[derive(Debug, Clone)]
pub struct XxzOperator {
    n_sites: usize,
    delta: f64,
    bonds: Vec<Bond>,
}

impl XxzOperator {
    pub fn new(profile: &CouplingProfile, delta: f64) -> Self {
        let bonds = profile
            .edges()
            .filter(|&(_, _, s)| s != 0.0)
            .map(|(a, b, strength)| Bond {
                mask: (1 << a) | (1 << b),
                a: 1 << a,
                b: 1 << b,
                strength,
            })
            .collect();
        XxzOperator {
            n_sites: profile.n_sites(),
            delta,
            bonds,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Sum of `|b_l| (1/2 + |Delta|/4)`, an upper bound on the spectral radius.
    pub fn scale(&self) -> f64 {
        self.bonds
            .iter()
            .map(|b| b.strength.abs() * (0.5 + 0.25 * self.delta.abs()))
            .sum::<f64>()
            .max(f64::MIN_POSITIVE)
    }

    #[inline]
    fn diagonal(&self, config: u64) -> f64 {
        let mut e = 0.0;
        for bond in &self.bonds {
            let aligned = ((config & bond.a) != 0) == ((config & bond.b) != 0);
            e += if aligned { 0.25 } else { -0.25 } * bond.strength;
        }
        e * self.delta
    }

    #[inline]
    fn row(&self, basis: &SectorBasis, config: u64, v: &[f64]) -> f64 {
        let mut acc = self.diagonal(config) * v[basis.rank(config)];
        for bond in &self.bonds {
            let pair = config & bond.mask;
            if pair != 0 && pair != bond.mask {
                acc += 0.5 * bond.strength * v[basis.rank(config ^ bond.mask)];
            }
        }
        acc
    }

    /// `out = H v`. Each output row is accumulated independently in a fixed
    /// order, so the result is identical for any thread count.
    pub fn apply_into(&self, basis: &SectorBasis, v: &[f64], out: &mut [f64]) -> Result<()> {
        let dim = basis.dim();
        if basis.n_sites() != self.n_sites {
            return Err(Error::DimensionMismatch {
                expected: self.n_sites,
                got: basis.n_sites(),
            });
        }
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
        }
        if out.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: out.len() });
        }
        let states = basis.states();
        if dim >= PAR_THRESHOLD {
            out.par_iter_mut()
                .zip(states.par_iter())
                .for_each(|(o, &c)| *o = self.row(basis, c, v));
        } else {
            for (o, &c) in out.iter_mut().zip(states) {
                *o = self.row(basis, c, v);
            }
        }
        Ok(())
    }

    pub fn apply(&self, basis: &SectorBasis, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; basis.dim()];
        self.apply_into(basis, v, &mut out)?;
        Ok(out)
    }

    /// Dense sector matrix, for full diagonalization of small sectors.
    pub fn dense(&self, basis: &SectorBasis) -> DMatrix<f64> {
        let dim = basis.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (i, &c) in basis.states().iter().enumerate() {
            m[(i, i)] = self.diagonal(c);
            for bond in &self.bonds {
                let pair = c & bond.mask;
                if pair != 0 && pair != bond.mask {
                    let j = basis.rank(c ^ bond.mask);
                    m[(i, j)] += 0.5 * bond.strength;
                }
            }
        }
        m
    }
}

/// `H v` for the given profile and anisotropy.
pub fn apply_hamiltonian(
    profile: &CouplingProfile,
    delta: f64,
    basis: &SectorBasis,
    v: &[f64],
) -> Result<Vec<f64>> {
    XxzOperator::new(profile, delta).apply(basis, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;
    use crate::model::{bond_profile, ChainSpec};

    /// Dense Hamiltonian on the full 2^N space from explicit Pauli algebra.
    fn dense_full(n: usize, bonds: &[(usize, usize, f64)], delta: f64) -> DMatrix<f64> {
        let dim = 1usize << n;
        let mut h = DMatrix::zeros(dim, dim);
        for c in 0..dim {
            for &(a, b, s) in bonds {
                let sa = if c >> a & 1 == 1 { 0.5 } else { -0.5 };
                let sb = if c >> b & 1 == 1 { 0.5 } else { -0.5 };
                h[(c, c)] += s * delta * sa * sb;
                if sa != sb {
                    let d = c ^ (1 << a) ^ (1 << b);
                    h[(d, c)] += 0.5 * s;
                }
            }
        }
        h
    }

    fn pseudo_random(len: usize, seed: u64) -> Vec<f64> {
        let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (0..len)
            .map(|_| {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect()
    }

    #[test]
    fn two_site_heisenberg_action() {
        let profile = CouplingProfile { bonds: vec![1.0], periodic: false };
        let basis = SectorBasis::new(2, 1).unwrap();
        let out = apply_hamiltonian(&profile, 1.0, &basis, &[1.0, 0.0]).unwrap();
        assert_eq!(out, vec![-0.25, 0.5]);
    }

    #[test]
    fn null_hamiltonian() {
        let profile = CouplingProfile { bonds: vec![0.0; 5], periodic: false };
        let basis = SectorBasis::new(6, 3).unwrap();
        let v = pseudo_random(basis.dim(), 3);
        let out = apply_hamiltonian(&profile, 0.7, &basis, &v).unwrap();
        assert!(out.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn dimension_mismatch() {
        let profile = CouplingProfile { bonds: vec![1.0; 3], periodic: false };
        let basis = SectorBasis::new(4, 2).unwrap();
        assert!(matches!(
            apply_hamiltonian(&profile, 1.0, &basis, &[1.0; 5]),
            Err(Error::DimensionMismatch { .. })
        ));
        let other = SectorBasis::new(5, 2).unwrap();
        assert!(apply_hamiltonian(&profile, 1.0, &other, &[1.0; 10]).is_err());
    }

    #[test]
    fn expectation_matches_full_space_oracle() {
        let spec = ChainSpec::deformed(4, 2.0, 1.0).unwrap();
        let profile = bond_profile(&spec);
        let edges: Vec<_> = profile.edges().collect();
        let full = dense_full(4, &edges, 1.0);
        for n_up in 0..=4 {
            let basis = SectorBasis::new(4, n_up).unwrap();
            let mut v = pseudo_random(basis.dim(), 11 + n_up as u64);
            let nv = dot(&v, &v).sqrt();
            v.iter_mut().for_each(|x| *x /= nv);
            let hv = apply_hamiltonian(&profile, 1.0, &basis, &v).unwrap();
            // embed into the full space
            let mut big = nalgebra::DVector::zeros(16);
            for (i, &c) in basis.states().iter().enumerate() {
                big[c as usize] = v[i];
            }
            let want = big.dot(&(&full * &big));
            assert!((dot(&v, &hv) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_and_sector_preserving() {
        let spec = ChainSpec::deformed(10, 2.5, 0.6).unwrap();
        let op = XxzOperator::new(&bond_profile(&spec), spec.delta);
        let basis = SectorBasis::new(10, 4).unwrap();
        let u = pseudo_random(basis.dim(), 1);
        let v = pseudo_random(basis.dim(), 2);
        let hu = op.apply(&basis, &u).unwrap();
        let hv = op.apply(&basis, &v).unwrap();
        assert!((dot(&u, &hv) - dot(&hu, &v)).abs() < 1e-12);
        let dense = op.dense(&basis);
        assert!((&dense - dense.transpose()).amax() == 0.0);
    }

    #[test]
    fn periodic_ring_includes_closing_bond() {
        let ring = CouplingProfile { bonds: vec![1.0; 4], periodic: true };
        let open = CouplingProfile { bonds: vec![1.0; 3], periodic: false };
        let basis = SectorBasis::new(4, 2).unwrap();
        let a = XxzOperator::new(&ring, 1.0).dense(&basis);
        let b = XxzOperator::new(&open, 1.0).dense(&basis);
        // closing bond between sites 4 and 1: config 0b1010 <-> 0b0011
        let diff = &a - &b;
        let i = basis.index(0b1010).unwrap();
        let j = basis.index(0b0011).unwrap();
        assert_eq!(diff[(i, j)], 0.5);
    }

    #[test]
    fn parallel_and_serial_agree_bitwise() {
        let spec = ChainSpec::deformed(16, 2.0, 1.0).unwrap();
        let op = XxzOperator::new(&bond_profile(&spec), 1.0);
        let basis = SectorBasis::new(16, 8).unwrap();
        let v = pseudo_random(basis.dim(), 5);
        let par = op.apply(&basis, &v).unwrap();
        let serial: Vec<f64> = basis.states().iter().map(|&c| op.row(&basis, c, &v)).collect();
        assert_eq!(par, serial);
    }
}
