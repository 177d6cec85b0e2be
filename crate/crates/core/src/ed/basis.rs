//! Fixed-magnetization bases. Bit `i` of a configuration is site `i + 1`;
//! a set bit is spin up.

use crate::error::{Error, Result};

/// Largest chain the enumerator accepts.
pub const MAX_SITES: usize = 28;

#[derive(Debug, Clone)]
pub struct SectorBasis {
    n_sites: usize,
    n_up: usize,
    states: Vec<u64>,
    // binom[n][k] for n <= MAX_SITES
    binom: Vec<Vec<u64>>,
}

fn binomial_table(n_max: usize) -> Vec<Vec<u64>> {
    let mut t = vec![vec![0u64; n_max + 2]; n_max + 1];
    for n in 0..=n_max {
        t[n][0] = 1;
        for k in 1..=n {
            t[n][k] = t[n - 1][k - 1] + if k < n { t[n - 1][k] } else { 0 };
        }
    }
    t
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Next larger integer with the same number of set bits.
fn gosper_next(x: u64) -> u64 {
    let c = x & x.wrapping_neg();
    let r = x + c;
    (((r ^ x) >> 2) / c) | r
}

impl SectorBasis {
    pub fn new(n_sites: usize, n_up: usize) -> Result<Self> {
        if n_sites > MAX_SITES {
            return Err(Error::SizeGuard {
                what: "basis enumeration sites",
                limit: MAX_SITES,
                requested: n_sites,
            });
        }
        if n_up > n_sites {
            return Err(Error::Domain(format!(
                "n_up = {n_up} exceeds n_sites = {n_sites}"
            )));
        }
        let dim = binomial(n_sites, n_up) as usize;
        let mut states = Vec::with_capacity(dim);
        if n_up == 0 {
            states.push(0);
        } else {
            let mut c = (1u64 << n_up) - 1;
            for _ in 0..dim {
                states.push(c);
                c = gosper_next(c);
            }
        }
        Ok(SectorBasis {
            n_sites,
            n_up,
            states,
            binom: binomial_table(n_sites),
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn n_up(&self) -> usize {
        self.n_up
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn state(&self, i: usize) -> u64 {
        self.states[i]
    }

    /// Total `S^z` of the sector.
    pub fn magnetization(&self) -> f64 {
        self.n_up as f64 - self.n_sites as f64 / 2.0
    }

    /// Ordinal of a configuration, `None` if it belongs to another sector.
    ///
    /// Ascending order of configurations is colexicographic order of their
    /// set-bit positions, so the rank is a sum of binomials.
    #[inline]
    pub fn index(&self, config: u64) -> Option<usize> {
        if config >> self.n_sites != 0 || config.count_ones() as usize != self.n_up {
            return None;
        }
        Some(self.rank(config))
    }

    #[inline]
    pub(crate) fn rank(&self, config: u64) -> usize {
        let mut rank = 0u64;
        let mut rest = config;
        let mut k = 1;
        while rest != 0 {
            let p = rest.trailing_zeros() as usize;
            rank += self.binom[p][k];
            rest &= rest - 1;
            k += 1;
        }
        rank as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sectors() {
        let b = SectorBasis::new(2, 1).unwrap();
        assert_eq!(b.states(), &[0b01, 0b10]);
        assert_eq!(SectorBasis::new(4, 2).unwrap().dim(), 6);
        assert_eq!(SectorBasis::new(14, 7).unwrap().dim(), 3432);
        assert_eq!(SectorBasis::new(5, 0).unwrap().states(), &[0]);
        assert_eq!(SectorBasis::new(5, 5).unwrap().states(), &[0b11111]);
    }

    #[test]
    fn index_inverts_states() {
        for n in 0..=12 {
            for k in 0..=n {
                let b = SectorBasis::new(n, k).unwrap();
                assert_eq!(b.dim() as u64, binomial(n, k));
                assert!(b.states().windows(2).all(|w| w[0] < w[1]));
                for (i, &s) in b.states().iter().enumerate() {
                    assert_eq!(s.count_ones() as usize, k);
                    assert_eq!(b.index(s), Some(i));
                }
            }
        }
    }

    #[test]
    fn foreign_configs_rejected() {
        let b = SectorBasis::new(6, 3).unwrap();
        assert_eq!(b.index(0b11), None);
        assert_eq!(b.index(0b1000111), None);
    }

    #[test]
    fn guards() {
        assert!(matches!(
            SectorBasis::new(29, 3),
            Err(Error::SizeGuard { .. })
        ));
        assert!(SectorBasis::new(4, 5).is_err());
    }
}
