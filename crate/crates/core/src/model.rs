//! Chain specifications and the sinusoidal rescaling of bond couplings.
//!
//! A bond between sites `l` and `l+1` sits at the half-integer position
//! `x = l + 1/2`. Its coupling is `J * sin^alpha((pi/N)(x - 1/2))`, which
//! vanishes at the open edges `x = 1/2, N + 1/2` and equals `J` at the
//! chain center.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// Open chain with sinusoidally rescaled bonds.
    OpenDeformed,
    UniformOpen,
    /// Uniform ring; bond `N` joins sites `N` and `1`.
    UniformPeriodic,
}

impl Boundary {
    pub fn as_str(self) -> &'static str {
        match self {
            Boundary::OpenDeformed => "open-deformed",
            Boundary::UniformOpen => "uniform-open",
            Boundary::UniformPeriodic => "uniform-periodic",
        }
    }

    pub fn is_periodic(self) -> bool {
        matches!(self, Boundary::UniformPeriodic)
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "open-deformed" | "deformed" | "sd" => Ok(Boundary::OpenDeformed),
            "uniform-open" | "open" => Ok(Boundary::UniformOpen),
            "uniform-periodic" | "periodic" => Ok(Boundary::UniformPeriodic),
            other => Err(Error::InvalidInput(format!("unknown boundary '{other}'"))),
        }
    }
}

/// A model instance: `N` spins, deformation exponent, anisotropy, coupling
/// scale and boundary style.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChainSpec", into = "RawChainSpec")]
pub struct ChainSpec {
    pub n_sites: usize,
    pub alpha: f64,
    pub delta: f64,
    pub j_coupling: f64,
    pub boundary: Boundary,
}

impl ChainSpec {
    pub fn new(
        n_sites: usize,
        alpha: f64,
        delta: f64,
        j_coupling: f64,
        boundary: Boundary,
    ) -> Result<Self> {
        let spec = ChainSpec {
            n_sites,
            alpha,
            delta,
            j_coupling,
            boundary,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Sinusoidally deformed open chain with `J = 1`.
    pub fn deformed(n_sites: usize, alpha: f64, delta: f64) -> Result<Self> {
        Self::new(n_sites, alpha, delta, 1.0, Boundary::OpenDeformed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::Domain(format!(
                "n_sites must be at least 2, got {}",
                self.n_sites
            )));
        }
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::Domain(format!(
                "alpha must be a finite non-negative number, got {}",
                self.alpha
            )));
        }
        if !self.delta.is_finite() {
            return Err(Error::Domain(format!("delta must be finite, got {}", self.delta)));
        }
        if !(self.j_coupling > 0.0) || !self.j_coupling.is_finite() {
            return Err(Error::Domain(format!(
                "j must be finite and positive, got {}",
                self.j_coupling
            )));
        }
        Ok(())
    }

    pub fn with_n_sites(&self, n_sites: usize) -> Result<Self> {
        Self::new(n_sites, self.alpha, self.delta, self.j_coupling, self.boundary)
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.n_sites, alpha, self.delta, self.j_coupling, self.boundary)
    }

    /// Coupling of the outermost bond, `J sin^alpha(pi/N)` for deformed chains.
    /// This is the natural temperature scale of the edge excitations.
    pub fn edge_bond(&self) -> f64 {
        bond_profile(self).bonds[0]
    }
}

#[derive(Serialize, Deserialize)]
struct RawChainSpec {
    n_sites: usize,
    alpha: f64,
    delta: f64,
    j: f64,
    boundary: Boundary,
}

impl TryFrom<RawChainSpec> for ChainSpec {
    type Error = Error;

    fn try_from(raw: RawChainSpec) -> Result<Self> {
        ChainSpec::new(raw.n_sites, raw.alpha, raw.delta, raw.j, raw.boundary)
    }
}

impl From<ChainSpec> for RawChainSpec {
    fn from(spec: ChainSpec) -> Self {
        RawChainSpec {
            n_sites: spec.n_sites,
            alpha: spec.alpha,
            delta: spec.delta,
            j: spec.j_coupling,
            boundary: spec.boundary,
        }
    }
}

/// A half-integer lattice position, stored as `2x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfSite(u64);

impl HalfSite {
    pub fn from_twice(twice: u64) -> Self {
        HalfSite(twice)
    }

    /// Center of the bond joining sites `l` and `l+1` (1-based).
    pub fn bond(l: usize) -> Self {
        HalfSite(2 * l as u64 + 1)
    }

    pub fn twice(self) -> u64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

/// `sin^alpha(t)` with the convention `0^0 = 1`.
fn sin_power(t: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        return 1.0;
    }
    let s = t.sin();
    if s <= 0.0 {
        0.0
    } else {
        (alpha * s.ln()).exp()
    }
}

/// Sinusoidal rescaling `sin^alpha((pi/N)(x - 1/2))` for real `x` in
/// `[1/2, N + 1/2]`.
///
/// The argument is folded onto the left half of the chain before the sine is
/// taken, so the reflection `x -> N + 1 - x` is exact and both edges give 0.
pub fn rescale_factor(n_sites: usize, alpha: f64, x: f64) -> Result<f64> {
    if n_sites == 0 {
        return Err(Error::Domain("n_sites must be positive".into()));
    }
    if !(alpha >= 0.0) {
        return Err(Error::Domain(format!("alpha must be non-negative, got {alpha}")));
    }
    let n = n_sites as f64;
    if !(x >= 0.5 && x <= n + 0.5) {
        return Err(Error::Domain(format!(
            "position {x} outside [1/2, {}]",
            n + 0.5
        )));
    }
    let dist = (x - 0.5).min(n + 0.5 - x);
    Ok(sin_power(PI / n * dist, alpha))
}

/// Exact half-integer variant of [`rescale_factor`].
pub fn rescale_at(n_sites: usize, alpha: f64, pos: HalfSite) -> Result<f64> {
    let twice_n = 2 * n_sites as u64;
    if pos.twice() < 1 || pos.twice() > twice_n + 1 {
        return Err(Error::Domain(format!(
            "position {} outside [1/2, {}]",
            pos.value(),
            n_sites as f64 + 0.5
        )));
    }
    if !(alpha >= 0.0) {
        return Err(Error::Domain(format!("alpha must be non-negative, got {alpha}")));
    }
    // twice the distance to the nearest edge, an integer in [0, N]
    let twice_dist = (pos.twice() - 1).min(twice_n + 1 - pos.twice());
    let t = PI * twice_dist as f64 / twice_n as f64;
    Ok(sin_power(t, alpha))
}

/// Bond strengths `J f_{l+1/2}`; `N - 1` entries for open chains and `N`
/// for rings.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingProfile {
    pub bonds: Vec<f64>,
    pub periodic: bool,
}

impl CouplingProfile {
    pub fn n_sites(&self) -> usize {
        if self.periodic {
            self.bonds.len()
        } else {
            self.bonds.len() + 1
        }
    }

    /// `(site_a, site_b, strength)` with 0-based site indices.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n_sites();
        self.bonds
            .iter()
            .enumerate()
            .map(move |(l, &b)| (l, (l + 1) % n, b))
    }
}

pub fn bond_profile(spec: &ChainSpec) -> CouplingProfile {
    let n = spec.n_sites;
    let j = spec.j_coupling;
    match spec.boundary {
        Boundary::OpenDeformed => CouplingProfile {
            bonds: (1..n)
                .map(|l| {
                    j * rescale_at(n, spec.alpha, HalfSite::bond(l))
                        .expect("bond centers lie inside the chain")
                })
                .collect(),
            periodic: false,
        },
        Boundary::UniformOpen => CouplingProfile {
            bonds: vec![j; n - 1],
            periodic: false,
        },
        Boundary::UniformPeriodic => CouplingProfile {
            bonds: vec![j; n],
            periodic: true,
        },
    }
}
