//! Interchangeable edge-correlator solvers behind one trait, registered by
//! name and selected at run time.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::ed::{self, EdState, ThermalEnsemble};
use crate::entanglement::TwoSpinDM;
use crate::error::{Error, Result};
use crate::fermion::{self, ModeSet};
use crate::model::ChainSpec;
use crate::observables::EdgeObservables;

pub const ED: &str = "ed";
pub const FREE_FERMION: &str = "free-fermion";
pub const AUTO: &str = "auto";

/// Chains longer than this never go to exact diagonalization under `auto`.
pub const AUTO_ED_MAX_SITES: usize = 14;
/// Size guard of the free-fermion solver (dense `O(N^3)` linear algebra).
pub const FREE_FERMION_MAX_SITES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    /// `T = 0` only.
    Ground,
    /// Any `T >= 0`.
    Thermal,
}

/// Edge data of one model instance as a function of temperature.
pub trait ThermalModel: Send + Sync {
    fn observables(&self, temperature: f64) -> Result<EdgeObservables>;

    /// Full reduced density matrix of the edge spins, when the solver has
    /// one.
    fn reduced_dm(&self, _temperature: f64) -> Option<Result<TwoSpinDM>> {
        None
    }
}

impl ThermalModel for ThermalEnsemble {
    fn observables(&self, temperature: f64) -> Result<EdgeObservables> {
        ed::edge_observables(EdState::Thermal(self), temperature)
    }

    fn reduced_dm(&self, temperature: f64) -> Option<Result<TwoSpinDM>> {
        Some(ed::reduced_dm_edges(EdState::Thermal(self), temperature))
    }
}

impl ThermalModel for ModeSet {
    fn observables(&self, temperature: f64) -> Result<EdgeObservables> {
        fermion::edge_observables_ff(self, temperature)
    }
}

pub trait Engine: Send + Sync {
    fn name(&self) -> &'static str;

    /// Guards: `Ok` iff the engine can solve `spec` in `mode`.
    fn check(&self, spec: &ChainSpec, mode: SolveMode) -> Result<()>;

    fn ground_observables(&self, spec: &ChainSpec) -> Result<EdgeObservables>;

    /// Precomputed solver for repeated evaluation at many temperatures.
    fn thermal(&self, spec: &ChainSpec) -> Result<Box<dyn ThermalModel>>;

    /// Reduced edge density matrix of the ground state, when available.
    fn ground_dm(&self, _spec: &ChainSpec) -> Option<Result<TwoSpinDM>> {
        None
    }
}

/// Exact diagonalization: Lanczos ground states, dense thermal ensembles.
#[derive(Debug, Default, Clone, Copy)]
pub struct ExactDiagonalization;

impl Engine for ExactDiagonalization {
    fn name(&self) -> &'static str {
        ED
    }

    fn check(&self, spec: &ChainSpec, mode: SolveMode) -> Result<()> {
        spec.validate()?;
        match mode {
            SolveMode::Ground => {
                if spec.n_sites > ed::MAX_GROUND_STATE_SITES {
                    return Err(Error::SizeGuard {
                        what: "exact-diagonalization ground state sites",
                        limit: ed::MAX_GROUND_STATE_SITES,
                        requested: spec.n_sites,
                    });
                }
                if spec.n_sites % 2 != 0 {
                    return Err(Error::Domain(format!(
                        "ground-state search needs even N, got {}",
                        spec.n_sites
                    )));
                }
            }
            SolveMode::Thermal => {
                if spec.n_sites > ed::MAX_FULL_SPECTRUM_SITES {
                    return Err(Error::SizeGuard {
                        what: "full-spectrum sites",
                        limit: ed::MAX_FULL_SPECTRUM_SITES,
                        requested: spec.n_sites,
                    });
                }
            }
        }
        Ok(())
    }

    fn ground_observables(&self, spec: &ChainSpec) -> Result<EdgeObservables> {
        self.check(spec, SolveMode::Ground)?;
        let gs = ed::ground_state(spec)?;
        ed::edge_observables(EdState::Pure(&gs.state), 0.0)
    }

    fn thermal(&self, spec: &ChainSpec) -> Result<Box<dyn ThermalModel>> {
        self.check(spec, SolveMode::Thermal)?;
        Ok(Box::new(ed::full_spectrum(spec)?))
    }

    fn ground_dm(&self, spec: &ChainSpec) -> Option<Result<TwoSpinDM>> {
        Some(self.check(spec, SolveMode::Ground).and_then(|_| {
            let gs = ed::ground_state(spec)?;
            ed::reduced_dm_edges(EdState::Pure(&gs.state), 0.0)
        }))
    }
}

/// Jordan-Wigner free fermions; XY point on open chains only.
#[derive(Debug, Default, Clone, Copy)]
pub struct FreeFermion;

impl Engine for FreeFermion {
    fn name(&self) -> &'static str {
        FREE_FERMION
    }

    fn check(&self, spec: &ChainSpec, _mode: SolveMode) -> Result<()> {
        spec.validate()?;
        if spec.delta != 0.0 {
            return Err(Error::EngineMismatch {
                engine: FREE_FERMION.into(),
                reason: format!("needs delta = 0, got {}", spec.delta),
            });
        }
        if spec.boundary.is_periodic() {
            return Err(Error::EngineMismatch {
                engine: FREE_FERMION.into(),
                reason: "open chains only".into(),
            });
        }
        if spec.n_sites > FREE_FERMION_MAX_SITES {
            return Err(Error::SizeGuard {
                what: "free-fermion sites",
                limit: FREE_FERMION_MAX_SITES,
                requested: spec.n_sites,
            });
        }
        Ok(())
    }

    fn ground_observables(&self, spec: &ChainSpec) -> Result<EdgeObservables> {
        self.check(spec, SolveMode::Ground)?;
        fermion::edge_observables_ff(&ModeSet::for_chain(spec)?, 0.0)
    }

    fn thermal(&self, spec: &ChainSpec) -> Result<Box<dyn ThermalModel>> {
        self.check(spec, SolveMode::Thermal)?;
        Ok(Box::new(ModeSet::for_chain(spec)?))
    }
}

/// Name-indexed collection of engines.
#[derive(Clone, Default)]
pub struct EngineRegistry {
    engines: BTreeMap<String, Arc<dyn Engine>>,
}

impl std::fmt::Debug for EngineRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EngineRegistry")
            .field("engines", &self.names())
            .finish()
    }
}

impl EngineRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry holding the exact-diagonalization and free-fermion engines.
    pub fn builtin() -> Self {
        let mut reg = Self::new();
        reg.register(Arc::new(ExactDiagonalization)).expect("fresh registry");
        reg.register(Arc::new(FreeFermion)).expect("fresh registry");
        reg
    }

    pub fn register(&mut self, engine: Arc<dyn Engine>) -> Result<()> {
        let name = engine.name();
        if name == AUTO {
            return Err(Error::InvalidInput("'auto' is reserved".into()));
        }
        if self.engines.contains_key(name) {
            return Err(Error::InvalidInput(format!("engine '{name}' already registered")));
        }
        self.engines.insert(name.to_string(), engine);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Engine>> {
        self.engines
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownEngine(name.to_string()))
    }

    pub fn names(&self) -> Vec<&str> {
        self.engines.keys().map(String::as_str).collect()
    }

    /// Resolve a selector (`auto` or a registered name) for a model whose
    /// largest instance is `spec`, then apply the engine's guards.
    ///
    /// `auto` picks the free-fermion engine for `Delta = 0` open chains with
    /// `N > 14`, exact diagonalization otherwise.
    pub fn resolve(&self, selector: &str, spec: &ChainSpec, mode: SolveMode) -> Result<Arc<dyn Engine>> {
        let name = if selector == AUTO {
            if spec.delta == 0.0 && !spec.boundary.is_periodic() && spec.n_sites > AUTO_ED_MAX_SITES {
                FREE_FERMION
            } else {
                ED
            }
        } else {
            selector
        };
        let engine = self.get(name)?;
        engine.check(spec, mode)?;
        Ok(engine)
    }
}
