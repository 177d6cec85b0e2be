//! Edge-to-edge entanglement in XXZ spin chains whose bond couplings follow
//! a sinusoidal profile, `J sin^alpha((pi/N)(x - 1/2))`.
//!
//! Two solvers compute the edge correlators: exact diagonalization for any
//! anisotropy, and a free-fermion solver for the XY point. Both are exposed
//! through the [`engine`] registry.

pub mod analysis;
pub mod ed;
pub mod engine;
pub mod entanglement;
pub mod error;
pub mod fermion;
pub mod linalg;
pub mod model;
pub mod observables;
pub mod validation;

pub use error::{Error, Result};
pub use model::{bond_profile, rescale_factor, Boundary, ChainSpec, CouplingProfile};
pub use observables::EdgeObservables;
