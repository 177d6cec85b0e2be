//! Built-in acceptance checks, run by the `validate` command.

use std::time::{Duration, Instant};

use crate::analysis::{self, TStarOptions};
use crate::ed::{self, EdState};
use crate::engine::{Engine, EngineRegistry, ExactDiagonalization, FreeFermion, SolveMode, AUTO};
use crate::entanglement::concurrence_from_correlators;
use crate::error::Result;
use crate::fermion::{self, ModeSet};
use crate::model::{rescale_factor, ChainSpec};

/// Infinite-chain XY value of the edge concurrence at `alpha = 2`.
pub const XY_LIMIT: f64 = 0.3393;
/// Infinite-chain Heisenberg value of the edge concurrence at `alpha = 2`.
pub const HEISENBERG_LIMIT: f64 = 0.3863;

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl std::fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:>2} {}: {} ({:.2?})",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.elapsed
        )
    }
}

pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    check: fn() -> Result<(bool, String)>,
}

impl Criterion {
    /// Runs the check; solver errors become failures.
    pub fn run(&self) -> CriterionReport {
        let start = Instant::now();
        let (passed, detail) = match (self.check)() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        CriterionReport {
            id: self.id,
            title: self.title,
            passed,
            detail,
            elapsed: start.elapsed(),
        }
    }
}

/// Profile function signature used by the reflection check.
pub type ProfileFn = dyn Fn(usize, f64, f64) -> Result<f64>;

/// `f(N, alpha, x)` equals `f(N, alpha, N + 1 - x)` at every bond midpoint.
pub fn reflection_symmetry(profile: &ProfileFn) -> Result<(bool, String)> {
    let mut worst = 0.0_f64;
    for n in [2usize, 3, 8, 13, 64] {
        for alpha in [0.5, 1.0, 2.0, 3.0] {
            for l in 1..n {
                let x = l as f64 + 0.5;
                let a = profile(n, alpha, x)?;
                let b = profile(n, alpha, (n + 1) as f64 - x)?;
                worst = worst.max((a - b).abs());
            }
        }
    }
    Ok((worst <= 1e-14, format!("max |f(x) - f(N+1-x)| = {worst:.3e} (tol 1e-14)")))
}

fn c00_reflection() -> Result<(bool, String)> {
    reflection_symmetry(&rescale_factor)
}

fn gs_concurrence(engine: &dyn Engine, spec: &ChainSpec) -> Result<f64> {
    Ok(concurrence_from_correlators(&engine.ground_observables(spec)?)?.value)
}

fn c01_xy_limit() -> Result<(bool, String)> {
    let c = gs_concurrence(&FreeFermion, &ChainSpec::deformed(256, 2.0, 0.0)?)?;
    let err = (c - XY_LIMIT).abs();
    Ok((err <= 5e-3, format!("C(N=256) = {c:.6}, |C - {XY_LIMIT}| = {err:.2e} (tol 5e-3)")))
}

fn c02_heisenberg_limit() -> Result<(bool, String)> {
    let c = gs_concurrence(&ExactDiagonalization, &ChainSpec::deformed(20, 2.0, 1.0)?)?;
    let err = (c - HEISENBERG_LIMIT).abs();
    Ok((err <= 1e-2, format!("C(N=20) = {c:.6}, |C - {HEISENBERG_LIMIT}| = {err:.2e} (tol 1e-2)")))
}

const CROSS_N: [usize; 3] = [8, 10, 12];
const CROSS_ALPHA: [f64; 3] = [1.0, 2.0, 3.0];
const CROSS_T: [f64; 3] = [0.0, 0.1, 0.5];

fn c03_cross_engine() -> Result<(bool, String)> {
    let mut worst = 0.0_f64;
    for n in CROSS_N {
        for alpha in CROSS_ALPHA {
            let spec = ChainSpec::deformed(n, alpha, 0.0)?;
            let ens = ed::full_spectrum(&spec)?;
            let gs = ed::ground_state(&spec)?;
            let modes = ModeSet::for_chain(&spec)?;
            for t in CROSS_T {
                let a = if t == 0.0 {
                    ed::edge_observables(EdState::Pure(&gs.state), 0.0)?
                } else {
                    ed::edge_observables(EdState::Thermal(&ens), t)?
                };
                let b = fermion::edge_observables_ff(&modes, t)?;
                worst = worst.max((a.cx - b.cx).abs()).max((a.cz - b.cz).abs());
            }
        }
    }
    Ok((worst <= 1e-8, format!("max |ED - FF| over 27 points = {worst:.2e} (tol 1e-8)")))
}

fn c04_dual_formula() -> Result<(bool, String)> {
    let mut worst = 0.0_f64;
    for n in CROSS_N {
        for alpha in CROSS_ALPHA {
            let spec = ChainSpec::deformed(n, alpha, 0.0)?;
            let ens = ed::full_spectrum(&spec)?;
            let gs = ed::ground_state(&spec)?;
            for t in CROSS_T {
                let gap = if t == 0.0 {
                    analysis::dual_formula_gap(EdState::Pure(&gs.state), 0.0)?
                } else {
                    analysis::dual_formula_gap(EdState::Thermal(&ens), t)?
                };
                worst = worst.max(gap);
            }
        }
    }
    Ok((worst <= 1e-10, format!("max |C_dm - C_corr| = {worst:.2e} (tol 1e-10)")))
}

fn c05_pfaffian() -> Result<(bool, String)> {
    let (mut worst_pf, mut worst_det) = (0.0_f64, 0.0_f64);
    for n in 2..=14 {
        for alpha in CROSS_ALPHA {
            let modes = ModeSet::for_chain(&ChainSpec::deformed(n, alpha, 0.0)?)?;
            for t in [0.0, 0.1, 1.0] {
                let g = fermion::green_function(&modes, t)?;
                let det_path = fermion::edge_cx_determinant(&g);
                let pf_path = fermion::edge_cx_pfaffian(&g)?;
                worst_pf = worst_pf.max((det_path - pf_path).abs());
                let m = fermion::string_contraction_matrix(&g);
                let pf = fermion::pfaffian::pfaffian(&m)?;
                let det = m.determinant();
                // floor keeps exactly singular matrices from dividing by zero
                worst_det = worst_det.max((pf * pf - det).abs() / det.abs().max(1e-14));
            }
        }
    }
    let ok = worst_pf <= 1e-10 && worst_det <= 1e-8;
    Ok((
        ok,
        format!("max |Pf - det| path = {worst_pf:.2e} (tol 1e-10), max rel |Pf^2 - det| = {worst_det:.2e} (tol 1e-8)"),
    ))
}

pub const ETA_SIZES: [usize; 7] = [8, 12, 16, 24, 32, 48, 64];

/// `T*(N)` for the XY chain and its power-law fit.
pub fn eta_fit(alpha: f64) -> Result<analysis::TStarFit> {
    let mut points = Vec::with_capacity(ETA_SIZES.len());
    for n in ETA_SIZES {
        let spec = ChainSpec::deformed(n, alpha, 0.0)?;
        let ts = analysis::find_tstar(&FreeFermion, &spec, None, &TStarOptions::default())?;
        points.push((n as f64, ts.tstar));
    }
    analysis::fit_power_law(&points)
}

fn c06_eta() -> Result<(bool, String)> {
    let f2 = eta_fit(2.0)?;
    let f3 = eta_fit(3.0)?;
    let ok = (f2.exponent_eta - 2.0).abs() <= 0.2 && (f3.exponent_eta - 3.0).abs() <= 0.3;
    Ok((
        ok,
        format!(
            "eta(alpha=2) = {:.4} (tol 0.2), eta(alpha=3) = {:.4} (tol 0.3)",
            f2.exponent_eta, f3.exponent_eta
        ),
    ))
}

fn c07_dichotomy() -> Result<(bool, String)> {
    let c = |alpha, n| gs_concurrence(&FreeFermion, &ChainSpec::deformed(n, alpha, 0.0)?);
    let (a64, a256) = (c(2.0, 64)?, c(2.0, 256)?);
    let (b64, b256) = (c(1.0, 64)?, c(1.0, 256)?);
    let stable = (a64 - a256).abs() < 2e-3;
    let decays = b64 - b256 > 0.1 * b64;
    Ok((
        stable && decays,
        format!(
            "alpha=2: |C64 - C256| = {:.2e} (< 2e-3: {stable}); alpha=1: C64 = {b64:.4e}, C256 = {b256:.4e} (drop > 10%: {decays})",
            (a64 - a256).abs()
        ),
    ))
}

fn c08_alpha_monotone() -> Result<(bool, String)> {
    let reg = EngineRegistry::builtin();
    let mut ok = true;
    let mut parts = Vec::new();
    for delta in [0.0, 1.0] {
        let mut cs = Vec::new();
        for alpha in [2.0, 2.5, 3.0] {
            let spec = ChainSpec::deformed(20, alpha, delta)?;
            let engine = reg.resolve(AUTO, &spec, SolveMode::Ground)?;
            cs.push(gs_concurrence(engine.as_ref(), &spec)?);
        }
        ok &= cs.windows(2).all(|w| w[1] > w[0]);
        parts.push(format!("delta={delta}: {:.5} < {:.5} < {:.5}", cs[0], cs[1], cs[2]));
    }
    Ok((ok, parts.join("; ")))
}

fn c09_equivalence() -> Result<(bool, String)> {
    let heis = analysis::equivalence_check(12, 1.0)?;
    let xy = analysis::equivalence_check(64, 0.0)?;
    let heis_diff = heis.rings[0].max_diff();
    let xy_match = xy.matching(1e-6);
    let ok = heis_diff <= 1e-6 && xy_match.is_some();
    let xy_text = match xy_match {
        Some(r) => format!("{} sector matches, diff {:.2e}", r.label, r.max_diff()),
        None => "no sector within 1e-6".into(),
    };
    Ok((ok, format!("N=12 delta=1: diff {heis_diff:.2e}; N=64 delta=0: {xy_text} (tol 1e-6)")))
}

fn c10_thermal_limits() -> Result<(bool, String)> {
    let reg = EngineRegistry::builtin();
    let mut ok = true;
    let mut parts = Vec::new();
    for delta in [0.0, 1.0] {
        let spec = ChainSpec::deformed(12, 2.0, delta)?;
        let engine = reg.resolve(AUTO, &spec, SolveMode::Thermal)?;
        let curve = analysis::thermal_concurrence_curve(engine.as_ref(), &spec, &[1e-4, 1e-2, 1.0, 100.0])?;
        let c_low = curve.sweep.rows[0].concurrence;
        let c_high = curve.sweep.rows[3].concurrence;
        let c0 = gs_concurrence(engine.as_ref(), &spec)?;
        let good = c_high == 0.0 && (c_low - c0).abs() <= 1e-4;
        ok &= good;
        parts.push(format!(
            "delta={delta}: C(100) = {c_high}, |C(1e-4) - C(0)| = {:.2e}",
            (c_low - c0).abs()
        ));
    }
    Ok((ok, parts.join("; ")))
}

/// Reflection pre-check followed by the ten numbered criteria.
pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 0, title: "profile reflection symmetry", check: c00_reflection },
        Criterion { id: 1, title: "XY limiting concurrence", check: c01_xy_limit },
        Criterion { id: 2, title: "Heisenberg limiting concurrence", check: c02_heisenberg_limit },
        Criterion { id: 3, title: "cross-engine correlators", check: c03_cross_engine },
        Criterion { id: 4, title: "dual concurrence formulas", check: c04_dual_formula },
        Criterion { id: 5, title: "Pfaffian-determinant consistency", check: c05_pfaffian },
        Criterion { id: 6, title: "eta = alpha scaling", check: c06_eta },
        Criterion { id: 7, title: "long-distance entanglement dichotomy", check: c07_dichotomy },
        Criterion { id: 8, title: "alpha monotonicity", check: c08_alpha_monotone },
        Criterion { id: 9, title: "periodic equivalence", check: c09_equivalence },
        Criterion { id: 10, title: "thermal limits", check: c10_thermal_limits },
    ]
}

pub fn run_suite() -> Vec<CriterionReport> {
    criteria().iter().map(Criterion::run).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflection_check_catches_shifted_profile() {
        let (ok, _) = reflection_symmetry(&rescale_factor).unwrap();
        assert!(ok);
        let tampered = |n: usize, alpha: f64, x: f64| -> Result<f64> {
            Ok((std::f64::consts::PI / n as f64 * (x + 0.5)).sin().abs().powf(alpha))
        };
        let (ok, detail) = reflection_symmetry(&tampered).unwrap();
        assert!(!ok, "{detail}");
    }

    #[test]
    fn errors_become_failures() {
        let c = Criterion {
            id: 99,
            title: "broken",
            check: || Err(crate::Error::Domain("boom".into())),
        };
        let r = c.run();
        assert!(!r.passed);
        assert!(r.to_string().starts_with("[FAIL] 99 broken: error: domain"), "{r}");
    }

    #[test]
    fn suite_layout() {
        let ids: Vec<u32> = criteria().iter().map(|c| c.id).collect();
        assert_eq!(ids, (0..=10).collect::<Vec<_>>());
    }
}
