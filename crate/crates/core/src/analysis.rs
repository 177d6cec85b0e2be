//! Sweeps, vanishing-temperature search, power-law fits and the
//! deformed-chain / ring comparison.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ed::{self, EdState};
use crate::engine::{Engine, ExactDiagonalization, FreeFermion, SolveMode, ThermalModel};
use crate::entanglement::{concurrence_argument, concurrence_from_correlators};
use crate::error::{Error, Result};
use crate::fermion::{self, RingSector};
use crate::model::{Boundary, ChainSpec};
use crate::observables::EdgeObservables;

/// One sweep point. Field order is the CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n_sites: usize,
    pub alpha: f64,
    pub delta: f64,
    pub temperature: f64,
    pub m: f64,
    pub cx: f64,
    pub cz: f64,
    pub concurrence: f64,
}

impl SweepRow {
    pub fn new(spec: &ChainSpec, obs: &EdgeObservables) -> Result<Self> {
        Ok(Self {
            n_sites: spec.n_sites,
            alpha: spec.alpha,
            delta: spec.delta,
            temperature: obs.temperature,
            m: obs.magnetization_m,
            cx: obs.cx,
            cz: obs.cz,
            concurrence: concurrence_from_correlators(obs)?.value,
        })
    }

    pub fn observables(&self) -> EdgeObservables {
        EdgeObservables {
            magnetization_m: self.m,
            cx: self.cx,
            cz: self.cz,
            temperature: self.temperature,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub engine: String,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Rejects repeated `(N, alpha, delta, T)` keys.
    pub fn new(engine: &str, rows: Vec<SweepRow>) -> Result<Self> {
        let mut keys: Vec<_> = rows
            .iter()
            .map(|r| (r.n_sites, r.alpha.to_bits(), r.delta.to_bits(), r.temperature.to_bits()))
            .collect();
        keys.sort_unstable();
        if keys.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("sweep contains duplicate points".into()));
        }
        Ok(Self { engine: engine.to_string(), rows })
    }

    pub fn concurrences(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.concurrence).collect()
    }
}

/// Ground-state edge concurrence for each chain length, in input order.
pub fn gs_concurrence_vs_n(engine: &dyn Engine, base: &ChainSpec, n_list: &[usize]) -> Result<SweepResult> {
    if n_list.is_empty() {
        return Err(Error::InvalidInput("empty N list".into()));
    }
    let specs = n_list
        .iter()
        .map(|&n| base.with_n_sites(n))
        .collect::<Result<Vec<_>>>()?;
    for s in &specs {
        engine.check(s, SolveMode::Ground)?;
    }
    let rows = specs
        .par_iter()
        .map(|s| SweepRow::new(s, &engine.ground_observables(s)?))
        .collect::<Result<Vec<_>>>()?;
    SweepResult::new(engine.name(), rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalCurve {
    pub sweep: SweepResult,
    /// Concurrence never rises by more than `1e-9` along the grid.
    pub non_increasing: bool,
    /// Largest rise between consecutive grid points (0 if none).
    pub max_rise: f64,
}

pub const MONOTONE_SLACK: f64 = 1e-9;

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::InvalidInput("empty temperature grid".into()));
    }
    if t_grid.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::Domain("temperatures must be finite and non-negative".into()));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("temperature grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Edge concurrence of one chain along a temperature grid.
pub fn thermal_concurrence_curve(engine: &dyn Engine, spec: &ChainSpec, t_grid: &[f64]) -> Result<ThermalCurve> {
    check_grid(t_grid)?;
    let model = engine.thermal(spec)?;
    let rows = t_grid
        .par_iter()
        .map(|&t| SweepRow::new(spec, &model.observables(t)?))
        .collect::<Result<Vec<_>>>()?;
    let max_rise = rows
        .windows(2)
        .map(|w| w[1].concurrence - w[0].concurrence)
        .fold(0.0_f64, f64::max);
    Ok(ThermalCurve {
        sweep: SweepResult::new(engine.name(), rows)?,
        non_increasing: max_rise <= MONOTONE_SLACK,
        max_rise,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TStarOptions {
    pub scan_ratio: f64,
    /// Upper scan limit in units of `J`.
    pub max_temperature: f64,
    /// Lower limit for the downward scan when `g(t_hint/10) <= 0`.
    pub min_temperature: f64,
    /// Bisection stops once `hi - lo <= rel_width * hi`.
    pub rel_width: f64,
}

impl Default for TStarOptions {
    fn default() -> Self {
        Self {
            scan_ratio: 1.3,
            max_temperature: 10.0,
            min_temperature: 1e-12,
            rel_width: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TStar {
    pub tstar: f64,
    /// Final bisection bracket with `g(lo) > 0 >= g(hi)`.
    pub bracket: (f64, f64),
    pub g_bracket: (f64, f64),
    /// Sign changes seen during the scan, both directions.
    pub sign_changes: usize,
    pub scan_range: (f64, f64),
    pub evaluations: usize,
}

/// Largest zero crossing of `g` from positive to non-positive.
///
/// `g(0)` must be positive. The scan is geometric from `t_hint / 10` and
/// runs one decade past the first crossing (or to `opts.max_temperature`).
pub fn locate_vanishing_temperature<F>(mut g: F, t_hint: f64, opts: &TStarOptions) -> Result<TStar>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(t_hint.is_finite() && t_hint > 0.0) {
        return Err(Error::Domain(format!("t_hint must be positive, got {t_hint}")));
    }
    if !(opts.scan_ratio > 1.0) {
        return Err(Error::Domain("scan ratio must exceed 1".into()));
    }
    let mut evaluations = 0;
    let mut eval = |t: f64| -> Result<f64> {
        evaluations += 1;
        g(t)
    };
    let g0 = eval(0.0)?;
    if !(g0 > 0.0) {
        return Err(Error::NoPositiveConcurrence(g0));
    }
    let cap = opts.max_temperature;
    let mut t = (t_hint / 10.0).min(cap);
    let mut gt = eval(t)?;
    while gt <= 0.0 {
        t /= opts.scan_ratio;
        if t < opts.min_temperature {
            return Err(Error::BracketNotFound { lo: opts.min_temperature, hi: t_hint / 10.0 });
        }
        gt = eval(t)?;
    }
    let scan_lo = t;
    let mut last_drop: Option<(f64, f64, f64, f64)> = None;
    let mut sign_changes = 0;
    let mut stop_at = cap;
    while t < cap {
        let next = (t * opts.scan_ratio).min(cap);
        let gn = eval(next)?;
        if (gt > 0.0) != (gn > 0.0) {
            sign_changes += 1;
            if gt > 0.0 {
                if last_drop.is_none() {
                    stop_at = (10.0 * next).min(cap);
                }
                last_drop = Some((t, next, gt, gn));
            }
        }
        t = next;
        gt = gn;
        if t >= stop_at {
            break;
        }
    }
    let scan_range = (scan_lo, t);
    let Some((mut lo, mut hi, mut glo, mut ghi)) = last_drop else {
        return Err(Error::BracketNotFound { lo: scan_lo, hi: t });
    };
    while hi - lo > opts.rel_width * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = eval(mid)?;
        if gm > 0.0 {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
            ghi = gm;
        }
    }
    Ok(TStar {
        tstar: 0.5 * (lo + hi),
        bracket: (lo, hi),
        g_bracket: (glo, ghi),
        sign_changes,
        scan_range,
        evaluations,
    })
}

/// Concurrence argument `g(T) = 2|C^x| - sqrt((1/4 + C^z)^2 - M^2)`.
pub fn concurrence_gap(model: &dyn ThermalModel, temperature: f64) -> Result<f64> {
    concurrence_argument(&model.observables(temperature)?)
}

/// Temperature above which the edge concurrence stays zero.
///
/// `t_hint` defaults to the edge bond strength. The scan cap is
/// `opts.max_temperature` in units of `J`.
pub fn find_tstar(engine: &dyn Engine, spec: &ChainSpec, t_hint: Option<f64>, opts: &TStarOptions) -> Result<TStar> {
    let model = engine.thermal(spec)?;
    let hint = t_hint.unwrap_or_else(|| spec.edge_bond().abs());
    let opts = TStarOptions {
        max_temperature: opts.max_temperature * spec.j_coupling.abs(),
        ..*opts
    };
    locate_vanishing_temperature(|t| concurrence_gap(model.as_ref(), t), hint, &opts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TStarFit {
    pub points: Vec<(f64, f64)>,
    pub amplitude_a: f64,
    pub exponent_eta: f64,
    pub r_squared: f64,
    /// `ln T* - (ln A - eta ln N)` per point.
    pub residuals: Vec<f64>,
}

/// Least squares of `ln T* = ln A - eta ln N`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<TStarFit> {
    if points.len() < 3 {
        return Err(Error::InvalidInput(format!("need at least 3 points, got {}", points.len())));
    }
    if points.iter().any(|&(n, t)| !(n > 0.0 && t > 0.0 && n.is_finite() && t.is_finite())) {
        return Err(Error::Domain("fit points must be positive and finite".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let scale = xs.iter().map(|x| x.abs()).fold(1.0, f64::max);
    if sxx <= 1e-24 * scale * scale * k {
        return Err(Error::DegenerateFit("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y - (intercept + slope * x)).collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) } else { 1.0 };
    Ok(TStarFit {
        points: points.to_vec(),
        amplitude_a: intercept.exp(),
        exponent_eta: -slope,
        r_squared,
        residuals,
    })
}

/// Nearest-neighbour (ring) or end-to-end (deformed chain) correlators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairValues {
    pub cx_abs: f64,
    pub cz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingComparison {
    /// `periodic`/`antiperiodic` fermion sector, or `spin-ring` for ED.
    pub label: String,
    pub ring: PairValues,
    pub diff_cx: f64,
    pub diff_cz: f64,
}

impl RingComparison {
    pub fn max_diff(&self) -> f64 {
        self.diff_cx.max(self.diff_cz)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub n_sites: usize,
    pub delta: f64,
    pub engine: String,
    pub deformed: PairValues,
    pub rings: Vec<RingComparison>,
}

impl EquivalenceReport {
    /// Closest ring, if within `tol` on both correlators.
    pub fn matching(&self, tol: f64) -> Option<&RingComparison> {
        self.rings
            .iter()
            .filter(|r| r.max_diff() <= tol)
            .min_by(|a, b| a.max_diff().total_cmp(&b.max_diff()))
    }
}

/// Largest ring handled by exact diagonalization in the comparison.
pub const EQUIVALENCE_ED_MAX_SITES: usize = 20;

/// Compares end-to-end correlators of the `alpha = 2` deformed chain with
/// nearest-neighbour correlators of the uniform ring of the same length.
///
/// `Delta = 0` runs free fermions against both fermion boundary sectors;
/// otherwise exact diagonalization of the spin ring.
pub fn equivalence_check(n_sites: usize, delta: f64) -> Result<EquivalenceReport> {
    if n_sites < 2 || n_sites % 2 != 0 {
        return Err(Error::Domain(format!("needs even N >= 2, got {n_sites}")));
    }
    let deformed_spec = ChainSpec::deformed(n_sites, 2.0, delta)?;
    let compare = |label: &str, deformed: PairValues, cx: f64, cz: f64| RingComparison {
        label: label.to_string(),
        ring: PairValues { cx_abs: cx.abs(), cz },
        diff_cx: (deformed.cx_abs - cx.abs()).abs(),
        diff_cz: (deformed.cz - cz).abs(),
    };
    if delta == 0.0 {
        let obs = FreeFermion.ground_observables(&deformed_spec)?;
        let deformed = PairValues { cx_abs: obs.cx.abs(), cz: obs.cz };
        let rings = [RingSector::Periodic, RingSector::Antiperiodic]
            .into_iter()
            .map(|sector| {
                let modes = fermion::ring_modes(n_sites, 0.5 * deformed_spec.j_coupling, sector)?;
                let g = fermion::green_function(&modes, 0.0)?;
                let (cx, cz) = fermion::neighbour_correlators(&g, 0);
                Ok(compare(sector.as_str(), deformed, cx, cz))
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(EquivalenceReport {
            n_sites,
            delta,
            engine: FreeFermion.name().into(),
            deformed,
            rings,
        });
    }
    if n_sites > EQUIVALENCE_ED_MAX_SITES {
        return Err(Error::SizeGuard {
            what: "equivalence ring sites",
            limit: EQUIVALENCE_ED_MAX_SITES,
            requested: n_sites,
        });
    }
    let obs = ExactDiagonalization.ground_observables(&deformed_spec)?;
    let deformed = PairValues { cx_abs: obs.cx.abs(), cz: obs.cz };
    let ring_spec = ChainSpec::new(n_sites, 0.0, delta, deformed_spec.j_coupling, Boundary::UniformPeriodic)?;
    let ring = ed::ground_state(&ring_spec)?;
    let (cx, cz) = ed::pair_correlators(&ring.state, 0, 1)?;
    Ok(EquivalenceReport {
        n_sites,
        delta,
        engine: ExactDiagonalization.name().into(),
        deformed,
        rings: vec![compare("spin-ring", deformed, cx, cz)],
    })
}

/// Edge density matrix and correlator concurrences of an ED state agree.
pub fn dual_formula_gap(state: EdState<'_>, temperature: f64) -> Result<f64> {
    let rho = ed::reduced_dm_edges(state, temperature)?;
    let obs = ed::edge_observables(state, temperature)?;
    let a = crate::entanglement::concurrence_from_dm(&rho)?.value;
    let b = concurrence_from_correlators(&obs)?.value;
    Ok((a - b).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<_> = [4.0, 8.0, 16.0, 32.0].iter().map(|&n: &f64| (n, 2.0 * n.powi(-3))).collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.amplitude_a - 2.0).abs() < 1e-12);
        assert!((fit.exponent_eta - 3.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(fit.residuals.iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn fit_errors() {
        assert!(fit_power_law(&[(2.0, 1.0), (3.0, 1.0)]).is_err());
        assert!(matches!(
            fit_power_law(&[(4.0, 1.0), (4.0, 2.0), (4.0, 3.0)]),
            Err(Error::DegenerateFit(_))
        ));
        assert!(fit_power_law(&[(4.0, 1.0), (5.0, -2.0), (6.0, 3.0)]).is_err());
    }

    proptest! {
        #[test]
        fn fit_scale_covariance(
            ts in proptest::collection::vec(1e-4f64..1.0, 3..8),
            c in 1e-3f64..1e3,
        ) {
            let pts: Vec<_> = ts.iter().enumerate().map(|(i, &t)| ((4 + 3 * i) as f64, t)).collect();
            let scaled: Vec<_> = pts.iter().map(|&(n, t)| (n, c * t)).collect();
            let a = fit_power_law(&pts).unwrap();
            let b = fit_power_law(&scaled).unwrap();
            prop_assert!((a.exponent_eta - b.exponent_eta).abs() < 1e-12 * (1.0 + a.exponent_eta.abs()) + 1e-12);
            prop_assert!((b.amplitude_a / (c * a.amplitude_a) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn located_root_brackets_sign_change(root in 0.01f64..5.0, hint in 0.01f64..10.0) {
            let g = |t: f64| Ok(root - t);
            let r = locate_vanishing_temperature(g, hint, &TStarOptions::default()).unwrap();
            prop_assert!((r.tstar - root).abs() <= 1e-9 * root);
            prop_assert!(root - r.tstar * (1.0 - 1e-6) >= -1e-9);
            prop_assert!(root - r.tstar * (1.0 + 1e-6) <= 1e-9);
        }
    }

    #[test]
    fn largest_crossing_of_reentrant_curve() {
        // positive on (0, 1) and (2, 3)
        let g = |t: f64| Ok(-(t - 1.0) * (t - 2.0) * (t - 3.0));
        let r = locate_vanishing_temperature(g, 1.0, &TStarOptions::default()).unwrap();
        assert!((r.tstar - 3.0).abs() < 1e-8);
        assert_eq!(r.sign_changes, 3);
    }

    #[test]
    fn search_failures() {
        let opts = TStarOptions::default();
        assert!(matches!(
            locate_vanishing_temperature(|t| Ok(-1.0 - t), 1.0, &opts),
            Err(Error::NoPositiveConcurrence(_))
        ));
        assert!(matches!(
            locate_vanishing_temperature(|t| Ok(1.0 + t), 1.0, &opts),
            Err(Error::BracketNotFound { .. })
        ));
        assert!(locate_vanishing_temperature(|t| Ok(1.0 - t), -1.0, &opts).is_err());
        // positive only at T = 0
        assert!(matches!(
            locate_vanishing_temperature(|t| Ok(if t == 0.0 { 1.0 } else { -1.0 }), 1.0, &opts),
            Err(Error::BracketNotFound { .. })
        ));
    }

    #[test]
    fn hint_above_root_scans_down() {
        let r = locate_vanishing_temperature(|t| Ok(1e-3 - t), 5.0, &TStarOptions::default()).unwrap();
        assert!((r.tstar - 1e-3).abs() < 1e-12);
    }

    #[test]
    fn grid_validation() {
        let spec = ChainSpec::deformed(4, 2.0, 1.0).unwrap();
        let ed = ExactDiagonalization;
        assert!(thermal_concurrence_curve(&ed, &spec, &[0.1, 0.1]).is_err());
        assert!(thermal_concurrence_curve(&ed, &spec, &[0.2, 0.1]).is_err());
        assert!(thermal_concurrence_curve(&ed, &spec, &[]).is_err());
        assert!(thermal_concurrence_curve(&ed, &spec, &[-1.0, 0.1]).is_err());
        let curve = thermal_concurrence_curve(&ed, &spec, &[0.01, 0.1, 1.0, 100.0]).unwrap();
        assert!(curve.non_increasing);
        assert_eq!(curve.sweep.rows.last().unwrap().concurrence, 0.0);
    }

    #[test]
    fn duplicate_rows_rejected() {
        let spec = ChainSpec::deformed(2, 2.0, 1.0).unwrap();
        let obs = ExactDiagonalization.ground_observables(&spec).unwrap();
        let row = SweepRow::new(&spec, &obs).unwrap();
        assert!(SweepResult::new("ed", vec![row, row]).is_err());
        assert!(gs_concurrence_vs_n(&ExactDiagonalization, &spec, &[]).is_err());
    }

    #[test]
    fn two_site_chain_is_maximally_entangled() {
        for delta in [0.0, 1.0] {
            for alpha in [0.5, 2.0, 4.0] {
                let spec = ChainSpec::deformed(2, alpha, delta).unwrap();
                let sweep = gs_concurrence_vs_n(&ExactDiagonalization, &spec, &[2]).unwrap();
                assert!((sweep.rows[0].concurrence - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_site_equivalence() {
        for delta in [0.0, 1.0] {
            let rep = equivalence_check(2, delta).unwrap();
            assert!(rep.matching(1e-12).is_some(), "{rep:?}");
        }
        assert!(equivalence_check(5, 1.0).is_err());
        assert!(matches!(equivalence_check(22, 1.0), Err(Error::SizeGuard { .. })));
    }
}
