//! Command dispatch and artifact writing.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Map, Value};

use sdchain_core::analysis::{self, TStarOptions};
use sdchain_core::ed::{self, LanczosOptions};
use sdchain_core::engine::{Engine, EngineRegistry, SolveMode, AUTO};
use sdchain_core::fermion::ZERO_MODE_TOL;
use sdchain_core::{ChainSpec, Error};

use crate::config::{CommandKind, ConfigError, Format, RunConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Solver(Error),
    Io(String),
}

impl RunError {
    /// 1 invalid configuration, 2 guard or engine mismatch, 3 solver
    /// non-convergence.
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) | RunError::Io(_) => 1,
            RunError::Solver(e) => match e {
                Error::SizeGuard { .. } | Error::EngineMismatch { .. } => 2,
                Error::Convergence { .. } | Error::BracketNotFound { .. } => 3,
                _ => 1,
            },
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Solver(e) => write!(f, "{e}"),
            RunError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Solver(e)
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(usize),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(v) => v.clone(),
            Cell::Bool(v) => v.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) => json!(v),
            Cell::Text(v) => json!(v),
            Cell::Bool(v) => json!(v),
        }
    }
}

/// Tabular result of one command plus command-specific summary data.
#[derive(Debug, Clone)]
pub struct Payload {
    pub engine: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Value,
}

const SWEEP_COLUMNS: [&str; 8] = ["n_sites", "alpha", "delta", "temperature", "m", "cx", "cz", "concurrence"];

fn sweep_cells(r: &analysis::SweepRow) -> Vec<Cell> {
    vec![
        Cell::Int(r.n_sites),
        Cell::Float(r.alpha),
        Cell::Float(r.delta),
        Cell::Float(r.temperature),
        Cell::Float(r.m),
        Cell::Float(r.cx),
        Cell::Float(r.cz),
        Cell::Float(r.concurrence),
    ]
}

fn spec(cfg: &RunConfig, n: usize, alpha: f64) -> Result<ChainSpec, Error> {
    ChainSpec::new(n, alpha, cfg.delta, cfg.j, cfg.boundary)
}

/// Engine for the whole sweep, chosen from its largest chain.
fn resolve_engine(cfg: &RunConfig, mode: SolveMode) -> Result<std::sync::Arc<dyn Engine>, RunError> {
    let registry = EngineRegistry::builtin();
    if cfg.engine != AUTO && registry.get(&cfg.engine).is_err() {
        return Err(ConfigError(format!(
            "unknown engine `{}` (known: auto, {})",
            cfg.engine,
            registry.names().join(", ")
        ))
        .into());
    }
    let mut largest = None;
    for &alpha in &cfg.alpha {
        let s = spec(cfg, cfg.max_n(), alpha)?;
        registry.resolve(&cfg.engine, &s, mode)?;
        largest = Some(s);
    }
    Ok(registry.resolve(&cfg.engine, &largest.expect("non-empty alpha list"), mode)?)
}

pub fn execute(cfg: &RunConfig) -> Result<Payload, RunError> {
    match cfg.command {
        CommandKind::GsConc => gs_conc(cfg),
        CommandKind::ThermalConc => thermal_conc(cfg),
        CommandKind::Tstar => tstar(cfg),
        CommandKind::FitEta => fit_eta(cfg),
        CommandKind::EquivCheck => equiv_check(cfg),
    }
}

fn gs_conc(cfg: &RunConfig) -> Result<Payload, RunError> {
    let engine = resolve_engine(cfg, SolveMode::Ground)?;
    let mut rows = Vec::new();
    for &alpha in &cfg.alpha {
        let base = spec(cfg, cfg.n[0], alpha)?;
        let sweep = analysis::gs_concurrence_vs_n(engine.as_ref(), &base, &cfg.n)?;
        rows.extend(sweep.rows.iter().map(sweep_cells));
    }
    Ok(Payload {
        engine: engine.name().into(),
        columns: SWEEP_COLUMNS.to_vec(),
        rows,
        summary: Value::Null,
    })
}

fn thermal_conc(cfg: &RunConfig) -> Result<Payload, RunError> {
    let engine = resolve_engine(cfg, SolveMode::Thermal)?;
    let mut rows = Vec::new();
    let mut curves = Vec::new();
    for &alpha in &cfg.alpha {
        for &n in &cfg.n {
            let curve = analysis::thermal_concurrence_curve(engine.as_ref(), &spec(cfg, n, alpha)?, &cfg.t)?;
            if !curve.non_increasing {
                log::warn!("N={n} alpha={alpha}: concurrence rises by {:.3e} along the grid", curve.max_rise);
            }
            curves.push(json!({
                "n_sites": n,
                "alpha": alpha,
                "non_increasing": curve.non_increasing,
                "max_rise": curve.max_rise,
            }));
            rows.extend(curve.sweep.rows.iter().map(sweep_cells));
        }
    }
    Ok(Payload {
        engine: engine.name().into(),
        columns: SWEEP_COLUMNS.to_vec(),
        rows,
        summary: json!({ "monotonicity": curves }),
    })
}

fn tstar(cfg: &RunConfig) -> Result<Payload, RunError> {
    let engine = resolve_engine(cfg, SolveMode::Thermal)?;
    let mut rows = Vec::new();
    for &alpha in &cfg.alpha {
        for &n in &cfg.n {
            let r = analysis::find_tstar(engine.as_ref(), &spec(cfg, n, alpha)?, cfg.t_hint, &TStarOptions::default())?;
            rows.push(vec![
                Cell::Int(n),
                Cell::Float(alpha),
                Cell::Float(cfg.delta),
                Cell::Float(r.tstar),
                Cell::Float(r.bracket.0),
                Cell::Float(r.bracket.1),
                Cell::Float(r.g_bracket.0),
                Cell::Float(r.g_bracket.1),
                Cell::Int(r.sign_changes),
                Cell::Int(r.evaluations),
            ]);
        }
    }
    Ok(Payload {
        engine: engine.name().into(),
        columns: vec![
            "n_sites", "alpha", "delta", "tstar", "bracket_lo", "bracket_hi", "g_lo", "g_hi", "sign_changes",
            "evaluations",
        ],
        rows,
        summary: Value::Null,
    })
}

fn fit_eta(cfg: &RunConfig) -> Result<Payload, RunError> {
    let engine = resolve_engine(cfg, SolveMode::Thermal)?;
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for &alpha in &cfg.alpha {
        let mut points = Vec::new();
        for &n in &cfg.n {
            let r = analysis::find_tstar(engine.as_ref(), &spec(cfg, n, alpha)?, cfg.t_hint, &TStarOptions::default())?;
            points.push((n as f64, r.tstar));
        }
        let fit = analysis::fit_power_law(&points)?;
        for ((n, t), res) in cfg.n.iter().zip(&points).map(|(n, p)| (n, p.1)).zip(&fit.residuals) {
            rows.push(vec![
                Cell::Float(alpha),
                Cell::Int(*n),
                Cell::Float(t),
                Cell::Float(fit.amplitude_a * (*n as f64).powf(-fit.exponent_eta)),
                Cell::Float(*res),
            ]);
        }
        fits.push(json!({
            "alpha": alpha,
            "amplitude_a": fit.amplitude_a,
            "exponent_eta": fit.exponent_eta,
            "r_squared": fit.r_squared,
        }));
    }
    Ok(Payload {
        engine: engine.name().into(),
        columns: vec!["alpha", "n_sites", "tstar", "fitted", "log_residual"],
        rows,
        summary: json!({ "fits": fits }),
    })
}

/// Difference below which the deformed chain and a ring count as equal.
pub const EQUIVALENCE_TOL: f64 = 1e-6;

fn equiv_check(cfg: &RunConfig) -> Result<Payload, RunError> {
    if cfg.engine != AUTO {
        return Err(ConfigError("equiv-check picks its engine from delta; use --engine auto".into()).into());
    }
    let mut rows = Vec::new();
    let mut matches = Vec::new();
    let mut engines = Vec::new();
    for &n in &cfg.n {
        let rep = analysis::equivalence_check(n, cfg.delta)?;
        for r in &rep.rings {
            rows.push(vec![
                Cell::Int(n),
                Cell::Float(cfg.delta),
                Cell::Text(r.label.clone()),
                Cell::Float(rep.deformed.cx_abs),
                Cell::Float(rep.deformed.cz),
                Cell::Float(r.ring.cx_abs),
                Cell::Float(r.ring.cz),
                Cell::Float(r.diff_cx),
                Cell::Float(r.diff_cz),
                Cell::Bool(r.max_diff() <= EQUIVALENCE_TOL),
            ]);
        }
        matches.push(json!({
            "n_sites": n,
            "matching": rep.matching(EQUIVALENCE_TOL).map(|r| r.label.clone()),
        }));
        if !engines.contains(&rep.engine) {
            engines.push(rep.engine.clone());
        }
    }
    Ok(Payload {
        engine: engines.join("+"),
        columns: vec![
            "n_sites", "delta", "ring", "deformed_cx_abs", "deformed_cz", "ring_cx_abs", "ring_cz", "diff_cx",
            "diff_cz", "matches",
        ],
        rows,
        summary: json!({ "tolerance": EQUIVALENCE_TOL, "sectors": matches }),
    })
}

/// Model and sweep fields that determine the data; excludes paths, thread
/// counts and timings so identical runs give identical bytes.
#[derive(Serialize)]
struct DataMeta<'a> {
    command: &'static str,
    engine: &'a str,
    alpha: &'a [f64],
    delta: f64,
    j: f64,
    boundary: &'static str,
    n: &'a [usize],
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_hint: Option<f64>,
    version: &'static str,
    #[serde(skip_serializing_if = "Value::is_null")]
    summary: &'a Value,
}

pub fn render(cfg: &RunConfig, p: &Payload) -> Result<Vec<u8>, RunError> {
    match cfg.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&p.columns).map_err(|e| RunError::Io(e.to_string()))?;
            for row in &p.rows {
                w.write_record(row.iter().map(Cell::csv)).map_err(|e| RunError::Io(e.to_string()))?;
            }
            w.into_inner().map_err(|e| RunError::Io(e.to_string()))
        }
        Format::Json => {
            let meta = DataMeta {
                command: cfg.command.as_str(),
                engine: &p.engine,
                alpha: &cfg.alpha,
                delta: cfg.delta,
                j: cfg.j,
                boundary: cfg.boundary.as_str(),
                n: &cfg.n,
                t: (cfg.command == CommandKind::ThermalConc).then_some(cfg.t.as_slice()),
                t_hint: cfg.t_hint,
                version: VERSION,
                summary: &p.summary,
            };
            let rows: Vec<Value> = p
                .rows
                .iter()
                .map(|r| {
                    let obj: Map<String, Value> =
                        p.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json())).collect();
                    Value::Object(obj)
                })
                .collect();
            let mut out = serde_json::to_vec_pretty(&json!({ "meta": meta, "rows": rows }))
                .map_err(|e| RunError::Io(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn tolerances() -> Value {
    let lz = LanczosOptions::default();
    let ts = TStarOptions::default();
    json!({
        "lanczos_tol": lz.tol,
        "lanczos_tol_alpha_ge_3_5": 1e-13,
        "lanczos_max_matvecs": lz.max_matvecs,
        "ground_residual_factor": 1e-10,
        "degeneracy": ed::DEGENERACY_TOL,
        "zero_mode": ZERO_MODE_TOL,
        "tstar_scan_ratio": ts.scan_ratio,
        "tstar_max_temperature": ts.max_temperature,
        "tstar_rel_width": ts.rel_width,
        "monotone_slack": analysis::MONOTONE_SLACK,
    })
}

/// Runs one command, writing the data and, with an output path, the sidecar.
pub fn run(cfg: &RunConfig, seed: Option<String>) -> Result<(), RunError> {
    let start = Instant::now();
    let payload = execute(cfg)?;
    let data = render(cfg, &payload)?;
    let wall = start.elapsed().as_secs_f64();
    match &cfg.output {
        None => std::io::stdout().write_all(&data).map_err(|e| RunError::Io(e.to_string()))?,
        Some(path) => {
            fs::write(path, &data).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
            let meta = json!({
                "config": cfg,
                "engine": payload.engine,
                "tolerances": tolerances(),
                "wall_time_seconds": wall,
                "version": VERSION,
                "threads": rayon::current_num_threads(),
                "seed": seed,
                "summary": payload.summary,
            });
            let side = sidecar_path(path);
            let text = serde_json::to_string_pretty(&meta).map_err(|e| RunError::Io(e.to_string()))?;
            fs::write(&side, text + "\n").map_err(|e| RunError::Io(format!("{}: {e}", side.display())))?;
        }
    }
    log::info!("{} finished in {wall:.3} s with engine {}", cfg.command.as_str(), payload.engine);
    Ok(())
}
