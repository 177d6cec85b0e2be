//! Run configuration: built-in defaults, then a `key = value` file, then
//! command-line flags, then `SDCHAIN_THREADS`.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::Serialize;

use sdchain_core::engine::AUTO;
use sdchain_core::Boundary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    GsConc,
    ThermalConc,
    Tstar,
    FitEta,
    EquivCheck,
}

impl CommandKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::GsConc => "gs-conc",
            Self::ThermalConc => "thermal-conc",
            Self::Tstar => "tstar",
            Self::FitEta => "fit-eta",
            Self::EquivCheck => "equiv-check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by the sweep commands. Every flag is optional so that file
/// values survive when the flag is absent.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Flat `key = value` configuration file; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Deformation exponent(s), comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub alpha: Option<Vec<f64>>,
    /// Exchange anisotropy
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Overall coupling J
    #[arg(long, allow_negative_numbers = true)]
    pub j: Option<f64>,
    /// open-deformed, uniform-open or uniform-periodic
    #[arg(long)]
    pub boundary: Option<String>,
    /// Chain length(s), comma separated
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Temperatures k_B T / J, comma separated and strictly increasing
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub t: Option<Vec<f64>>,
    /// auto, ed or free-fermion
    #[arg(long)]
    pub engine: Option<String>,
    /// Data file; standard output when absent
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads, or `auto`
    #[arg(long)]
    pub threads: Option<String>,
    /// Starting temperature scale for the T* scan
    #[arg(long)]
    pub t_hint: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub alpha: Vec<f64>,
    pub delta: f64,
    pub j: f64,
    pub boundary: Boundary,
    pub n: Vec<usize>,
    pub t: Vec<f64>,
    pub engine: String,
    pub output: Option<PathBuf>,
    pub format: Format,
    /// 0 lets the pool pick.
    pub threads: usize,
    pub t_hint: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid configuration: {}", self.0)
    }
}

/// Default temperature grid: 25 points log-spaced from 1e-4 to 100.
pub fn default_grid() -> Vec<f64> {
    (0..25).map(|k| 10f64.powf(-4.0 + 0.25 * k as f64)).collect()
}

impl RunConfig {
    pub fn defaults(command: CommandKind) -> Self {
        let n = match command {
            CommandKind::GsConc => vec![8, 16, 32, 64],
            CommandKind::ThermalConc => vec![12],
            CommandKind::Tstar => vec![8],
            CommandKind::FitEta => vec![8, 12, 16, 24, 32, 48, 64],
            CommandKind::EquivCheck => vec![12],
        };
        Self {
            command,
            alpha: vec![2.0],
            delta: 0.0,
            j: 1.0,
            boundary: Boundary::OpenDeformed,
            n,
            t: default_grid(),
            engine: AUTO.to_string(),
            output: None,
            format: Format::Csv,
            threads: 0,
            t_hint: None,
        }
    }

    /// Resolves defaults, file, flags and environment in that order.
    pub fn resolve(command: CommandKind, args: &RunArgs, env_threads: Option<&str>) -> Result<Self, ConfigError> {
        let mut cfg = Self::defaults(command);
        if let Some(path) = &args.config {
            cfg.apply_file(path)?;
        }
        cfg.apply_args(args)?;
        if let Some(v) = env_threads {
            cfg.threads = parse_threads(v).map_err(|e| ConfigError(format!("SDCHAIN_THREADS: {}", e.0)))?;
        }
        cfg.check()?;
        Ok(cfg)
    }

    fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected `key = value`", lineno + 1)))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| ConfigError(format!("line {}: {}", lineno + 1, e.0)))?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key.replace('-', "_").as_str() {
            "command" => {
                let c = CommandKind::from_str(value, true).map_err(ConfigError)?;
                if c != self.command {
                    return Err(ConfigError(format!(
                        "file is for `{}` but `{}` was invoked",
                        c.as_str(),
                        self.command.as_str()
                    )));
                }
            }
            "alpha" => self.alpha = parse_list(value)?,
            "delta" => self.delta = parse_one(value)?,
            "j" => self.j = parse_one(value)?,
            "boundary" => self.boundary = parse_boundary(value)?,
            "n" => self.n = parse_list(value)?,
            "t" => self.t = parse_list(value)?,
            "engine" => self.engine = value.to_string(),
            "output" => self.output = Some(PathBuf::from(value)),
            "format" => self.format = Format::from_str(value, true).map_err(ConfigError)?,
            "threads" => self.threads = parse_threads(value)?,
            "t_hint" => self.t_hint = Some(parse_one(value)?),
            other => return Err(ConfigError(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    fn apply_args(&mut self, a: &RunArgs) -> Result<(), ConfigError> {
        if let Some(v) = &a.alpha {
            self.alpha = v.clone();
        }
        if let Some(v) = a.delta {
            self.delta = v;
        }
        if let Some(v) = a.j {
            self.j = v;
        }
        if let Some(v) = &a.boundary {
            self.boundary = parse_boundary(v)?;
        }
        if let Some(v) = &a.n {
            self.n = v.clone();
        }
        if let Some(v) = &a.t {
            self.t = v.clone();
        }
        if let Some(v) = &a.engine {
            self.engine = v.clone();
        }
        if let Some(v) = &a.output {
            self.output = Some(v.clone());
        }
        if let Some(v) = a.format {
            self.format = v;
        }
        if let Some(v) = &a.threads {
            self.threads = parse_threads(v)?;
        }
        if let Some(v) = a.t_hint {
            self.t_hint = Some(v);
        }
        Ok(())
    }

    fn check(&self) -> Result<(), ConfigError> {
        if self.alpha.is_empty() || self.n.is_empty() {
            return Err(ConfigError("alpha and n lists must be non-empty".into()));
        }
        if let Some(h) = self.t_hint {
            if !(h.is_finite() && h > 0.0) {
                return Err(ConfigError(format!("t_hint must be positive, got {h}")));
            }
        }
        Ok(())
    }

    pub fn max_n(&self) -> usize {
        self.n.iter().copied().max().unwrap_or(0)
    }
}

fn parse_one<T: FromStr>(v: &str) -> Result<T, ConfigError> {
    v.trim()
        .parse()
        .map_err(|_| ConfigError(format!("cannot parse `{v}`")))
}

fn parse_list<T: FromStr>(v: &str) -> Result<Vec<T>, ConfigError> {
    v.split(',').map(parse_one).collect()
}

fn parse_boundary(v: &str) -> Result<Boundary, ConfigError> {
    v.parse().map_err(|e: sdchain_core::Error| ConfigError(e.to_string()))
}

pub fn parse_threads(v: &str) -> Result<usize, ConfigError> {
    if v.trim().eq_ignore_ascii_case("auto") {
        Ok(0)
    } else {
        parse_one(v)
    }
}
