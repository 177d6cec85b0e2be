use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod config;
mod run;

use config::{parse_threads, CommandKind, RunArgs, RunConfig};

/// Edge entanglement sweeps for sinusoidally deformed XXZ chains.
#[derive(Debug, Parser)]
#[command(name = "sdchain", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Ground-state edge concurrence versus chain length
    GsConc(RunArgs),
    /// Edge concurrence along a temperature grid
    ThermalConc(RunArgs),
    /// Temperature where the edge concurrence vanishes
    Tstar(RunArgs),
    /// Power-law fit of T* against chain length
    FitEta(RunArgs),
    /// Deformed chain against the uniform ring
    EquivCheck(RunArgs),
    /// Run the built-in acceptance checks
    Validate {
        #[arg(long)]
        threads: Option<String>,
    },
}

/// Exit status when at least one validation criterion fails.
const EXIT_VALIDATION_FAILED: u8 = 4;

fn init_threads(n: usize) -> Result<(), String> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn validate(threads: Option<String>, env_threads: Option<String>) -> ExitCode {
    let n = match env_threads.or(threads).map(|v| parse_threads(&v)).transpose() {
        Ok(n) => n.unwrap_or(0),
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = init_threads(n) {
        eprintln!("thread pool: {e}");
        return ExitCode::from(1);
    }
    let mut all = true;
    for c in sdchain_core::validation::criteria() {
        let r = c.run();
        all &= r.passed;
        println!("{r}");
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VALIDATION_FAILED)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let env_threads = std::env::var("SDCHAIN_THREADS").ok();
    let seed = std::env::var("SDCHAIN_SEED").ok();
    let (kind, args) = match cli.command {
        Cmd::GsConc(a) => (CommandKind::GsConc, a),
        Cmd::ThermalConc(a) => (CommandKind::ThermalConc, a),
        Cmd::Tstar(a) => (CommandKind::Tstar, a),
        Cmd::FitEta(a) => (CommandKind::FitEta, a),
        Cmd::EquivCheck(a) => (CommandKind::EquivCheck, a),
        Cmd::Validate { threads } => return validate(threads, env_threads),
    };
    let cfg = match RunConfig::resolve(kind, &args, env_threads.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = init_threads(cfg.threads) {
        eprintln!("thread pool: {e}");
        return ExitCode::from(1);
    }
    match run::run(&cfg, seed) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sdchain {}: {e}", kind.as_str());
            ExitCode::from(e.exit_code())
        }
    }
}
