//! Command-line driver: reads a JSON config, evaluates a parameter grid and
//! writes a CSV or JSON table.
//!
//! Exit codes: 0 when every grid point converged, 2 when some did not (the
//! table is still written, with those rows flagged), 1 on a usage, config or
//! I/O error.

pub mod commands;
pub mod config;
pub mod presets;
pub mod table;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub use commands::{run_command, CommandKind};
pub use config::{parse_config, RunConfig};
pub use table::SweepTable;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;

pub const GIT_DESCRIBE: &str = env!("SPASER_GIT_DESCRIBE");

#[derive(Debug, Parser)]
#[command(name = "spaser", version, about = "Steady states, thresholds and transients of a driven three-level spaser")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Time evolution at every grid point.
    Trajectory(Common),
    /// Saturated steady state at every grid point.
    SteadySweep(Common),
    /// Threshold pump at every grid point, from both estimators.
    Threshold(Common),
    /// Growth rate of the non-spasing state at every grid point.
    Stability(Common),
    /// Coupling that gives the requested ratio of undriven to driven thresholds.
    Calibrate(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<config::Format>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
    /// Relative integration tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Initial plasmon amplitude.
    #[arg(long)]
    seed_amplitude: Option<f64>,
    /// Built-in parameter set applied underneath the config file.
    #[arg(long, value_enum)]
    preset: Option<presets::Preset>,
}

impl clap::ValueEnum for config::Format {
    fn value_variants<'a>() -> &'a [Self] {
        &[config::Format::Csv, config::Format::Json]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            config::Format::Csv => "csv",
            config::Format::Json => "json",
        }))
    }
}

impl Common {
    fn overrides(&self) -> Value {
        let mut run = Map::new();
        if let Some(t) = self.tol {
            run.insert("tol".into(), json!(t));
        }
        if let Some(a) = self.seed_amplitude {
            run.insert("seed_amplitude".into(), json!(a));
        }
        if let Some(f) = self.format {
            run.insert("format".into(), serde_json::to_value(f).expect("format serialises"));
        }
        if let Some(o) = &self.out {
            run.insert("out".into(), json!(o));
        }
        if let Some(w) = self.workers {
            run.insert("workers".into(), json!(w));
        }
        json!({ "run": run })
    }
}

/// SHA-256 of the resolved config, as lowercase hex.
pub fn config_hash(resolved_json: &str) -> String {
    Sha256::digest(resolved_json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Provenance lines written at the top of every table. Apart from the
/// timestamp they depend only on the resolved config.
pub fn metadata(kind: CommandKind, cfg: &RunConfig) -> Vec<(String, String)> {
    let resolved = serde_json::to_string(cfg).expect("config serialises");
    let mut m = vec![
        ("command".to_string(), kind.name().to_string()),
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("git".to_string(), GIT_DESCRIBE.to_string()),
        ("config_sha256".to_string(), config_hash(&resolved)),
        (table::TIMESTAMP_KEY.to_string(), chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)),
        ("config".to_string(), resolved),
        ("host_permittivity".to_string(), spaser::params::HOST_PERMITTIVITY.to_string()),
    ];
    if !cfg.notes.is_empty() {
        m.push(("notes".to_string(), serde_json::to_string(&cfg.notes).expect("notes serialise")));
    }
    m
}

/// Runs the executable with the given arguments (program name first) and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let (kind, common) = match &cli.command {
        Cmd::Trajectory(c) => (CommandKind::Trajectory, c),
        Cmd::SteadySweep(c) => (CommandKind::SteadySweep, c),
        Cmd::Threshold(c) => (CommandKind::Threshold, c),
        Cmd::Stability(c) => (CommandKind::Stability, c),
        Cmd::Calibrate(c) => (CommandKind::Calibrate, c),
    };
    let cfg = match parse_config(&common.config, common.preset, common.overrides()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    let workers = cfg
        .run
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let mut table = match run_command(kind, &cfg, workers) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    let mut meta = metadata(kind, &cfg);
    meta.append(&mut table.metadata);
    table.metadata = meta;
    if let Err(e) = table.emit(cfg.run.format, cfg.run.out.as_deref()) {
        eprintln!("error: {e}");
        return EXIT_ERROR;
    }
    if table.all_converged() {
        EXIT_OK
    } else {
        eprintln!("warning: some grid points did not converge; see the converged column");
        EXIT_PARTIAL
    }
}
