//! Command-line front end: argument parsing, run configuration, provenance
//! manifests and the subcommand implementations behind the `wcr` binary.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{parse_k, parse_k_range, KSpec, RunConfig, SizeSpec};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DATA: u8 = 2;
pub const EXIT_IO: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

impl From<wcr_core::Error> for CliError {
    fn from(e: wcr_core::Error) -> Self {
        match e {
            wcr_core::Error::Io { path, source } => CliError::Io { path, source },
            other => CliError::Data(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "wcr", version, about = "Workload characterization and reduction")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Metric schema JSON (defaults to the built-in 45-metric schema).
    #[arg(long, global = true)]
    pub schema: Option<PathBuf>,
    /// Seconds of ramp-up to drop from telemetry.
    #[arg(long, global = true)]
    pub warmup: Option<f64>,
    /// Cumulative explained variance the retained components must reach.
    #[arg(long = "variance-target", global = true)]
    pub variance_target: Option<f64>,
    /// Cluster count: an integer, or `auto` for BIC selection.
    #[arg(long, global = true, value_parser = parse_k, conflicts_with = "k_range")]
    pub k: Option<KSpec>,
    /// Range searched by BIC, `MIN:MAX`.
    #[arg(long = "k-range", global = true, value_parser = parse_k_range)]
    pub k_range: Option<KSpec>,
    /// Base seed; restart r uses seed + r.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// K-means restarts per k.
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
    /// Comma-separated cache capacities, e.g. `16K,32K,1M`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub sizes: Option<Vec<String>>,
    /// Miss ratio under which a capacity holds the footprint.
    #[arg(long, global = true)]
    pub knee: Option<f64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "wcr-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TraceFormat {
    Binary,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Instruction,
    Data,
    Unified,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Counter CSV (+ telemetry CSV) to profiles, metric vectors and system metrics.
    Ingest {
        counters: PathBuf,
        #[arg(long)]
        telemetry: Option<PathBuf>,
    },
    /// Profiles or metric vectors (JSON) to clusters and representatives.
    Reduce { input: PathBuf },
    /// Behavior CSV to system and data behavior labels.
    Classify { input: PathBuf },
    /// Access trace to a miss-ratio curve.
    Simulate {
        /// Binary records or `I|L|S <hex address>` lines.
        trace: PathBuf,
        /// JSON sidecar splitting the trace into weighted segments.
        #[arg(long)]
        segments: Option<PathBuf>,
        /// Trace encoding; inferred from a `.bin` extension otherwise text.
        #[arg(long, value_enum)]
        format: Option<TraceFormat>,
        #[arg(long, value_enum, default_value = "unified")]
        kind: KindArg,
        /// Cache line size in bytes.
        #[arg(long)]
        line: Option<u64>,
        /// Ways per set, or `full`.
        #[arg(long)]
        ways: Option<String>,
        #[arg(long)]
        no_write_allocate: bool,
        /// Leading accesses to discard before simulating.
        #[arg(long, default_value_t = 0)]
        skip: usize,
        /// Name used for output files (defaults to the trace file stem).
        #[arg(long)]
        workload: Option<String>,
    },
    /// Miss-ratio curve (CSV or JSON) to a footprint estimate.
    Footprint {
        curve: PathBuf,
        /// Curve kind when reading CSV.
        #[arg(long, value_enum, default_value = "unified")]
        kind: KindArg,
    },
    /// Summary tables and plot data from characterized workloads.
    Report {
        /// JSON list of workload records.
        #[arg(long)]
        records: Option<PathBuf>,
        /// Metric vectors written by `ingest`.
        #[arg(long)]
        metrics: Option<PathBuf>,
        /// Labels JSON written by `classify`.
        #[arg(long)]
        labels: Option<PathBuf>,
        /// CSV `workload,stack,suite,algorithm`.
        #[arg(long)]
        meta: Option<PathBuf>,
        /// Curve JSON written by `simulate`; repeatable.
        #[arg(long)]
        curve: Vec<PathBuf>,
        /// Metric to summarize; repeatable (defaults to those every record has).
        #[arg(long = "metric")]
        metric: Vec<String>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ingest { .. } => "ingest",
            Command::Reduce { .. } => "reduce",
            Command::Classify { .. } => "classify",
            Command::Simulate { .. } => "simulate",
            Command::Footprint { .. } => "footprint",
            Command::Report { .. } => "report",
        }
    }
}

/// Merges the config file (if any) with flag overrides.
pub fn resolve_config(g: &GlobalArgs) -> Result<RunConfig, CliError> {
    let mut c = match &g.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(v) = &g.schema {
        c.schema_path = Some(v.clone());
    }
    if let Some(v) = g.warmup {
        c.warmup_s = v;
    }
    if let Some(v) = g.variance_target {
        c.variance_target = v;
    }
    if let Some(v) = g.k.clone().or_else(|| g.k_range.clone()) {
        c.k = v;
    }
    if let Some(v) = g.seed {
        c.seed = v;
    }
    if let Some(v) = g.restarts {
        c.restarts = v;
    }
    if let Some(v) = &g.sizes {
        c.sizes = v.iter().map(|s| SizeSpec::Text(s.clone())).collect();
    }
    if let Some(v) = g.knee {
        c.knee_ratio = v;
    }
    c.validate()?;
    Ok(c)
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let config = resolve_config(&cli.global)?;
    commands::dispatch(&cli.command, &config, &cli.global.out)
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("WCR_LOG", "warn");
    let _ = env_logger::Builder::from_env(env)
        .format_timestamp(None)
        .try_init();
}

/// Parses `args`, runs the command and maps failures to exit codes
/// (1 usage, 2 data validation, 3 I/O).
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wcr {}: {e}", cli.command.name());
            if matches!(e, CliError::Usage(_)) {
                eprintln!("run `wcr --help` for usage");
            }
            ExitCode::from(e.exit_code())
        }
    }
}

