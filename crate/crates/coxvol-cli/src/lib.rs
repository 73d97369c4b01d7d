//! Command-line front end for `coxvol`.
//!
//! Subcommands write CSV (with `#` metadata lines) or JSON. Exit codes are
//! 0 on success, 1 for usage or schema errors and 2 for numeric
//! non-convergence.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod output;
pub mod schema;

pub use config::{BackendKind, Overrides, RunConfig, CONFIG_ENV};

pub const TOOL_VERSION: &str = concat!("coxvol ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("schema: {0}")]
    Schema(String),
    #[error(transparent)]
    Lib(#[from] coxvol::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(e) if e.is_numeric() => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "coxvol", version, about = "Volumes and boundary asymptotics on the universal reflection lattice")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags accepted by every subcommand; they override the config file.
#[derive(Debug, Args, Default, Clone)]
pub struct GlobalArgs {
    /// INI config file (default: $COXVOL_CONFIG).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// exact or float.
    #[arg(long, global = true)]
    pub backend: Option<String>,
    /// Mantissa bits of the float backend.
    #[arg(long, global = true)]
    pub bits: Option<usize>,
    #[arg(long, global = true)]
    pub max_steps: Option<u64>,
    /// Grid base: s = base^-q, m = ceil(base^q).
    #[arg(long, global = true)]
    pub base: Option<u32>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub q_start: Option<i64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub q_end: Option<i64>,
    /// Points per windowed slope.
    #[arg(long, global = true)]
    pub window: Option<usize>,
    /// Truncation depth of schedule programs.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, short = 'j', global = true)]
    pub workers: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
}

impl GlobalArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            n: self.n,
            backend: self.backend.clone(),
            bits: self.bits,
            max_steps: self.max_steps,
            base: self.base,
            q_start: self.q_start,
            q_end: self.q_end,
            window: self.window,
            depth: self.depth,
            seed: self.seed,
            workers: self.workers,
            output: self.output.clone(),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reduce a vector into the nef chamber.
    Reduce {
        /// Comma-separated coordinates in the ω basis, e.g. `-1,3,3,3`.
        #[arg(allow_hyphen_values = true)]
        coords: String,
    },
    /// Scan vol(s·A + D) along s = base^-q.
    RayScan {
        /// JSON boundary spec.
        spec: PathBuf,
        /// Ample direction A (default u).
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
    },
    /// Scan h0(⌊mD⌋ + A).
    H0Scan {
        spec: PathBuf,
        /// Integral A with coordinates >= 2 (default 2u).
        #[arg(long)]
        a: Option<String>,
        /// Use the designated hill and valley m of a schedule spec instead
        /// of the geometric grid.
        #[arg(long)]
        designated: bool,
        /// With --designated: keep m <= 2^bits.
        #[arg(long, default_value_t = 30)]
        m_max_bits: u32,
    },
    /// Build a recurrent boundary point with oscillating volume.
    Construct {
        /// Geometric excursion lengths L^n.
        #[arg(long = "L", conflicts_with = "delta_target")]
        l: Option<String>,
        /// Target liminf exponent in [1, N/2].
        #[arg(long)]
        delta_target: Option<String>,
        /// Number of excursions.
        #[arg(long, default_value_t = 4)]
        count: usize,
        /// Comma-separated support (default 0..=N).
        #[arg(long)]
        support: Option<String>,
    },
    /// vol(D_t + s·A) on a t × q grid along a boundary curve.
    Figure1 {
        /// Either a count of equally spaced t in [0, 1] or a comma-separated
        /// list of t values.
        #[arg(long, alias = "t-count", default_value = "33")]
        t_grid: String,
        /// Exponent range `Q0..Q1` for s = base^-q (default 4..24).
        #[arg(long, allow_hyphen_values = true)]
        s_grid: Option<String>,
    },
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Output goes to `stdout` unless `--output` is set.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(cli.global.config.as_deref(), &cli.global.overrides())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.worker_count())
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let text = pool.install(|| commands::dispatch(&cli.command, &cfg))?;
    match &cfg.output {
        Some(p) => std::fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}
