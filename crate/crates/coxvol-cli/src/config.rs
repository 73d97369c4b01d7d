//! Run configuration. Defaults are overridden by an INI file, which is
//! overridden by flags.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::CliError;

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "COXVOL_CONFIG";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BackendKind {
    Exact,
    Float,
}

impl BackendKind {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "exact" => Ok(Self::Exact),
            "float" => Ok(Self::Float),
            other => Err(CliError::Usage(format!("unknown backend `{other}` (expected exact or float)"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Float => "float",
        }
    }
}

/// Settings shared by all subcommands. Grid bounds left unset fall back to
/// the per-command defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub backend: BackendKind,
    pub bits: usize,
    pub max_steps: Option<u64>,
    pub base: u32,
    pub q_start: Option<i64>,
    pub q_end: Option<i64>,
    pub window: usize,
    pub depth: Option<usize>,
    pub seed: u64,
    /// Not part of the hash: results do not depend on it.
    pub workers: Option<usize>,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: None,
            backend: BackendKind::Exact,
            bits: coxvol::scalar::DEFAULT_PRECISION,
            max_steps: None,
            base: 2,
            q_start: None,
            q_end: None,
            window: 5,
            depth: None,
            seed: 0,
            workers: None,
            output: None,
        }
    }
}

/// Overrides, as parsed from flags or a config file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub backend: Option<String>,
    pub bits: Option<usize>,
    pub max_steps: Option<u64>,
    pub base: Option<u32>,
    pub q_start: Option<i64>,
    pub q_end: Option<i64>,
    pub window: Option<usize>,
    pub depth: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub output: Option<PathBuf>,
}

fn parse_field<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    v.trim().parse().map_err(|e| CliError::Usage(format!("config key `{key}`: {e}")))
}

impl Overrides {
    /// Reads `key = value` pairs; section headers are allowed and ignored.
    pub fn from_ini_file(path: &Path) -> Result<Self, CliError> {
        let ini = ini::Ini::load_from_file(path)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        let mut o = Overrides::default();
        for (_, props) in ini.iter() {
            for (k, v) in props.iter() {
                o.set(k, v)?;
            }
        }
        Ok(o)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<(), CliError> {
        match key.trim().replace('-', "_").as_str() {
            "n" => self.n = Some(parse_field(key, v)?),
            "backend" => self.backend = Some(v.trim().to_string()),
            "bits" => self.bits = Some(parse_field(key, v)?),
            "max_steps" => self.max_steps = Some(parse_field(key, v)?),
            "base" => self.base = Some(parse_field(key, v)?),
            "q_start" => self.q_start = Some(parse_field(key, v)?),
            "q_end" => self.q_end = Some(parse_field(key, v)?),
            "window" => self.window = Some(parse_field(key, v)?),
            "depth" => self.depth = Some(parse_field(key, v)?),
            "seed" => self.seed = Some(parse_field(key, v)?),
            "workers" => self.workers = Some(parse_field(key, v)?),
            "output" => self.output = Some(PathBuf::from(v.trim())),
            other => return Err(CliError::Usage(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    fn apply(&self, c: &mut RunConfig) -> Result<(), CliError> {
        if let Some(v) = self.n {
            c.n = Some(v);
        }
        if let Some(v) = &self.backend {
            c.backend = BackendKind::parse(v)?;
        }
        if let Some(v) = self.bits {
            c.bits = v;
        }
        if self.max_steps.is_some() {
            c.max_steps = self.max_steps;
        }
        if let Some(v) = self.base {
            c.base = v;
        }
        if self.q_start.is_some() {
            c.q_start = self.q_start;
        }
        if self.q_end.is_some() {
            c.q_end = self.q_end;
        }
        if let Some(v) = self.window {
            c.window = v;
        }
        if self.depth.is_some() {
            c.depth = self.depth;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if self.workers.is_some() {
            c.workers = self.workers;
        }
        if self.output.is_some() {
            c.output = self.output.clone();
        }
        Ok(())
    }
}

impl RunConfig {
    /// Defaults, then the config file (explicit path, else `$COXVOL_CONFIG`),
    /// then flags.
    pub fn resolve(config_path: Option<&Path>, flags: &Overrides) -> Result<Self, CliError> {
        let env_path = std::env::var_os(CONFIG_ENV).filter(|p| !p.is_empty()).map(PathBuf::from);
        let mut c = RunConfig::default();
        if let Some(p) = config_path.map(Path::to_path_buf).or(env_path) {
            Overrides::from_ini_file(&p)?.apply(&mut c)?;
        }
        flags.apply(&mut c)?;
        if c.bits < 64 {
            return Err(CliError::Usage(format!("bits = {} is below the 64-bit minimum", c.bits)));
        }
        if c.base < 2 {
            return Err(CliError::Usage("grid base must be at least 2".into()));
        }
        if c.window < 2 {
            return Err(CliError::Usage("window must be at least 2".into()));
        }
        if c.workers == Some(0) {
            return Err(CliError::Usage("workers must be positive".into()));
        }
        Ok(c)
    }

    /// Worker threads; all cores unless configured.
    pub fn worker_count(&self) -> usize {
        self.workers
            .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
    }

    /// Result-relevant settings in a fixed order.
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "default".into());
        vec![
            ("n", opt(self.n.map(|v| v.to_string()))),
            ("backend", self.backend.name().into()),
            ("bits", self.bits.to_string()),
            ("max_steps", opt(self.max_steps.map(|v| v.to_string()))),
            ("base", self.base.to_string()),
            ("q_start", opt(self.q_start.map(|v| v.to_string()))),
            ("q_end", opt(self.q_end.map(|v| v.to_string()))),
            ("window", self.window.to_string()),
            ("depth", opt(self.depth.map(|v| v.to_string()))),
            ("seed", self.seed.to_string()),
        ]
    }

    /// SHA-256 over the `key=value` lines of [`RunConfig::pairs`] and the
    /// command-specific extras.
    pub fn hash(&self, extra: &[(String, String)]) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.pairs() {
            h.update(format!("{k}={v}\n"));
        }
        for (k, v) in extra {
            h.update(format!("{k}={v}\n"));
        }
        format!("{:x}", h.finalize())
    }
}
