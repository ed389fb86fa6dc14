//! Command-line driver for `radialmp-core`: JSON experiment configs, subcommand
//! runners and reproducible report/CSV artifacts.

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod fixtures;

use std::path::PathBuf;

pub use config::ProblemConfig;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VALIDATION: i32 = 2;
    pub const NOT_CONVERGED: i32 = 3;
    pub const USAGE: i32 = 64;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
    #[error("not converged: {0}")]
    NotConverged(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Json { .. } | CliError::Validation(_) | CliError::Io(_) => exit::VALIDATION,
            CliError::NotConverged(_) => exit::NOT_CONVERGED,
            CliError::Usage(_) => exit::USAGE,
        }
    }
}

impl From<radialmp_core::Error> for CliError {
    fn from(e: radialmp_core::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct Flags {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub seed: Option<u64>,
    pub n: Option<u32>,
    pub quiet: bool,
}

impl Flags {
    /// Loads the config and applies `--seed` and `--N`.
    pub fn load_config(&self) -> Result<ProblemConfig, CliError> {
        let path = self
            .config
            .as_ref()
            .ok_or_else(|| CliError::Usage("this subcommand needs --config PATH".into()))?;
        let mut cfg = ProblemConfig::load(path)?;
        self.apply_overrides(&mut cfg);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply_overrides(&self, cfg: &mut ProblemConfig) {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(n) = self.n {
            cfg.n = n;
        }
    }
}

/// Caps rayon's global pool from `RADIALMP_THREADS`; ignored when unset or invalid.
pub fn init_threads() {
    if let Some(n) = std::env::var("RADIALMP_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}
