use std::io::Write;

use clap::{Args, ValueEnum};
use csym_core::diagnostics::DEFAULT_MAX_WORD_LEN;
use csym_core::tolerance::Tolerance;
use csym_core::{DecideOptions, SolveConfig64};
use serde::Serialize;

use crate::CliError;

pub const TOL_ENV: &str = "CSYM_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Relative tolerance (default 1e-8, or the CSYM_TOL environment variable).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Restarts of the certificate search.
    #[arg(long, global = true, default_value_t = 50)]
    pub restarts: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_WORD_LEN)]
    pub max_word_len: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Add wall-clock timings to reports. Timed reports are not reproducible.
    #[arg(long, global = true)]
    pub timing: bool,
}

/// Configuration as echoed into every report.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigJson {
    pub tol_rel: f64,
    pub tol_abs: f64,
    /// `flag`, `env` or `default`.
    pub tol_source: &'static str,
    /// Raw value of the environment override, when set.
    pub tol_env: Option<String>,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub accept_tol: f64,
    pub fail_tol: f64,
    pub max_word_len: usize,
}

pub struct Settings {
    pub options: DecideOptions<f64>,
    pub config: ConfigJson,
    pub format: Format,
    pub timing: bool,
}

impl Settings {
    pub fn resolve(g: &GlobalOpts) -> Result<Self, CliError> {
        let env = std::env::var(TOL_ENV).ok();
        let (rel, source) = match (g.tol, &env) {
            (Some(t), _) => (Some(t), "flag"),
            (None, Some(raw)) => {
                let t = raw
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Input(format!("{TOL_ENV}={raw:?} is not a number")))?;
                (Some(t), "env")
            }
            (None, None) => (None, "default"),
        };
        let tol = match rel {
            Some(r) if !(r > 0.0 && r < 1.0) => {
                return Err(CliError::Input(format!("tolerance must lie in (0, 1), got {r}")));
            }
            Some(r) => Tolerance::with_rel(r)?,
            None => Tolerance::default(),
        };
        let defaults = SolveConfig64::default();
        let solve = SolveConfig64 {
            restarts: g.restarts,
            seed: g.seed,
            accept_tol: tol.rel,
            fail_tol: defaults.fail_tol.max(tol.rel),
            ..defaults
        };
        solve.validate()?;
        if g.max_word_len < 2 {
            return Err(CliError::Input(format!("--max-word-len must be at least 2, got {}", g.max_word_len)));
        }
        let config = ConfigJson {
            tol_rel: tol.rel,
            tol_abs: tol.abs,
            tol_source: source,
            tol_env: env,
            restarts: solve.restarts,
            max_iters: solve.max_iters,
            seed: solve.seed,
            accept_tol: solve.accept_tol,
            fail_tol: solve.fail_tol,
            max_word_len: g.max_word_len,
        };
        Ok(Settings {
            options: DecideOptions {
                solve,
                tol,
                max_word_len: g.max_word_len,
            },
            config,
            format: g.format,
            timing: g.timing,
        })
    }

    /// Prints `value` as pretty JSON or as the given text rendering.
    pub fn emit<S: Serialize>(&self, value: &S, text: impl FnOnce() -> String) -> Result<(), CliError> {
        let body = match self.format {
            Format::Json => crate::io::to_json(value)? + "\n",
            Format::Text => text(),
        };
        let mut out = std::io::stdout().lock();
        match out.write_all(body.as_bytes()).and_then(|_| out.flush()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Internal(e.to_string())),
            _ => Ok(()),
        }
    }
}

impl ConfigJson {
    pub fn text(&self) -> String {
        let env = self.tol_env.as_deref().map(|e| format!(", {}={e}", TOL_ENV)).unwrap_or_default();
        format!(
            "config: tol {:e} ({}{env}), abs {:e}, restarts {}, max_iters {}, seed {}, accept {:e}, fail {:e}, max_word_len {}\n",
            self.tol_rel,
            self.tol_source,
            self.tol_abs,
            self.restarts,
            self.max_iters,
            self.seed,
            self.accept_tol,
            self.fail_tol,
            self.max_word_len
        )
    }
}
