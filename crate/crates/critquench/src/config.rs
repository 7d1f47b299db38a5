//! Run configuration shared by all subcommands.
//!
//! Values come from built-in defaults, then an optional JSON file, then
//! command-line flags. The output directory can additionally be overridden by
//! the `CRITQUENCH_OUTPUT_DIR` environment variable (flags still win).

use std::path::{Path, PathBuf};

use critquench_core::driven_quench::{DEFAULT_G_START, DEFAULT_TOL};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const OUTPUT_DIR_ENV: &str = "CRITQUENCH_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "critquench-out";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "N")]
    pub spins: Option<usize>,
    #[serde(rename = "tau_Q")]
    pub tau_q: Option<f64>,
    pub g_start: f64,
    pub tol: f64,
    pub dt: Option<f64>,
    pub t_max: Option<f64>,
    pub t_min_peaks: Option<f64>,
    pub output: PathBuf,
    pub threads: Option<usize>,
    /// Quench times of a `τ_Q` scan.
    pub taus: Vec<f64>,
    /// System sizes of an `N` scan.
    pub sizes: Vec<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            spins: None,
            tau_q: None,
            g_start: DEFAULT_G_START,
            tol: DEFAULT_TOL,
            dt: None,
            t_max: None,
            t_min_peaks: None,
            output: PathBuf::from(DEFAULT_OUTPUT_DIR),
            threads: None,
            taus: Vec::new(),
            sizes: Vec::new(),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("config {}: {e}", path.display())))
    }

    /// Apply the environment override of the output directory.
    pub fn with_env(mut self) -> Self {
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV).filter(|d| !d.is_empty()) {
            self.output = PathBuf::from(dir);
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if let Some(n) = self.spins {
            if n < 4 || n % 2 != 0 {
                return bad(format!("N must be an even integer >= 4, got {n}"));
            }
        }
        for n in &self.sizes {
            if *n < 4 || n % 2 != 0 {
                return bad(format!("scan sizes must be even integers >= 4, got {n}"));
            }
        }
        for tau in self.tau_q.iter().chain(&self.taus) {
            if !(tau.is_finite() && *tau > 0.0) {
                return bad(format!("tau_Q must be positive and finite, got {tau}"));
            }
        }
        if !(self.g_start.is_finite() && self.g_start > 1.0) {
            return bad(format!("g_start must exceed the critical field 1, got {}", self.g_start));
        }
        if !(self.tol > 0.0 && self.tol <= 1e-4) {
            return bad(format!("tol must lie in (0, 1e-4], got {}", self.tol));
        }
        if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return bad(format!("dt must be positive, got {dt}"));
            }
        }
        if let Some(t) = self.t_max {
            if !(t.is_finite() && t > 0.0) {
                return bad(format!("t_max must be positive, got {t}"));
            }
        }
        if let Some(t) = self.t_min_peaks {
            if !(t.is_finite() && t >= 0.0) {
                return bad(format!("t_min_peaks must be non-negative, got {t}"));
            }
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_keeps_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"N": 1000, "tau_Q": 400}"#).unwrap();
        assert_eq!(cfg.spins, Some(1000));
        assert_eq!(cfg.g_start, DEFAULT_G_START);
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"n": 1000}"#).is_err());
    }

    #[test]
    fn validation_messages() {
        let cfg = RunConfig { spins: Some(7), ..RunConfig::default() };
        assert!(cfg.validate().unwrap_err().to_string().contains("even"));
        let cfg = RunConfig { g_start: 0.5, ..RunConfig::default() };
        assert!(cfg.validate().is_err());
        let cfg = RunConfig { tol: 1e-3, ..RunConfig::default() };
        assert!(cfg.validate().is_err());
    }
}
