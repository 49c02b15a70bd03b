//! Service configuration: one TOML file plus environment overrides.
//!
//! ```toml
//! host = "127.0.0.1"
//! port = 8080
//! data_root = "/srv/tracegrow"
//! rng_seed = 42
//!
//! [engine]
//! seed_fraction = 0.75
//! mc_iterations = 8
//! ```
//!
//! `TRACEGROW_PORT`, `TRACEGROW_DATA_ROOT` and `TRACEGROW_RNG_SEED` take
//! precedence over the file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracegrow_core::RgrConfig64;

pub const ENV_PORT: &str = "TRACEGROW_PORT";
pub const ENV_DATA_ROOT: &str = "TRACEGROW_DATA_ROOT";
pub const ENV_RNG_SEED: &str = "TRACEGROW_RNG_SEED";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("environment variable {name} has invalid value {value:?}")]
    Env { name: &'static str, value: String },
    #[error("no data root configured")]
    MissingDataRoot,
    #[error("data root {0} is not a directory")]
    DataRootNotFound(PathBuf),
    #[error("invalid engine settings: {0}")]
    Engine(#[from] tracegrow_core::EngineError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub host: String,
    pub port: u16,
    pub data_root: Option<PathBuf>,
    /// Seeds the generator behind batch assembly and per-session seeds.
    /// Drawn from the OS when absent.
    pub rng_seed: Option<u64>,
    pub engine: EngineSettings,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct EngineSettings {
    pub seed_fraction: f64,
    pub mc_iterations: u32,
    pub color_scale: f64,
    pub spatial_scale: Option<f64>,
    pub threads: Option<usize>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self { host: "127.0.0.1".into(), port: 8080, data_root: None, rng_seed: None, engine: EngineSettings::default() }
    }
}

impl Default for EngineSettings {
    fn default() -> Self {
        let d = RgrConfig64::default();
        Self {
            seed_fraction: d.seed_fraction,
            mc_iterations: d.mc_iterations,
            color_scale: d.color_scale,
            spatial_scale: d.spatial_scale,
            threads: d.threads,
        }
    }
}

impl EngineSettings {
    pub fn rgr_config(&self, rng_seed: u64) -> RgrConfig64 {
        RgrConfig64 {
            seed_fraction: self.seed_fraction,
            mc_iterations: self.mc_iterations,
            color_scale: self.color_scale,
            spatial_scale: self.spatial_scale,
            threads: self.threads,
            rng_seed,
            ..RgrConfig64::default()
        }
    }
}

impl ServiceConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        Self::from_toml(&text)
    }

    /// Applies overrides from the process environment.
    pub fn with_env(self) -> Result<Self, ConfigError> {
        self.with_overrides(|k| std::env::var(k).ok())
    }

    pub fn with_overrides(mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        if let Some(v) = lookup(ENV_PORT) {
            self.port = v.trim().parse().map_err(|_| ConfigError::Env { name: ENV_PORT, value: v })?;
        }
        if let Some(v) = lookup(ENV_DATA_ROOT) {
            if !v.is_empty() {
                self.data_root = Some(PathBuf::from(v));
            }
        }
        if let Some(v) = lookup(ENV_RNG_SEED) {
            self.rng_seed = Some(v.trim().parse().map_err(|_| ConfigError::Env { name: ENV_RNG_SEED, value: v })?);
        }
        Ok(self)
    }

    /// Checks the data root and engine settings before startup.
    pub fn validate(&self) -> Result<&Path, ConfigError> {
        self.engine.rgr_config(0).validate()?;
        let root = self.data_root.as_deref().ok_or(ConfigError::MissingDataRoot)?;
        if !root.is_dir() {
            return Err(ConfigError::DataRootNotFound(root.into()));
        }
        Ok(root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_and_defaults() {
        let c = ServiceConfig::from_toml("port = 9000\ndata_root = \"/data\"\n[engine]\nmc_iterations = 4\n").unwrap();
        assert_eq!(c.port, 9000);
        assert_eq!(c.host, "127.0.0.1");
        assert_eq!(c.data_root.as_deref(), Some(Path::new("/data")));
        assert_eq!(c.engine.mc_iterations, 4);
        assert_eq!(c.engine.seed_fraction, 0.75);
        assert_eq!(c.rng_seed, None);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(ServiceConfig::from_toml("prot = 1"), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn environment_wins() {
        let c = ServiceConfig::from_toml("port = 9000\ndata_root = \"/a\"\nrng_seed = 1").unwrap();
        let c = c
            .with_overrides(|k| match k {
                ENV_PORT => Some("7001".into()),
                ENV_DATA_ROOT => Some("/b".into()),
                ENV_RNG_SEED => Some("99".into()),
                _ => None,
            })
            .unwrap();
        assert_eq!((c.port, c.data_root.unwrap(), c.rng_seed), (7001, PathBuf::from("/b"), Some(99)));
        let bad = ServiceConfig::default().with_overrides(|k| (k == ENV_PORT).then(|| "eighty".into()));
        assert!(matches!(bad, Err(ConfigError::Env { name: ENV_PORT, .. })));
    }

    #[test]
    fn validation() {
        assert!(matches!(ServiceConfig::default().validate(), Err(ConfigError::MissingDataRoot)));
        let mut c = ServiceConfig { data_root: Some("/definitely/not/here".into()), ..Default::default() };
        assert!(matches!(c.validate(), Err(ConfigError::DataRootNotFound(_))));
        c.data_root = Some(std::env::temp_dir());
        assert!(c.validate().is_ok());
        c.engine.mc_iterations = 0;
        assert!(matches!(c.validate(), Err(ConfigError::Engine(_))));
    }
}
