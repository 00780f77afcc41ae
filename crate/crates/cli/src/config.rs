use std::path::Path;

use cosserat::weyssenhoff::WorldlineConfig;
use serde::Deserialize;
use thiserror::Error;

/// Environment variable naming a config file; takes precedence over `--config`.
pub const CONFIG_ENV: &str = "COSSERAT_CONFIG";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("invalid config {path}: {message}")]
    Parse { path: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Grid sizes per axis for refinement studies, coarse to fine.
    pub grids: Vec<usize>,
    /// Number of random samples for property checks.
    pub samples: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 0, grids: vec![17, 33], samples: 1000 }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.grids.len() < 2 || self.grids.iter().any(|&n| n < 5) {
            return Err(ConfigError::Invalid("need at least two grid sizes, each >= 5".into()));
        }
        if self.grids.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError::Invalid("grid sizes must increase".into()));
        }
        if self.samples == 0 {
            return Err(ConfigError::Invalid("samples must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub suite: SuiteConfig,
    pub worldline: Option<WorldlineConfig>,
}

impl Config {
    pub fn parse(text: &str, path: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse { path: path.into(), message: e.to_string() })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: name.clone(), source })?;
        Self::parse(&text, &name)
    }

    /// Loads the file named by the environment variable, else `flag`, else defaults.
    pub fn resolve(flag: Option<&Path>) -> Result<Self, ConfigError> {
        match std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()) {
            Some(p) => Self::load(Path::new(&p)),
            None => flag.map_or_else(|| Ok(Config::default()), Self::load),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_sections_take_defaults() {
        let c = Config::parse("[suite]\nseed = 7\n", "t").unwrap();
        assert_eq!(c.suite.seed, 7);
        assert_eq!(c.suite.grids, vec![17, 33]);
        assert!(c.worldline.is_none());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Config::parse("[suite]\nsed = 7\n", "t").is_err());
    }

    #[test]
    fn grids_must_refine() {
        let c = SuiteConfig { grids: vec![33, 17], ..Default::default() };
        assert!(c.validate().is_err());
    }
}
