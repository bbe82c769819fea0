use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::metrics::EdgeMode;
use crate::parser::NODE_KIND_VERSION;
use crate::vlm::{ApiSpec, CalleeRegistry};

/// Which per-call token statistic is the headline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TokenAggregation {
    /// Mean of per-program means.
    #[default]
    Macro,
    /// Mean over all call sites pooled.
    Micro,
}

/// How a sample is drawn across dataset labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    /// `n` entries from every dataset label.
    #[default]
    Stratified,
    /// `n` entries from the whole manifest.
    Pooled,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config {path}: {message}")]
    Invalid { path: String, message: String },
    #[error("exclusion_warn_threshold must be in (0, 1], got {0}")]
    Threshold(f64),
    #[error("sample_size must be positive")]
    ZeroSample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    pub registry: CalleeRegistry,
    pub edge_mode: EdgeMode,
    pub token_aggregation: TokenAggregation,
    pub sample_size: Option<usize>,
    pub sampling: SamplingMode,
    pub seed: u64,
    pub exclusion_warn_threshold: f64,
    pub api_spec: ApiSpec,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            registry: CalleeRegistry::default(),
            edge_mode: EdgeMode::default(),
            token_aggregation: TokenAggregation::default(),
            sample_size: None,
            sampling: SamplingMode::default(),
            seed: 0,
            exclusion_warn_threshold: 0.03,
            api_spec: ApiSpec::default(),
        }
    }
}

#[derive(Serialize)]
struct HashedSettings<'a> {
    node_kind_version: &'a str,
    registry: &'a CalleeRegistry,
    edge_mode: EdgeMode,
    token_aggregation: TokenAggregation,
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let t = self.exclusion_warn_threshold;
        if !(t > 0.0 && t <= 1.0) {
            return Err(ConfigError::Threshold(t));
        }
        if self.sample_size == Some(0) {
            return Err(ConfigError::ZeroSample);
        }
        Ok(())
    }

    /// Read a JSON config file; absent fields keep their defaults.
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: shown.clone(),
            source,
        })?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        let config: AnalysisConfig = serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Invalid {
            path: shown,
            message: format!("at {}: {}", e.path(), e.inner()),
        })?;
        config.validate()?;
        Ok(config)
    }

    /// SHA-256 over the settings that change per-program metric values.
    /// Reports are comparable only when their hashes agree.
    pub fn config_hash(&self) -> String {
        let settings = HashedSettings {
            node_kind_version: NODE_KIND_VERSION,
            registry: &self.registry,
            edge_mode: self.edge_mode,
            token_aggregation: self.token_aggregation,
        };
        let bytes = serde_json::to_vec(&settings).expect("settings serialize");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}
