//! Key-value config files for the synthetic degradation and sharpening
//! transforms.
//!
//! The format is TOML with the keys `kernel_size`, `sigma_blur`,
//! `sigma_noise`, `seed`, `gamma` and `radius_sigma`; any subset may appear.
//!
//! ```toml
//! kernel_size = 9
//! sigma_blur = 2.0
//! sigma_noise = 0.01
//! seed = 3
//! ```

use std::path::{Path, PathBuf};

use qomega_core::{DegradeSpec, SharpenSpec};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub kernel_size: Option<usize>,
    pub sigma_blur: Option<f64>,
    pub sigma_noise: Option<f64>,
    pub seed: Option<u64>,
    pub gamma: Option<f64>,
    pub radius_sigma: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl SynthConfig {
    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.message().to_string(),
        })
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merged(self, over: SynthConfig) -> SynthConfig {
        SynthConfig {
            kernel_size: over.kernel_size.or(self.kernel_size),
            sigma_blur: over.sigma_blur.or(self.sigma_blur),
            sigma_noise: over.sigma_noise.or(self.sigma_noise),
            seed: over.seed.or(self.seed),
            gamma: over.gamma.or(self.gamma),
            radius_sigma: over.radius_sigma.or(self.radius_sigma),
        }
    }

    pub fn degrade_spec(&self) -> DegradeSpec {
        let d = DegradeSpec::default();
        DegradeSpec {
            kernel_size: self.kernel_size.unwrap_or(d.kernel_size),
            sigma_blur: self.sigma_blur.unwrap_or(d.sigma_blur),
            sigma_noise: self.sigma_noise.unwrap_or(d.sigma_noise),
            seed: self.seed.unwrap_or(d.seed),
        }
    }

    pub fn sharpen_spec(&self) -> SharpenSpec {
        let d = SharpenSpec::default();
        SharpenSpec {
            gamma: self.gamma.unwrap_or(d.gamma),
            radius_sigma: self.radius_sigma.unwrap_or(d.radius_sigma),
        }
    }
}
