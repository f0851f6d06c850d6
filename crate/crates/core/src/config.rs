//! Experiment parameters: command-line flags over a JSON file over defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::SpectralGrid;

pub const DEFAULT_SEED: u64 = 20_190_101;
pub const DEFAULT_T_BUDGET: f64 = 1e8;

/// Every field is optional so that partial configs can be layered.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pbar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_budget: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

macro_rules! layer {
    ($hi:expr, $lo:expr, $($f:ident),*) => {
        ExperimentConfig { $($f: $hi.$f.or($lo.$f)),* }
    };
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Usage(format!("config {}: {e}", path.display())))
    }

    /// Fields set in `self` win; unset ones fall back to `lower`.
    pub fn over(self, lower: ExperimentConfig) -> Self {
        layer!(
            self, lower, sigma_p, pbar, grid_n, p_max, out, seed, t_budget, t_start, tolerance, n_list, a,
            sigma_min, sigma_max, points
        )
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    /// Explicit grid when both `grid_n` and `p_max` are set; otherwise the
    /// missing parts are taken from `fallback`.
    pub fn grid_or(&self, fallback: SpectralGrid) -> Result<SpectralGrid> {
        SpectralGrid::new(self.grid_n.unwrap_or(fallback.n), self.p_max.unwrap_or(fallback.p_max))
    }

    /// Grid for a Gaussian packet, defaulting to the resolution rule.
    pub fn gaussian_grid(&self, sigma_p: f64, pbar: f64) -> Result<SpectralGrid> {
        if let (Some(n), Some(p)) = (self.grid_n, self.p_max) {
            return SpectralGrid::new(n, p);
        }
        self.grid_or(SpectralGrid::for_gaussian(sigma_p, pbar)?)
    }

    /// Grid explicitly requested, if any part of it was.
    pub fn explicit_grid(&self) -> Result<Option<SpectralGrid>> {
        match (self.grid_n, self.p_max) {
            (None, None) => Ok(None),
            (Some(n), Some(p)) => SpectralGrid::new(n, p).map(Some),
            _ => Err(Error::Usage("a sweep needs both --grid-n and --p-max, or neither".into())),
        }
    }
}
