//! Tunable numerical settings, loadable from TOML.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Settings {
    /// Absolute tolerance of every branch root search.
    pub tol_root: f64,
    /// Tolerance for comparing interval endpoints.
    pub tol_geom: f64,
    /// Half-width of the neutral multiplier band.
    pub tol_stab: f64,
    /// Base subdivisions of the sign-change scan.
    pub scan_n: usize,
    pub max_period: usize,
    pub max_depth: usize,
    /// Largest period ratio tried when looking for a window inside a region.
    pub window_max: usize,
    /// Refinement depth of Cantor-node approximations.
    pub cantor_depth: usize,
    pub transient: usize,
    pub samples: usize,
    /// Extra reach of grid edges, in cell widths.
    pub grid_slack: f64,
    /// Distance (in cells) under which SCC fragments are merged into one class.
    pub grid_merge: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            tol_root: 1e-12,
            tol_geom: 1e-9,
            tol_stab: 1e-6,
            scan_n: 4096,
            max_period: 64,
            max_depth: 16,
            window_max: 12,
            cantor_depth: 12,
            transient: 20_000,
            samples: 4096,
            grid_slack: 1.0,
            grid_merge: 32.0,
        }
    }
}

impl Settings {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_toml_str(&text)
    }
}
