//! JSON experiment configuration: schema-validated up front, unknown keys
//! rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ak::AKSchedule;
use crate::grid::GridSpec;
use crate::maps::MapExpr;
use crate::phase_space::Manifold;
use crate::{Error, Result};

/// How the rotation number is specified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DiophantineSpec {
    Golden {
        #[serde(default = "default_depth")]
        depth: usize,
    },
    Sqrt2 {
        #[serde(default = "default_depth")]
        depth: usize,
    },
    Rational {
        num: i64,
        den: i64,
    },
    /// Quadratic surd `(m + √d)/q`.
    Surd {
        m: i64,
        d: i64,
        q: i64,
        #[serde(default = "default_depth")]
        depth: usize,
    },
    /// Exponentially-Liouville construction with `c_n = n` (`linear`) or a
    /// constant rate.
    Construct {
        #[serde(default = "default_schedule")]
        schedule: String,
        #[serde(default)]
        rate: Option<f64>,
        #[serde(default = "default_stages")]
        stages: usize,
    },
}

fn default_depth() -> usize {
    64
}
fn default_schedule() -> String {
    "linear".to_string()
}
fn default_stages() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub manifold: Option<Manifold>,
    /// Map under study (expression tree, same JSON schema as the library).
    #[serde(default)]
    pub map: Option<MapExpr>,
    /// Conjugator tower for rigidity scans.
    #[serde(default)]
    pub conjugator: Option<MapExpr>,
    #[serde(default)]
    pub diophantine: Option<DiophantineSpec>,
    #[serde(default)]
    pub schedule: Option<AKSchedule>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub witness_grid: Option<GridSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub count: Option<usize>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub n_max: Option<usize>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            manifold: None,
            map: None,
            conjugator: None,
            diophantine: None,
            schedule: None,
            grid: None,
            witness_grid: None,
            seed: None,
            count: None,
            tol: None,
            n_max: None,
            out_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(map) = &self.map {
            map.validate()?;
        }
        if let Some(h) = &self.conjugator {
            h.validate()?;
        }
        if let Some(s) = &self.schedule {
            s.validate()?;
        }
        if let Some(g) = &self.grid {
            g.validate()?;
        }
        if let Some(g) = &self.witness_grid {
            g.validate()?;
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(Error::config("tol must be positive"));
            }
        }
        if let Some(DiophantineSpec::Rational { den, .. }) = self.diophantine {
            if den <= 0 {
                return Err(Error::config("rational denominator must be positive"));
            }
        }
        Ok(())
    }

    /// Canonical JSON used for the config hash in CSV metadata.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
