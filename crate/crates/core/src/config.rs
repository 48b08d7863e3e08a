//! JSON instance configuration consumed by the command-line tool.
//!
//! ```json
//! {
//!   "matrix": [[0, 1], [1, 0]],
//!   "rho": [1.0, 1.0],
//!   "surface": {"type": "closed", "genus": 1},
//!   "singularities": [{"gamma": 1, "position": [0.5, 0.5]}],
//!   "smooth_factors": [{"base": 1, "modes": [{"amplitude": 0.1, "k": [1, 0]}]}],
//!   "solver": {"resolution": 64, "tol": 1e-8, "steps": 10},
//!   "caps": {"exponent_cap": 20, "tolerance": 1e-8}
//! }
//! ```
//!
//! `surface` may also be `{"type": "domain", "holes": h}` or `{"chi": c}`.

use serde::{Deserialize, Serialize};

use crate::degree::{ProblemInstance, SurfaceSpec};
use crate::error::{Error, Result};
use crate::matrix::InteractionMatrix;
use crate::spectrum::SingularitySet;
use crate::torus::{SmoothFactor, WeightSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holes: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<i64>,
}

impl SurfaceConfig {
    pub fn to_spec(&self) -> Result<SurfaceSpec> {
        let bad = |msg: &str| Error::InvalidInput(format!("surface: {msg}"));
        match (self.kind.as_deref(), self.genus, self.holes, self.chi) {
            (None, None, None, Some(chi)) => Ok(SurfaceSpec::with_chi(chi)),
            (Some("closed"), Some(g), None, None) => Ok(SurfaceSpec::closed(g)),
            (Some("domain"), None, Some(h), None) => Ok(SurfaceSpec::domain(h)),
            (Some("closed"), ..) => Err(bad("closed surfaces take exactly one field \"genus\"")),
            (Some("domain"), ..) => Err(bad("planar domains take exactly one field \"holes\"")),
            (Some(other), ..) => Err(bad(&format!("unknown type \"{other}\" (expected \"closed\" or \"domain\")"))),
            (None, ..) => Err(bad("give either {\"chi\": c} or a \"type\"")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingularityConfig {
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent_cap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

/// Inputs for the `pohozaev` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PohozaevConfig {
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<f64>>,
    /// Blowup weights for the critical-surface residual.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mus: Option<Vec<f64>>,
}

fn default_mu() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceConfig>,
    #[serde(default)]
    pub singularities: Vec<SingularityConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub smooth_factors: Vec<SmoothFactor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caps: Option<CapsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pohozaev: Option<PohozaevConfig>,
}

impl InstanceConfig {
    /// Parse JSON, reporting the offending field path and line on failure.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::InvalidInput(format!("config field `{path}`: {}", e.into_inner()))
        })
    }

    pub fn matrix(&self) -> Result<InteractionMatrix> {
        let rows = self.matrix.as_ref().ok_or_else(|| Error::InvalidInput("config field `matrix` is required".into()))?;
        InteractionMatrix::new(rows).map_err(|e| Error::InvalidInput(format!("config field `matrix`: {e}")))
    }

    pub fn rho(&self) -> Result<Vec<f64>> {
        self.rho.clone().ok_or_else(|| Error::InvalidInput("config field `rho` is required".into()))
    }

    pub fn surface(&self) -> Result<SurfaceSpec> {
        self.surface
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("config field `surface` is required".into()))?
            .to_spec()
    }

    pub fn singularity_set(&self) -> Result<SingularitySet> {
        let gammas: Vec<f64> = self.singularities.iter().map(|s| s.gamma).collect();
        let placed = self.singularities.iter().filter(|s| s.position.is_some()).count();
        let built = if placed == 0 {
            SingularitySet::new(gammas)
        } else if placed == gammas.len() {
            SingularitySet::with_positions(gammas, self.singularities.iter().filter_map(|s| s.position).collect())
        } else {
            Err(Error::InvalidInput("either all or none of the singularities need a position".into()))
        };
        built.map_err(|e| Error::InvalidInput(format!("config field `singularities`: {e}")))
    }

    pub fn instance(&self) -> Result<ProblemInstance> {
        let matrix = self.matrix()?;
        ProblemInstance::new(self.surface()?, self.singularity_set()?, matrix, self.rho()?).map_err(|e| match e {
            Error::InvalidInput(msg) => Error::InvalidInput(format!("config field `rho`: {msg}")),
            other => other,
        })
    }

    pub fn weight_spec(&self) -> Result<WeightSpec> {
        Ok(WeightSpec { smooth_factors: self.smooth_factors.clone(), singularities: self.singularity_set()? })
    }

    pub fn exponent_cap(&self) -> Option<f64> {
        self.caps.as_ref().and_then(|c| c.exponent_cap)
    }

    pub fn critical_tolerance(&self) -> Option<f64> {
        self.caps.as_ref().and_then(|c| c.tolerance)
    }
}
