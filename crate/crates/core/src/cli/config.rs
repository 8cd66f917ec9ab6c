//! Run configuration, read from a TOML file.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::free_energy::SolverOptions;
use crate::metastate::MetastateOptions;
use crate::model::{
    make_ising_field_kernels, make_potts_field_kernels, make_quadratic_ising, make_quadratic_potts, GeneralIsing,
    InteractionFunctional, ModelSpec, ProbabilityVector,
};
use crate::scan::{CoexistenceFamily, ScanOptions};
use crate::simulator::{EmpiricalOptions, DEFAULT_BUDGET, DEFAULT_DOMINANCE_THRESHOLD};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    QuadraticIsing,
    GeneralIsing,
    QuadraticPotts,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    /// Homogeneous Potts field `B`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<f64>,
    /// Ising fields, one disorder symbol each.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<Vec<f64>>,
    /// Disorder weights; normalized on load, uniform when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi: Option<Vec<f64>>,
    /// Coefficients of `G(m) = sum_k c_k m^k` for the general Ising family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_coeffs: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub n: Vec<usize>,
    /// Disorder draws per `n`.
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub dominance_threshold: f64,
    pub seed: u64,
    pub budget: u64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            n: vec![20, 40],
            samples: 200,
            epsilon: None,
            dominance_threshold: DEFAULT_DOMINANCE_THRESHOLD,
            seed: 0,
            budget: DEFAULT_BUDGET as u64,
        }
    }
}

impl SimulateConfig {
    pub fn options(&self) -> EmpiricalOptions {
        EmpiricalOptions {
            samples: self.samples,
            epsilon: self.epsilon,
            dominance_threshold: self.dominance_threshold,
            seed: self.seed,
            budget: self.budget,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlotConfig {
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hi: Option<f64>,
}

impl Default for PlotConfig {
    fn default() -> Self {
        Self {
            points: 400,
            lo: None,
            hi: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub weights: MetastateOptions,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanOptions>,
    #[serde(default)]
    pub plotdata: PlotConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.model()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Applies a master seed to every randomized stage.
    pub fn set_seed(&mut self, seed: u64) {
        self.solver.seed = seed;
        self.weights.seed = seed;
        self.simulate.seed = seed;
    }

    /// Builds the model triple, checking that the family has what it needs.
    pub fn model(&self) -> Result<ModelSpec> {
        let m = &self.model;
        let require = |v: Option<f64>, name: &str| v.ok_or_else(|| Error::Config(format!("model.{name} is required")));
        let (interaction, kernels): (Arc<dyn InteractionFunctional>, Vec<ProbabilityVector>) = match m.family {
            Family::QuadraticIsing => {
                let beta = require(m.beta, "beta")?;
                let fields = m.fields.clone().unwrap_or_else(|| vec![0.0]);
                (Arc::new(make_quadratic_ising(beta)?), make_ising_field_kernels(&fields)?)
            }
            Family::GeneralIsing => {
                let coeffs = m
                    .g_coeffs
                    .as_ref()
                    .ok_or_else(|| Error::Config("model.g_coeffs is required".into()))?;
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::Config("model.g_coeffs must be finite".into()));
                }
                let fields = m.fields.clone().unwrap_or_else(|| vec![0.0]);
                (Arc::new(GeneralIsing::polynomial(coeffs)), make_ising_field_kernels(&fields)?)
            }
            Family::QuadraticPotts => {
                let beta = require(m.beta, "beta")?;
                let q = m.q.ok_or_else(|| Error::Config("model.q is required".into()))?;
                (
                    Arc::new(make_quadratic_potts(q, beta)?),
                    make_potts_field_kernels(q, m.field.unwrap_or(0.0))?,
                )
            }
        };
        let pi = match &m.pi {
            Some(w) => {
                if w.len() != kernels.len() {
                    return Err(Error::Config(format!(
                        "model.pi has {} entries, the model has {} disorder symbols",
                        w.len(),
                        kernels.len()
                    )));
                }
                ProbabilityVector::from_weights(w)?
            }
            None => ProbabilityVector::uniform(kernels.len()),
        };
        ModelSpec::new(interaction, kernels, pi)
    }

    /// The one-dimensional reduction used by `scan` and `plotdata`.
    pub fn coexistence_family(&self) -> Result<CoexistenceFamily> {
        let m = &self.model;
        match m.family {
            Family::QuadraticPotts => Ok(CoexistenceFamily::Potts {
                q: m.q.ok_or_else(|| Error::Config("model.q is required".into()))?,
            }),
            Family::QuadraticIsing => Ok(CoexistenceFamily::SymmetricIsing),
            Family::GeneralIsing => Err(Error::Config(
                "coexistence scans cover the quadratic Potts and quadratic Ising families".into(),
            )),
        }
    }
}
