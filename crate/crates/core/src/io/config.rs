use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{Bernoulli, EdgeModel, NegBinomial, Normal, Poisson, MODEL_NAMES};
use crate::oracle::ConjugateModel;
use crate::prior::DmaPrior;
use crate::sampler::{InitMode, SamplerConfig};

fn default_gamma() -> f64 {
    1.0
}
fn default_delta() -> f64 {
    10.0
}
fn default_sigma_u() -> f64 {
    1.0
}
fn default_rw_sd() -> f64 {
    0.1
}
fn default_nu() -> f64 {
    1.0
}
fn default_iterations() -> usize {
    10_000
}
fn default_burn_in() -> usize {
    5_000
}
fn default_chains() -> usize {
    1
}
fn default_seed() -> u64 {
    1
}
fn default_init() -> String {
    "prior".into()
}

/// A flat run configuration read from a TOML file.
///
/// Only `model` is required. Hyperparameter keys that the chosen model does
/// not use are rejected, as are unknown keys. `init` is a comma-separated
/// list of initialisation modes cycled over the chains, so
/// `"one-block,singletons"` starts chain 1 in one block and chain 2 in
/// singletons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: String,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior_shape: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_sd: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_shape: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_rate: Option<f64>,

    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,

    #[serde(default = "default_sigma_u")]
    pub sigma_u: f64,
    #[serde(default = "default_rw_sd")]
    pub rw_sd: f64,
    #[serde(default = "default_nu")]
    pub nu: f64,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    #[serde(default = "default_chains")]
    pub n_chains: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_init")]
    pub init: String,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directed: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub self_loops: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,

    /// Block sizes of a synthetic network (`generate` only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_sizes: Option<Vec<usize>>,
    /// Between-block parameter of a synthetic network.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0: Option<Vec<f64>>,
    /// One within-block parameter row per block of a synthetic network.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<Vec<f64>>>,

    /// Largest number of blocks enumerated by the exact oracle; defaults to
    /// the number of nodes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
}

impl RunConfig {
    /// A configuration for `model` with every other key at its default.
    pub fn for_model(model: &str) -> Self {
        Self {
            model: model.into(),
            beta_a: None,
            beta_b: None,
            prior_shape: None,
            prior_rate: None,
            mean_mean: None,
            mean_sd: None,
            precision_shape: None,
            precision_rate: None,
            gamma: default_gamma(),
            delta: default_delta(),
            sigma_u: default_sigma_u(),
            rw_sd: default_rw_sd(),
            nu: default_nu(),
            iterations: default_iterations(),
            burn_in: default_burn_in(),
            n_chains: default_chains(),
            seed: default_seed(),
            init: default_init(),
            network: None,
            directed: None,
            self_loops: None,
            out_dir: None,
            block_sizes: None,
            theta0: None,
            theta: None,
            k_max: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration serialises to TOML")
    }

    /// Checks every sampling-related value without touching the file system.
    pub fn validate(&self) -> Result<()> {
        self.build_model()?;
        self.prior()?;
        self.sampler_config().validate()?;
        if self.n_chains == 0 {
            return Err(Error::Config("n_chains must be at least one".into()));
        }
        self.init_modes()?;
        if self.k_max == Some(0) {
            return Err(Error::Config("k_max must be at least one".into()));
        }
        Ok(())
    }

    pub fn prior(&self) -> Result<DmaPrior> {
        DmaPrior::new(self.gamma, self.delta)
    }

    pub fn sampler_config(&self) -> SamplerConfig {
        SamplerConfig {
            sigma_u: self.sigma_u,
            rw_sd: self.rw_sd,
            nu: self.nu,
            iterations: self.iterations,
            burn_in: self.burn_in,
            seed: self.seed,
        }
    }

    /// Initialisation mode of each chain.
    pub fn init_modes(&self) -> Result<Vec<InitMode>> {
        let cycle: Vec<InitMode> = self
            .init
            .split(',')
            .map(|s| s.trim().parse())
            .collect::<Result<_>>()?;
        Ok((0..self.n_chains).map(|c| cycle[c % cycle.len()]).collect())
    }

    fn hyper(&self) -> [(&'static str, Option<f64>); 8] {
        [
            ("beta_a", self.beta_a),
            ("beta_b", self.beta_b),
            ("prior_shape", self.prior_shape),
            ("prior_rate", self.prior_rate),
            ("mean_mean", self.mean_mean),
            ("mean_sd", self.mean_sd),
            ("precision_shape", self.precision_shape),
            ("precision_rate", self.precision_rate),
        ]
    }

    fn reject_unused(&self, used: &[&str]) -> Result<()> {
        for (key, value) in self.hyper() {
            if value.is_some() && !used.contains(&key) {
                return Err(Error::Config(format!(
                    "key '{key}' does not apply to the {} model",
                    self.model
                )));
            }
        }
        Ok(())
    }

    /// Instantiates the configured edge model.
    pub fn build_model(&self) -> Result<Box<dyn EdgeModel>> {
        let or = |v: Option<f64>, d: f64| v.unwrap_or(d);
        let model: Box<dyn EdgeModel> = match self.model.as_str() {
            "bernoulli" => {
                self.reject_unused(&["beta_a", "beta_b"])?;
                Box::new(Bernoulli::new(or(self.beta_a, 1.0), or(self.beta_b, 1.0))?)
            }
            "poisson" => {
                self.reject_unused(&["prior_shape", "prior_rate"])?;
                Box::new(Poisson::new(or(self.prior_shape, 1.0), or(self.prior_rate, 1.0))?)
            }
            "negbin" => {
                self.reject_unused(&["beta_a", "beta_b", "prior_shape", "prior_rate"])?;
                Box::new(NegBinomial::new(
                    or(self.beta_a, 1.0),
                    or(self.beta_b, 1.0),
                    or(self.prior_shape, 1.0),
                    or(self.prior_rate, 1.0),
                )?)
            }
            "normal" => {
                self.reject_unused(&["mean_mean", "mean_sd", "precision_shape", "precision_rate"])?;
                Box::new(Normal::new(
                    or(self.mean_mean, 0.0),
                    or(self.mean_sd, 10.0),
                    or(self.precision_shape, 1.0),
                    or(self.precision_rate, 1.0),
                )?)
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown model '{other}' (expected one of {})",
                    MODEL_NAMES.join(", ")
                )))
            }
        };
        Ok(model)
    }

    /// The conjugate pair the exact oracle integrates, for models that have one.
    pub fn conjugate_model(&self) -> Result<ConjugateModel> {
        let or = |v: Option<f64>, d: f64| v.unwrap_or(d);
        match self.model.as_str() {
            "bernoulli" => {
                self.reject_unused(&["beta_a", "beta_b"])?;
                Ok(ConjugateModel::BernoulliBeta {
                    a: or(self.beta_a, 1.0),
                    b: or(self.beta_b, 1.0),
                })
            }
            "poisson" => {
                self.reject_unused(&["prior_shape", "prior_rate"])?;
                Ok(ConjugateModel::PoissonGamma {
                    shape: or(self.prior_shape, 1.0),
                    rate: or(self.prior_rate, 1.0),
                })
            }
            other => Err(Error::Config(format!(
                "the exact oracle supports bernoulli and poisson, not '{other}'"
            ))),
        }
    }

    /// The same configuration with every model hyperparameter written out,
    /// so an echoed copy does not depend on library defaults.
    pub fn resolved(&self) -> Result<Self> {
        let model = self.build_model()?;
        let mut out = self.clone();
        for (key, value) in model.hyperparameters() {
            let slot = match key {
                "beta_a" => &mut out.beta_a,
                "beta_b" => &mut out.beta_b,
                "prior_shape" => &mut out.prior_shape,
                "prior_rate" => &mut out.prior_rate,
                "mean_mean" => &mut out.mean_mean,
                "mean_sd" => &mut out.mean_sd,
                "precision_shape" => &mut out.precision_shape,
                "precision_rate" => &mut out.precision_rate,
                _ => continue,
            };
            *slot = Some(value);
        }
        Ok(out)
    }
}
