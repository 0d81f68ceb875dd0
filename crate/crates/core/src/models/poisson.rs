use rand::RngCore;
use rand_distr::Distribution;
use statrs::function::gamma::ln_gamma;

use super::{check_positive, draw_positive_gamma, is_count, ln_gamma_pdf, EdgeModel, ParamSpace};
use crate::error::Result;

/// Poisson(lambda) edges with a Gamma(shape, rate) prior on the rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Poisson {
    shape: f64,
    rate: f64,
}

impl Poisson {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        Ok(Self {
            shape: check_positive("prior_shape", shape)?,
            rate: check_positive("prior_rate", rate)?,
        })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

impl Default for Poisson {
    fn default() -> Self {
        Self {
            shape: 1.0,
            rate: 1.0,
        }
    }
}

impl EdgeModel for Poisson {
    fn name(&self) -> &'static str {
        "poisson"
    }

    fn param_spaces(&self) -> &[ParamSpace] {
        &[ParamSpace::Positive]
    }

    fn is_discrete(&self) -> bool {
        true
    }

    fn in_support(&self, w: f64) -> bool {
        is_count(w)
    }

    #[inline]
    fn ln_pdf(&self, w: f64, theta: &[f64]) -> f64 {
        if !is_count(w) {
            return f64::NEG_INFINITY;
        }
        let lambda = theta[0];
        w * lambda.ln() - lambda - ln_gamma(w + 1.0)
    }

    fn ln_pdf_sum(&self, weights: &[f64], theta: &[f64]) -> f64 {
        let lambda = theta[0];
        let ln_lambda = lambda.ln();
        let mut total = 0.0;
        for &w in weights {
            if !is_count(w) {
                return f64::NEG_INFINITY;
            }
            total += w * ln_lambda - ln_gamma(w + 1.0);
        }
        total - lambda * weights.len() as f64
    }

    fn draw(&self, theta: &[f64], rng: &mut dyn RngCore) -> f64 {
        rand_distr::Poisson::new(theta[0])
            .expect("positive rate")
            .sample(rng)
    }

    fn prior_log_density(&self, theta: &[f64]) -> f64 {
        ln_gamma_pdf(theta[0], self.shape, self.rate)
    }

    fn prior_sample(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        vec![draw_positive_gamma(self.shape, self.rate, rng)]
    }

    fn hyperparameters(&self) -> Vec<(&'static str, f64)> {
        vec![("prior_shape", self.shape), ("prior_rate", self.rate)]
    }
}
