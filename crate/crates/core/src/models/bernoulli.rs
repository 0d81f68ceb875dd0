use rand::{Rng, RngCore};

use super::{check_positive, draw_open_beta, ln_beta_pdf, xln1m, xlny, EdgeModel, ParamSpace};
use crate::error::Result;

/// Bernoulli(p) edges with a Beta(a, b) prior on `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bernoulli {
    beta_a: f64,
    beta_b: f64,
}

impl Bernoulli {
    pub fn new(beta_a: f64, beta_b: f64) -> Result<Self> {
        Ok(Self {
            beta_a: check_positive("beta_a", beta_a)?,
            beta_b: check_positive("beta_b", beta_b)?,
        })
    }

    pub fn beta_a(&self) -> f64 {
        self.beta_a
    }

    pub fn beta_b(&self) -> f64 {
        self.beta_b
    }
}

impl Default for Bernoulli {
    fn default() -> Self {
        Self {
            beta_a: 1.0,
            beta_b: 1.0,
        }
    }
}

impl EdgeModel for Bernoulli {
    fn name(&self) -> &'static str {
        "bernoulli"
    }

    fn param_spaces(&self) -> &[ParamSpace] {
        &[ParamSpace::UnitInterval]
    }

    fn is_discrete(&self) -> bool {
        true
    }

    fn in_support(&self, w: f64) -> bool {
        w == 0.0 || w == 1.0
    }

    #[inline]
    fn ln_pdf(&self, w: f64, theta: &[f64]) -> f64 {
        let p = theta[0];
        if w == 1.0 {
            p.ln()
        } else if w == 0.0 {
            (-p).ln_1p()
        } else {
            f64::NEG_INFINITY
        }
    }

    fn ln_pdf_sum(&self, weights: &[f64], theta: &[f64]) -> f64 {
        let (mut ones, mut zeros) = (0.0, 0.0);
        for &w in weights {
            if w == 1.0 {
                ones += 1.0;
            } else if w == 0.0 {
                zeros += 1.0;
            } else {
                return f64::NEG_INFINITY;
            }
        }
        xlny(ones, theta[0]) + xln1m(zeros, theta[0])
    }

    fn draw(&self, theta: &[f64], rng: &mut dyn RngCore) -> f64 {
        if rng.random::<f64>() < theta[0] {
            1.0
        } else {
            0.0
        }
    }

    fn prior_log_density(&self, theta: &[f64]) -> f64 {
        ln_beta_pdf(theta[0], self.beta_a, self.beta_b)
    }

    fn prior_sample(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        vec![draw_open_beta(self.beta_a, self.beta_b, rng)]
    }

    fn hyperparameters(&self) -> Vec<(&'static str, f64)> {
        vec![("beta_a", self.beta_a), ("beta_b", self.beta_b)]
    }
}
