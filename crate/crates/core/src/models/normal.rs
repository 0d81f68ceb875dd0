use rand::RngCore;
use rand_distr::Distribution;

use super::{check_positive, draw_positive_gamma, ln_gamma_pdf, EdgeModel, ParamSpace};
use crate::error::Result;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Normal(mu, sigma) edges, parameters ordered `(mu, sigma)`.
///
/// Prior: `mu ~ Normal(mean_mean, mean_sd^2)` independently of the precision
/// `1 / sigma^2 ~ Gamma(precision_shape, precision_rate)`. The prior density
/// is reported on the `(mu, sigma)` scale, i.e. it includes the Jacobian
/// `2 / sigma^3` of the precision-to-sigma map.
#[derive(Debug, Clone, PartialEq)]
pub struct Normal {
    mean_mean: f64,
    mean_sd: f64,
    precision_shape: f64,
    precision_rate: f64,
}

impl Normal {
    pub fn new(mean_mean: f64, mean_sd: f64, precision_shape: f64, precision_rate: f64) -> Result<Self> {
        if !mean_mean.is_finite() {
            return Err(crate::Error::Config("mean_mean must be finite".into()));
        }
        Ok(Self {
            mean_mean,
            mean_sd: check_positive("mean_sd", mean_sd)?,
            precision_shape: check_positive("precision_shape", precision_shape)?,
            precision_rate: check_positive("precision_rate", precision_rate)?,
        })
    }
}

impl Default for Normal {
    fn default() -> Self {
        Self {
            mean_mean: 0.0,
            mean_sd: 10.0,
            precision_shape: 1.0,
            precision_rate: 1.0,
        }
    }
}

impl EdgeModel for Normal {
    fn name(&self) -> &'static str {
        "normal"
    }

    fn param_spaces(&self) -> &[ParamSpace] {
        &[ParamSpace::Real, ParamSpace::Positive]
    }

    fn is_discrete(&self) -> bool {
        false
    }

    #[inline]
    fn ln_pdf(&self, w: f64, theta: &[f64]) -> f64 {
        let (mu, sigma) = (theta[0], theta[1]);
        let z = (w - mu) / sigma;
        -LN_SQRT_2PI - sigma.ln() - 0.5 * z * z
    }

    fn draw(&self, theta: &[f64], rng: &mut dyn RngCore) -> f64 {
        rand_distr::Normal::new(theta[0], theta[1])
            .expect("valid normal parameters")
            .sample(rng)
    }

    fn prior_log_density(&self, theta: &[f64]) -> f64 {
        let (mu, sigma) = (theta[0], theta[1]);
        if !mu.is_finite() || !(sigma > 0.0 && sigma.is_finite()) {
            return f64::NEG_INFINITY;
        }
        let z = (mu - self.mean_mean) / self.mean_sd;
        let ln_mu = -LN_SQRT_2PI - self.mean_sd.ln() - 0.5 * z * z;
        let precision = 1.0 / (sigma * sigma);
        let ln_sigma = ln_gamma_pdf(precision, self.precision_shape, self.precision_rate)
            + std::f64::consts::LN_2
            - 3.0 * sigma.ln();
        ln_mu + ln_sigma
    }

    fn prior_sample(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let mu = rand_distr::Normal::new(self.mean_mean, self.mean_sd)
            .expect("validated hyperparameters")
            .sample(rng);
        let precision = draw_positive_gamma(self.precision_shape, self.precision_rate, rng);
        vec![mu, 1.0 / precision.sqrt()]
    }

    fn hyperparameters(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("mean_mean", self.mean_mean),
            ("mean_sd", self.mean_sd),
            ("precision_shape", self.precision_shape),
            ("precision_rate", self.precision_rate),
        ]
    }
}
