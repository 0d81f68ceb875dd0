use rand::RngCore;
use rand_distr::Distribution;
use statrs::function::gamma::ln_gamma;

use super::{
    check_positive, draw_open_beta, draw_positive_gamma, is_count, ln_beta_pdf, ln_gamma_pdf,
    xln1m, EdgeModel, ParamSpace,
};
use crate::error::{Error, Result};

/// Generalised negative binomial edges with real-valued `r > 0`:
///
/// `P(X = x) = Gamma(x + r) / (Gamma(r) x!) * p^r * (1 - p)^x`.
///
/// Parameters are ordered `(p, r)`. The prior is Beta(a, b) on `p` times
/// Gamma(shape, rate) on `r`. There is no conjugate prior for this pair.
#[derive(Debug, Clone, PartialEq)]
pub struct NegBinomial {
    beta_a: f64,
    beta_b: f64,
    shape: f64,
    rate: f64,
}

impl NegBinomial {
    pub fn new(beta_a: f64, beta_b: f64, shape: f64, rate: f64) -> Result<Self> {
        Ok(Self {
            beta_a: check_positive("beta_a", beta_a)?,
            beta_b: check_positive("beta_b", beta_b)?,
            shape: check_positive("prior_shape", shape)?,
            rate: check_positive("prior_rate", rate)?,
        })
    }

    /// Mean `r (1 - p) / p`.
    pub fn mean(theta: &[f64]) -> f64 {
        theta[1] * (1.0 - theta[0]) / theta[0]
    }

    /// Variance `r (1 - p) / p^2`.
    pub fn variance(theta: &[f64]) -> f64 {
        theta[1] * (1.0 - theta[0]) / (theta[0] * theta[0])
    }
}

impl Default for NegBinomial {
    fn default() -> Self {
        Self {
            beta_a: 1.0,
            beta_b: 1.0,
            shape: 1.0,
            rate: 1.0,
        }
    }
}

impl EdgeModel for NegBinomial {
    fn name(&self) -> &'static str {
        "negbin"
    }

    fn param_spaces(&self) -> &[ParamSpace] {
        &[ParamSpace::UnitInterval, ParamSpace::Positive]
    }

    fn is_discrete(&self) -> bool {
        true
    }

    fn check_params(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != 2 {
            return Err(Error::Domain(format!(
                "negbin expects 2 parameters, got {}",
                theta.len()
            )));
        }
        let (p, r) = (theta[0], theta[1]);
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Domain(format!("negbin p = {p} outside (0, 1]")));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("negbin r = {r} must be positive")));
        }
        Ok(())
    }

    fn in_support(&self, w: f64) -> bool {
        is_count(w)
    }

    #[inline]
    fn ln_pdf(&self, w: f64, theta: &[f64]) -> f64 {
        if !is_count(w) {
            return f64::NEG_INFINITY;
        }
        let (p, r) = (theta[0], theta[1]);
        ln_gamma(w + r) - ln_gamma(r) - ln_gamma(w + 1.0) + r * p.ln() + xln1m(w, p)
    }

    fn ln_pdf_sum(&self, weights: &[f64], theta: &[f64]) -> f64 {
        let (p, r) = (theta[0], theta[1]);
        let ln_gamma_r = ln_gamma(r);
        let ln_1mp = (-p).ln_1p();
        let mut total = 0.0;
        let mut count_sum = 0.0;
        for &w in weights {
            if !is_count(w) {
                return f64::NEG_INFINITY;
            }
            if w > 0.0 {
                total += ln_gamma(w + r) - ln_gamma_r - ln_gamma(w + 1.0);
                count_sum += w;
            }
        }
        let tail = if count_sum == 0.0 { 0.0 } else { count_sum * ln_1mp };
        total + r * p.ln() * weights.len() as f64 + tail
    }

    fn draw(&self, theta: &[f64], rng: &mut dyn RngCore) -> f64 {
        let (p, r) = (theta[0], theta[1]);
        if p >= 1.0 {
            return 0.0;
        }
        // Gamma-Poisson mixture representation.
        let lambda: f64 = rand_distr::Gamma::new(r, (1.0 - p) / p)
            .expect("valid negbin parameters")
            .sample(rng);
        if lambda <= 0.0 {
            return 0.0;
        }
        rand_distr::Poisson::new(lambda)
            .expect("finite positive rate")
            .sample(rng)
    }

    fn prior_log_density(&self, theta: &[f64]) -> f64 {
        ln_beta_pdf(theta[0], self.beta_a, self.beta_b) + ln_gamma_pdf(theta[1], self.shape, self.rate)
    }

    fn prior_sample(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        vec![
            draw_open_beta(self.beta_a, self.beta_b, rng),
            draw_positive_gamma(self.shape, self.rate, rng),
        ]
    }

    fn hyperparameters(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("beta_a", self.beta_a),
            ("beta_b", self.beta_b),
            ("prior_shape", self.shape),
            ("prior_rate", self.rate),
        ]
    }
}
