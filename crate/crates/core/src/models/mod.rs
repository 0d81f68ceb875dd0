//! Edge-weight distribution families, their parameter priors and the network
//! likelihood built from them.
//!
//! A family implements [`EdgeModel`]; nothing in the sampler refers to a
//! family by name, so adding a new one only requires a new implementation.

mod bernoulli;
mod likelihood;
pub mod matching;
mod negbin;
mod normal;
mod poisson;

use rand::RngCore;

pub use bernoulli::Bernoulli;
pub use likelihood::{log_likelihood, log_likelihood_node};
pub(crate) use likelihood::ln_likelihood_touching;
pub use matching::{Matching, ParamSpace, Transform};
pub use negbin::NegBinomial;
pub use normal::Normal;
pub use poisson::Poisson;

use crate::error::{Error, Result};

/// An edge-weight distribution `G(theta)` together with its prior `G_0`.
pub trait EdgeModel: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &'static str;

    /// Domain of each parameter component; its length is the dimension `p`.
    fn param_spaces(&self) -> &[ParamSpace];

    /// Whether the support is a subset of the non-negative integers.
    fn is_discrete(&self) -> bool;

    /// Log density (or pmf) at `w` for a `theta` already known to be valid.
    /// Weights outside the support give negative infinity.
    fn ln_pdf(&self, w: f64, theta: &[f64]) -> f64;

    /// Draws a weight from `G(theta)` for a valid `theta`.
    fn draw(&self, theta: &[f64], rng: &mut dyn RngCore) -> f64;

    /// Log density of `G_0` at `theta`; negative infinity outside the space.
    fn prior_log_density(&self, theta: &[f64]) -> f64;

    /// Draws `theta` from `G_0`.
    fn prior_sample(&self, rng: &mut dyn RngCore) -> Vec<f64>;

    /// Named prior hyperparameters, echoed into run manifests.
    fn hyperparameters(&self) -> Vec<(&'static str, f64)>;

    /// Sum of `ln_pdf` over `weights`. Families may override this to hoist
    /// per-parameter constants out of the loop.
    fn ln_pdf_sum(&self, weights: &[f64], theta: &[f64]) -> f64 {
        weights.iter().map(|&w| self.ln_pdf(w, theta)).sum()
    }

    /// Whether `w` is a possible edge weight.
    fn in_support(&self, w: f64) -> bool {
        w.is_finite()
    }

    fn dim(&self) -> usize {
        self.param_spaces().len()
    }

    fn matching(&self) -> Matching {
        Matching::from_spaces(self.param_spaces())
    }

    fn check_params(&self, theta: &[f64]) -> Result<()> {
        let spaces = self.param_spaces();
        if theta.len() != spaces.len() {
            return Err(Error::Domain(format!(
                "{} expects {} parameters, got {}",
                self.name(),
                spaces.len(),
                theta.len()
            )));
        }
        for (c, (s, &x)) in spaces.iter().zip(theta).enumerate() {
            if !s.contains(x) {
                return Err(Error::Domain(format!(
                    "{} parameter {} = {x} outside {s:?}",
                    self.name(),
                    c + 1
                )));
            }
        }
        Ok(())
    }

    fn log_density(&self, w: f64, theta: &[f64]) -> Result<f64> {
        self.check_params(theta)?;
        Ok(self.ln_pdf(w, theta))
    }

    fn sample_edge(&self, theta: &[f64], rng: &mut dyn RngCore) -> Result<f64> {
        self.check_params(theta)?;
        Ok(self.draw(theta, rng))
    }
}

/// Families selectable by name from a run configuration.
pub const MODEL_NAMES: [&str; 4] = ["bernoulli", "poisson", "negbin", "normal"];

/// `x * ln(y)` with the convention `0 * ln(0) = 0`.
#[inline]
pub(crate) fn xlny(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// `x * ln(1 - y)` with the convention `0 * ln(0) = 0`.
#[inline]
pub(crate) fn xln1m(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * (-y).ln_1p()
    }
}

#[inline]
pub(crate) fn is_count(w: f64) -> bool {
    w >= 0.0 && w.fract() == 0.0
}

/// Beta(a, b) log density on `[0, 1]`.
pub(crate) fn ln_beta_pdf(x: f64, a: f64, b: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        return f64::NEG_INFINITY;
    }
    xlny(a - 1.0, x) + xln1m(b - 1.0, x) - statrs::function::beta::ln_beta(a, b)
}

/// Gamma(shape, rate) log density on `(0, inf)`.
pub(crate) fn ln_gamma_pdf(x: f64, shape: f64, rate: f64) -> f64 {
    if !(x > 0.0 && x.is_finite()) {
        return f64::NEG_INFINITY;
    }
    shape * rate.ln() - statrs::function::gamma::ln_gamma(shape) + xlny(shape - 1.0, x) - rate * x
}

/// Draws from Beta(a, b) restricted to the open interval so the logit
/// matching is always defined.
pub(crate) fn draw_open_beta(a: f64, b: f64, rng: &mut dyn RngCore) -> f64 {
    use rand_distr::{Beta, Distribution};
    let dist = Beta::new(a, b).expect("validated beta hyperparameters");
    loop {
        let x: f64 = dist.sample(rng);
        if x > 0.0 && x < 1.0 {
            return x;
        }
    }
}

pub(crate) fn draw_positive_gamma(shape: f64, rate: f64, rng: &mut dyn RngCore) -> f64 {
    use rand_distr::{Distribution, Gamma};
    let dist = Gamma::new(shape, 1.0 / rate).expect("validated gamma hyperparameters");
    loop {
        let x: f64 = dist.sample(rng);
        if x > 0.0 && x.is_finite() {
            return x;
        }
    }
}

pub(crate) fn check_positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!("{name} must be positive, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn families() -> Vec<Box<dyn EdgeModel>> {
        vec![
            Box::new(Bernoulli::default()),
            Box::new(Poisson::default()),
            Box::new(NegBinomial::default()),
            Box::new(Normal::default()),
        ]
    }

    #[test]
    fn out_of_space_theta_is_domain_error() {
        assert!(Bernoulli::default().log_density(1.0, &[1.5]).is_err());
        assert!(Poisson::default().log_density(1.0, &[0.0]).is_err());
        assert!(NegBinomial::default().log_density(1.0, &[0.5, -1.0]).is_err());
        assert!(Normal::default().log_density(1.0, &[0.0, 0.0]).is_err());
        assert!(Normal::default().log_density(1.0, &[0.0]).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(Bernoulli::default().sample_edge(&[-0.1], &mut rng).is_err());
    }

    #[test]
    fn prior_draws_lie_in_space_and_have_finite_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in families() {
            for _ in 0..1000 {
                let theta = m.prior_sample(&mut rng);
                m.check_params(&theta).unwrap();
                assert!(m.prior_log_density(&theta).is_finite(), "{}", m.name());
                // matching must be defined at every prior draw
                m.matching().apply(&theta).unwrap();
            }
        }
    }

    #[test]
    fn prior_outside_space_is_neg_infinity() {
        assert_eq!(Bernoulli::default().prior_log_density(&[1.2]), f64::NEG_INFINITY);
        assert_eq!(Poisson::default().prior_log_density(&[-1.0]), f64::NEG_INFINITY);
        assert_eq!(
            NegBinomial::default().prior_log_density(&[0.5, 0.0]),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn ln_pdf_sum_matches_elementwise() {
        let ws = [0.0, 1.0, 3.0, 7.0, 0.0, 2.0];
        let m = NegBinomial::default();
        let theta = [0.3, 2.5];
        let direct: f64 = ws.iter().map(|&w| m.ln_pdf(w, &theta)).sum();
        assert!((m.ln_pdf_sum(&ws, &theta) - direct).abs() < 1e-10);
    }
}
