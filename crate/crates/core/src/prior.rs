//! The Dirichlet-multinomial allocation prior DMA(gamma, delta) on the number
//! of blocks and the node labels.
//!
//! `K - 1 ~ Poisson(delta)` and, given `K`, the labels follow the
//! Dirichlet-multinomial obtained by integrating a symmetric Dirichlet(gamma)
//! weight vector out of a multinomial allocation. The weight vector itself is
//! never represented.

use rand::RngCore;
use rand_distr::Distribution;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::state::BlockAssignment;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmaPrior {
    gamma: f64,
    delta: f64,
}

impl DmaPrior {
    pub fn new(gamma: f64, delta: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Config(format!("gamma must be positive, got {gamma}")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Config(format!("delta must be positive, got {delta}")));
        }
        Ok(Self { gamma, delta })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `ln P(K = k)` under the shifted Poisson.
    pub fn log_prior_k(&self, k: usize) -> Result<f64> {
        if k == 0 {
            return Err(Error::Domain("number of blocks must be at least one".into()));
        }
        Ok(self.ln_prior_k(k))
    }

    #[inline]
    pub(crate) fn ln_prior_k(&self, k: usize) -> f64 {
        let m = (k - 1) as f64;
        let ln_delta_term = if m == 0.0 { 0.0 } else { m * self.delta.ln() };
        ln_delta_term - self.delta - ln_gamma(k as f64)
    }

    /// Dirichlet-multinomial log mass of the labels given `K`. Empty blocks
    /// enter through their `Gamma(gamma + 0)` factors.
    pub fn log_prior_z(&self, assignment: &BlockAssignment) -> f64 {
        self.ln_prior_sizes(&assignment.block_sizes())
    }

    pub(crate) fn ln_prior_sizes(&self, sizes: &[usize]) -> f64 {
        let k = sizes.len() as f64;
        let n: usize = sizes.iter().sum();
        let ln_gamma_g = ln_gamma(self.gamma);
        let per_block: f64 = sizes
            .iter()
            .map(|&s| {
                if s == 0 {
                    0.0
                } else {
                    ln_gamma(self.gamma + s as f64) - ln_gamma_g
                }
            })
            .sum();
        ln_gamma(k * self.gamma) - ln_gamma(k * self.gamma + n as f64) + per_block
    }

    /// `ln P(z_i = target | z_{-i}, K)`.
    pub fn conditional_log_prob(
        &self,
        assignment: &BlockAssignment,
        i: usize,
        target_block: usize,
    ) -> Result<f64> {
        if target_block >= assignment.k() {
            return Err(Error::Domain(format!("block {target_block} out of range")));
        }
        if i >= assignment.n_nodes() {
            return Err(Error::Domain(format!("node {i} out of range")));
        }
        let mut others = assignment.block_sizes();
        others[assignment.label(i)] -= 1;
        Ok(self.ln_conditional(others[target_block], assignment.k(), assignment.n_nodes()))
    }

    /// `ln[(gamma + size_without_i) / (K gamma + N - 1)]`.
    #[inline]
    pub(crate) fn ln_conditional(&self, size_without_i: usize, k: usize, n: usize) -> f64 {
        (self.gamma + size_without_i as f64).ln()
            - (k as f64 * self.gamma + n as f64 - 1.0).ln()
    }

    /// `ln P(K) + ln P(Z | K)`.
    pub fn log_joint_prior(&self, assignment: &BlockAssignment) -> f64 {
        self.ln_prior_k(assignment.k()) + self.log_prior_z(assignment)
    }

    pub(crate) fn ln_joint_sizes(&self, sizes: &[usize]) -> f64 {
        self.ln_prior_k(sizes.len()) + self.ln_prior_sizes(sizes)
    }

    /// Draws `(K, Z)` for `n` nodes by sequential Polya-urn allocation.
    pub fn sample(&self, n: usize, rng: &mut dyn RngCore) -> BlockAssignment {
        let extra: f64 = rand_distr::Poisson::new(self.delta)
            .expect("validated delta")
            .sample(rng);
        let k = 1 + extra as usize;
        let mut sizes = vec![0usize; k];
        let mut labels = Vec::with_capacity(n);
        for i in 0..n {
            let weights: Vec<f64> = sizes.iter().map(|&s| self.gamma + s as f64).collect();
            let total = k as f64 * self.gamma + i as f64;
            let mut u = rand::Rng::random::<f64>(rng) * total;
            let mut chosen = k - 1;
            for (b, w) in weights.iter().enumerate() {
                if u < *w {
                    chosen = b;
                    break;
                }
                u -= w;
            }
            sizes[chosen] += 1;
            labels.push(chosen);
        }
        BlockAssignment::new(labels, k).expect("labels drawn in range")
    }
}
