//! The split-merge reversible-jump kernel.
//!
//! One iteration runs, in order: a random-walk update of every parameter
//! vector, a split or merge attempt, an empty-block add or delete attempt
//! and a Gibbs sweep over node labels.

mod chain;
mod empty;
mod gibbs;
mod params;
mod split_merge;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use chain::{initial_state, run_chain, run_chain_from, run_chains, InitMode};
pub use empty::empty_block_move;
pub use gibbs::{gibbs_conditional, gibbs_sweep};
pub use params::rw_update_params;
pub use split_merge::{
    implied_u, log_jacobian_merge, log_jacobian_split, merge_params, merge_with, propose_merge,
    propose_split, split_with,
    sequential_allocation, split_params, Allocation, AllocationResult, MergeDraw, SplitDraw,
};


#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub sigma_u: f64,
    pub rw_sd: f64,
    pub nu: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            sigma_u: 1.0,
            rw_sd: 0.1,
            nu: 1.0,
            iterations: 10_000,
            burn_in: 5_000,
            seed: 1,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("sigma_u", self.sigma_u), ("rw_sd", self.rw_sd), ("nu", self.nu)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.burn_in >= self.iterations {
            return Err(Error::Config(format!(
                "burn_in ({}) must be smaller than iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    Rw,
    Split,
    Merge,
    Gibbs,
    AddEmpty,
    DeleteEmpty,
}

impl MoveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MoveKind::Rw => "rw",
            MoveKind::Split => "split",
            MoveKind::Merge => "merge",
            MoveKind::Gibbs => "gibbs",
            MoveKind::AddEmpty => "add_empty",
            MoveKind::DeleteEmpty => "delete_empty",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "rw" => MoveKind::Rw,
            "split" => MoveKind::Split,
            "merge" => MoveKind::Merge,
            "gibbs" => MoveKind::Gibbs,
            "add_empty" => MoveKind::AddEmpty,
            "delete_empty" => MoveKind::DeleteEmpty,
            _ => return None,
        })
    }
}

/// Record of one attempted move. `log_accept_prob` is the capped value
/// `min(0, log A)`; Gibbs sweeps always report 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoveOutcome {
    pub move_kind: MoveKind,
    pub accepted: bool,
    pub log_accept_prob: f64,
}

impl MoveOutcome {
    pub(crate) fn rejected(kind: MoveKind) -> Self {
        Self {
            move_kind: kind,
            accepted: false,
            log_accept_prob: f64::NEG_INFINITY,
        }
    }
}

/// Metropolis-Hastings decision in log space. NaN ratios are rejected.
pub(crate) fn accept(kind: MoveKind, log_ratio: f64, uniform: f64) -> MoveOutcome {
    if log_ratio.is_nan() {
        return MoveOutcome::rejected(kind);
    }
    let capped = log_ratio.min(0.0);
    MoveOutcome {
        move_kind: kind,
        accepted: uniform.ln() < capped,
        log_accept_prob: capped,
    }
}

/// `ln phi(x | 0, sd^2)` summed over components.
pub(crate) fn ln_normal_sum(x: &[f64], sd: f64) -> f64 {
    const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
    x.iter()
        .map(|v| {
            let z = v / sd;
            -LN_SQRT_2PI - sd.ln() - 0.5 * z * z
        })
        .sum()
}
