use rand::{Rng, RngCore};

use super::{accept, MoveKind, MoveOutcome};
use crate::models::EdgeModel;
use crate::prior::DmaPrior;
use crate::state::SamplerState;

/// `ln A_add` for adding one empty block to a state with block sizes
/// `sizes`. The new parameter is drawn from `G_0`, so its density cancels.
/// The `ln(K + 1)` term counts the labelings of the enlarged state.
pub(crate) fn ln_add_ratio(prior: &DmaPrior, sizes: &[usize], nu: f64) -> f64 {
    let k = sizes.len();
    let n_empty = sizes.iter().filter(|&&s| s == 0).count() as f64;
    let mut grown = sizes.to_vec();
    grown.push(0);
    prior.ln_joint_sizes(&grown) - prior.ln_joint_sizes(sizes)
        + (nu + n_empty).ln()
        - nu.ln()
        - (nu + n_empty + 1.0).ln()
        + ((k + 1) as f64).ln()
}

/// `ln A_del` for removing empty block `block`.
pub(crate) fn ln_delete_ratio(prior: &DmaPrior, sizes: &[usize], block: usize, nu: f64) -> f64 {
    let k = sizes.len();
    let n_empty = sizes.iter().filter(|&&s| s == 0).count() as f64;
    let mut shrunk = sizes.to_vec();
    shrunk.remove(block);
    prior.ln_joint_sizes(&shrunk) - prior.ln_joint_sizes(sizes) + nu.ln() + (nu + n_empty).ln()
        - (nu + n_empty - 1.0).ln()
        - (k as f64).ln()
}

/// Adds an empty block with probability `nu / (nu + N_empty)` (always when
/// there is none), otherwise deletes a uniformly chosen empty block. Only
/// the DMA prior changes, never the likelihood.
pub fn empty_block_move<M: EdgeModel + ?Sized>(
    state: &mut SamplerState,
    prior: &DmaPrior,
    nu: f64,
    model: &M,
    rng: &mut dyn RngCore,
) -> MoveOutcome {
    let sizes = state.assignment.block_sizes();
    let empties = state.assignment.empty_blocks();
    let n_empty = empties.len() as f64;
    let add = empties.is_empty() || rng.random::<f64>() < nu / (nu + n_empty);
    if add {
        let outcome = accept(MoveKind::AddEmpty, ln_add_ratio(prior, &sizes, nu), rng.random::<f64>());
        if outcome.accepted {
            state.push_empty_block(model.prior_sample(rng));
        }
        outcome
    } else {
        let block = empties[rng.random_range(0..empties.len())];
        if state.k() == 1 {
            return MoveOutcome::rejected(MoveKind::DeleteEmpty);
        }
        let outcome = accept(
            MoveKind::DeleteEmpty,
            ln_delete_ratio(prior, &sizes, block, nu),
            rng.random::<f64>(),
        );
        if outcome.accepted {
            state
                .relabel_contiguous(block)
                .expect("chosen block is empty and K > 1");
        }
        outcome
    }
}
