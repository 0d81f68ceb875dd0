//! Random-walk Metropolis-Hastings on the matched scale for `theta0` and
//! every block parameter.

use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};

use super::{accept, MoveKind, MoveOutcome};
use crate::models::EdgeModel;
use crate::network::Network;
use crate::state::SamplerState;

/// Edge weights grouped by the parameter that governs them: group 0 holds
/// between-block edges, group `b + 1` the edges inside block `b`.
pub(crate) fn group_weights(network: &Network, labels: &[usize], k: usize) -> Vec<Vec<f64>> {
    let mut groups = vec![Vec::new(); k + 1];
    for (i, j) in network.edges() {
        let g = if labels[i] == labels[j] { labels[i] + 1 } else { 0 };
        groups[g].push(network.weight(i, j));
    }
    groups
}

/// Log target density of one parameter group on the matched scale:
/// likelihood plus prior plus the log-Jacobian of `m^{-1}`.
fn ln_target<M: EdgeModel + ?Sized>(model: &M, weights: &[f64], theta: &[f64]) -> Option<(f64, f64)> {
    let ln_jac = -model.matching().ln_derivative(theta).ok()?;
    let ll = model.ln_pdf_sum(weights, theta);
    let total = ll + model.prior_log_density(theta) + ln_jac;
    total.is_finite().then_some((total, ll))
}

/// Updates `theta0, theta_1, ..., theta_K` in turn. Each proposal perturbs
/// `m(theta)` with independent Normal(0, rw_sd^2) noise per component and is
/// accepted with the Metropolis-Hastings ratio of the target expressed on the
/// matched scale. Returns one outcome per group.
pub fn rw_update_params<M: EdgeModel + ?Sized>(
    state: &mut SamplerState,
    network: &Network,
    model: &M,
    rw_sd: f64,
    rng: &mut dyn RngCore,
) -> Vec<MoveOutcome> {
    let k = state.k();
    let groups = group_weights(network, state.assignment.labels(), k);
    let matching = model.matching();
    let mut outcomes = Vec::with_capacity(k + 1);
    for (g, weights) in groups.iter().enumerate() {
        let current = state.params.group(g).to_vec();
        let Some((ln_current, _)) = ln_target(model, weights, &current) else {
            // unreachable for valid states; leave the group untouched
            outcomes.push(MoveOutcome::rejected(MoveKind::Rw));
            continue;
        };
        let proposed = matching.apply(&current).ok().and_then(|y| {
            let y: Vec<f64> = y
                .iter()
                .map(|v| {
                    let e: f64 = StandardNormal.sample(rng);
                    v + rw_sd * e
                })
                .collect();
            matching.invert(&y).ok()
        });
        let log_ratio = proposed
            .as_deref()
            .filter(|theta| model.check_params(theta).is_ok())
            .and_then(|theta| ln_target(model, weights, theta))
            .map_or(f64::NEG_INFINITY, |(ln_new, _)| ln_new - ln_current);
        let outcome = accept(MoveKind::Rw, log_ratio, rng.random::<f64>());
        if outcome.accepted {
            *state.params.group_mut(g) = proposed.expect("accepted proposals exist");
        }
        outcomes.push(outcome);
    }
    outcomes
}
