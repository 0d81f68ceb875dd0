use rand::{Rng, RngCore};

use super::{MoveKind, MoveOutcome};
use crate::models::EdgeModel;
use crate::network::Network;
use crate::prior::DmaPrior;
use crate::state::SamplerState;

/// Normalised log-probabilities of each candidate block for node `i`,
/// combining the DMA conditional with the node's edge likelihood. Terms
/// shared by every candidate (edges to other blocks under `theta0`) are
/// dropped before normalising.
pub fn gibbs_conditional<M: EdgeModel + ?Sized>(
    state: &SamplerState,
    network: &Network,
    model: &M,
    prior: &DmaPrior,
    i: usize,
) -> Vec<f64> {
    let between = between_matrix(network, model, &state.params.theta0);
    conditional_from(state, network, model, prior, &between, i)
}

/// `ln g(w_ij | theta0)` for every ordered pair, row-major.
fn between_matrix<M: EdgeModel + ?Sized>(network: &Network, model: &M, theta0: &[f64]) -> Vec<f64> {
    network.weights().iter().map(|&w| model.ln_pdf(w, theta0)).collect()
}

fn conditional_from<M: EdgeModel + ?Sized>(
    state: &SamplerState,
    network: &Network,
    model: &M,
    prior: &DmaPrior,
    between: &[f64],
    i: usize,
) -> Vec<f64> {
    let n = network.n_nodes();
    let k = state.k();
    let labels = state.assignment.labels();
    let theta = &state.params.theta;

    let mut sizes = state.assignment.block_sizes();
    sizes[labels[i]] -= 1;

    // log-likelihood gain of placing i in block b relative to theta0
    let mut gain = vec![0.0; k];
    for j in (0..n).filter(|&j| j != i) {
        let b = labels[j];
        gain[b] += model.ln_pdf(network.weight(i, j), &theta[b]) - between[i * n + j];
        if network.is_directed() {
            gain[b] += model.ln_pdf(network.weight(j, i), &theta[b]) - between[j * n + i];
        }
    }
    if network.has_self_loops() {
        let w = network.weight(i, i);
        for (b, g) in gain.iter_mut().enumerate() {
            *g += model.ln_pdf(w, &theta[b]);
        }
    }

    let mut logp: Vec<f64> = (0..k)
        .map(|b| prior.ln_conditional(sizes[b], k, n) + gain[b])
        .collect();
    let max = logp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ln_norm = max + logp.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
    for v in &mut logp {
        *v -= ln_norm;
    }
    logp
}

/// Reassigns every node in turn, in order `0..N`, by drawing from its full
/// conditional over the current `K` blocks, empty blocks included.
pub fn gibbs_sweep<M: EdgeModel + ?Sized>(
    state: &mut SamplerState,
    network: &Network,
    model: &M,
    prior: &DmaPrior,
    rng: &mut dyn RngCore,
) -> MoveOutcome {
    let between = between_matrix(network, model, &state.params.theta0);
    for i in 0..network.n_nodes() {
        let logp = conditional_from(state, network, model, prior, &between, i);
        let mut u = rng.random::<f64>();
        let mut chosen = logp.len() - 1;
        for (b, lp) in logp.iter().enumerate() {
            let p = lp.exp();
            if u < p {
                chosen = b;
                break;
            }
            u -= p;
        }
        state.assignment.set_label(i, chosen);
    }
    MoveOutcome {
        move_kind: MoveKind::Gibbs,
        accepted: true,
        log_accept_prob: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{log_likelihood_node, Bernoulli, NegBinomial};
    use crate::state::{BlockAssignment, BlockParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_block_keeps_everyone() {
        let net = Network::zeros(4, false, false);
        let mut state = SamplerState::new(
            BlockAssignment::one_block(4),
            BlockParams::new(vec![0.3], vec![vec![0.6]]).unwrap(),
        )
        .unwrap();
        let prior = DmaPrior::new(1.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        gibbs_sweep(&mut state, &net, &Bernoulli::default(), &prior, &mut rng);
        assert_eq!(state.assignment.labels(), &[0, 0, 0, 0]);
    }

    #[test]
    fn equal_parameters_reduce_to_prior_conditional() {
        let net = Network::from_rows(
            &[vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]],
            false,
            false,
        )
        .unwrap();
        let state = SamplerState::new(
            BlockAssignment::new(vec![0, 0, 1], 2).unwrap(),
            BlockParams::new(vec![0.3], vec![vec![0.3], vec![0.3]]).unwrap(),
        )
        .unwrap();
        let prior = DmaPrior::new(1.0, 1.0).unwrap();
        let logp = gibbs_conditional(&state, &net, &Bernoulli::default(), &prior, 2);
        let ratio = (logp[0] - logp[1]).exp();
        assert!((ratio - 3.0).abs() < 1e-12);
    }

    #[test]
    fn matches_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let m = NegBinomial::default();
        let prior = DmaPrior::new(0.8, 2.0).unwrap();
        for case in 0..100 {
            let n = 6;
            let k = rng.random_range(1..5);
            let mut net = Network::zeros(n, case % 2 == 0, case % 3 == 0);
            for (i, j) in net.edges().collect::<Vec<_>>() {
                net.set_weight(i, j, rng.random_range(0..7) as f64);
            }
            let a = BlockAssignment::new((0..n).map(|_| rng.random_range(0..k)).collect(), k).unwrap();
            let theta = (0..k)
                .map(|_| vec![rng.random_range(0.1..0.9), rng.random_range(0.5..5.0)])
                .collect();
            let state =
                SamplerState::new(a.clone(), BlockParams::new(vec![0.5, 1.0], theta).unwrap()).unwrap();
            let i = rng.random_range(0..n);
            let direct: Vec<f64> = (0..k)
                .map(|b| {
                    prior.conditional_log_prob(&a, i, b).unwrap()
                        + log_likelihood_node(&net, &a, &state.params, &m, i, b).unwrap()
                })
                .collect();
            let max = direct.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let ln_norm = max + direct.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
            let fast = gibbs_conditional(&state, &net, &m, &prior, i);
            for (d, f) in direct.iter().zip(&fast) {
                assert!((d - ln_norm - f).abs() < 1e-10);
            }
            let total: f64 = fast.iter().map(|v| v.exp()).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
