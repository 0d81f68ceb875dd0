//! Trans-dimensional split and merge proposals.
//!
//! A split takes one block `k'` with parameter `theta'`, draws
//! `lambda ~ Unif(0, 1)` and `u ~ Normal(0, sigma_u^2 I_p)`, and produces two
//! blocks whose matched parameters satisfy
//! `m(theta') = lambda m(theta_a) + (1 - lambda) m(theta_b)`. Block `a` keeps
//! the label `k'`, block `b` is appended as label `K`. The members of `k'`
//! are then dealt to `a` or `b` one at a time in a uniformly random order.
//!
//! A merge picks an unordered pair `{x, y}` with `x < y`, gives the `lambda`
//! role to `x`, folds `y` into `x` and removes label `y`. Scoring the
//! reverse split with the same node order makes the two ratios exact
//! reciprocals.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use rand_distr::{Distribution, Normal};

use super::{accept, ln_normal_sum, MoveKind, MoveOutcome};
use crate::error::{Error, Result};
use crate::models::{ln_likelihood_touching, EdgeModel, Matching};
use crate::network::Network;
use crate::prior::DmaPrior;
use crate::state::SamplerState;

/// `m^{-1}(lambda m(theta_k) + (1 - lambda) m(theta_l))`.
pub fn merge_params(theta_k: &[f64], theta_l: &[f64], lambda: f64, mf: &Matching) -> Result<Vec<f64>> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::Domain(format!("lambda = {lambda} outside (0, 1]")));
    }
    let yk = mf.apply(theta_k)?;
    let yl = mf.apply(theta_l)?;
    let y: Vec<f64> = yk
        .iter()
        .zip(&yl)
        .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
        .collect();
    mf.invert(&y)
}

/// Inverse of [`merge_params`] given the auxiliary `u`:
/// `m(theta_k) = (m(theta') + u) / (2 lambda)`,
/// `m(theta_l) = (m(theta') - u) / (2 (1 - lambda))`.
///
/// Fails when an output saturates to the edge of its space in floating
/// point, e.g. a logit value so large that its inverse rounds to 1.
pub fn split_params(
    theta_merged: &[f64],
    lambda: f64,
    u: &[f64],
    mf: &Matching,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_lambda(lambda)?;
    if u.len() != mf.dim() {
        return Err(Error::Domain(format!(
            "auxiliary has {} components, expected {}",
            u.len(),
            mf.dim()
        )));
    }
    let y = mf.apply(theta_merged)?;
    let yk: Vec<f64> = y.iter().zip(u).map(|(y, u)| (y + u) / (2.0 * lambda)).collect();
    let yl: Vec<f64> = y
        .iter()
        .zip(u)
        .map(|(y, u)| (y - u) / (2.0 * (1.0 - lambda)))
        .collect();
    let theta_k = mf.invert(&yk)?;
    let theta_l = mf.invert(&yl)?;
    // the outputs must be interior points so the move can be reversed
    mf.apply(&theta_k)?;
    mf.apply(&theta_l)?;
    Ok((theta_k, theta_l))
}

/// The auxiliary `u = lambda m(theta_k) - (1 - lambda) m(theta_l)` that the
/// reverse split would have to draw.
pub fn implied_u(theta_k: &[f64], theta_l: &[f64], lambda: f64, mf: &Matching) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    let yk = mf.apply(theta_k)?;
    let yl = mf.apply(theta_l)?;
    Ok(yk
        .iter()
        .zip(&yl)
        .map(|(a, b)| lambda * a - (1.0 - lambda) * b)
        .collect())
}

/// Log absolute Jacobian of the split map `(theta', u) -> (theta_k, theta_l)`
/// at fixed `lambda`:
///
/// `ln m'(theta') - ln m'(theta_k) - ln m'(theta_l) - p ln(2 lambda (1 - lambda))`
///
/// where `m'` is the derivative of the matching function, taken as a product
/// over components.
pub fn log_jacobian_split(
    theta_k: &[f64],
    theta_l: &[f64],
    theta_merged: &[f64],
    lambda: f64,
    mf: &Matching,
) -> Result<f64> {
    check_lambda(lambda)?;
    let p = mf.dim() as f64;
    Ok(mf.ln_derivative(theta_merged)?
        - mf.ln_derivative(theta_k)?
        - mf.ln_derivative(theta_l)?
        - p * (2.0 * lambda * (1.0 - lambda)).ln())
}

/// Log absolute Jacobian of the merge map `(theta_k, theta_l) -> (theta', u)`,
/// computed directly rather than as the negated split Jacobian.
pub fn log_jacobian_merge(
    theta_k: &[f64],
    theta_l: &[f64],
    theta_merged: &[f64],
    lambda: f64,
    mf: &Matching,
) -> Result<f64> {
    check_lambda(lambda)?;
    // d(y', u)/d(y_k, y_l) = [[lambda, 1 - lambda], [lambda, -(1 - lambda)]]
    let det = (-lambda * (1.0 - lambda) - lambda * (1.0 - lambda)).abs();
    Ok(mf.ln_derivative(theta_k)? + mf.ln_derivative(theta_l)?
        - mf.ln_derivative(theta_merged)?
        + mf.dim() as f64 * det.ln())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("lambda = {lambda} outside (0, 1)")))
    }
}

/// How [`sequential_allocation`] decides each node's side.
pub enum Allocation<'a> {
    /// Draw each side from its conditional probability.
    Sample(&'a mut dyn RngCore),
    /// Replay the given sides (`true` = first block), aligned with `order`.
    Score(&'a [bool]),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocationResult {
    /// Side of `order[t]`: `true` for the first block.
    pub first: Vec<bool>,
    /// Sum of the log-probabilities of the chosen sides.
    pub log_q: f64,
}

/// Deals the nodes in `order` between two new blocks one at a time. Node
/// `i` joins the first block with probability proportional to the
/// likelihood of its edges to nodes already dealt (and its self-loop), with
/// the first block carrying `theta_first` and the second `theta_second`.
/// Edges to every other node are governed by `theta0` on both sides and
/// cancel.
pub fn sequential_allocation<M: EdgeModel + ?Sized>(
    network: &Network,
    model: &M,
    theta0: &[f64],
    theta_first: &[f64],
    theta_second: &[f64],
    order: &[usize],
    mut mode: Allocation<'_>,
) -> AllocationResult {
    // 0 = not yet dealt, 1 = first block, 2 = second block
    let mut side = vec![0u8; network.n_nodes()];
    let mut first = Vec::with_capacity(order.len());
    let mut log_q = 0.0;
    for (t, &i) in order.iter().enumerate() {
        let mut la = 0.0;
        let mut lb = 0.0;
        for &j in &order[..t] {
            let (ta, tb) = if side[j] == 1 {
                (theta_first, theta0)
            } else {
                (theta0, theta_second)
            };
            let w = network.weight(i, j);
            la += model.ln_pdf(w, ta);
            lb += model.ln_pdf(w, tb);
            if network.is_directed() {
                let w = network.weight(j, i);
                la += model.ln_pdf(w, ta);
                lb += model.ln_pdf(w, tb);
            }
        }
        if network.has_self_loops() {
            let w = network.weight(i, i);
            la += model.ln_pdf(w, theta_first);
            lb += model.ln_pdf(w, theta_second);
        }
        // ln P(first) = -ln(1 + e^{lb - la}), computed stably
        let ln_pa = -ln_1p_exp(lb - la);
        let ln_pb = -ln_1p_exp(la - lb);
        let to_first = match &mut mode {
            Allocation::Sample(rng) => rng.random::<f64>().ln() < ln_pa,
            Allocation::Score(fixed) => fixed[t],
        };
        log_q += if to_first { ln_pa } else { ln_pb };
        side[i] = if to_first { 1 } else { 2 };
        first.push(to_first);
    }
    AllocationResult { first, log_q }
}

/// `ln(1 + e^x)` without overflow.
fn ln_1p_exp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Randomness consumed by one split attempt.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitDraw {
    pub block: usize,
    pub lambda: f64,
    pub u: Vec<f64>,
    /// Members of `block` in the order they are dealt.
    pub order: Vec<usize>,
}

/// Randomness consumed by one merge attempt.
#[derive(Debug, Clone, PartialEq)]
pub struct MergeDraw {
    /// The pair `(x, y)` with `x < y`; `x` takes the `lambda` role and keeps
    /// its label.
    pub pair: (usize, usize),
    pub lambda: f64,
    /// Members of both blocks in the order the reverse split would deal them.
    pub order: Vec<usize>,
}

/// Log of the proposal-selection factor of a split from `K` blocks. The
/// probability of choosing a split (1 when `K = 1`, else 1/2) enters
/// against the 1/2 of choosing the reverse merge. The block and pair
/// selection probabilities cancel against the `K!` labelings of each
/// unlabelled state.
fn ln_split_selection(k: usize) -> f64 {
    if k == 1 {
        -std::f64::consts::LN_2
    } else {
        0.0
    }
}

fn ln_g0_sum<M: EdgeModel + ?Sized>(model: &M, thetas: &[&[f64]]) -> f64 {
    thetas.iter().map(|t| model.prior_log_density(t)).sum()
}

fn uniform_open(rng: &mut dyn RngCore) -> f64 {
    loop {
        let v = rng.random::<f64>();
        if v > 0.0 {
            return v;
        }
    }
}

/// Builds the split proposal described by `draw`, dealing nodes according
/// to `alloc`, and returns it together with the uncapped log acceptance
/// ratio. `None` means the split parameters left their space and the move
/// is rejected outright.
#[allow(clippy::too_many_arguments)]
pub fn split_with<M: EdgeModel + ?Sized>(
    state: &SamplerState,
    network: &Network,
    model: &M,
    prior: &DmaPrior,
    sigma_u: f64,
    draw: &SplitDraw,
    alloc: Allocation<'_>,
) -> Option<(SamplerState, f64)> {
    let k = state.k();
    let mf = model.matching();
    let old_theta = &state.params.theta[draw.block];
    let (ta, tb) = split_params(old_theta, draw.lambda, &draw.u, &mf).ok()?;
    if model.check_params(&ta).is_err() || model.check_params(&tb).is_err() {
        return None;
    }
    let dealt = sequential_allocation(
        network,
        model,
        &state.params.theta0,
        &ta,
        &tb,
        &draw.order,
        alloc,
    );

    let mut proposed = state.clone();
    proposed.params.theta[draw.block] = ta.clone();
    let new_block = proposed.push_empty_block(tb.clone());
    for (&i, &to_first) in draw.order.iter().zip(&dealt.first) {
        if !to_first {
            proposed.assignment.set_label(i, new_block);
        }
    }

    let mut touched = vec![false; network.n_nodes()];
    for &i in &draw.order {
        touched[i] = true;
    }
    let d_lik = ln_likelihood_touching(network, proposed.assignment.labels(), &proposed.params, model, &touched)
        - ln_likelihood_touching(network, state.assignment.labels(), &state.params, model, &touched);
    let d_prior = prior.ln_joint_sizes(&proposed.assignment.block_sizes())
        - prior.ln_joint_sizes(&state.assignment.block_sizes());
    let d_g0 = ln_g0_sum(model, &[&ta, &tb]) - model.prior_log_density(old_theta);
    let ln_jac = log_jacobian_split(&ta, &tb, old_theta, draw.lambda, &mf).ok()?;

    // lambda has unit density in both directions and drops out
    let log_ratio = d_lik + d_prior + d_g0 + ln_split_selection(k)
        - ln_normal_sum(&draw.u, sigma_u)
        - dealt.log_q
        + ln_jac;
    Some((proposed, log_ratio))
}

/// Builds the merge proposal described by `draw` and returns it with the
/// uncapped log acceptance ratio, or `None` if the merged parameter is not
/// representable.
pub fn merge_with<M: EdgeModel + ?Sized>(
    state: &SamplerState,
    network: &Network,
    model: &M,
    prior: &DmaPrior,
    sigma_u: f64,
    draw: &MergeDraw,
) -> Option<(SamplerState, f64)> {
    let k = state.k();
    let (x, y) = draw.pair;
    debug_assert!(x < y && y < k);
    let mf = model.matching();
    let (tx, ty) = (&state.params.theta[x], &state.params.theta[y]);
    let merged = merge_params(tx, ty, draw.lambda, &mf).ok()?;
    if model.check_params(&merged).is_err() || mf.apply(&merged).is_err() {
        return None;
    }
    let u = implied_u(tx, ty, draw.lambda, &mf).ok()?;

    let fixed: Vec<bool> = draw
        .order
        .iter()
        .map(|&i| state.assignment.label(i) == x)
        .collect();
    let reverse = sequential_allocation(
        network,
        model,
        &state.params.theta0,
        tx,
        ty,
        &draw.order,
        Allocation::Score(&fixed),
    );

    let mut proposed = state.clone();
    for &i in &draw.order {
        proposed.assignment.set_label(i, x);
    }
    proposed.params.theta[x] = merged.clone();
    proposed.relabel_contiguous(y).ok()?;

    let mut touched = vec![false; network.n_nodes()];
    for &i in &draw.order {
        touched[i] = true;
    }
    let d_lik = ln_likelihood_touching(network, proposed.assignment.labels(), &proposed.params, model, &touched)
        - ln_likelihood_touching(network, state.assignment.labels(), &state.params, model, &touched);
    let d_prior = prior.ln_joint_sizes(&proposed.assignment.block_sizes())
        - prior.ln_joint_sizes(&state.assignment.block_sizes());
    let d_g0 = model.prior_log_density(&merged) - ln_g0_sum(model, &[tx, ty]);
    let ln_jac = log_jacobian_split(tx, ty, &merged, draw.lambda, &mf).ok()?;

    let log_ratio = d_lik + d_prior + d_g0 - ln_split_selection(k - 1)
        + ln_normal_sum(&u, sigma_u)
        + reverse.log_q
        - ln_jac;
    Some((proposed, log_ratio))
}

/// One split attempt: block chosen uniformly, `lambda ~ Unif(0, 1)`,
/// `u ~ Normal(0, sigma_u^2 I_p)`, members dealt in a random order.
///
/// On acceptance the larger half keeps the original label and the smaller
/// one takes the new label `K`. The target is invariant to relabelling, so
/// this placement leaves the chain's law on partitions unchanged while
/// keeping block labels stable over long runs.
pub fn propose_split<M: EdgeModel + ?Sized>(
    state: &mut SamplerState,
    network: &Network,
    model: &M,
    prior: &DmaPrior,
    sigma_u: f64,
    rng: &mut dyn RngCore,
) -> MoveOutcome {
    let block = rng.random_range(0..state.k());
    let lambda = uniform_open(rng);
    let normal = Normal::new(0.0, sigma_u).expect("validated sigma_u");
    let u: Vec<f64> = (0..model.dim()).map(|_| normal.sample(rng)).collect();
    let mut order = state.assignment.members(block);
    order.shuffle(rng);
    let draw = SplitDraw {
        block,
        lambda,
        u,
        order,
    };
    let Some((proposed, log_ratio)) =
        split_with(state, network, model, prior, sigma_u, &draw, Allocation::Sample(rng))
    else {
        return MoveOutcome::rejected(MoveKind::Split);
    };
    let outcome = accept(MoveKind::Split, log_ratio, rng.random::<f64>());
    if outcome.accepted {
        *state = proposed;
        let new_block = state.k() - 1;
        if state.assignment.members(new_block).len() > state.assignment.members(block).len() {
            let mut perm: Vec<usize> = (0..state.k()).collect();
            perm.swap(block, new_block);
            state.permute_labels(&perm).expect("a transposition is a permutation");
        }
    }
    outcome
}

/// One merge attempt on a state with at least two blocks. The merged block
/// inherits the label of the larger of the two inputs.
pub fn propose_merge<M: EdgeModel + ?Sized>(
    state: &mut SamplerState,
    network: &Network,
    model: &M,
    prior: &DmaPrior,
    sigma_u: f64,
    rng: &mut dyn RngCore,
) -> MoveOutcome {
    let k = state.k();
    if k < 2 {
        return MoveOutcome::rejected(MoveKind::Merge);
    }
    let a = rng.random_range(0..k);
    let mut b = rng.random_range(0..k - 1);
    if b >= a {
        b += 1;
    }
    let pair = (a.min(b), a.max(b));
    let lambda = uniform_open(rng);
    let mut order = state.assignment.members(pair.0);
    order.extend(state.assignment.members(pair.1));
    order.shuffle(rng);
    let draw = MergeDraw {
        pair,
        lambda,
        order,
    };
    let Some((proposed, log_ratio)) = merge_with(state, network, model, prior, sigma_u, &draw) else {
        return MoveOutcome::rejected(MoveKind::Merge);
    };
    let outcome = accept(MoveKind::Merge, log_ratio, rng.random::<f64>());
    if outcome.accepted {
        let (x, y) = pair;
        let larger_is_y = state.assignment.members(y).len() > state.assignment.members(x).len();
        *state = proposed;
        if larger_is_y {
            // the merged block sits at x; rotate it to y - 1, the slot the
            // larger block's label occupies once x is gone
            let perm: Vec<usize> = (0..state.k())
                .map(|l| match l {
                    l if l == x => y - 1,
                    l if l > x && l < y => l - 1,
                    l => l,
                })
                .collect();
            state.permute_labels(&perm).expect("a rotation is a permutation");
        }
    }
    outcome
}
