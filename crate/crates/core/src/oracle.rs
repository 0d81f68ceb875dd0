//! Exact posterior over `(K, partition)` for small networks under conjugate
//! edge models, with the block parameters integrated out analytically.
//!
//! Every label vector in `K^N` that induces the same set partition has the
//! same likelihood and the same Dirichlet-multinomial mass, so the sum over
//! label vectors is carried out per partition: a partition with `B`
//! non-empty blocks is represented by `K! / (K - B)!` label vectors.

use statrs::function::beta::ln_beta;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::network::Network;
use crate::prior::DmaPrior;

/// Largest network the oracle will enumerate.
pub const MAX_ORACLE_NODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConjugateModel {
    /// Bernoulli edges with a Beta(a, b) prior.
    BernoulliBeta { a: f64, b: f64 },
    /// Poisson edges with a Gamma(shape, rate) prior.
    PoissonGamma { shape: f64, rate: f64 },
}

impl ConjugateModel {
    /// Log marginal likelihood of a group of edge weights sharing one
    /// parameter.
    pub fn ln_marginal(&self, weights: &[f64]) -> f64 {
        let m = weights.len() as f64;
        let s: f64 = weights.iter().sum();
        match *self {
            ConjugateModel::BernoulliBeta { a, b } => ln_beta(a + s, b + m - s) - ln_beta(a, b),
            ConjugateModel::PoissonGamma { shape, rate } => {
                shape * rate.ln() - ln_gamma(shape) + ln_gamma(shape + s)
                    - (shape + s) * (rate + m).ln()
                    - weights.iter().map(|&w| ln_gamma(w + 1.0)).sum::<f64>()
            }
        }
    }

    fn check_weights(&self, network: &Network) -> Result<()> {
        for w in network.modelled_weights() {
            let ok = match self {
                ConjugateModel::BernoulliBeta { .. } => w == 0.0 || w == 1.0,
                ConjugateModel::PoissonGamma { .. } => w >= 0.0 && w.fract() == 0.0,
            };
            if !ok {
                return Err(Error::Data(format!("edge weight {w} outside the model support")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactEntry {
    pub k: usize,
    /// Canonical labels: blocks numbered from 0 in order of their smallest
    /// member.
    pub partition: Vec<usize>,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactPosterior {
    pub n_nodes: usize,
    pub k_max: usize,
    pub entries: Vec<ExactEntry>,
    /// Prior mass `P(K > k_max)` left out of the enumeration.
    pub truncated_prior_mass: f64,
}

impl ExactPosterior {
    /// `P(K = k | W)` indexed by `k`, with index 0 unused.
    pub fn k_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.k_max + 1];
        for e in &self.entries {
            out[e.k] += e.probability;
        }
        out
    }

    /// Posterior over partitions with `K` summed out, in enumeration order.
    pub fn partition_marginal(&self) -> Vec<(Vec<usize>, f64)> {
        let mut out: Vec<(Vec<usize>, f64)> = Vec::new();
        for e in &self.entries {
            match out.iter_mut().find(|(p, _)| *p == e.partition) {
                Some((_, prob)) => *prob += e.probability,
                None => out.push((e.partition.clone(), e.probability)),
            }
        }
        out
    }
}

/// All set partitions of `n` items as restricted growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let next = if prefix.is_empty() { 0 } else { max + 1 };
        for label in 0..=next {
            prefix.push(label);
            extend(prefix, max.max(label), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    extend(&mut Vec::with_capacity(n), 0, n, &mut out);
    out
}

/// Relabels `labels` so blocks are numbered by first appearance.
pub fn canonical_partition(labels: &[usize]) -> Vec<usize> {
    let mut map: Vec<(usize, usize)> = Vec::new();
    labels
        .iter()
        .map(|&l| match map.iter().find(|(from, _)| *from == l) {
            Some(&(_, to)) => to,
            None => {
                let to = map.len();
                map.push((l, to));
                to
            }
        })
        .collect()
}

fn ln_marginal_likelihood(network: &Network, model: &ConjugateModel, partition: &[usize], blocks: usize) -> f64 {
    let mut groups: Vec<Vec<f64>> = vec![Vec::new(); blocks + 1];
    for (i, j) in network.edges() {
        let g = if partition[i] == partition[j] {
            partition[i] + 1
        } else {
            0
        };
        groups[g].push(network.weight(i, j));
    }
    groups.iter().map(|g| model.ln_marginal(g)).sum()
}

/// Exact posterior over `(K, partition)` for `K = 1..=k_max`.
pub fn enumerate_posterior(
    network: &Network,
    model: &ConjugateModel,
    prior: &DmaPrior,
    k_max: usize,
) -> Result<ExactPosterior> {
    let n = network.n_nodes();
    if n == 0 {
        return Err(Error::Domain("network has no nodes".into()));
    }
    if n > MAX_ORACLE_NODES {
        return Err(Error::Domain(format!(
            "exact enumeration is limited to {MAX_ORACLE_NODES} nodes, got {n}"
        )));
    }
    if k_max == 0 {
        return Err(Error::Domain("k_max must be at least one".into()));
    }
    model.check_weights(network)?;

    let mut entries = Vec::new();
    let mut ln_weights = Vec::new();
    for partition in set_partitions(n) {
        let blocks = partition.iter().max().map_or(0, |m| m + 1);
        let ln_lik = ln_marginal_likelihood(network, model, &partition, blocks);
        let mut sizes = vec![0usize; blocks];
        for &l in &partition {
            sizes[l] += 1;
        }
        for k in blocks..=k_max {
            // number of label vectors inducing this partition: K! / (K - B)!
            let ln_labelings = ln_gamma(k as f64 + 1.0) - ln_gamma((k - blocks) as f64 + 1.0);
            let mut padded = sizes.clone();
            padded.resize(k, 0);
            ln_weights.push(prior.ln_joint_sizes(&padded) + ln_labelings + ln_lik);
            entries.push(ExactEntry {
                k,
                partition: partition.clone(),
                probability: 0.0,
            });
        }
    }
    let max = ln_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = ln_weights.iter().map(|w| (w - max).exp()).sum();
    for (e, w) in entries.iter_mut().zip(&ln_weights) {
        e.probability = (w - max).exp() / total;
    }
    let kept_prior: f64 = (1..=k_max).map(|k| prior.ln_prior_k(k).exp()).sum();
    Ok(ExactPosterior {
        n_nodes: n,
        k_max,
        entries,
        truncated_prior_mass: (1.0 - kept_prior).max(0.0),
    })
}

/// Exact co-membership probabilities.
pub fn exact_pair_matrix(posterior: &ExactPosterior) -> Vec<Vec<f64>> {
    let n = posterior.n_nodes;
    let mut p = vec![vec![0.0; n]; n];
    for e in &posterior.entries {
        for i in 0..n {
            for j in (i + 1)..n {
                if e.partition[i] == e.partition[j] {
                    p[i][j] += e.probability;
                }
            }
        }
    }
    for i in 0..n {
        p[i][i] = 1.0;
        for j in 0..i {
            p[i][j] = p[j][i];
        }
    }
    p
}
