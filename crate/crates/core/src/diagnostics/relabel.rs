//! Post-hoc label matching against a reference assignment.

use std::collections::{BTreeMap, BTreeSet};

use super::pairs::modal_assignment;
use super::trace::TraceStore;
use crate::error::{Error, Result};

/// A sample whose blocks carry matched labels. Labels need not be
/// contiguous, so block parameters are keyed by label.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchedSample {
    pub iteration: usize,
    pub labels: Vec<usize>,
    pub theta0: Vec<f64>,
    pub theta: BTreeMap<usize, Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchedTrace {
    n_nodes: usize,
    dim: usize,
    /// `mapping[c]` is the matched label given to sampler label `c`.
    mapping: Vec<usize>,
    samples: Vec<MatchedSample>,
}

impl MatchedTrace {
    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn samples(&self) -> &[MatchedSample] {
        &self.samples
    }

    /// Samples after the first `burn_in`.
    pub fn retained(&self, burn_in: usize) -> Result<&[MatchedSample]> {
        if burn_in >= self.samples.len() {
            return Err(Error::Domain(format!(
                "burn-in {burn_in} leaves no samples out of {}",
                self.samples.len()
            )));
        }
        Ok(&self.samples[burn_in..])
    }

    /// Wraps an unmatched trace with the identity mapping.
    pub fn identity(trace: &TraceStore) -> Self {
        let k_max = trace.samples().iter().map(|s| s.k()).max().unwrap_or(0);
        Self::apply(trace, (0..k_max).collect())
    }

    fn apply(trace: &TraceStore, mapping: Vec<usize>) -> Self {
        let samples = trace
            .samples()
            .iter()
            .map(|s| MatchedSample {
                iteration: s.iteration,
                labels: s.labels.iter().map(|&l| mapping[l]).collect(),
                theta0: s.theta0.clone(),
                theta: s
                    .theta
                    .iter()
                    .enumerate()
                    .map(|(c, t)| (mapping[c], t.clone()))
                    .collect(),
            })
            .collect();
        Self {
            n_nodes: trace.n_nodes(),
            dim: trace.dim(),
            mapping,
            samples,
        }
    }
}

/// Relabels every sample so that the post-burn-in modal assignment agrees
/// with `truth` as far as possible.
///
/// Modal blocks are paired with true blocks greedily by descending overlap
/// count. Sampler labels left unpaired, including labels that never appear
/// in the modal assignment, receive fresh labels above `max(truth)` in
/// increasing order of their original value.
pub fn match_labels(trace: &TraceStore, truth: &[usize], burn_in: usize) -> Result<MatchedTrace> {
    if truth.len() != trace.n_nodes() {
        return Err(Error::Data(format!(
            "truth has {} labels but the trace has {} nodes",
            truth.len(),
            trace.n_nodes()
        )));
    }
    let mode = modal_assignment(trace, burn_in)?;
    let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (&c, &k) in mode.iter().zip(truth) {
        *counts.entry((c, k)).or_default() += 1;
    }
    let mut pairs: Vec<((usize, usize), usize)> = counts.into_iter().collect();
    // descending count; the stable sort keeps (c, k) order among ties
    pairs.sort_by(|a, b| b.1.cmp(&a.1));

    let k_max = trace.samples().iter().map(|s| s.k()).max().unwrap_or(0);
    let mut mapping: Vec<Option<usize>> = vec![None; k_max];
    let mut used_truth = BTreeSet::new();
    for ((c, k), _) in pairs {
        if mapping[c].is_none() && !used_truth.contains(&k) {
            mapping[c] = Some(k);
            used_truth.insert(k);
        }
    }
    let mut fresh = truth.iter().max().map_or(0, |m| m + 1);
    let mapping = mapping
        .into_iter()
        .map(|m| {
            m.unwrap_or_else(|| {
                fresh += 1;
                fresh - 1
            })
        })
        .collect();
    Ok(MatchedTrace::apply(trace, mapping))
}
