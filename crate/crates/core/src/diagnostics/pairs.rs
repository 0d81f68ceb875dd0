use std::collections::BTreeMap;

use super::trace::TraceStore;
use crate::error::{Error, Result};

/// Posterior co-membership matrix: entry `(i, j)` is the fraction of
/// retained samples in which nodes `i` and `j` share a block.
pub fn posterior_pairs(trace: &TraceStore, burn_in: usize) -> Result<Vec<Vec<f64>>> {
    let kept = trace.retained(burn_in)?;
    let n = trace.n_nodes();
    let mut counts = vec![vec![0usize; n]; n];
    for s in kept {
        for i in 0..n {
            for j in i..n {
                if s.labels[i] == s.labels[j] {
                    counts[i][j] += 1;
                }
            }
        }
    }
    let total = kept.len() as f64;
    let mut p = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = counts[i][j] as f64 / total;
            p[i][j] = v;
            p[j][i] = v;
        }
    }
    Ok(p)
}

/// Per-node most frequent post-burn-in label, ties toward the smaller label.
pub fn modal_assignment(trace: &TraceStore, burn_in: usize) -> Result<Vec<usize>> {
    let kept = trace.retained(burn_in)?;
    Ok((0..trace.n_nodes())
        .map(|i| {
            let mut freq: BTreeMap<usize, usize> = BTreeMap::new();
            for s in kept {
                *freq.entry(s.labels[i]).or_default() += 1;
            }
            // BTreeMap iterates in label order, so `>` keeps the smallest tie
            let mut best = (usize::MAX, 0);
            for (&label, &count) in &freq {
                if count > best.1 {
                    best = (label, count);
                }
            }
            best.0
        })
        .collect())
}

/// Largest absolute entrywise difference between two square matrices.
pub fn max_abs_difference(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    if a.len() != b.len() || a.iter().zip(b).any(|(r, s)| r.len() != s.len()) {
        return Err(Error::Logic("matrices differ in shape".into()));
    }
    Ok(a.iter()
        .zip(b)
        .flat_map(|(r, s)| r.iter().zip(s).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max))
}
