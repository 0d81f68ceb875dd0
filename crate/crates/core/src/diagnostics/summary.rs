use super::convergence::effective_sample_size;
use super::relabel::MatchedTrace;
use super::trace::TraceStore;
use crate::error::Result;

/// Posterior summary of one parameter component.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSummary {
    /// `None` for `theta0`, otherwise the (matched) block label.
    pub block: Option<usize>,
    /// 0-based component index within the parameter vector.
    pub component: usize,
    pub mode: f64,
    pub q05: f64,
    pub q95: f64,
    /// `None` when the block is present in fewer than 10% of retained
    /// iterations or too few values exist.
    pub ess: Option<f64>,
    /// Fraction of retained iterations in which the block exists.
    pub presence: f64,
}

impl ParamSummary {
    /// Display name with 1-based indices, e.g. `theta0[1]` or `theta3[2]`.
    pub fn name(&self) -> String {
        match self.block {
            None => format!("theta0[{}]", self.component + 1),
            Some(b) => format!("theta{}[{}]", b + 1, self.component + 1),
        }
    }
}

/// Empirical quantile with linear interpolation between order statistics
/// (the default "type 7" estimator). `sorted` must be ascending.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n as f64 - 1.0) * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Midpoint of the fullest bin of a 100-bin histogram over the range of
/// `values`; the first such bin wins ties.
pub fn histogram_mode(values: &[f64]) -> f64 {
    const BINS: usize = 100;
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return lo;
    }
    let width = (hi - lo) / BINS as f64;
    let mut counts = [0usize; BINS];
    for &v in values {
        let b = (((v - lo) / width) as usize).min(BINS - 1);
        counts[b] += 1;
    }
    let mut best = 0;
    for (b, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = b;
        }
    }
    lo + (best as f64 + 0.5) * width
}

fn summarise(values: &[f64], block: Option<usize>, component: usize, presence: f64) -> ParamSummary {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let ess = if presence >= 0.1 {
        effective_sample_size(values).ok().map(|e| e.value)
    } else {
        None
    };
    ParamSummary {
        block,
        component,
        mode: histogram_mode(values),
        q05: quantile(&sorted, 0.05),
        q95: quantile(&sorted, 0.95),
        ess,
        presence,
    }
}

/// Mode, 5% and 95% quantiles and effective sample size of every parameter
/// component after burn-in: `theta0` first, then each matched block label in
/// increasing order. Block summaries use only the iterations in which the
/// block exists.
pub fn summarize_params(trace: &MatchedTrace, burn_in: usize) -> Result<Vec<ParamSummary>> {
    let kept = trace.retained(burn_in)?;
    let total = kept.len() as f64;
    let p = trace.dim();
    let mut out = Vec::new();
    for c in 0..p {
        let values: Vec<f64> = kept.iter().map(|s| s.theta0[c]).collect();
        out.push(summarise(&values, None, c, 1.0));
    }
    let mut labels: Vec<usize> = kept.iter().flat_map(|s| s.theta.keys().copied()).collect();
    labels.sort_unstable();
    labels.dedup();
    for label in labels {
        let present: Vec<&Vec<f64>> = kept.iter().filter_map(|s| s.theta.get(&label)).collect();
        let presence = present.len() as f64 / total;
        for c in 0..p {
            let values: Vec<f64> = present.iter().map(|t| t[c]).collect();
            out.push(summarise(&values, Some(label), c, presence));
        }
    }
    Ok(out)
}

/// Per-iteration mean and variance of all parameter values on their natural
/// scale, flattening `theta0, theta_1, ..., theta_K`. These scalars feed the
/// Gelman-Rubin diagnostic.
pub fn theta_summary_traces(trace: &TraceStore, burn_in: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let kept = trace.retained(burn_in)?;
    let mut means = Vec::with_capacity(kept.len());
    let mut vars = Vec::with_capacity(kept.len());
    for s in kept {
        let values: Vec<f64> = s.flat_params().collect();
        let n = values.len() as f64;
        let m = values.iter().sum::<f64>() / n;
        let v = if values.len() > 1 {
            values.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        means.push(m);
        vars.push(v);
    }
    Ok((means, vars))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::TraceSample;

    #[test]
    fn quantiles_of_uniform_grid() {
        let grid: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
        assert!((quantile(&grid, 0.05) - 0.05).abs() < 1e-12);
        assert!((quantile(&grid, 0.95) - 0.95).abs() < 1e-12);
    }

    #[test]
    fn constant_values_summarise_to_the_constant() {
        let mut t = TraceStore::new(2, 1);
        for s in 0..40 {
            t.push_sample(TraceSample {
                iteration: s + 1,
                labels: vec![0, 0],
                theta0: vec![0.25],
                theta: vec![vec![0.75]],
            })
            .unwrap();
        }
        let rows = summarize_params(&MatchedTrace::identity(&t), 10).unwrap();
        assert_eq!(rows.len(), 2);
        for (r, v) in rows.iter().zip([0.25, 0.75]) {
            assert_eq!((r.mode, r.q05, r.q95), (v, v, v));
            assert_eq!(r.ess, Some(30.0));
        }
        assert_eq!(rows[1].name(), "theta1[1]");
    }

    #[test]
    fn rare_blocks_have_no_ess() {
        let mut t = TraceStore::new(2, 1);
        for s in 0..100 {
            let k = if s < 5 { 2 } else { 1 };
            t.push_sample(TraceSample {
                iteration: s + 1,
                labels: vec![0, k - 1],
                theta0: vec![s as f64],
                theta: (0..k).map(|c| vec![c as f64 + s as f64]).collect(),
            })
            .unwrap();
        }
        let rows = summarize_params(&MatchedTrace::identity(&t), 0).unwrap();
        let rare = rows.iter().find(|r| r.block == Some(1)).unwrap();
        assert!(rare.ess.is_none());
        assert!((rare.presence - 0.05).abs() < 1e-12);
    }

    #[test]
    fn histogram_mode_finds_the_peak() {
        let mut v: Vec<f64> = (0..100).map(|i| i as f64).collect();
        v.extend(std::iter::repeat(42.3).take(50));
        let m = histogram_mode(&v);
        assert!((m - 42.3).abs() < 1.0);
    }
}
