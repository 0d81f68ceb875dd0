use crate::error::{Error, Result};
use crate::sampler::MoveOutcome;
use crate::state::SamplerState;

/// The recorded state after one iteration. Labels are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSample {
    pub iteration: usize,
    pub labels: Vec<usize>,
    pub theta0: Vec<f64>,
    pub theta: Vec<Vec<f64>>,
}

impl TraceSample {
    pub fn k(&self) -> usize {
        self.theta.len()
    }

    /// All parameter values flattened as `theta0, theta_1, ..., theta_K`.
    pub fn flat_params(&self) -> impl Iterator<Item = f64> + '_ {
        self.theta0.iter().chain(self.theta.iter().flatten()).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoveRecord {
    pub iteration: usize,
    pub outcome: MoveOutcome,
}

/// Per-iteration record of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStore {
    n_nodes: usize,
    dim: usize,
    samples: Vec<TraceSample>,
    moves: Vec<MoveRecord>,
}

impl TraceStore {
    pub fn new(n_nodes: usize, dim: usize) -> Self {
        Self {
            n_nodes,
            dim,
            samples: Vec::new(),
            moves: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, state: &SamplerState, outcomes: Vec<MoveOutcome>) {
        let iteration = state.iteration;
        self.samples.push(TraceSample {
            iteration,
            labels: state.assignment.labels().to_vec(),
            theta0: state.params.theta0.clone(),
            theta: state.params.theta.clone(),
        });
        self.moves
            .extend(outcomes.into_iter().map(|outcome| MoveRecord { iteration, outcome }));
    }

    /// Appends a sample read back from storage, checking its shape.
    pub fn push_sample(&mut self, sample: TraceSample) -> Result<()> {
        let k = sample.k();
        if sample.labels.len() != self.n_nodes {
            return Err(Error::Data(format!(
                "iteration {} has {} labels, expected {}",
                sample.iteration,
                sample.labels.len(),
                self.n_nodes
            )));
        }
        if k == 0 || sample.labels.iter().any(|&l| l >= k) {
            return Err(Error::Data(format!(
                "iteration {} has labels outside 1..{k}",
                sample.iteration
            )));
        }
        if sample.theta0.len() != self.dim || sample.theta.iter().any(|t| t.len() != self.dim) {
            return Err(Error::Data(format!(
                "iteration {} has parameters of the wrong dimension",
                sample.iteration
            )));
        }
        self.samples.push(sample);
        Ok(())
    }

    pub fn push_move(&mut self, record: MoveRecord) {
        self.moves.push(record);
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of recorded iterations `S`.
    pub fn iterations(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[TraceSample] {
        &self.samples
    }

    pub fn moves(&self) -> &[MoveRecord] {
        &self.moves
    }

    pub fn k_trace(&self) -> Vec<usize> {
        self.samples.iter().map(TraceSample::k).collect()
    }

    /// Samples after the first `burn_in`.
    pub fn retained(&self, burn_in: usize) -> Result<&[TraceSample]> {
        if burn_in >= self.samples.len() {
            return Err(Error::Domain(format!(
                "burn-in {burn_in} leaves no samples out of {}",
                self.samples.len()
            )));
        }
        Ok(&self.samples[burn_in..])
    }

    /// Empirical distribution of `K` after burn-in, indexed by `K`.
    pub fn k_marginal(&self, burn_in: usize) -> Result<Vec<f64>> {
        let kept = self.retained(burn_in)?;
        let k_max = kept.iter().map(TraceSample::k).max().unwrap_or(0);
        let mut freq = vec![0.0; k_max + 1];
        for s in kept {
            freq[s.k()] += 1.0;
        }
        let total = kept.len() as f64;
        freq.iter_mut().for_each(|f| *f /= total);
        Ok(freq)
    }

    /// Most frequent post-burn-in `K`, ties toward the smaller value.
    pub fn modal_k(&self, burn_in: usize) -> Result<usize> {
        let freq = self.k_marginal(burn_in)?;
        let mut best = 0;
        for (k, &f) in freq.iter().enumerate() {
            if f > freq[best] {
                best = k;
            }
        }
        Ok(best)
    }

    /// Fraction of attempts of `kind` that were accepted, if any were made.
    pub fn acceptance_rate(&self, kind: crate::sampler::MoveKind) -> Option<f64> {
        let (mut tried, mut accepted) = (0usize, 0usize);
        for m in self.moves.iter().filter(|m| m.outcome.move_kind == kind) {
            tried += 1;
            accepted += usize::from(m.outcome.accepted);
        }
        (tried > 0).then(|| accepted as f64 / tried as f64)
    }
}
