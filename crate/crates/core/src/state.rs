//! Block assignments, block parameters and the joint sampler state.
//!
//! Block labels are 0-based in memory (`0..k`). File formats use 1-based
//! labels; conversion happens in the `io` module only.

use crate::error::{Error, Result};

/// Node-to-block labels together with the number of blocks `k`, which may
/// exceed the number of occupied blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockAssignment {
    labels: Vec<usize>,
    k: usize,
}

impl BlockAssignment {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("number of blocks must be at least one".into()));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::Domain(format!(
                "label {bad} out of range for {k} blocks"
            )));
        }
        Ok(Self { labels, k })
    }

    /// All nodes in block 0.
    pub fn one_block(n: usize) -> Self {
        Self {
            labels: vec![0; n],
            k: 1,
        }
    }

    /// Every node in its own block.
    pub fn singletons(n: usize) -> Self {
        Self {
            labels: (0..n).collect(),
            k: n.max(1),
        }
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn set_label(&mut self, i: usize, block: usize) {
        debug_assert!(block < self.k);
        self.labels[i] = block;
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    pub fn n_empty(&self) -> usize {
        self.block_sizes().iter().filter(|&&s| s == 0).count()
    }

    pub fn empty_blocks(&self) -> Vec<usize> {
        self.block_sizes()
            .iter()
            .enumerate()
            .filter_map(|(b, &s)| (s == 0).then_some(b))
            .collect()
    }

    pub fn members(&self, block: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(i, &l)| (l == block).then_some(i))
            .collect()
    }

    /// Appends an empty block and returns its label.
    pub(crate) fn push_empty(&mut self) -> usize {
        self.k += 1;
        self.k - 1
    }

    /// Removes an empty block, shifting higher labels down by one.
    pub(crate) fn remove_empty(&mut self, block: usize) -> Result<()> {
        if self.k <= 1 {
            return Err(Error::Logic("cannot remove the only block".into()));
        }
        if block >= self.k {
            return Err(Error::Logic(format!("block {block} does not exist")));
        }
        if self.labels.contains(&block) {
            return Err(Error::Logic(format!("block {block} is not empty")));
        }
        for l in &mut self.labels {
            if *l > block {
                *l -= 1;
            }
        }
        self.k -= 1;
        Ok(())
    }
}

/// The between-block parameter `theta0` and one parameter vector per block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockParams {
    pub theta0: Vec<f64>,
    pub theta: Vec<Vec<f64>>,
}

impl BlockParams {
    pub fn new(theta0: Vec<f64>, theta: Vec<Vec<f64>>) -> Result<Self> {
        let p = theta0.len();
        if p == 0 {
            return Err(Error::Domain("parameter dimension must be positive".into()));
        }
        if theta.iter().any(|t| t.len() != p) {
            return Err(Error::Domain(format!(
                "all block parameters must have dimension {p}"
            )));
        }
        Ok(Self { theta0, theta })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.theta0.len()
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.theta.len()
    }

    /// Parameter governing `W_ij`: the shared block's vector when `i` and
    /// `j` are co-blocked, otherwise `theta0`.
    #[inline]
    pub fn theta_for_edge(&self, assignment: &BlockAssignment, i: usize, j: usize) -> &[f64] {
        let (a, b) = (assignment.label(i), assignment.label(j));
        if a == b {
            &self.theta[a]
        } else {
            &self.theta0
        }
    }

    /// Parameter vector for group `g`, where group 0 is `theta0` and group
    /// `b + 1` is block `b`.
    #[inline]
    pub fn group(&self, g: usize) -> &[f64] {
        if g == 0 {
            &self.theta0
        } else {
            &self.theta[g - 1]
        }
    }

    pub(crate) fn group_mut(&mut self, g: usize) -> &mut Vec<f64> {
        if g == 0 {
            &mut self.theta0
        } else {
            &mut self.theta[g - 1]
        }
    }
}

/// The Markov chain state `(K, Z, theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerState {
    pub assignment: BlockAssignment,
    pub params: BlockParams,
    pub iteration: usize,
}

impl SamplerState {
    pub fn new(assignment: BlockAssignment, params: BlockParams) -> Result<Self> {
        if assignment.k() != params.k() {
            return Err(Error::Logic(format!(
                "assignment has {} blocks but {} parameter vectors were supplied",
                assignment.k(),
                params.k()
            )));
        }
        Ok(Self {
            assignment,
            params,
            iteration: 0,
        })
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.assignment.k()
    }

    /// Appends an empty block carrying `theta` and returns its label.
    pub(crate) fn push_empty_block(&mut self, theta: Vec<f64>) -> usize {
        self.params.theta.push(theta);
        self.assignment.push_empty()
    }

    /// Drops the empty block `removed_block`, decrementing every higher label
    /// so labels stay contiguous. The likelihood of the state is unchanged.
    pub fn relabel_contiguous(&mut self, removed_block: usize) -> Result<()> {
        self.assignment.remove_empty(removed_block)?;
        self.params.theta.remove(removed_block);
        Ok(())
    }

    /// Renames block `b` to `perm[b]` in both the labels and the parameters.
    /// `perm` must be a permutation of `0..k`.
    pub fn permute_labels(&mut self, perm: &[usize]) -> Result<()> {
        let k = self.k();
        let mut seen = vec![false; k];
        if perm.len() != k || perm.iter().any(|&p| p >= k || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Logic(format!("{perm:?} is not a permutation of 0..{k}")));
        }
        for l in &mut self.assignment.labels {
            *l = perm[*l];
        }
        let mut theta = vec![Vec::new(); k];
        for (b, t) in self.params.theta.drain(..).enumerate() {
            theta[perm[b]] = t;
        }
        self.params.theta = theta;
        Ok(())
    }

    /// Checks every structural invariant; used by tests and debug builds.
    pub fn validate(&self) -> Result<()> {
        let k = self.assignment.k();
        if k != self.params.k() {
            return Err(Error::Logic("block count mismatch".into()));
        }
        if self.assignment.labels().iter().any(|&l| l >= k) {
            return Err(Error::Logic("label out of range".into()));
        }
        if self.assignment.block_sizes().iter().sum::<usize>() != self.assignment.n_nodes() {
            return Err(Error::Logic("block sizes do not sum to N".into()));
        }
        Ok(())
    }
}
