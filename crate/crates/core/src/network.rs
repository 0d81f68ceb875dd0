//! Dense weighted networks and the rules deciding which node pairs carry a
//! modelled edge.

use crate::error::{Error, Result};

/// A fully observed weighted network over `n` nodes.
///
/// Weights are stored densely in row-major order. Undirected networks are
/// stored symmetrically; each unordered pair still contributes a single
/// likelihood factor (see [`Network::edges`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    n: usize,
    weights: Vec<f64>,
    directed: bool,
    self_loops: bool,
}

impl Network {
    /// Builds a network from a row-major `n * n` weight buffer.
    ///
    /// Rejects non-finite weights and, for undirected networks, asymmetric
    /// off-diagonal entries.
    pub fn new(n: usize, weights: Vec<f64>, directed: bool, self_loops: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::Data("network must have at least one node".into()));
        }
        if weights.len() != n * n {
            return Err(Error::Data(format!(
                "expected {} weights for {n} nodes, got {}",
                n * n,
                weights.len()
            )));
        }
        if let Some(pos) = weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::Data(format!(
                "non-finite weight at ({}, {})",
                pos / n + 1,
                pos % n + 1
            )));
        }
        if !directed {
            for i in 0..n {
                for j in (i + 1)..n {
                    if weights[i * n + j] != weights[j * n + i] {
                        return Err(Error::Data(format!(
                            "undirected network has asymmetric weights at ({}, {})",
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
        Ok(Self {
            n,
            weights,
            directed,
            self_loops,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], directed: bool, self_loops: bool) -> Result<Self> {
        let n = rows.len();
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Data(format!(
                "row {} has {} entries, expected {n}",
                i + 1,
                row.len()
            )));
        }
        Self::new(n, rows.concat(), directed, self_loops)
    }

    /// A network with every weight set to zero.
    pub fn zeros(n: usize, directed: bool, self_loops: bool) -> Self {
        Self {
            n,
            weights: vec![0.0; n * n],
            directed,
            self_loops,
        }
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_directed(&self) -> bool {
        self.directed
    }

    #[inline]
    pub fn has_self_loops(&self) -> bool {
        self.self_loops
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    /// Sets `W_ij` (and `W_ji` when undirected).
    pub fn set_weight(&mut self, i: usize, j: usize, w: f64) {
        self.weights[i * self.n + j] = w;
        if !self.directed {
            self.weights[j * self.n + i] = w;
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.n..(i + 1) * self.n]
    }

    pub fn is_integer_valued(&self) -> bool {
        self.modelled_weights().all(|w| w.fract() == 0.0)
    }

    /// Iterates over every modelled edge exactly once as 0-based `(i, j)`.
    ///
    /// Undirected: pairs `i < j`; directed: ordered pairs `i != j`. The
    /// diagonal `(i, i)` is included only when self-loops are enabled.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| {
            let start = if self.directed { 0 } else { i };
            (start..n)
                .filter(move |&j| j != i || self.self_loops)
                .map(move |j| (i, j))
        })
    }

    pub fn edge_count(&self) -> usize {
        let n = self.n;
        let off = if self.directed {
            n * (n - 1)
        } else {
            n * (n - 1) / 2
        };
        off + if self.self_loops { n } else { 0 }
    }

    /// Weights of the modelled edges, in [`Network::edges`] order.
    pub fn modelled_weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.edges().map(|(i, j)| self.weight(i, j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(net: &Network) -> Vec<(usize, usize)> {
        net.edges().map(|(i, j)| (i + 1, j + 1)).collect()
    }

    #[test]
    fn undirected_edges_are_upper_triangle() {
        let net = Network::zeros(3, false, false);
        assert_eq!(pairs(&net), vec![(1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn directed_edges_without_loops() {
        let net = Network::zeros(2, true, false);
        assert_eq!(pairs(&net), vec![(1, 2), (2, 1)]);
    }

    #[test]
    fn directed_edges_with_loops() {
        let net = Network::zeros(2, true, true);
        assert_eq!(pairs(&net), vec![(1, 1), (1, 2), (2, 1), (2, 2)]);
    }

    #[test]
    fn edge_count_matches_iteration() {
        for n in 1..7 {
            for &(d, s) in &[(false, false), (false, true), (true, false), (true, true)] {
                let net = Network::zeros(n, d, s);
                assert_eq!(net.edges().count(), net.edge_count());
                let mut expected = if d { n * (n - 1) } else { n * (n - 1) / 2 };
                if s {
                    expected += n;
                }
                assert_eq!(net.edge_count(), expected);
            }
        }
    }

    #[test]
    fn rejects_asymmetric_undirected() {
        let err = Network::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]], false, false);
        assert!(matches!(err, Err(Error::Data(_))));
        assert!(Network::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]], true, false).is_ok());
    }

    #[test]
    fn rejects_non_finite() {
        let err = Network::new(1, vec![f64::NAN], true, true);
        assert!(matches!(err, Err(Error::Data(_))));
    }

    #[test]
    fn set_weight_keeps_symmetry() {
        let mut net = Network::zeros(3, false, false);
        net.set_weight(0, 2, 4.0);
        assert_eq!(net.weight(2, 0), 4.0);
    }
}
