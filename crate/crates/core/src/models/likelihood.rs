use super::EdgeModel;
use crate::error::{Error, Result};
use crate::network::Network;
use crate::state::{BlockAssignment, BlockParams};

fn check_consistent<M: EdgeModel + ?Sized>(
    network: &Network,
    assignment: &BlockAssignment,
    params: &BlockParams,
    model: &M,
) -> Result<()> {
    if assignment.n_nodes() != network.n_nodes() {
        return Err(Error::Logic(format!(
            "assignment covers {} nodes but the network has {}",
            assignment.n_nodes(),
            network.n_nodes()
        )));
    }
    if assignment.k() != params.k() {
        return Err(Error::Logic(format!(
            "{} blocks but {} parameter vectors",
            assignment.k(),
            params.k()
        )));
    }
    model.check_params(&params.theta0)?;
    for theta in &params.theta {
        model.check_params(theta)?;
    }
    Ok(())
}

/// Full log-likelihood: one term per modelled edge.
pub fn log_likelihood<M: EdgeModel + ?Sized>(
    network: &Network,
    assignment: &BlockAssignment,
    params: &BlockParams,
    model: &M,
) -> Result<f64> {
    check_consistent(network, assignment, params, model)?;
    Ok(network
        .edges()
        .map(|(i, j)| model.ln_pdf(network.weight(i, j), params.theta_for_edge(assignment, i, j)))
        .sum())
}

/// Log-likelihood of every modelled edge incident to node `i`, with `i`
/// placed in `candidate` and every other node where `assignment` puts it.
pub fn log_likelihood_node<M: EdgeModel + ?Sized>(
    network: &Network,
    assignment: &BlockAssignment,
    params: &BlockParams,
    model: &M,
    i: usize,
    candidate: usize,
) -> Result<f64> {
    check_consistent(network, assignment, params, model)?;
    if i >= network.n_nodes() {
        return Err(Error::Domain(format!("node {i} out of range")));
    }
    if candidate >= assignment.k() {
        return Err(Error::Domain(format!("block {candidate} out of range")));
    }
    Ok(node_log_likelihood(
        network,
        assignment.labels(),
        params,
        model,
        i,
        candidate,
    ))
}

pub(crate) fn node_log_likelihood<M: EdgeModel + ?Sized>(
    network: &Network,
    labels: &[usize],
    params: &BlockParams,
    model: &M,
    i: usize,
    candidate: usize,
) -> f64 {
    let within = &params.theta[candidate];
    let between = &params.theta0;
    let mut total = 0.0;
    for (j, &lj) in labels.iter().enumerate() {
        if j == i {
            continue;
        }
        let theta = if lj == candidate { within } else { between };
        total += model.ln_pdf(network.weight(i, j), theta);
        if network.is_directed() {
            total += model.ln_pdf(network.weight(j, i), theta);
        }
    }
    if network.has_self_loops() {
        total += model.ln_pdf(network.weight(i, i), within);
    }
    total
}

/// Log-likelihood of the edges with at least one endpoint flagged in
/// `in_set`, each edge counted once.
pub(crate) fn ln_likelihood_touching<M: EdgeModel + ?Sized>(
    network: &Network,
    labels: &[usize],
    params: &BlockParams,
    model: &M,
    in_set: &[bool],
) -> f64 {
    let n = network.n_nodes();
    let theta = |a: usize, b: usize| -> &[f64] {
        if labels[a] == labels[b] {
            &params.theta[labels[a]]
        } else {
            &params.theta0
        }
    };
    let mut total = 0.0;
    for i in (0..n).filter(|&i| in_set[i]) {
        for j in 0..n {
            if j == i {
                if network.has_self_loops() {
                    total += model.ln_pdf(network.weight(i, i), theta(i, i));
                }
            } else if network.is_directed() {
                total += model.ln_pdf(network.weight(i, j), theta(i, j));
                if !in_set[j] {
                    total += model.ln_pdf(network.weight(j, i), theta(j, i));
                }
            } else if !in_set[j] || j > i {
                total += model.ln_pdf(network.weight(i, j), theta(i, j));
            }
        }
    }
    total
}
