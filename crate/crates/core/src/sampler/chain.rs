use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{
    empty_block_move, gibbs_sweep, propose_merge, propose_split, rw_update_params, SamplerConfig,
};
use crate::diagnostics::TraceStore;
use crate::error::{Error, Result};
use crate::models::EdgeModel;
use crate::network::Network;
use crate::prior::DmaPrior;
use crate::state::{BlockAssignment, BlockParams, SamplerState};

/// Starting configuration of a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitMode {
    /// `(K, Z)` drawn from the DMA prior.
    PriorDraw,
    OneBlock,
    Singletons,
}

impl FromStr for InitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prior" | "prior-draw" => Ok(InitMode::PriorDraw),
            "one-block" => Ok(InitMode::OneBlock),
            "singletons" => Ok(InitMode::Singletons),
            other => Err(Error::Config(format!(
                "unknown init mode '{other}' (expected prior, one-block or singletons)"
            ))),
        }
    }
}

impl fmt::Display for InitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitMode::PriorDraw => "prior",
            InitMode::OneBlock => "one-block",
            InitMode::Singletons => "singletons",
        })
    }
}

/// Initial state with every parameter drawn from `G_0`.
pub fn initial_state<M: EdgeModel + ?Sized>(
    n: usize,
    model: &M,
    prior: &DmaPrior,
    init: InitMode,
    rng: &mut dyn RngCore,
) -> SamplerState {
    let assignment = match init {
        InitMode::PriorDraw => prior.sample(n, rng),
        InitMode::OneBlock => BlockAssignment::one_block(n),
        InitMode::Singletons => BlockAssignment::singletons(n),
    };
    let theta0 = model.prior_sample(rng);
    let theta = (0..assignment.k()).map(|_| model.prior_sample(rng)).collect();
    let params = BlockParams::new(theta0, theta).expect("prior draws share the model dimension");
    SamplerState::new(assignment, params).expect("one parameter vector per block")
}

/// RNG for chain `index` of a run seeded with `seed`: every chain shares the
/// key and reads its own ChaCha stream.
pub(crate) fn chain_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `config.iterations` sweeps from `state`, recording the state after
/// every iteration.
pub fn run_chain_from<M: EdgeModel + ?Sized>(
    network: &Network,
    model: &M,
    prior: &DmaPrior,
    config: &SamplerConfig,
    mut state: SamplerState,
    rng: &mut dyn RngCore,
) -> TraceStore {
    let mut trace = TraceStore::new(network.n_nodes(), model.dim());
    for s in 1..=config.iterations {
        let mut outcomes = rw_update_params(&mut state, network, model, config.rw_sd, rng);
        let split = state.k() == 1 || rng.random_bool(0.5);
        outcomes.push(if split {
            propose_split(&mut state, network, model, prior, config.sigma_u, rng)
        } else {
            propose_merge(&mut state, network, model, prior, config.sigma_u, rng)
        });
        outcomes.push(empty_block_move(&mut state, prior, config.nu, model, rng));
        outcomes.push(gibbs_sweep(&mut state, network, model, prior, rng));
        state.iteration = s;
        debug_assert!(state.validate().is_ok());
        trace.push(&state, outcomes);
    }
    trace
}

fn check_inputs<M: EdgeModel + ?Sized>(network: &Network, model: &M, config: &SamplerConfig) -> Result<()> {
    config.validate()?;
    if network.n_nodes() == 0 {
        return Err(Error::Data("network has no nodes".into()));
    }
    if let Some(w) = network
        .modelled_weights()
        .find(|&w| !model.in_support(w))
    {
        return Err(Error::Data(format!(
            "edge weight {w} is outside the support of the {} model",
            model.name()
        )));
    }
    Ok(())
}

/// Runs one chain seeded from `config.seed`.
pub fn run_chain<M: EdgeModel + ?Sized>(
    network: &Network,
    model: &M,
    prior: &DmaPrior,
    config: &SamplerConfig,
    init: InitMode,
) -> Result<TraceStore> {
    check_inputs(network, model, config)?;
    let mut rng = chain_rng(config.seed, 0);
    let state = initial_state(network.n_nodes(), model, prior, init, &mut rng);
    Ok(run_chain_from(network, model, prior, config, state, &mut rng))
}

/// Runs one chain per entry of `inits` concurrently. Chain `c` uses stream
/// `c` of the run seed, so chain 0 reproduces [`run_chain`].
pub fn run_chains<M: EdgeModel + ?Sized>(
    network: &Network,
    model: &M,
    prior: &DmaPrior,
    config: &SamplerConfig,
    inits: &[InitMode],
) -> Result<Vec<TraceStore>> {
    check_inputs(network, model, config)?;
    Ok(inits
        .par_iter()
        .enumerate()
        .map(|(c, &init)| {
            let mut rng = chain_rng(config.seed, c as u64);
            let state = initial_state(network.n_nodes(), model, prior, init, &mut rng);
            run_chain_from(network, model, prior, config, state, &mut rng)
        })
        .collect())
}
