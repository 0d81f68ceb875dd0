//! Bayesian inference for generalised stochastic block models with an
//! unknown number of blocks.
//!
//! Edge weights follow any family implementing [`EdgeModel`]. Block labels
//! and the number of blocks carry a Dirichlet-multinomial allocation prior
//! ([`DmaPrior`]), and the posterior is explored by a split-merge
//! reversible-jump sampler ([`sampler::run_chain`]).

pub mod diagnostics;
mod error;
pub mod io;
pub mod models;
mod network;
pub mod oracle;
mod prior;
pub mod sampler;
mod state;

pub use diagnostics::TraceStore;
pub use error::{Error, Result};
pub use models::{EdgeModel, Matching, ParamSpace, Transform};
pub use network::Network;
pub use prior::DmaPrior;
pub use sampler::{InitMode, MoveKind, MoveOutcome, SamplerConfig};
pub use state::{BlockAssignment, BlockParams, SamplerState};
