//! Posterior summaries and convergence checks computed from recorded traces.

mod convergence;
mod pairs;
mod relabel;
mod summary;
mod trace;

pub use convergence::{effective_sample_size, gelman_rubin, Ess, GelmanRubin};
pub use pairs::{max_abs_difference, modal_assignment, posterior_pairs};
pub use relabel::{match_labels, MatchedSample, MatchedTrace};
pub use summary::{histogram_mode, quantile, summarize_params, theta_summary_traces, ParamSummary};
pub use trace::{MoveRecord, TraceSample, TraceStore};
