//! File formats, run configuration and the end-to-end pipelines behind the
//! command-line tool.

mod config;
mod network;
mod pipeline;
pub mod svg;
mod trace;

pub use config::RunConfig;
pub use network::{
    format_labels, format_network, parse_labels, parse_network, read_labels, read_network,
    write_labels, write_network, NetworkFlags,
};
pub use pipeline::{
    diagnose, fit, generate, load_network, manifest_burn_in, oracle, read_traces,
    DiagnoseOptions, DiagnoseReport, FitOutput, Manifest, RhatRow, RhatStatus,
};
pub use trace::{
    moves_path, read_moves, read_trace, read_trace_file, write_moves, write_trace,
    write_trace_file,
};
