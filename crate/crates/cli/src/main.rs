use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use gsbm::io::{self, DiagnoseOptions, RunConfig};

/// Bayesian block modelling of weighted networks with a split-merge
/// reversible-jump sampler.
#[derive(Debug, Parser)]
#[command(name = "gsbm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a synthetic network from block sizes and true parameters.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_network: PathBuf,
        #[arg(long)]
        out_truth: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sample the posterior and write one trace per chain.
    Fit {
        #[arg(long)]
        config: PathBuf,
        /// Network file; overrides the `network` key of the config.
        #[arg(long)]
        network: Option<PathBuf>,
        /// Output directory; overrides the `out_dir` key of the config.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        chains: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// one-block, singletons or prior; a comma-separated list is cycled
        /// over the chains.
        #[arg(long)]
        init: Option<String>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        burn_in: Option<usize>,
    },
    /// Summarise traces: pair matrix, parameter table, R-hat and figures.
    Diagnose {
        /// Glob matching the trace files, e.g. 'run/chain_*.csv'.
        #[arg(long)]
        traces: String,
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
        /// Defaults to the burn-in recorded in the run manifest.
        #[arg(long)]
        burn_in: Option<usize>,
        /// Network drawn as a weight heatmap.
        #[arg(long)]
        network: Option<PathBuf>,
    },
    /// Enumerate the exact posterior of a small conjugate instance.
    Oracle {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// An error in how the tool was invoked rather than in the data.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 1;
    }
    match err.downcast_ref::<gsbm::Error>() {
        Some(gsbm::Error::Config(_) | gsbm::Error::Domain(_)) => 1,
        _ => 2,
    }
}

fn load_config(path: &Path) -> anyhow::Result<RunConfig> {
    let config = RunConfig::from_file(path)?;
    Ok(config)
}

fn generate(config: &Path, out_network: &Path, out_truth: &Path, seed: Option<u64>) -> anyhow::Result<()> {
    let mut config = load_config(config)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let (network, truth) = io::generate(&config)?;
    io::write_network(out_network, &network)?;
    io::write_labels(out_truth, &truth)?;
    eprintln!(
        "wrote {} nodes to {} and labels to {}",
        network.n_nodes(),
        out_network.display(),
        out_truth.display()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn fit(
    config: &Path,
    network: Option<PathBuf>,
    out_dir: Option<PathBuf>,
    chains: Option<usize>,
    seed: Option<u64>,
    init: Option<String>,
    iterations: Option<usize>,
    burn_in: Option<usize>,
) -> anyhow::Result<()> {
    let mut config = load_config(config)?;
    if let Some(v) = network {
        config.network = Some(v);
    }
    if let Some(v) = out_dir {
        config.out_dir = Some(v);
    }
    if let Some(v) = chains {
        config.n_chains = v;
    }
    if let Some(v) = seed {
        config.seed = v;
    }
    if let Some(v) = init {
        config.init = v;
    }
    if let Some(v) = iterations {
        config.iterations = v;
    }
    if let Some(v) = burn_in {
        config.burn_in = v;
    }
    config.validate()?;
    let network_path = config
        .network
        .clone()
        .ok_or_else(|| UsageError("no network given (use --network or the 'network' key)".into()))?;
    let out_dir = config
        .out_dir
        .clone()
        .ok_or_else(|| UsageError("no output directory given (use --out-dir or the 'out_dir' key)".into()))?;
    let network = io::load_network(&network_path, &config)?;
    let out = io::fit(&config, &network, &out_dir)?;
    for (path, trace) in out.trace_paths.iter().zip(&out.traces) {
        let modal = trace.modal_k(config.burn_in)?;
        eprintln!("{}: modal K after burn-in = {modal}", path.display());
    }
    eprintln!(
        "{} chain(s) in {:.1} s",
        out.traces.len(),
        out.manifest.wall_time_seconds
    );
    Ok(())
}

fn diagnose(
    pattern: &str,
    truth: Option<PathBuf>,
    out_dir: &Path,
    burn_in: Option<usize>,
    network: Option<PathBuf>,
) -> anyhow::Result<()> {
    let mut paths: Vec<PathBuf> = glob::glob(pattern)
        .map_err(|e| UsageError(format!("bad trace pattern '{pattern}': {e}")))?
        .collect::<Result<_, _>>()
        .context("listing trace files")?;
    paths.retain(|p| !p.to_string_lossy().ends_with("_moves.csv"));
    paths.sort();
    if paths.is_empty() {
        return Err(anyhow!(gsbm::Error::Data(format!("no trace files match '{pattern}'"))));
    }
    let traces = io::read_traces(&paths)?;
    let burn_in = match burn_in.or_else(|| io::manifest_burn_in(&paths[0])) {
        Some(b) => b,
        None => traces[0].iterations() / 2,
    };
    let truth = truth.map(|p| io::read_labels(&p)).transpose()?;
    let network = network
        .map(|p| io::read_network(&p, io::NetworkFlags::default()))
        .transpose()?;
    let report = io::diagnose(
        &traces,
        &DiagnoseOptions {
            burn_in,
            truth: truth.as_deref(),
            network: network.as_ref(),
        },
        out_dir,
    )?;
    for (path, k) in paths.iter().zip(&report.modal_k) {
        eprintln!("{}: modal K = {k}", path.display());
    }
    for row in &report.rhat {
        match row.value {
            Some(g) => eprintln!("R-hat ({}) = {:.4} (upper {:.4})", row.summary, g.r_hat, g.upper_ci),
            None => eprintln!("R-hat ({}) unavailable: {}", row.summary, row.status.as_str()),
        }
    }
    eprintln!("reports written to {}", out_dir.display());
    Ok(())
}

fn oracle(network: &Path, config: &Path, out: &Path) -> anyhow::Result<()> {
    let config = load_config(config)?;
    let network = io::load_network(network, &config)?;
    let posterior = io::oracle(&config, &network, out)?;
    eprintln!(
        "{} (K, partition) entries written to {}",
        posterior.entries.len(),
        out.display()
    );
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Generate {
            config,
            out_network,
            out_truth,
            seed,
        } => generate(&config, &out_network, &out_truth, seed),
        Command::Fit {
            config,
            network,
            out_dir,
            chains,
            seed,
            init,
            iterations,
            burn_in,
        } => fit(&config, network, out_dir, chains, seed, init, iterations, burn_in),
        Command::Diagnose {
            traces,
            truth,
            out_dir,
            burn_in,
            network,
        } => diagnose(&traces, truth, &out_dir, burn_in, network),
        Command::Oracle {
            network,
            config,
            out,
        } => oracle(&network, &config, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
