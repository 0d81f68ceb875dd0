use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::network::{read_network, NetworkFlags};
use super::svg;
use super::trace::{read_trace_file, write_trace_file};
use crate::diagnostics::{
    gelman_rubin, match_labels, modal_assignment, posterior_pairs, summarize_params,
    theta_summary_traces, GelmanRubin, MatchedTrace, ParamSummary, TraceStore,
};
use crate::error::{Error, Result};
use crate::network::Network;
use crate::oracle::{enumerate_posterior, exact_pair_matrix, ExactPosterior};
use crate::sampler::{run_chains, MoveKind};

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Draws a synthetic network from the configured model.
///
/// Nodes are assigned to blocks in order of `block_sizes`; every modelled
/// edge is drawn from `theta[k]` when both ends lie in block `k` and from
/// `theta0` otherwise. Returns the network and the 0-based true labels.
pub fn generate(config: &RunConfig) -> Result<(Network, Vec<usize>)> {
    let model = config.build_model()?;
    let missing = |key: &str| Error::Config(format!("generate needs '{key}'"));
    let sizes = config.block_sizes.as_ref().ok_or_else(|| missing("block_sizes"))?;
    let theta0 = config.theta0.as_ref().ok_or_else(|| missing("theta0"))?;
    let theta = config.theta.as_ref().ok_or_else(|| missing("theta"))?;
    if sizes.is_empty() || sizes.iter().sum::<usize>() == 0 {
        return Err(Error::Config("block_sizes must describe at least one node".into()));
    }
    if theta.len() != sizes.len() {
        return Err(Error::Config(format!(
            "theta has {} rows but there are {} blocks",
            theta.len(),
            sizes.len()
        )));
    }
    for row in std::iter::once(theta0).chain(theta) {
        model.check_params(row).map_err(|e| Error::Config(e.to_string()))?;
    }
    let truth: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(k, &s)| std::iter::repeat(k).take(s))
        .collect();
    let n = truth.len();
    let mut network = Network::zeros(
        n,
        config.directed.unwrap_or(false),
        config.self_loops.unwrap_or(false),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let edges: Vec<(usize, usize)> = network.edges().collect();
    for (i, j) in edges {
        let params = if truth[i] == truth[j] {
            &theta[truth[i]]
        } else {
            theta0
        };
        network.set_weight(i, j, model.draw(params, &mut rng));
    }
    Ok((network, truth))
}

/// Reads the network named by `path`, with the configuration's flag
/// overrides applied.
pub fn load_network(path: &Path, config: &RunConfig) -> Result<Network> {
    read_network(
        path,
        NetworkFlags {
            directed: config.directed,
            self_loops: config.self_loops,
        },
    )
}

/// Run record written next to the traces of a `fit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub version: String,
    pub wall_time_seconds: f64,
    pub traces: Vec<String>,
    /// Fully resolved configuration; rerunning it reproduces the traces.
    pub config: RunConfig,
}

impl Manifest {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug)]
pub struct FitOutput {
    pub traces: Vec<TraceStore>,
    pub trace_paths: Vec<PathBuf>,
    pub manifest: Manifest,
}

/// Runs `config.n_chains` chains on `network` and writes
/// `chain_<c>.csv`, `chain_<c>_moves.csv` and `manifest.toml` into `out_dir`.
/// Nothing is written unless every chain completes.
pub fn fit(config: &RunConfig, network: &Network, out_dir: &Path) -> Result<FitOutput> {
    config.validate()?;
    let model = config.build_model()?;
    let prior = config.prior()?;
    let inits = config.init_modes()?;
    let start = Instant::now();
    let traces = run_chains(network, model.as_ref(), &prior, &config.sampler_config(), &inits)?;
    let wall_time_seconds = start.elapsed().as_secs_f64();

    create_dir(out_dir)?;
    let mut trace_paths = Vec::new();
    for (c, trace) in traces.iter().enumerate() {
        let path = out_dir.join(format!("chain_{}.csv", c + 1));
        write_trace_file(&path, trace)?;
        trace_paths.push(path);
    }
    let mut echo = config.resolved()?;
    echo.directed = Some(network.is_directed());
    echo.self_loops = Some(network.has_self_loops());
    echo.out_dir = Some(out_dir.to_path_buf());
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").into(),
        wall_time_seconds,
        traces: trace_paths
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect(),
        config: echo,
    };
    let text = toml::to_string(&manifest).expect("manifest serialises to TOML");
    write_file(&out_dir.join("manifest.toml"), &text)?;
    Ok(FitOutput {
        traces,
        trace_paths,
        manifest,
    })
}

/// Burn-in recorded in a `manifest.toml` beside `trace_path`, if any.
pub fn manifest_burn_in(trace_path: &Path) -> Option<usize> {
    let manifest = trace_path.with_file_name("manifest.toml");
    Manifest::from_file(&manifest).ok().map(|m| m.config.burn_in)
}

pub fn read_traces(paths: &[PathBuf]) -> Result<Vec<TraceStore>> {
    paths.iter().map(|p| read_trace_file(p)).collect()
}

#[derive(Debug, Clone, Default)]
pub struct DiagnoseOptions<'a> {
    pub burn_in: usize,
    /// True 0-based labels; when given, block labels are matched to them.
    pub truth: Option<&'a [usize]>,
    /// Network drawn as a weight heatmap when given.
    pub network: Option<&'a Network>,
}

/// Why an R-hat value is or is not available.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhatStatus {
    Ok,
    /// One chain was given; its two halves were compared.
    SplitSingleChain,
    /// Zero within-chain variance.
    Degenerate,
    /// Fewer than two retained samples per chain.
    TooShort,
}

impl RhatStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RhatStatus::Ok => "ok",
            RhatStatus::SplitSingleChain => "split-single-chain",
            RhatStatus::Degenerate => "degenerate",
            RhatStatus::TooShort => "too-short",
        }
    }
}

/// Gelman-Rubin result for one scalar summary; `value` is `None` unless
/// the status is `Ok` or `SplitSingleChain`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhatRow {
    pub summary: &'static str,
    pub value: Option<GelmanRubin>,
    pub status: RhatStatus,
}

#[derive(Debug, Clone)]
pub struct DiagnoseReport {
    /// Pair matrix pooled over the retained samples of every chain.
    pub pairs: Vec<Vec<f64>>,
    pub modal_k: Vec<usize>,
    pub k_marginals: Vec<Vec<f64>>,
    /// Per-chain parameter summaries, after matching when truth is given.
    pub summaries: Vec<Vec<ParamSummary>>,
    /// Per-chain 0-based modal assignment, matched when truth is given.
    pub modal_assignments: Vec<Vec<usize>>,
    pub rhat: Vec<RhatRow>,
}

fn csv_value(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else {
        "NA".into()
    }
}

fn rhat_rows(traces: &[TraceStore], burn_in: usize) -> Result<Vec<RhatRow>> {
    let mut means = Vec::new();
    let mut vars = Vec::new();
    for t in traces {
        let (m, v) = theta_summary_traces(t, burn_in)?;
        means.push(m);
        vars.push(v);
    }
    let split = traces.len() == 1;
    let prepare = |series: Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        if split {
            // a single chain is compared with itself by halves
            let s = &series[0];
            let h = s.len() / 2;
            vec![s[..h].to_vec(), s[s.len() - h..].to_vec()]
        } else {
            let len = series.iter().map(Vec::len).min().unwrap_or(0);
            series.into_iter().map(|s| s[s.len() - len..].to_vec()).collect()
        }
    };
    let mut rows = Vec::new();
    for (summary, series) in [("theta_mean", means), ("theta_var", vars)] {
        let chains = prepare(series);
        let (value, status) = if chains.iter().any(|c| c.len() < 2) {
            (None, RhatStatus::TooShort)
        } else {
            match gelman_rubin(&chains) {
                Ok(g) if split => (Some(g), RhatStatus::SplitSingleChain),
                Ok(g) => (Some(g), RhatStatus::Ok),
                Err(Error::Degenerate(_)) => (None, RhatStatus::Degenerate),
                Err(e) => return Err(e),
            }
        };
        rows.push(RhatRow {
            summary,
            value,
            status,
        });
    }
    Ok(rows)
}

fn pooled_pairs(traces: &[TraceStore], burn_in: usize) -> Result<Vec<Vec<f64>>> {
    let n = traces[0].n_nodes();
    let mut pooled = vec![vec![0.0; n]; n];
    let mut total = 0.0;
    for t in traces {
        let count = t.retained(burn_in)?.len() as f64;
        let p = posterior_pairs(t, burn_in)?;
        for (row, prow) in pooled.iter_mut().zip(&p) {
            for (v, pv) in row.iter_mut().zip(prow) {
                *v += pv * count;
            }
        }
        total += count;
    }
    pooled.iter_mut().flatten().for_each(|v| *v /= total);
    Ok(pooled)
}

fn matrix_csv(m: &[Vec<f64>]) -> String {
    let mut s = String::new();
    for row in m {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Computes every posterior summary of `traces` and writes them to `out_dir`:
/// `pairs.csv`, `summary.csv`, `k_marginal.csv`, `rhat.csv`,
/// `modal_assignment.csv`, `acceptance.csv`, `pairs.svg`, `k_trace.svg` and,
/// when a network is supplied, `weights.svg`.
pub fn diagnose(traces: &[TraceStore], options: &DiagnoseOptions<'_>, out_dir: &Path) -> Result<DiagnoseReport> {
    let first = traces
        .first()
        .ok_or_else(|| Error::Data("no traces to diagnose".into()))?;
    let n = first.n_nodes();
    if let Some(t) = traces.iter().find(|t| t.n_nodes() != n || t.dim() != first.dim()) {
        return Err(Error::Data(format!(
            "traces disagree on shape: {} nodes x {} parameters against {} x {}",
            t.n_nodes(),
            t.dim(),
            n,
            first.dim()
        )));
    }
    if let Some(truth) = options.truth {
        if truth.len() != n {
            return Err(Error::Data(format!(
                "truth has {} labels but traces have {n} nodes",
                truth.len()
            )));
        }
    }
    if let Some(net) = options.network {
        if net.n_nodes() != n {
            return Err(Error::Data(format!(
                "network has {} nodes but traces have {n}",
                net.n_nodes()
            )));
        }
    }
    let burn_in = options.burn_in;

    let matched: Vec<MatchedTrace> = traces
        .iter()
        .map(|t| match options.truth {
            Some(truth) => match_labels(t, truth, burn_in),
            None => Ok(MatchedTrace::identity(t)),
        })
        .collect::<Result<_>>()?;
    let summaries: Vec<Vec<ParamSummary>> = matched
        .iter()
        .map(|m| summarize_params(m, burn_in))
        .collect::<Result<_>>()?;
    let modal_assignments: Vec<Vec<usize>> = traces
        .iter()
        .zip(&matched)
        .map(|(t, m)| Ok(modal_assignment(t, burn_in)?.iter().map(|&l| m.mapping()[l]).collect()))
        .collect::<Result<_>>()?;
    let k_marginals: Vec<Vec<f64>> = traces
        .iter()
        .map(|t| t.k_marginal(burn_in))
        .collect::<Result<_>>()?;
    let modal_k: Vec<usize> = traces
        .iter()
        .map(|t| t.modal_k(burn_in))
        .collect::<Result<_>>()?;
    let pairs = pooled_pairs(traces, burn_in)?;
    let rhat = rhat_rows(traces, burn_in)?;

    create_dir(out_dir)?;
    write_file(&out_dir.join("pairs.csv"), &matrix_csv(&pairs))?;

    let mut s = String::from("chain,parameter,mode,q05,q95,ess,presence\n");
    for (c, rows) in summaries.iter().enumerate() {
        for r in rows {
            writeln!(
                s,
                "{},{},{},{},{},{},{}",
                c + 1,
                r.name(),
                r.mode,
                r.q05,
                r.q95,
                r.ess.map_or("NA".into(), |e| e.to_string()),
                r.presence
            )
            .unwrap();
        }
    }
    write_file(&out_dir.join("summary.csv"), &s)?;

    let mut s = String::from("chain,K,probability\n");
    for (c, marg) in k_marginals.iter().enumerate() {
        for (k, &p) in marg.iter().enumerate().filter(|(_, &p)| p > 0.0) {
            writeln!(s, "{},{k},{p}", c + 1).unwrap();
        }
    }
    write_file(&out_dir.join("k_marginal.csv"), &s)?;

    let mut s = String::from("summary,r_hat,upper_ci,status\n");
    for row in &rhat {
        let (r, u) = row.value.map_or((f64::NAN, f64::NAN), |g| (g.r_hat, g.upper_ci));
        writeln!(
            s,
            "{},{},{},{}",
            row.summary,
            csv_value(r),
            csv_value(u),
            row.status.as_str()
        )
        .unwrap();
    }
    write_file(&out_dir.join("rhat.csv"), &s)?;

    let mut s = String::from("node");
    for c in 0..traces.len() {
        write!(s, ",chain_{}", c + 1).unwrap();
    }
    s.push('\n');
    for i in 0..n {
        write!(s, "{}", i + 1).unwrap();
        for m in &modal_assignments {
            write!(s, ",{}", m[i] + 1).unwrap();
        }
        s.push('\n');
    }
    write_file(&out_dir.join("modal_assignment.csv"), &s)?;

    let mut s = String::from("chain,move,attempts,accepted,rate\n");
    for (c, t) in traces.iter().enumerate() {
        for kind in [
            MoveKind::Rw,
            MoveKind::Split,
            MoveKind::Merge,
            MoveKind::Gibbs,
            MoveKind::AddEmpty,
            MoveKind::DeleteEmpty,
        ] {
            let attempts = t.moves().iter().filter(|m| m.outcome.move_kind == kind).count();
            if attempts == 0 {
                continue;
            }
            let accepted = t
                .moves()
                .iter()
                .filter(|m| m.outcome.move_kind == kind && m.outcome.accepted)
                .count();
            writeln!(
                s,
                "{},{},{attempts},{accepted},{}",
                c + 1,
                kind.as_str(),
                accepted as f64 / attempts as f64
            )
            .unwrap();
        }
    }
    write_file(&out_dir.join("acceptance.csv"), &s)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (modal_assignments[0][i], i));
    write_file(
        &out_dir.join("pairs.svg"),
        &svg::heatmap(&pairs, &order, 0.0, 1.0, "Posterior probability of sharing a block"),
    )?;
    let k_traces: Vec<Vec<usize>> = traces.iter().map(TraceStore::k_trace).collect();
    write_file(
        &out_dir.join("k_trace.svg"),
        &svg::k_trace_plot(&k_traces, "Number of blocks K"),
    )?;
    if let Some(net) = options.network {
        // signed log(1 + |w|) keeps negative weights of real-valued models drawable
        let scaled: Vec<Vec<f64>> = (0..n)
            .map(|i| net.row(i).iter().map(|w| w.signum() * w.abs().ln_1p()).collect())
            .collect();
        let lo = scaled.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        let hi = scaled.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
        write_file(
            &out_dir.join("weights.svg"),
            &svg::heatmap(&scaled, &order, lo.min(0.0), hi, "Edge weights, log(1 + W)"),
        )?;
    }

    Ok(DiagnoseReport {
        pairs,
        modal_k,
        k_marginals,
        summaries,
        modal_assignments,
        rhat,
    })
}

/// Enumerates the exact posterior and writes it to `out` as
/// `K,partition,probability` rows (partition labels 1-based and
/// space-separated), the pair matrix to `<stem>_pairs.csv` and the marginal
/// of `K` to `<stem>_k.csv`.
pub fn oracle(config: &RunConfig, network: &Network, out: &Path) -> Result<ExactPosterior> {
    let conjugate = config.conjugate_model()?;
    let prior = config.prior()?;
    let k_max = config.k_max.unwrap_or(network.n_nodes());
    if k_max == 0 {
        return Err(Error::Config("k_max must be at least one".into()));
    }
    let posterior = enumerate_posterior(network, &conjugate, &prior, k_max)?;

    let mut s = String::from("K,partition,probability\n");
    for e in &posterior.entries {
        let labels: Vec<String> = e.partition.iter().map(|l| (l + 1).to_string()).collect();
        writeln!(s, "{},{},{}", e.k, labels.join(" "), e.probability).unwrap();
    }
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    write_file(out, &s)?;

    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "oracle".into());
    write_file(
        &out.with_file_name(format!("{stem}_pairs.csv")),
        &matrix_csv(&exact_pair_matrix(&posterior)),
    )?;
    let mut s = String::from("K,probability\n");
    for (k, p) in posterior.k_marginal().iter().enumerate().skip(1) {
        writeln!(s, "{k},{p}").unwrap();
    }
    write_file(&out.with_file_name(format!("{stem}_k.csv")), &s)?;
    Ok(posterior)
}
