use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn gsbm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gsbm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn data_rows(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().lines().count() - 1
}

const SMALL: &str = r#"
model = "bernoulli"
block_sizes = [4, 4]
theta0 = [0.1]
theta = [[0.9], [0.8]]
iterations = 400
burn_in = 100
seed = 3
"#;

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&gsbm(&["--help"])), 0);
    assert_eq!(code(&gsbm(&["fit", "--help"])), 0);
    assert_eq!(code(&gsbm(&[])), 1);
    assert_eq!(code(&gsbm(&["transmogrify"])), 1);
    assert_eq!(code(&gsbm(&["fit", "--config"])), 1);
}

#[test]
fn generate_fit_diagnose_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let config = write(d, "run.toml", SMALL);
    let (net, truth, run, report) = (d.join("net.csv"), d.join("truth.csv"), d.join("run"), d.join("report"));

    let out = gsbm(&["generate", "--config", s(&config), "--out-network", s(&net), "--out-truth", s(&truth)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(std::fs::read_to_string(&truth).unwrap().lines().next(), Some("node,block"));

    let out = gsbm(&[
        "fit", "--config", s(&config), "--network", s(&net), "--out-dir", s(&run), "--chains", "2",
        "--init", "one-block,singletons",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for f in ["chain_1.csv", "chain_2.csv", "chain_1_moves.csv", "manifest.toml"] {
        assert!(run.join(f).exists(), "{f}");
    }

    let pattern = format!("{}/chain_*.csv", s(&run));
    let out = gsbm(&[
        "diagnose", "--traces", &pattern, "--truth", s(&truth), "--out-dir", s(&report), "--network", s(&net),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    // two traces; the moves files are not mistaken for traces
    assert!(stderr(&out).contains("chain_2.csv: modal K"));
    assert!(!stderr(&out).contains("moves"));
    let summary = std::fs::read_to_string(report.join("summary.csv")).unwrap();
    assert!(summary.starts_with("chain,parameter,mode,q05,q95,ess,presence\n"));
    assert!(report.join("weights.svg").exists());
}

#[test]
fn flags_take_precedence_over_the_config() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let mut text = SMALL.to_string();
    text.push_str("n_chains = 1\nout_dir = \"unused\"\n");
    let config = write(d, "run.toml", &text);
    let net = d.join("net.csv");
    let out = gsbm(&["generate", "--config", s(&config), "--out-network", s(&net), "--out-truth", s(&d.join("t.csv"))]);
    assert_eq!(code(&out), 0);

    let run = d.join("flags");
    let out = gsbm(&[
        "fit", "--config", s(&config), "--network", s(&net), "--out-dir", s(&run), "--chains", "3",
        "--iterations", "60", "--burn-in", "20", "--seed", "9",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(!d.join("unused").exists());
    assert!(run.join("chain_3.csv").exists());
    assert_eq!(data_rows(&run.join("chain_1.csv")), 60);
    let manifest = std::fs::read_to_string(run.join("manifest.toml")).unwrap();
    for line in ["seed = 9", "iterations = 60", "burn_in = 20", "n_chains = 3"] {
        assert!(manifest.contains(line), "{line} not in\n{manifest}");
    }

    // diagnose takes its default burn-in from the manifest; an explicit flag wins
    let pattern = format!("{}/chain_*.csv", s(&run));
    let out = gsbm(&["diagnose", "--traces", &pattern, "--out-dir", s(&d.join("r1"))]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = gsbm(&["diagnose", "--traces", &pattern, "--out-dir", s(&d.join("r2")), "--burn-in", "59"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rhat = std::fs::read_to_string(d.join("r2").join("rhat.csv")).unwrap();
    assert!(rhat.contains("theta_mean,NA,NA,too-short"), "{rhat}");
    let acc = |dir: &str| std::fs::read_to_string(d.join(dir).join("k_marginal.csv")).unwrap();
    assert_ne!(acc("r1"), acc("r2"));
    let out = gsbm(&["diagnose", "--traces", &pattern, "--out-dir", s(&d.join("r3")), "--burn-in", "60"]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
}

#[test]
fn config_problems_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let net = configs().join("six_nodes.csv");
    let unknown = write(d, "unknown.toml", "model = \"bernoulli\"\ncolour = 3\n");
    let out = gsbm(&["fit", "--config", s(&unknown), "--network", s(&net), "--out-dir", s(&d.join("o"))]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));

    let ok = write(d, "ok.toml", "model = \"bernoulli\"\niterations = 10\nburn_in = 5\n");
    let out = gsbm(&["fit", "--config", s(&ok), "--out-dir", s(&d.join("o"))]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    assert!(stderr(&out).contains("--network"));

    let out = gsbm(&["fit", "--config", s(&ok), "--network", s(&net), "--out-dir", s(&d.join("o")), "--init", "sideways"]);
    assert_eq!(code(&out), 1);
    let out = gsbm(&["fit", "--config", s(&d.join("missing.toml")), "--network", s(&net)]);
    assert_ne!(code(&out), 0);
    assert!(!d.join("o").exists());
}

#[test]
fn data_problems_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let config = write(d, "b.toml", "model = \"bernoulli\"\niterations = 10\nburn_in = 5\n");
    let bad = write(d, "bad.csv", "0,3\n3,0\n");
    let out = gsbm(&["fit", "--config", s(&config), "--network", s(&bad), "--out-dir", s(&d.join("o"))]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(!d.join("o").exists());

    let ragged = write(d, "ragged.csv", "0,1,0\n1,0\n");
    let out = gsbm(&["fit", "--config", s(&config), "--network", s(&ragged), "--out-dir", s(&d.join("o"))]);
    assert_eq!(code(&out), 2);

    let out = gsbm(&["diagnose", "--traces", &format!("{}/nothing_*.csv", s(d)), "--out-dir", s(&d.join("r"))]);
    assert_eq!(code(&out), 2);
}

#[test]
fn oracle_writes_the_exact_posterior() {
    let tmp = tempfile::tempdir().unwrap();
    let out_file = tmp.path().join("exact.csv");
    let out = gsbm(&[
        "oracle",
        "--network",
        s(&configs().join("six_nodes.csv")),
        "--config",
        s(&configs().join("oracle_six_nodes.toml")),
        "--out",
        s(&out_file),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = std::fs::read_to_string(&out_file).unwrap();
    let total: f64 = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert!(tmp.path().join("exact_pairs.csv").exists());
    assert!(tmp.path().join("exact_k.csv").exists());

    let poisson = write(tmp.path(), "negbin.toml", "model = \"negbin\"\n");
    let out = gsbm(&["oracle", "--network", s(&configs().join("six_nodes.csv")), "--config", s(&poisson), "--out", s(&out_file)]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
}
