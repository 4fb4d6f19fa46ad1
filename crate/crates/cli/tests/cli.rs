use std::path::Path;
use std::process::Command;

use swipt_cli::{ExperimentConfig, Format, Method};

fn swipt(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_swipt")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const QUICK: &str = "
[quadrature]
check_refinement = false
";

#[test]
fn config_round_trips() {
    let mut cfg = ExperimentConfig {
        seed: 99,
        format: Format::Json,
        methods: vec![Method::Gamma, Method::SecondOrder],
        output_path: Some("out.json".into()),
        ..Default::default()
    };
    cfg.sweep.gains_db = Some(vec![0.0, 7.5]);
    cfg.system.rec_noise_ratio_db = 25.0;
    let text = cfg.to_toml();
    let back = ExperimentConfig::from_toml(&text).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.to_toml(), text);
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("empty.toml", "methods = []"),
        ("unknown.toml", "methods = [\"ba\", \"capacity\"]"),
        ("sweep.toml", "[sweep]\nstart_db = 10.0\nstop_db = 0.0"),
        ("mc.toml", "[validation]\nmc_count = 1000"),
        ("typo.toml", "[system]\ndistanse_m = 3.0"),
    ] {
        let cfg = write(dir.path(), name, text);
        let out = swipt(&["sweep", "--config", &cfg]);
        assert_eq!(out.status.code(), Some(1), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(swipt(&["lemma1", "--config", "/nonexistent.toml"]).status.code(), Some(1));
}

#[test]
fn lemma1_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        assert!(swipt(&["lemma1", "--out", p.to_str().unwrap()]).status.success());
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,l2_distance"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (s, d) = l.split_once(',').unwrap();
            (s.parse().unwrap(), d.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 10);
    // Decreasing from s = 1 on.
    assert!(rows[1..].windows(2).all(|w| w[1].1 < w[0].1));
    assert!((rows[4].1 - 0.031212327003151744).abs() < 1e-9);
}

#[test]
fn sweep_rows_and_formats() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sweep.toml",
        &format!("methods = [\"gamma\", \"ba\", \"second-order\"]\n[sweep]\ngains_db = [0.0, 10.0]\n{QUICK}"),
    );
    let csv_path = dir.path().join("rows.csv");
    let json_path = dir.path().join("rows.json");
    let out = swipt(&["sweep", "--config", &cfg, "--out", csv_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = swipt(&["sweep", "--config", &cfg, "--format", "json", "--out", json_path.to_str().unwrap()]);
    assert!(out.status.success());

    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["g_lna_db", "method", "bits", "alpha_opt", "converged", "constraint_gap", "iterations", "refinement_change"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6);
    let bits = |i: usize| rows[i][2].parse::<f64>().unwrap();
    assert_eq!((&rows[0][0], &rows[0][1]), ("0.0", "gamma"));
    assert!(!rows[0][3].is_empty() && rows[1][3].is_empty());
    for base in [0, 3] {
        assert!(bits(base + 1) >= bits(base) - 2e-2, "ba below gamma");
    }
    let (low_gap, high_gap) = (bits(1) - bits(2), bits(4) - bits(5));
    assert!(low_gap > 0.0 && high_gap > low_gap);

    let json: Vec<serde_json::Value> = serde_json::from_slice(&std::fs::read(&json_path).unwrap()).unwrap();
    assert_eq!(json.len(), 6);
    assert_eq!(json[4]["method"], "ba");
    assert_eq!(json[4]["bits"].as_f64().unwrap(), bits(4));
    assert!(json[1]["alpha_opt"].is_null());
}

#[test]
fn sweep_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", &format!("methods = [\"uniform\", \"rayleigh\"]\n[sweep]\ngains_db = [-10.0, 0.0]\n{QUICK}"));
    let run = || swipt(&["sweep", "--config", &cfg]).stdout;
    assert_eq!(run(), run());
}

#[test]
fn non_convergence_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.toml",
        "methods = [\"ba\"]\n[sweep]\ngains_db = [0.0]\n[quadrature]\ncheck_refinement = false\nba_max_iter = 1\n",
    );
    let out = swipt(&["sweep", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains(",false,"));
}

#[test]
fn validation_passes_at_reference_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "v.toml", "[validation]\nmc_count = 200000\nlna_gain_db = 30.0\nu_multiples = [1.0, 100.0]\n");
    let out = swipt(&["validate", "--config", &cfg, "--exact-oracle", "--seed", "7"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}\n{}", String::from_utf8_lossy(&out.stderr));
    assert!(text.starts_with("g_lna_db,u_multiple,check,value,threshold,pass"));
    for check in ["mean_z", "variance_z", "mc_ks", "exact_l1", "exact_ks", "exact_ks_not_above_smaller_input"] {
        assert!(text.contains(check), "{check}");
    }
}

#[test]
fn validation_failure_exits_with_three() {
    // At u = 0 without rectifier noise the output is exponential, far from
    // its Gaussian fit.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "v.toml",
        "[system]\nrec_noise_ratio_db = -200.0\n[validation]\nmc_count = 100000\nu_multiples = [0.0]\n",
    );
    let out = swipt(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stdout));
}
