use std::path::PathBuf;
use std::process::{Command, Output};

fn entroflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entroflow")).args(args).output().expect("binary runs")
}

fn config(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("entroflow-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Numeric column of the first table in a CSV report.
fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    lines.take_while(|l| l.contains('.')).map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

const ENGINE: &str = r#"{
  "model": {"type": "qhe", "splitting": 1.0, "steady_state": {"p1": 0.3}},
  "orders": [2],
  "beta": 1.0,
  "xi_grid": [[0, 0], [0.3, 0.1]]
}"#;

const OSCILLATOR: &str = r#"{
  "model": {"type": "oscillator", "omega0": 1.0, "drive_frequency": 1.7, "effective_temperature": 1.0},
  "orders": [2, 3, 5],
  "beta": 1.0
}"#;

#[test]
fn rflow_engine_reference() {
    let o = entroflow(&["rflow", "--config", config("engine.json", ENGINE).to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("# entroflow "));
    assert!((column(&out, "total_flow")[0] - 0.062115).abs() < 1e-5);
    assert!(column(&out, "residual").iter().all(|&r| r <= 1e-10));
}

#[test]
fn rflow_oscillator_at_probe_temperature_is_zero() {
    let o = entroflow(&["rflow", "--config", config("osc.json", OSCILLATOR).to_str().unwrap()]);
    let out = stdout(&o);
    for name in ["total_flow", "single_world", "multi_world", "via_correspondence"] {
        assert!(column(&out, name).iter().all(|v| v.abs() < 1e-14), "{name}");
    }
}

#[test]
fn fcs_zero_row_and_mean_current() {
    let o = entroflow(&["fcs", "--config", config("engine-fcs.json", ENGINE).to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(column(&out, "f_i_re")[0], 0.0);
    assert!(column(&out, "f_c_im").iter().all(|&v| v == 0.0));
    let cumulants = out.split("# table: cumulants\n").nth(1).unwrap();
    assert!((column(cumulants, "incoherent")[0] - 0.067209).abs() < 1e-6);
}

#[test]
fn invalid_config_exits_two_with_location() {
    let bad = config("bad.json", "{\n  \"model\": {\"type\": \"qhe\", \"splitting\": 1.0},\n  \"beta\": 1.0,\n  \"colour\": 3\n}");
    let o = entroflow(&["rflow", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("colour") && err.contains("line 4"), "{err}");
    let m1 = config("m1.json", &ENGINE.replace("[2]", "[1]"));
    assert_eq!(entroflow(&["rflow", "--config", m1.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(entroflow(&["rflow"]).status.code(), Some(2));
}

#[test]
fn verify_passes_and_is_byte_reproducible() {
    let a = entroflow(&["verify", "--seed", "11"]);
    let b = entroflow(&["verify", "--seed", "11"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("# passed: true"));
}

#[test]
fn verify_suite_filter_and_negative_control() {
    let o = entroflow(&["verify", "--suite", "appendix-a"]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0));
    assert!(out.lines().filter(|l| l.starts_with("appendix-a,")).count() >= 2);
    assert!(!out.contains("correspondence,"));

    let o = entroflow(&["verify", "--corrupt-sign"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("\ncorrespondence,false"));

    assert_eq!(entroflow(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
}

#[test]
fn oracle_rejects_oscillator() {
    let o = entroflow(&["oracle", "--config", config("osc-oracle.json", OSCILLATOR).to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("oracle supports QHE only"));
}

#[test]
fn oracle_is_deterministic_and_writes_histogram() {
    let engine = config(
        "weak.json",
        r#"{"model": {"type": "qhe", "splitting": 1.0, "probe_chi": {"family": "constant", "value": 0.01},
             "other_baths": [{"beta": 0.2}]}, "beta": 1.0,
             "oracle": {"duration": 5.0, "trajectories": 20000}}"#,
    );
    let hist = engine.with_file_name("hist.csv");
    let args = ["oracle", "--config", engine.to_str().unwrap(), "--seed", "3", "--histogram", hist.to_str().unwrap()];
    let a = entroflow(&args);
    let b = entroflow(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let out = stdout(&a);
    assert!(out.contains("# seed: 3"));
    let analytic = column(&out, "analytic")[0];
    assert!((column(&out, "tilted")[0] - analytic).abs() <= 1e-6 * analytic);
    let h = std::fs::read_to_string(hist).unwrap();
    assert!(h.starts_with("net_quanta,trajectories\n"));
}

#[test]
fn sweep_json_output() {
    let sweep = config(
        "sweep.json",
        &OSCILLATOR.replace(
            "\"beta\": 1.0",
            "\"beta\": 1.0, \"sweep\": {\"name\": \"effective_temperature\", \"from\": 0.5, \"to\": 2.0, \"steps\": 4}",
        ),
    );
    let out = entroflow(&["sweep", "--config", sweep.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v["tables"][0]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 12);
    // Flow changes sign where the effective temperature crosses the probe's.
    let sign = |i: usize| rows[i][2].as_f64().unwrap().signum();
    assert_eq!(sign(0), -1.0);
    assert_eq!(sign(11), 1.0);
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("entroflow-cli-{}", std::process::id())).join("out.csv");
    let cfg = config("engine-out.json", ENGINE);
    let o = entroflow(&["rflow", "--config", cfg.to_str().unwrap(), "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(path).unwrap().contains("# command: rflow"));
}
