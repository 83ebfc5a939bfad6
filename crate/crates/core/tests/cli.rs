use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_improper-lms");

fn cli(args: &[&str], dir: &Path) -> Output {
    Command::new(BIN).args(args).current_dir(dir).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

const SMALL: &str = r#"{
    "scenario": {
        "kind": "sysid_wl",
        "input": {"r_uu": 0.1, "r_vv": 0.1, "rho_uv": 0.0},
        "noise_var": 0.001,
        "f": [1, [0, 1], 1, [0, 1]],
        "g": [[0, 0.5], 0.5, 0, 0.5]
    },
    "mu": MU, "steps": 150, "runs": 200, "seed": 1, "tail_from": 100, "outputs": "small"
}"#;

#[test]
fn run_writes_both_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.json", &SMALL.replace("MU", "1.0"));
    let out = cli(&["run", &cfg], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(dir.path().join("small_report.csv")).unwrap();
    let mut lines = report.lines();
    assert_eq!(lines.next().unwrap(), "model,steady_state,rel_err_pct,k_norm2,j_min,mu,mu_max,trace_r,lambda_max");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    let names: Vec<&str> = rows.iter().map(|r| r[0]).collect();
    assert_eq!(
        names,
        ["monte_carlo", "monte_carlo_sample", "proposed", "independence", "case_a", "case_b", "general_steady_state"]
    );
    assert_eq!(rows[2][1], "0.3018");
    assert_eq!(rows[2][3], "0.03");

    let curves = std::fs::read_to_string(dir.path().join("small_curves.csv")).unwrap();
    let header = curves.lines().next().unwrap();
    assert_eq!(header, "iter,mc_mse,mc_stderr,proposed_mse,independence_mse,j_min");
    assert_eq!(curves.lines().count(), 151);
    let parsed: Vec<f64> = curves.lines().nth(150).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(parsed[0], 150.0);
    assert!((parsed[3] - 0.3018).abs() < 1e-6);
}

#[test]
fn empty_model_list_keeps_base_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.json", &SMALL.replace("MU", "1.0"));
    let out = cli(&["run", &cfg, "--models", "", "--out", "bare"], dir.path());
    assert!(out.status.success());
    let curves = std::fs::read_to_string(dir.path().join("bare_curves.csv")).unwrap();
    assert_eq!(curves.lines().next().unwrap(), "iter,mc_mse,mc_stderr,j_min");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.json", &SMALL.replace("MU", "-1.0"));
    let out = cli(&["run", &bad], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`mu`"));

    assert_eq!(cli(&["run", "no-such-file.json"], dir.path()).status.code(), Some(3));

    // case_a cannot describe an equalizer, so asking for it is an error
    let out = cli(&["run", "fig4", "--runs", "50", "--models", "proposed,case_a", "--out", "eq"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("not applicable"));

    // 2 / tr R = 2.5 for this system
    let fast = write_config(dir.path(), "fast.json", &SMALL.replace("MU", "2.45"));
    let out = cli(&["run", &fast, "--models", "general_steady_state,case_a", "--out", "fast"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stdout));

    let out = cli(&["bounds", "fig2"], dir.path());
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("2.500000"));

    let out = cli(&["presets"], dir.path());
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 3);
}
