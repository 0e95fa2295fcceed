//! End-to-end checks of the command-line interface: exit codes, artifact
//! formats, determinism, and the bundled transport fixture.

use std::path::{Path, PathBuf};
use std::process::Command;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_causalflow"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("causalflow-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("create temp dir");
    dir
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).expect("write fixture");
}

/// The hand-checkable 2×2 transportation fixture: only a quarter of the
/// mass is forced to move superluminally.
#[test]
fn transport_solve_two_by_two_fixture() {
    let dir = temp_dir("transport");
    let mu = dir.join("mu.csv");
    let nu = dir.join("nu.csv");
    write(&mu, "x,mass\n0.0,0.75\n2.0,0.25\n");
    write(&nu, "x,mass\n-1.0,0.5\n3.0,0.5\n");
    let output = binary()
        .args(["transport", "solve", "--mu"])
        .arg(&mu)
        .arg("--nu")
        .arg(&nu)
        .args(["--dt", "1.0"])
        .output()
        .expect("run binary");
    assert!(output.status.success(), "{output:?}");
    let report: serde_json::Value =
        serde_json::from_slice(&output.stdout).expect("json report");
    assert!((report["n_tilde"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!((report["causal_mass"].as_f64().unwrap() - 0.75).abs() < 1e-12);
    assert_eq!(report["witness"][0].as_f64().unwrap(), 0.0);
}

#[test]
fn evolve_writes_csv_and_manifest() {
    let dir = temp_dir("evolve");
    let out = dir.join("packet.csv");
    let status = binary()
        .args([
            "evolve",
            "--family",
            "gaussian:1.0",
            "--dispersion",
            "relativistic:1.0",
            "--t",
            "0.5",
            "--out",
        ])
        .arg(&out)
        .status()
        .expect("run binary");
    assert!(status.success());
    let text = std::fs::read_to_string(&out).expect("csv written");
    assert!(text.starts_with("x,re_psi,im_psi,density\n"));
    assert!(text.lines().count() > 1000);
    let manifest_path = dir.join("packet.csv.manifest.json");
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(manifest_path).expect("manifest"))
            .expect("manifest json");
    assert_eq!(manifest["tool"], "causalflow");
    assert!(manifest["diagnostics"]["grid_cells"].as_u64().unwrap() >= 1 << 18);
}

#[test]
fn quantify_reports_anchor_value() {
    let output = binary()
        .args([
            "quantify",
            "--family",
            "gaussian:1.0",
            "--dispersion",
            "relativistic:1.0",
            "--t",
            "0.81",
            "--a",
            "2.89",
        ])
        .output()
        .expect("run binary");
    assert!(output.status.success());
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).expect("json");
    let value = report["deficiency"].as_f64().unwrap();
    assert!(
        (value - 3.55e-5).abs() < 0.1 * 3.55e-5,
        "deficiency {value}"
    );
    assert_eq!(report["detected"], true);
}

#[test]
fn sweep_is_deterministic_and_parallel_agnostic() {
    let dir = temp_dir("sweep");
    let config = dir.join("config.json");
    write(
        &config,
        r#"{
  "family": {"kind": "gaussian", "width_sq": 1.0},
  "dispersion": {"kind": "relativistic", "mass": 1.0},
  "time_scan": [0.2, 0.05],
  "half_width_scan": [0.5, 5.0, 12]
}"#,
    );
    let out1 = dir.join("sweep1.csv");
    let out2 = dir.join("sweep2.csv");
    for (out, threads) in [(&out1, "1"), (&out2, "4")] {
        let status = binary()
            .args(["sweep", "--config"])
            .arg(&config)
            .args(["--threads", threads, "--out"])
            .arg(out)
            .status()
            .expect("run binary");
        assert!(status.success());
    }
    let a = std::fs::read(&out1).expect("sweep 1");
    let b = std::fs::read(&out2).expect("sweep 2");
    assert_eq!(a, b, "sweep output must be bit-identical across pool sizes");
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("t,a,M\n"));
}

#[test]
fn continuity_check_flags_superluminal_flow() {
    let dir = temp_dir("continuity");
    let flow = dir.join("flow.csv");
    // 3×5 grid with j = 1.5ρ: a spacelike current.
    let mut text = String::from("t,x,rho,j\n");
    for ti in 0..3 {
        for xi in 0..5 {
            let t = 0.1 * ti as f64;
            let x = 0.5 * xi as f64;
            let rho = 1.0 + 0.1 * xi as f64;
            text.push_str(&format!("{t},{x},{rho},{}\n", 1.5 * rho));
        }
    }
    write(&flow, &text);
    let output = binary()
        .args(["continuity-check", "--flow"])
        .arg(&flow)
        .output()
        .expect("run binary");
    assert!(output.status.success());
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).expect("json");
    assert_eq!(report["causal_current"]["ok"], false);
    assert!((report["velocity_bound"]["max_speed"].as_f64().unwrap() - 1.5).abs() < 1e-9);
}

#[test]
fn dirac_check_reports_causal_pairs() {
    let output = binary()
        .args([
            "dirac-check",
            "--state",
            "random:7",
            "--times",
            "0.0,0.5,1.0",
        ])
        .output()
        .expect("run binary");
    assert!(output.status.success());
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).expect("json");
    assert!(report["max_speed_ratio"].as_f64().unwrap() <= 1.0 + 1e-12);
    let pairs = report["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 6);
    for pair in pairs {
        assert_eq!(pair["causal"], true, "{pair}");
    }
}

#[test]
fn config_errors_exit_two_and_budget_errors_exit_three() {
    // Unknown family: configuration error.
    let status = binary()
        .args([
            "quantify",
            "--family",
            "tophat:1.0",
            "--dispersion",
            "massless",
            "--t",
            "1.0",
        ])
        .status()
        .expect("run binary");
    assert_eq!(status.code(), Some(2));

    // Box state under the massless kernel: no grid meets the tail budget.
    let status = binary()
        .args([
            "evolve",
            "--family",
            "box:1.0",
            "--dispersion",
            "massless",
            "--t",
            "1.0",
            "--out",
            "/dev/null",
        ])
        .status()
        .expect("run binary");
    assert_eq!(status.code(), Some(3));
}
