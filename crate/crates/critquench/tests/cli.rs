use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn critquench(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_critquench"));
    cmd.args(args).env_remove("CRITQUENCH_OUTPUT_DIR");
    cmd
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let out = critquench(args).arg("-o").arg(dir).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn quench_writes_probabilities_and_summary() {
    let dir = TempDir::new().unwrap();
    run_in(dir.path(), &["quench", "--n", "200", "--tauq", "20", "--dump-modes"]);
    let rows = csv_rows(&dir.path().join("quench.csv"));
    assert_eq!(rows.len(), 100);
    assert!(rows.iter().all(|r| (r[1] + r[2] - 1.0).abs() < 1e-12));
    assert_eq!(csv_rows(&dir.path().join("modes.csv")).len(), 100);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("quench.json")).unwrap()).unwrap();
    let p = summary["p_gs"].as_f64().unwrap();
    let log_p: f64 = rows.iter().map(|r| r[2].ln()).sum();
    assert!((p.ln() - log_p).abs() < 1e-9);
}

#[test]
fn approximate_quench_has_the_same_layout() {
    let dir = TempDir::new().unwrap();
    run_in(dir.path(), &["quench", "--n", "200", "--tauq", "500"]);
    let exact = csv_rows(&dir.path().join("quench.csv"));
    run_in(dir.path(), &["quench", "--approx", "--n", "200", "--tauq", "500"]);
    let approx = csv_rows(&dir.path().join("quench.csv"));
    assert_eq!(approx.len(), 100);
    for (a, e) in approx.iter().zip(&exact) {
        assert_eq!(a[0], e[0]);
        assert!((a[1] - e[1]).abs() < 0.02, "k={}: {} vs {}", a[0], a[1], e[1]);
    }
}

#[test]
fn evolve_writes_series_and_peaks() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["evolve", "--n", "200", "--tauq", "10", "--tmax", "300", "--obs", "sz,echo", "--power-one-over-n"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("peaks"));
    let echo = fs::read_to_string(dir.path().join("LoschmidtEcho.csv")).unwrap();
    assert!(echo.lines().any(|l| l.starts_with("t,") && l.ends_with("power_one_over_n")));
    let sz = csv_rows(&dir.path().join("Sz.csv"));
    assert_eq!(sz.first().unwrap()[0], 0.0);
    assert!(dir.path().join("Sz_peaks.csv").exists());
}

#[test]
fn linearized_dispersion_is_periodic_in_output() {
    let dir = TempDir::new().unwrap();
    run_in(dir.path(), &["evolve", "--n", "100", "--tauq", "10", "--tmax", "100", "--dt", "0.5", "--obs", "sz", "--linearized-dispersion"]);
    let rows = csv_rows(&dir.path().join("Sz.csv"));
    // Period N/2 = 50 is 100 samples.
    for i in 0..100 {
        assert!((rows[i][1] - rows[i + 100][1]).abs() < 1e-10);
    }
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let args = ["evolve", "--n", "400", "--tauq", "20", "--tmax", "250", "--obs", "sz,echo"];
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    run_in(a.path(), &[&args[..], &["--threads", "1"]].concat());
    run_in(b.path(), &[&args[..], &["--threads", "4"]].concat());
    for name in ["Sz.csv", "LoschmidtEcho.csv", "Sz_peaks.csv", "LoschmidtEcho_peaks.csv"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }

    let scan = ["scan", "--vary", "tauq", "--n", "400", "--taus", "5,10,20", "--obs", "pgs"];
    run_in(a.path(), &[&scan[..], &["--threads", "1"]].concat());
    run_in(b.path(), &[&scan[..], &["--threads", "3"]].concat());
    for name in ["scan_tauq.csv", "fit_tauq_pgs.json"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn scan_table_has_the_documented_columns() {
    let dir = TempDir::new().unwrap();
    run_in(dir.path(), &["scan", "--vary", "n", "--tauq", "10", "--sizes", "200,300,400", "--obs", "pgs"]);
    let table = fs::read_to_string(dir.path().join("scan_n.csv")).unwrap();
    assert_eq!(table.lines().next().unwrap(), "tau_Q,N,p_gs,sz0_minus_2pi,A,W,Wtilde");
    assert_eq!(table.lines().count(), 4);
    let fit: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("fit_n_pgs.json")).unwrap()).unwrap();
    // −ln p_GS is extensive.
    assert!((fit["slope"].as_f64().unwrap() - 1.0).abs() < 0.01);
    assert_eq!(fit["n_points"], 3);
}

#[test]
fn oracle_passes_and_writes_reports() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["oracle", "--n", "6", "--tauq", "10"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
    for name in ["Sz_ed.csv", "LoschmidtEcho_ed.csv", "oracle.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}

#[test]
fn oracle_rejects_large_rings() {
    let dir = TempDir::new().unwrap();
    let out = critquench(&["oracle", "--n", "12"]).arg("-o").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("capped at N = 10"));
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["quench", "--n", "7"][..],
        &["quench", "--tauq", "-1"],
        &["quench", "--gstart", "0.5"],
        &["evolve", "--dt", "0"],
        &["quench", "--threads", "0"],
    ] {
        let out = critquench(args).arg("-o").arg(dir.path()).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn integration_failure_exits_with_three() {
    let dir = TempDir::new().unwrap();
    let out = critquench(&["quench", "--n", "4", "--tauq", "1", "--tol", "1e-300"]).arg("-o").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("integration failed"));
}

#[test]
fn output_directory_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("from-env");
    let status = critquench(&["quench", "--n", "40", "--tauq", "5"])
        .env("CRITQUENCH_OUTPUT_DIR", &target)
        .current_dir(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(target.join("quench.csv").exists());

    // The flag still wins over the environment.
    let flagged = dir.path().join("from-flag");
    let status = critquench(&["quench", "--n", "40", "--tauq", "5", "-o"])
        .arg(&flagged)
        .env("CRITQUENCH_OUTPUT_DIR", &target)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(flagged.join("quench.csv").exists());
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, format!(r#"{{"N": 60, "tau_Q": 8, "output": {:?}}}"#, out)).unwrap();
    let status = critquench(&["quench", "--config"]).arg(&cfg).status().unwrap();
    assert!(status.success());
    assert_eq!(csv_rows(&out.join("quench.csv")).len(), 30);

    let status = critquench(&["quench", "--n", "80", "--config"]).arg(&cfg).status().unwrap();
    assert!(status.success());
    assert_eq!(csv_rows(&out.join("quench.csv")).len(), 40);

    fs::write(&cfg, r#"{"spins": 60}"#).unwrap();
    let out = critquench(&["quench", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
