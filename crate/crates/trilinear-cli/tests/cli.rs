//! End-to-end checks of the command-line surface: exit codes, output
//! determinism, and artifact hygiene.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_trilinear"))
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("trilinear-cli-test-{}-{tag}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

const SMALL_RUN: &str = "\
scheme = case2
drive.g_over_2pi_khz = 3.0
drive.omega_over_2pi_khz = 60.0
drive.lambda_over_2pi_khz = 0.4
time.t_final_ms = 12.5
time.n_samples = 65
state.spin = down
state.motional = binomial 1
cutoff.n_b = 6
cutoff.n_r = 6
output = spin
";

#[test]
fn run_is_deterministic_and_writes_expected_files() {
    let dir = scratch("run");
    let conf = dir.join("small.conf");
    fs::write(&conf, SMALL_RUN).unwrap();

    let mut outputs = Vec::new();
    for attempt in 0..2 {
        let out = dir.join(format!("out{attempt}"));
        let status = bin()
            .args(["run", "--config"])
            .arg(&conf)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        let csv = fs::read_to_string(out.join("small_spin.csv")).unwrap();
        assert!(csv.starts_with("t_ms,p_down,p_up,analytic_p_down,analytic_p_up\n"));
        assert_eq!(csv.lines().count(), 66);
        assert!(out.join("small_summary.txt").exists());
        outputs.push(csv);
    }
    assert_eq!(
        outputs[0], outputs[1],
        "repeated runs must be byte-identical"
    );
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn malformed_config_exits_2_without_partial_output() {
    let dir = scratch("malformed");
    let conf = dir.join("bad.conf");
    fs::write(&conf, "scheme = case9\n").unwrap();
    let out = dir.join("out");
    let status = bin()
        .args(["run", "--config"])
        .arg(&conf)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    assert!(!out.exists(), "no partial output directory may be created");
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn truncation_breach_exits_3() {
    let dir = scratch("breach");
    let conf = dir.join("breach.conf");
    // a strong near-resonant drive on a tiny ladder: the guard must abort
    fs::write(
        &conf,
        "\
scheme = case2
drive.g_over_2pi_khz = 20.0
drive.omega_over_2pi_khz = 40.0
drive.lambda_over_2pi_khz = 0.0
time.t_final_ms = 2.0
time.n_samples = 9
state.spin = down
state.motional = fock 0 0
cutoff.n_b = 4
cutoff.n_r = 4
output = fock_r
",
    )
    .unwrap();
    let out = dir.join("out");
    let output = bin()
        .args(["run", "--config"])
        .arg(&conf)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("truncation breach"), "stderr: {stderr}");
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn unknown_figure_exits_2() {
    let dir = scratch("figure");
    let status = bin()
        .args(["reproduce", "fig9", "--out"])
        .arg(dir.join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn modes_report_prints_coupling_and_writes_csv() {
    let dir = scratch("modes");
    let conf = dir.join("trap.conf");
    fs::write(
        &conf,
        "\
trap.ion_mass_kg = 6.642e-26
trap.omega_x_over_2pi_khz = 1317.978
trap.omega_y_over_2pi_khz = 3000
trap.omega_z_over_2pi_khz = 1000
resonance.omega_over_2pi_khz = 15.0
",
    )
    .unwrap();
    let output = bin()
        .args(["modes", "--config"])
        .arg(&conf)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("trilinear coupling lambda/2pi = 1.866"));
    assert!(stdout.contains("required omega_x/2pi = 1317.97"));
    let csv = fs::read_to_string(dir.join("modes.csv")).unwrap();
    assert!(csv.starts_with("axis_index,mode,gamma,freq_over_2pi_khz\n"));
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn sweep_handles_empty_and_bad_points() {
    let dir = scratch("sweep");
    let conf = dir.join("sweep.conf");
    fs::write(
        &conf,
        "\
scheme = case2
drive.g_over_2pi_khz = 3.5
drive.omega_over_2pi_khz = 45.0
drive.lambda_over_2pi_khz = 0.15
time.t_final_ms = 10.0
time.n_samples = 17
state.spin = plus
state.motional = fock 1 0
cutoff.n_b = 6
cutoff.n_r = 6
output = cfi
estimation.source = analytic
",
    )
    .unwrap();
    let out = dir.join("out");
    // header-only for an empty value list
    let status = bin()
        .args(["sweep", "--config"])
        .arg(&conf)
        .args(["--axis", "drive.lambda_over_2pi_khz", "--values", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(out.join("sweep_sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);

    // three points, concurrent, deterministic order
    let status = bin()
        .args(["sweep", "--config"])
        .arg(&conf)
        .args([
            "--axis",
            "drive.lambda_over_2pi_khz",
            "--values",
            "0.1,0.2,0.3",
            "--jobs",
            "3",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(out.join("sweep_sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("1.00000000000e-1,"));
    assert!(lines[3].starts_with("3.00000000000e-1,"));
    let _ = fs::remove_dir_all(&dir);
}
