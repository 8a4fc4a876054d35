//! End-to-end tests of the `nesskg` binary: exit codes, output files and
//! reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const JOB: &str = "\
[model]
mass = 1.0

[reservoirs]
beta1 = 1.0
beta2 = 2.0

[profile]
a = 1.0

[spectral]
n = 2
points = 256
shifts = 4
lattice = 5, 7, 5
t_min = 20.0
t_max = 40.0
n_times = 5
seed = 3
";

fn write_job(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("job.ini");
    std::fs::write(&path, text).unwrap();
    path
}

fn nesskg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nesskg")).args(args).env_remove("NESSKG_THREADS").output().unwrap()
}

fn run_job(command: &str, job: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![command, "--config", job.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    nesskg(&args)
}

#[test]
fn unknown_command_prints_usage_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let job = write_job(dir.path(), JOB);
    let out = run_job("teleport", &job, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("usage:") && err.contains("spectral-decay"), "{err}");
}

#[test]
fn missing_model_section_is_a_parse_error_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let job = write_job(dir.path(), &JOB.replace("[model]\nmass = 1.0\n", ""));
    let out = run_job("modewise-kms", &job, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[model]"));
}

#[test]
fn bridge_hotter_than_left_reservoir_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let job = write_job(dir.path(), &JOB.replace("beta2 = 2.0", "beta2 = 2.0\nbeta3 = 0.5"));
    let out = run_job("ness-2pt", &job, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("constraint violation"));
}

#[test]
fn degenerate_fit_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let job = write_job(dir.path(), &format!("{JOB}\n[convergence]\nn_times = 3\n"));
    let out = run_job("convergence-scan", &job, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let job = write_job(dir.path(), JOB);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for command in ["ness-2pt", "spectral-decay"] {
        assert!(run_job(command, &job, &a, &["--threads", "1"]).status.success());
        assert!(run_job(command, &job, &b, &["--threads", "3"]).status.success());
        let file = format!("{command}.csv");
        let (x, y) = (std::fs::read(a.join(&file)).unwrap(), std::fs::read(b.join(&file)).unwrap());
        assert_eq!(x, y, "{command}");
    }
}

#[test]
fn seed_flag_overrides_and_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let job = write_job(dir.path(), JOB);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run_job("spectral-decay", &job, &a, &[]).status.success());
    assert!(run_job("spectral-decay", &job, &b, &["--seed", "99"]).status.success());
    let x = std::fs::read_to_string(a.join("spectral-decay.csv")).unwrap();
    let y = std::fs::read_to_string(b.join("spectral-decay.csv")).unwrap();
    assert!(x.contains("# seed = 3") && y.contains("# seed = 99"));
    assert_ne!(x, y);
}

#[test]
fn monte_carlo_job_without_seed_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let job = write_job(dir.path(), &JOB.replace("seed = 3\n", ""));
    let out = run_job("spectral-decay", &job, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
}

#[test]
fn header_reruns_to_the_same_table() {
    let dir = tempfile::tempdir().unwrap();
    let job = write_job(dir.path(), JOB);
    let first = dir.path().join("first");
    assert!(run_job("ness-observables", &job, &first, &[]).status.success());
    let csv = std::fs::read_to_string(first.join("ness-observables.csv")).unwrap();
    let echoed: String = csv
        .lines()
        .skip_while(|l| !l.starts_with("# --- job configuration"))
        .skip(1)
        .take_while(|l| !l.starts_with("# --- results"))
        .map(|l| format!("{}\n", l.trim_start_matches("# ")))
        .collect();
    let rerun_dir = dir.path().join("rerun");
    std::fs::create_dir_all(&rerun_dir).unwrap();
    let rerun_job = write_job(&rerun_dir, &echoed);
    assert!(run_job("ness-observables", &rerun_job, &rerun_dir, &[]).status.success());
    assert_eq!(std::fs::read_to_string(rerun_dir.join("ness-observables.csv")).unwrap(), csv);
}

#[test]
fn numbers_carry_seventeen_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    let job = write_job(dir.path(), JOB);
    assert!(run_job("ness-observables", &job, dir.path(), &[]).status.success());
    let csv = std::fs::read_to_string(dir.path().join("ness-observables.csv")).unwrap();
    let row = csv.lines().find(|l| l.starts_with("energy-density")).unwrap();
    let mantissa = row.split(',').nth(1).unwrap().split('e').next().unwrap();
    assert_eq!(mantissa.trim_start_matches('-').replace('.', "").len(), 17, "{row}");
}

#[test]
fn reference_preset_calibrates_within_one_percent() {
    let preset = Path::new(env!("CARGO_MANIFEST_DIR")).join("../nesskg/configs/reference_quench.ini");
    let dir = tempfile::tempdir().unwrap();
    assert!(run_job("calibrate", &preset, dir.path(), &[]).status.success());
    let csv = std::fs::read_to_string(dir.path().join("calibrate.csv")).unwrap();
    let worst: f64 = csv.lines().find_map(|l| l.strip_prefix("# max_rel_error = ")).unwrap().parse().unwrap();
    assert!(worst < 0.01, "{worst}");
}

#[test]
fn convergence_scan_slope_is_minus_one() {
    let preset = Path::new(env!("CARGO_MANIFEST_DIR")).join("../nesskg/configs/convergence.ini");
    let dir = tempfile::tempdir().unwrap();
    assert!(run_job("convergence-scan", &preset, dir.path(), &[]).status.success());
    let csv = std::fs::read_to_string(dir.path().join("convergence-scan.csv")).unwrap();
    let slope: f64 = csv.lines().find_map(|l| l.strip_prefix("# fit_exponent = ")).unwrap().parse().unwrap();
    assert!((slope + 1.0).abs() <= 0.15, "{slope}");
}
