//! CLI contract tests beyond the golden-file comparisons: determinism,
//! exit codes, alternate output formats, and the thread-cap variable.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

fn state_file(name: &str) -> String {
    repo_root()
        .join("docs/states")
        .join(name)
        .to_str()
        .unwrap()
        .to_string()
}

fn run_cli_env(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tfqm"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("CLI binary runs")
}

fn run_cli(args: &[&str]) -> Output {
    run_cli_env(args, &[])
}

#[test]
fn identical_inputs_produce_byte_identical_outputs() {
    let work = tempfile::tempdir().unwrap();
    let state = state_file("gaussian_pair.json");
    let out1 = work.path().join("a");
    let out2 = work.path().join("b");
    for out in [&out1, &out2] {
        let r = run_cli(&["jsi", "--state", &state, "--out", out.to_str().unwrap()]);
        assert!(r.status.success());
    }
    for ext in ["csv", "pgm"] {
        let a = std::fs::read(out1.with_extension(ext)).unwrap();
        let b = std::fs::read(out2.with_extension(ext)).unwrap();
        assert!(a == b, "second run differed for .{ext}");
    }
}

#[test]
fn thread_cap_does_not_change_output() {
    let work = tempfile::tempdir().unwrap();
    let state = state_file("separable_photon.json");
    let free = work.path().join("free");
    let capped = work.path().join("capped");
    let r = run_cli(&["wigner", "--state", &state, "--out", free.to_str().unwrap()]);
    assert!(r.status.success());
    let r = run_cli_env(
        &["wigner", "--state", &state, "--out", capped.to_str().unwrap()],
        &[("TFQM_THREADS", "1")],
    );
    assert!(r.status.success());
    for suffix in ["_before.csv", "_after.csv", "_shift.json"] {
        let a = std::fs::read(format!("{}{suffix}", free.display())).unwrap();
        let b = std::fs::read(format!("{}{suffix}", capped.display())).unwrap();
        assert!(a == b, "thread cap changed {suffix}");
    }
}

#[test]
fn empty_output_path_is_a_usage_error() {
    let r = run_cli(&["jsi", "--state", &state_file("separable.json"), "--out", ""]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let r = run_cli(&["transmogrify"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn invalid_thread_cap_is_a_usage_error() {
    let r = run_cli_env(
        &["qfi", "--state", &state_file("separable.json")],
        &[("TFQM_THREADS", "many")],
    );
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn missing_state_file_is_a_domain_error() {
    let r = run_cli(&["qfi", "--state", "/nonexistent/state.json"]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn qfi_csv_format_has_documented_columns() {
    let r = run_cli(&[
        "qfi",
        "--state",
        &state_file("explicit_cov.json"),
        "--format",
        "csv",
    ]);
    assert!(r.status.success());
    let text = String::from_utf8(r.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "method,variance_omega,qfi,crb,nu");
    let row = lines.next().unwrap();
    assert!(row.starts_with("analytic-gaussian,"), "row: {row}");
    // α = (+1, −1) on cov [[2, −1], [−1, 2]] gives variance 6.
    assert!(row.contains("6.0000000000000000e0"), "row: {row}");
}

#[test]
fn qfi_bounds_match_closed_forms() {
    // Two independent photons: crb = 1/(2√2).
    let r = run_cli(&["qfi", "--state", &state_file("separable.json")]);
    assert!(r.status.success());
    let json: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    let crb = json["reports"][0]["crb"].as_f64().unwrap();
    assert!((crb - 1.0 / (2.0 * 2.0f64.sqrt())).abs() < 1e-15);

    // Fully correlated pair (σ = 0): variance 4, crb = 1/(2·n·Δω) = 1/4.
    let work = tempfile::tempdir().unwrap();
    let path = work.path().join("ideal.json");
    std::fs::write(
        &path,
        r#"{"schema":1,"family":"heisenberg","n":2,"delta_omega":1.0,"sigma":0.0}"#,
    )
    .unwrap();
    let r = run_cli(&["qfi", "--state", path.to_str().unwrap()]);
    assert!(r.status.success());
    let json: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(json["reports"][0]["crb"].as_f64().unwrap(), 0.25);
    assert_eq!(json["reports"][0]["method"], "analytic-gaussian");
}

#[test]
fn zero_delay_wigner_produces_identical_maps_and_null_ratio() {
    let work = tempfile::tempdir().unwrap();
    let out = work.path().join("w0");
    let r = run_cli(&[
        "wigner",
        "--state",
        &state_file("gaussian_pair.json"),
        "--delta-t",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let before = std::fs::read(format!("{}_before.csv", out.display())).unwrap();
    let after = std::fs::read(format!("{}_after.csv", out.display())).unwrap();
    assert!(before == after);
    let json: serde_json::Value = serde_json::from_slice(
        &std::fs::read(format!("{}_shift.json", out.display())).unwrap(),
    )
    .unwrap();
    assert!(json["ratio"].is_null());
}

#[test]
fn qfi_nu_scales_the_bound() {
    let state = state_file("heisenberg_eta.json");
    let parse = |out: Output| -> serde_json::Value {
        serde_json::from_slice(&out.stdout).expect("valid JSON")
    };
    let one = parse(run_cli(&["qfi", "--state", &state, "--nu", "1"]));
    let four = parse(run_cli(&["qfi", "--state", &state, "--nu", "4"]));
    let crb1 = one["reports"][0]["crb"].as_f64().unwrap();
    let crb4 = four["reports"][0]["crb"].as_f64().unwrap();
    assert!((crb4 - crb1 / 2.0).abs() < 1e-15);
}

#[test]
fn sweep_json_reports_infinite_transition_as_string() {
    let work = tempfile::tempdir().unwrap();
    let out = work.path().join("sweep.json");
    let r = run_cli(&[
        "sweep",
        "--eta",
        "1.0",
        "--n-min",
        "1",
        "--n-max",
        "64",
        "--points",
        "7",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success());
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&out).unwrap()).expect("valid JSON");
    assert_eq!(json["transition_n"], serde_json::json!("inf"));
    let pts = json["points"].as_array().unwrap();
    let last = pts.last().unwrap();
    assert_eq!(last["n"].as_u64(), Some(64));
    assert!((last["variance"].as_f64().unwrap() - 4096.0).abs() < 1e-9);
}

#[test]
fn sweep_csv_footer_reports_inf_for_ideal_correlation() {
    let work = tempfile::tempdir().unwrap();
    let out = work.path().join("sweep.csv");
    let r = run_cli(&[
        "sweep",
        "--eta",
        "1.0",
        "--n-min",
        "2",
        "--n-max",
        "16",
        "--points",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# transition_n = inf"), "{text}");
}

#[test]
fn invalid_eta_exits_with_domain_error() {
    let work = tempfile::tempdir().unwrap();
    let out = work.path().join("sweep.csv");
    let r = run_cli(&[
        "sweep",
        "--eta",
        "1.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&r.stderr);
    assert!(stderr.contains("eta"), "stderr: {stderr}");
}

#[test]
fn pair_wigner_reports_doubled_collective_shift() {
    let work = tempfile::tempdir().unwrap();
    let out = work.path().join("wig");
    let r = run_cli(&[
        "wigner",
        "--state",
        &state_file("heisenberg_sigma.json"),
        "--delta-t",
        "0.1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let json: serde_json::Value = serde_json::from_slice(
        &std::fs::read(format!("{}_shift.json", out.display())).unwrap(),
    )
    .unwrap();
    let ratio = json["ratio"].as_f64().unwrap();
    assert!((1.8..=2.2).contains(&ratio), "ratio {ratio}");
    for m in json["marginal_shifts"].as_array().unwrap() {
        assert!((m.as_f64().unwrap() - 0.1).abs() < 0.01);
    }
}

#[test]
fn schmidt_csv_format_lists_coefficients() {
    let r = run_cli(&[
        "schmidt",
        "--state",
        &state_file("gaussian_pair.json"),
        "--format",
        "csv",
    ]);
    assert!(r.status.success());
    let text = String::from_utf8(r.stdout).unwrap();
    assert!(text.starts_with("k,coefficient\n0,"));
    assert!(text.contains("# entropy_bits = "));
    assert!(text.contains("# schmidt_number = "));
}

#[test]
fn jsi_rejects_states_without_two_photons() {
    let r = run_cli(&[
        "jsi",
        "--state",
        &state_file("coherent.json"),
        "--out",
        "/tmp/unused_jsi_out",
    ]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn shipped_example_states_all_parse_and_realize() {
    let dir = repo_root().join("docs/states");
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let spec = tfqm::statedef::parse(&text)
            .unwrap_or_else(|e| panic!("{} failed to parse: {e}", path.display()));
        tfqm::statedef::realize(&spec)
            .unwrap_or_else(|e| panic!("{} failed to realize: {e}", path.display()));
    }
}
