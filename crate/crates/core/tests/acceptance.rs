//! Acceptance suite: one test per acceptance criterion, each printing a
//! PASS line with the measured numbers (visible with `--nocapture`).
//!
//! Run with `cargo test -p tfqm --test acceptance`.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use approx::assert_relative_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tfqm::metrology::{
    arrival_time_density, classical_fisher, coherent_variance, default_overlap_step, overlap_qfi,
    scaling_sweep, separable_mode_variance, CoherentSpec, CollectiveGenerator,
};
use tfqm::phasespace::{collective_wigner_shift_check, default_tau_grid, wigner_single, TimeEvolve};
use tfqm::spectra::{
    build_gaussian_pair, build_heisenberg_family, build_separable, gaussian_to_jsa, Jsa2D, Mode,
    ModeStatistics, SignVector, Spectrum1D,
};
use tfqm::UniformGrid;

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

fn state_file(name: &str) -> PathBuf {
    repo_root().join("docs/states").join(name)
}

fn run_cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_tfqm"))
        .args(args)
        .output()
        .expect("CLI binary runs")
}

#[test]
fn criterion_01_shot_noise_baseline() {
    for n in 1..=64usize {
        let state = build_separable(n, 1.0, &vec![0.0; n]).unwrap();
        let v = state.collective_variance(&SignVector::all_plus(n)).unwrap();
        assert!((v - n as f64).abs() <= 1e-12, "n = {n}: variance {v}");
    }
    println!("criterion 01 shot-noise baseline: PASS (variance = n for n = 1..=64)");
}

#[test]
fn criterion_02_heisenberg_saturation() {
    for n in 2..=64usize {
        let ideal = build_heisenberg_family(n, 1.0, 0.0, &vec![0.0; n]).unwrap();
        let v = ideal.collective_variance(&SignVector::all_plus(n)).unwrap();
        let cap = (n * n) as f64;
        assert_relative_eq!(v, cap, epsilon = 1e-12, max_relative = 1e-12);

        // The cap is never exceeded at any admissible transverse width.
        let bound = (n as f64 / (n as f64 - 1.0)).sqrt();
        for frac in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let sigma = frac * bound;
            let s = build_heisenberg_family(n, 1.0, sigma, &vec![0.0; n]).unwrap();
            let vs = s.collective_variance(&SignVector::all_plus(n)).unwrap();
            assert!(vs <= cap + 1e-9, "n = {n}, sigma = {sigma}: {vs} > {cap}");
        }
    }
    println!("criterion 02 heisenberg saturation: PASS (variance = n² at sigma = 0, never above)");
}

#[test]
fn criterion_03_finite_width_formula() {
    // Closed form n²(Δω²−σ²)+nσ² against the covariance construction —
    // two independent code paths.
    for n in 2..=32usize {
        for sigma in [0.0, 0.1, 0.5, 1.0] {
            let state = build_heisenberg_family(n, 1.0, sigma, &vec![0.0; n]).unwrap();
            let constructed = state.collective_variance(&SignVector::all_plus(n)).unwrap();
            let nf = n as f64;
            let closed = nf * nf * (1.0 - sigma * sigma) + nf * sigma * sigma;
            assert_relative_eq!(constructed, closed, epsilon = 1e-12, max_relative = 1e-12);
        }
    }
    println!("criterion 03 finite-width formula: PASS (n ∈ 2..=32, sigma ∈ {{0, 0.1, 0.5, 1}})");
}

#[test]
fn criterion_04_transition_reproduction() {
    let mut n_list: Vec<u64> = vec![2, 3, 4, 5, 8, 16, 32, 64, 99, 128, 256, 512];
    let mut n = 1024u64;
    while n < 10000 {
        n_list.push(n);
        n *= 2;
    }
    n_list.extend([9000, 10000]);
    n_list.sort_unstable();
    n_list.dedup();

    let start = Instant::now();
    let report = scaling_sweep(0.99, 1.0, &n_list).unwrap();
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "sweep took {elapsed:?}");

    assert_relative_eq!(report.transition_n, 99.0, max_relative = 1e-9);
    let slope_at = |n: u64| {
        report
            .points
            .iter()
            .find(|p| p.n == n)
            .unwrap()
            .local_slope
    };
    let s4 = slope_at(4);
    let s1e4 = slope_at(10000);
    assert!(s4 >= 1.85, "slope at n=4 is {s4}");
    assert!(s1e4 <= 1.1, "slope at n=10000 is {s1e4}");
    println!(
        "criterion 04 transition reproduction: PASS (transition_n = {}, slope(4) = {s4:.4}, slope(1e4) = {s1e4:.4}, {elapsed:?})",
        report.transition_n
    );
}

#[test]
fn criterion_05_method_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7f9a_2025);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let mean1: f64 = rng.gen_range(-1.0..1.0);
        let mean2: f64 = rng.gen_range(-1.0..1.0);
        let dw: f64 = rng.gen_range(0.6..1.6);
        let rho: f64 = rng.gen_range(-0.85..0.85);
        let g1 = UniformGrid::centered(mean1, 6.5 * dw, 321).unwrap();
        let g2 = UniformGrid::centered(mean2, 6.5 * dw, 321).unwrap();
        let j = build_gaussian_pair(mean1, mean2, dw, rho, g1, g2).unwrap();
        let alphas = SignVector::all_plus(2);
        let v = j.collective_variance(&alphas).unwrap();
        let dtheta = 0.01 / v.sqrt();
        let f = overlap_qfi(&j, &alphas, dtheta).unwrap();
        let rel = (f - 4.0 * v).abs() / (4.0 * v);
        worst = worst.max(rel);
        assert!(rel <= 1e-4, "relative error {rel} for rho = {rho}");
    }
    println!("criterion 05 method agreement: PASS (20 seeded pairs, worst relative error {worst:.2e})");
}

#[test]
fn criterion_06_coherent_state_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6a5d_1905);
    let grid = UniformGrid::new(-24.0, 24.0, 1201).unwrap();
    for _ in 0..10 {
        // Random two-component spectra exercise non-Gaussian shapes.
        let m1: f64 = rng.gen_range(-3.0..3.0);
        let m2: f64 = rng.gen_range(-3.0..3.0);
        let d1: f64 = rng.gen_range(0.5..1.5);
        let d2: f64 = rng.gen_range(0.5..1.5);
        let w: f64 = rng.gen_range(0.2..0.8);
        let amps: Vec<_> = grid
            .points()
            .map(|x| {
                let a = (-(x - m1) * (x - m1) / (4.0 * d1 * d1)).exp();
                let b = (-(x - m2) * (x - m2) / (4.0 * d2 * d2)).exp();
                num_complex::Complex64::new(w * a + (1.0 - w) * b, 0.0)
            })
            .collect();
        let s = Spectrum1D::new(grid, amps).unwrap().normalize().unwrap();
        let beta = num_complex::Complex64::new(rng.gen_range(0.5..2.5), rng.gen_range(-1.0..1.0));

        let c = CoherentSpec::new(beta, s.clone()).unwrap();
        let direct = coherent_variance(&c).unwrap();
        let stats = ModeStatistics::coherent(beta, s.moments().unwrap());
        let via_modes = separable_mode_variance(&[stats], &SignVector::all_plus(1)).unwrap();
        assert_relative_eq!(direct, via_modes, max_relative = 1e-9);
    }

    // A coherent state with |β|²·mean-square = nΔω² is the same resource
    // as n independent photons.
    let (n, dw) = (4usize, 1.3);
    let s = Spectrum1D::gaussian(UniformGrid::centered(2.0, 9.0 * dw, 801).unwrap(), 2.0, dw).unwrap();
    let ms = s.moments().unwrap().mean_square;
    let beta = num_complex::Complex64::new((n as f64 * dw * dw / ms).sqrt(), 0.0);
    let coherent = coherent_variance(&CoherentSpec::new(beta, s).unwrap()).unwrap();
    let photons = build_separable(n, dw, &vec![0.0; n])
        .unwrap()
        .collective_variance(&SignVector::all_plus(n))
        .unwrap();
    assert_relative_eq!(coherent, photons, max_relative = 1e-12);
    println!("criterion 06 coherent-state identity: PASS (10 seeded spectra, resource equivalence at n = {n})");
}

#[test]
fn criterion_07_wigner_contract() {
    // Normalization and both marginals for Gaussian spectra.
    for (mean, dw) in [(0.0, 1.0), (2.5, 0.6), (-1.0, 1.8)] {
        let fgrid = UniformGrid::centered(mean, 8.0 * dw, 257).unwrap();
        let s = Spectrum1D::gaussian(fgrid, mean, dw).unwrap();
        let tau = default_tau_grid(s.grid(), 5.0 / (2.0 * dw) + 1.0, 161).unwrap();
        let map = wigner_single(&s, tau).unwrap();
        assert!((map.integrate() - 1.0).abs() <= 1e-6);
        for (a, b) in map.frequency_marginal().values().iter().zip(s.density().values()) {
            assert!((a - b).abs() <= 1e-6);
        }
        let tm = map.time_marginal();
        assert!((tm.integrate() - 1.0).abs() <= 1e-6);
        assert_relative_eq!(tm.variance(), 1.0 / (4.0 * dw * dw), max_relative = 1e-3);
    }

    // Translation covariance: the evolved map equals the original sampled
    // on a shifted time grid, within 1e-5 on interior points.
    let fgrid = UniformGrid::centered(0.0, 8.0, 257).unwrap();
    let s = Spectrum1D::gaussian(fgrid, 0.0, 1.0).unwrap();
    let dt = 0.31;
    let tau = UniformGrid::centered(0.0, 2.5, 129).unwrap();
    let tau_shifted = UniformGrid::new(tau.min() - dt, tau.max() - dt, 129).unwrap();
    let evolved = s.evolve(&SignVector::all_plus(1), dt).unwrap();
    let w_evolved = wigner_single(&evolved, tau).unwrap();
    let w_reference = wigner_single(&s, tau_shifted).unwrap();
    let mut max_err = 0.0f64;
    for i in 1..fgrid.len() - 1 {
        for j in 1..tau.len() - 1 {
            max_err = max_err.max((w_evolved.values()[(i, j)] - w_reference.values()[(i, j)]).abs());
        }
    }
    assert!(max_err <= 1e-5, "translation error {max_err}");

    // Collective/marginal shift ratio for the correlated pair.
    let dw = 1.0;
    let state = build_heisenberg_family(2, dw, 0.05 * dw, &[0.0, 0.0]).unwrap();
    let gr = UniformGrid::centered(0.0, 6.5, 769).unwrap();
    let j = gaussian_to_jsa(&state, gr, gr).unwrap();
    let shift = collective_wigner_shift_check(&j, &SignVector::all_plus(2), 0.1 / dw).unwrap();
    let ratio = shift.report.ratio.unwrap();
    assert!((1.9..=2.1).contains(&ratio), "ratio {ratio}");
    println!(
        "criterion 07 wigner contract: PASS (translation error {max_err:.2e}, shift ratio {ratio:.4})"
    );
}

#[test]
fn criterion_08_entanglement_not_sufficient() {
    // A state that is entangled (Schmidt entropy > 0.5 bits) yet has the
    // independent-photon collective variance 2Δω², emitted end-to-end by
    // the CLI.
    let state = state_file("entangled_shotnoise.json");
    let state_arg = state.to_str().unwrap();

    let schmidt_out = run_cli(&["schmidt", "--state", state_arg]);
    assert!(schmidt_out.status.success());
    let schmidt_json: serde_json::Value =
        serde_json::from_slice(&schmidt_out.stdout).expect("valid JSON");
    let entropy = schmidt_json["entropy_bits"].as_f64().unwrap();
    assert!(entropy > 0.5, "entropy {entropy} bits");

    let qfi_out = run_cli(&["qfi", "--state", state_arg]);
    assert!(qfi_out.status.success());
    let qfi_json: serde_json::Value = serde_json::from_slice(&qfi_out.stdout).expect("valid JSON");
    let variance = qfi_json["reports"][0]["variance_omega"].as_f64().unwrap();
    assert!((variance - 2.0).abs() <= 1e-3, "variance {variance}");
    println!(
        "criterion 08 entanglement-not-sufficient: PASS (entropy {entropy:.4} bits, variance {variance})"
    );
}

#[test]
fn criterion_09_classical_information_bounded_by_quantum() {
    let gr = UniformGrid::centered(0.0, 8.0, 385).unwrap();
    let gr_wide = UniformGrid::centered(0.0, 12.0, 513).unwrap();
    let states: Vec<(&str, Jsa2D)> = vec![
        ("separable", build_gaussian_pair(0.0, 0.0, 1.0, 0.0, gr, gr).unwrap()),
        ("rho=0.5", build_gaussian_pair(0.0, 0.0, 1.0, 0.5, gr, gr).unwrap()),
        ("rho=0.9", build_gaussian_pair(0.0, 0.0, 1.0, 0.9, gr, gr).unwrap()),
        (
            "correlated sigma=0.3",
            gaussian_to_jsa(
                &build_heisenberg_family(2, 1.0, 0.3, &[0.0, 0.0]).unwrap(),
                gr,
                gr,
            )
            .unwrap(),
        ),
        (
            "entangled shot-noise",
            build_gaussian_pair(0.0, 0.0, 3.0f64.sqrt(), -2.0 / 3.0, gr_wide, gr_wide).unwrap(),
        ),
    ];

    let alphas = SignVector::all_plus(2);
    for (name, j) in &states {
        let cov = j.covariance_from_grid().unwrap();
        let det = cov[(0, 0)] * cov[(1, 1)] - cov[(0, 1)] * cov[(0, 1)];
        let sigma_t = (cov[(1, 1)] / det / 4.0).sqrt();
        let taxis = UniformGrid::centered(0.0, 8.0 * sigma_t, 385).unwrap();
        let dt = 1e-3;
        let density =
            |theta: f64| arrival_time_density(j, &alphas, theta, Mode::One, taxis).unwrap();
        let fi = classical_fisher(&density(-dt), &density(0.0), &density(dt), dt).unwrap();
        let qfi = overlap_qfi(j, &alphas, default_overlap_step(j, &alphas).unwrap()).unwrap();
        assert!(
            fi <= qfi * (1.0 + 1e-3),
            "{name}: FI {fi} exceeds QFI {qfi}"
        );
        assert!(fi > 0.0, "{name}: FI vanished");
    }
    println!("criterion 09 FI ≤ QFI: PASS (time-of-flight measurement on 5 states)");
}

#[test]
fn criterion_10_cli_golden_files() {
    let golden_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let regen = std::env::var_os("TFQM_REGEN_GOLDEN").is_some();
    let work = tempfile::tempdir().unwrap();
    let out = |name: &str| work.path().join(name).to_str().unwrap().to_string();

    type Job = (Vec<String>, Vec<(String, &'static str)>);
    let jobs: Vec<Job> = vec![
        (
            vec![
                "jsi".into(),
                "--state".into(),
                state_file("separable.json").to_str().unwrap().into(),
                "--out".into(),
                out("jsi_separable"),
            ],
            vec![
                (out("jsi_separable.csv"), "jsi_separable.csv"),
                (out("jsi_separable.pgm"), "jsi_separable.pgm"),
            ],
        ),
        (
            vec![
                "qfi".into(),
                "--state".into(),
                state_file("heisenberg_eta.json").to_str().unwrap().into(),
                "--method".into(),
                "both".into(),
                "--out".into(),
                out("qfi_heisenberg_eta.json"),
            ],
            vec![(out("qfi_heisenberg_eta.json"), "qfi_heisenberg_eta.json")],
        ),
        (
            vec![
                "sweep".into(),
                "--eta".into(),
                "0.99".into(),
                "--n-min".into(),
                "2".into(),
                "--n-max".into(),
                "1024".into(),
                "--points".into(),
                "12".into(),
                "--out".into(),
                out("sweep_eta099.csv"),
            ],
            vec![(out("sweep_eta099.csv"), "sweep_eta099.csv")],
        ),
        (
            vec![
                "schmidt".into(),
                "--state".into(),
                state_file("entangled_shotnoise.json").to_str().unwrap().into(),
                "--out".into(),
                out("schmidt_entangled.json"),
            ],
            vec![(out("schmidt_entangled.json"), "schmidt_entangled.json")],
        ),
        (
            vec![
                "wigner".into(),
                "--state".into(),
                state_file("separable_photon.json").to_str().unwrap().into(),
                "--delta-t".into(),
                "0.3".into(),
                "--out".into(),
                out("wigner_photon"),
            ],
            vec![
                (out("wigner_photon_before.csv"), "wigner_photon_before.csv"),
                (out("wigner_photon_after.csv"), "wigner_photon_after.csv"),
                (out("wigner_photon_before.pgm"), "wigner_photon_before.pgm"),
                (out("wigner_photon_after.pgm"), "wigner_photon_after.pgm"),
                (out("wigner_photon_shift.json"), "wigner_photon_shift.json"),
            ],
        ),
    ];

    for (args, outputs) in &jobs {
        let argv: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
        let result = run_cli(&argv);
        assert!(
            result.status.success(),
            "command {args:?} failed: {}",
            String::from_utf8_lossy(&result.stderr)
        );
        for (produced, golden_name) in outputs {
            let bytes = std::fs::read(produced).expect("output exists");
            let golden_path = golden_dir.join(golden_name);
            if regen {
                std::fs::create_dir_all(&golden_dir).unwrap();
                std::fs::write(&golden_path, &bytes).unwrap();
            } else {
                let golden = std::fs::read(&golden_path)
                    .unwrap_or_else(|_| panic!("missing golden {golden_name}; run with TFQM_REGEN_GOLDEN=1"));
                assert!(
                    bytes == golden,
                    "{golden_name} differs from committed golden"
                );
            }
        }
    }

    // Every committed negative example is rejected with its documented
    // error class and exit code 1.
    let negatives = [
        ("syntax.json", "SyntaxError"),
        ("unknown_key.json", "SchemaError"),
        ("missing_required.json", "SchemaError"),
        ("sigma_and_eta.json", "SchemaError"),
        ("schema_version.json", "SchemaError"),
        ("eta_out_of_range.json", "RangeError"),
        ("rho_out_of_range.json", "RangeError"),
        ("nonpsd_cov.json", "BuilderError"),
    ];
    for (name, class) in negatives {
        let path = repo_root().join("docs/states/invalid").join(name);
        let result = run_cli(&["qfi", "--state", path.to_str().unwrap()]);
        assert_eq!(result.status.code(), Some(1), "{name} should exit 1");
        let stderr = String::from_utf8_lossy(&result.stderr);
        assert!(
            stderr.contains(&format!("[{class}]")),
            "{name}: expected class {class}, got: {stderr}"
        );
    }
    println!("criterion 10 CLI golden files: PASS (5 commands byte-identical, 8 negatives rejected)");
}
