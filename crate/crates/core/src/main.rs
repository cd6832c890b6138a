//! Command-line front end: build states from definition files, run the
//! metrology and phase-space computations, and emit CSV/JSON data plus
//! portable graymap heatmaps.
//!
//! Exit codes: 0 success, 1 domain/computation error, 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tfqm::metrology::{
    coherent_variance, default_overlap_step, fit_scaling_exponent, overlap_qfi, scaling_sweep,
    CollectiveGenerator, Method, QfiReport, ScalingReport,
};
use tfqm::output;
use tfqm::phasespace::{
    collective_wigner_shift_check, default_tau_grid, schmidt, wigner_single, TimeEvolve, WignerMap,
};
use tfqm::spectra::{gaussian_to_spectrum, Jsa2D, Mode, SignVector, Spectrum1D};
use tfqm::statedef::{self, RealizedState, StateSpec};

#[derive(Parser)]
#[command(
    name = "tfqm",
    version,
    about = "Time-frequency quantum metrology toolkit",
    long_about = "Builds spectral quantum states from JSON definition files and computes \
                  precision limits for time-delay estimation: joint spectral intensities, \
                  quantum Fisher information and Cramér-Rao bounds, collective-variance \
                  scaling sweeps, chronocyclic Wigner maps, and Schmidt decompositions.\n\n\
                  The environment variable TFQM_THREADS caps internal parallelism."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    /// Generator variance (analytic covariance or grid quadrature)
    Variance,
    /// Finite-difference state overlap
    Overlap,
    /// Both, with their relative discrepancy
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn non_empty_path(s: &str) -> Result<String, String> {
    if s.trim().is_empty() {
        Err("output path must not be empty".into())
    } else {
        Ok(s.to_string())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Joint spectral intensity: CSV matrix plus PGM heatmap
    Jsi {
        /// State definition file (JSON)
        #[arg(long)]
        state: PathBuf,
        /// Output base path; writes <out>.csv and <out>.pgm
        #[arg(long, value_parser = non_empty_path)]
        out: String,
    },
    /// Generator variance, quantum Fisher information, Cramér-Rao bound
    Qfi {
        #[arg(long)]
        state: PathBuf,
        /// How to compute the QFI
        #[arg(long, value_enum, default_value = "variance")]
        method: MethodArg,
        /// Number of independent repetitions ν in the bound
        #[arg(long, default_value_t = 1)]
        nu: u64,
        /// Report format
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        /// Output file; stdout when omitted
        #[arg(long, value_parser = non_empty_path)]
        out: Option<String>,
    },
    /// Collective-variance scaling over photon number at fixed correlation
    Sweep {
        /// Correlation parameter η ∈ [0, 1]
        #[arg(long)]
        eta: f64,
        /// Per-photon frequency RMS
        #[arg(long, default_value_t = 1.0)]
        delta_omega: f64,
        #[arg(long, default_value_t = 2)]
        n_min: u64,
        #[arg(long, default_value_t = 10000)]
        n_max: u64,
        /// Number of log-spaced sample points
        #[arg(long, default_value_t = 48)]
        points: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[arg(long, value_parser = non_empty_path)]
        out: String,
    },
    /// Wigner maps before/after a time delay, with the measured shifts
    Wigner {
        #[arg(long)]
        state: PathBuf,
        /// Evolution time δt
        #[arg(long, default_value_t = 0.1)]
        delta_t: f64,
        /// Output base path; writes <out>_before/_after .csv/.pgm and <out>_shift.json
        #[arg(long, value_parser = non_empty_path)]
        out: String,
    },
    /// Schmidt coefficients, entanglement entropy, Schmidt number
    Schmidt {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        /// Output file; stdout when omitted
        #[arg(long, value_parser = non_empty_path)]
        out: Option<String>,
    },
}

enum CliError {
    Usage(String),
    Domain(String),
}

impl From<statedef::SpecError> for CliError {
    fn from(e: statedef::SpecError) -> Self {
        CliError::Domain(format!("[{}] {}", e.class(), e))
    }
}

impl From<tfqm::Error> for CliError {
    fn from(e: tfqm::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Domain(format!("i/o error: {e}"))
    }
}

fn main() -> ExitCode {
    if let Err(message) = configure_threads() {
        eprintln!("error: {message}");
        return ExitCode::from(2);
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Domain(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Some(raw) = std::env::var_os("TFQM_THREADS") else {
        return Ok(());
    };
    let text = raw.to_string_lossy();
    let threads: usize = text
        .parse()
        .map_err(|_| format!("TFQM_THREADS must be a positive integer (got `{text}`)"))?;
    if threads == 0 {
        return Err("TFQM_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| format!("cannot configure thread pool: {e}"))
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Jsi { state, out } => cmd_jsi(&state, &out),
        Command::Qfi {
            state,
            method,
            nu,
            format,
            out,
        } => cmd_qfi(&state, method, nu, format, out.as_deref()),
        Command::Sweep {
            eta,
            delta_omega,
            n_min,
            n_max,
            points,
            format,
            out,
        } => cmd_sweep(eta, delta_omega, n_min, n_max, points, format, &out),
        Command::Wigner {
            state,
            delta_t,
            out,
        } => cmd_wigner(&state, delta_t, &out),
        Command::Schmidt { state, format, out } => cmd_schmidt(&state, format, out.as_deref()),
    }
}

fn load_spec(path: &std::path::Path) -> Result<StateSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Domain(format!("cannot read {}: {e}", path.display())))?;
    statedef::parse(&text).map_err(|e| CliError::Domain(format!("[{}] {}", e.class(), e)))
}

fn emit(out: Option<&str>, payload: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            output::write_atomic(std::path::Path::new(path), payload.as_bytes())?;
            Ok(())
        }
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

fn cmd_jsi(state: &std::path::Path, out: &str) -> Result<(), CliError> {
    let spec = load_spec(state)?;
    let j = statedef::realize_jsa(&spec)?;
    let (g1, g2) = (*j.grid(Mode::One), *j.grid(Mode::Two));
    let intensity = |i: usize, k: usize| j.amplitudes()[(i, k)].norm_sqr();

    let csv = output::matrix_csv("omega1\\omega2", &g1, &g2, intensity);
    output::write_atomic(std::path::Path::new(&format!("{out}.csv")), csv.as_bytes())?;
    let pgm = output::pgm_from_matrix(g1.len(), g2.len(), intensity);
    output::write_atomic(std::path::Path::new(&format!("{out}.pgm")), pgm.as_bytes())?;
    Ok(())
}

#[derive(Serialize)]
struct QfiPayload {
    reports: Vec<QfiReport>,
    /// |overlap − variance| / variance when both methods ran.
    relative_discrepancy: Option<f64>,
}

fn variance_report(spec: &StateSpec, nu: u64) -> Result<QfiReport, CliError> {
    match statedef::realize(spec)? {
        RealizedState::Gaussian(g) => {
            let v = g.collective_variance(&spec.alphas)?;
            Ok(QfiReport::new(v, Method::AnalyticGaussian, nu)?)
        }
        RealizedState::Coherent(c) => {
            let v = coherent_variance(&c)?;
            Ok(QfiReport::new(v, Method::GridQuadrature, nu)?)
        }
    }
}

fn overlap_report(spec: &StateSpec, nu: u64) -> Result<QfiReport, CliError> {
    let j = statedef::realize_jsa(spec)?;
    let dtheta = default_overlap_step(&j, &spec.alphas)?;
    let qfi = overlap_qfi(&j, &spec.alphas, dtheta)?;
    Ok(QfiReport::new(qfi / 4.0, Method::Overlap, nu)?)
}

fn cmd_qfi(
    state: &std::path::Path,
    method: MethodArg,
    nu: u64,
    format: FormatArg,
    out: Option<&str>,
) -> Result<(), CliError> {
    let spec = load_spec(state)?;
    let payload = match method {
        MethodArg::Variance => QfiPayload {
            reports: vec![variance_report(&spec, nu)?],
            relative_discrepancy: None,
        },
        MethodArg::Overlap => QfiPayload {
            reports: vec![overlap_report(&spec, nu)?],
            relative_discrepancy: None,
        },
        MethodArg::Both => {
            let by_variance = variance_report(&spec, nu)?;
            let by_overlap = overlap_report(&spec, nu)?;
            let discrepancy = (by_overlap.qfi - by_variance.qfi).abs() / by_variance.qfi;
            QfiPayload {
                reports: vec![by_variance, by_overlap],
                relative_discrepancy: Some(discrepancy),
            }
        }
    };
    let text = match format {
        FormatArg::Json => output::json_document(&payload),
        FormatArg::Csv => {
            let mut s = String::from("method,variance_omega,qfi,crb,nu\n");
            for r in &payload.reports {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    method_name(r.method),
                    output::format_f64(r.variance_omega),
                    output::format_f64(r.qfi),
                    output::format_f64(r.crb),
                    r.nu
                ));
            }
            if let Some(d) = payload.relative_discrepancy {
                s.push_str(&format!(
                    "# relative_discrepancy = {}\n",
                    output::format_f64(d)
                ));
            }
            s
        }
    };
    emit(out, &text)
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::AnalyticGaussian => "analytic-gaussian",
        Method::GridQuadrature => "grid-quadrature",
        Method::Overlap => "overlap",
    }
}

fn log_spaced(n_min: u64, n_max: u64, points: usize) -> Vec<u64> {
    if n_min == n_max || points <= 1 {
        return vec![n_min];
    }
    let (lo, hi) = ((n_min as f64).ln(), (n_max as f64).ln());
    let mut out: Vec<u64> = (0..points)
        .map(|k| {
            let t = k as f64 / (points - 1) as f64;
            (lo + t * (hi - lo)).exp().round() as u64
        })
        .collect();
    out[0] = n_min;
    *out.last_mut().expect("non-empty") = n_max;
    out.sort_unstable();
    out.dedup();
    out
}

fn cmd_sweep(
    eta: f64,
    delta_omega: f64,
    n_min: u64,
    n_max: u64,
    points: usize,
    format: FormatArg,
    out: &str,
) -> Result<(), CliError> {
    if n_min < 1 || n_max < n_min {
        return Err(CliError::Usage(format!(
            "need 1 <= n_min <= n_max (got {n_min}..{n_max})"
        )));
    }
    if points == 0 {
        return Err(CliError::Usage("points must be at least 1".into()));
    }
    let n_list = log_spaced(n_min, n_max, points);
    let report = scaling_sweep(eta, delta_omega, &n_list)?;
    let fit_points: Vec<(f64, f64)> = report
        .points
        .iter()
        .map(|p| (p.n as f64, p.variance))
        .collect();
    let fitted_exponent = fit_scaling_exponent(&fit_points).ok();

    let text = match format {
        FormatArg::Csv => sweep_csv(&report, fitted_exponent),
        FormatArg::Json => {
            let transition = if report.transition_n.is_infinite() {
                serde_json::Value::from("inf")
            } else {
                serde_json::Value::from(report.transition_n)
            };
            output::json_document(&serde_json::json!({
                "eta": report.eta,
                "delta_omega": report.delta_omega,
                "transition_n": transition,
                "fitted_exponent": fitted_exponent,
                "points": report.points,
            }))
        }
    };
    output::write_atomic(std::path::Path::new(out), text.as_bytes())?;
    Ok(())
}

fn sweep_csv(report: &ScalingReport, fitted_exponent: Option<f64>) -> String {
    let mut s = String::from("n,variance,qfi,crb,local_slope\n");
    for p in &report.points {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            p.n,
            output::format_f64(p.variance),
            output::format_f64(p.qfi),
            output::format_f64(p.crb),
            output::format_f64(p.local_slope),
        ));
    }
    let transition = if report.transition_n.is_infinite() {
        "inf".to_string()
    } else {
        output::format_f64(report.transition_n)
    };
    s.push_str(&format!("# transition_n = {transition}\n"));
    match fitted_exponent {
        Some(e) => s.push_str(&format!("# fitted_exponent = {}\n", output::format_f64(e))),
        None => s.push_str("# fitted_exponent = nan\n"),
    }
    s
}

#[derive(Serialize)]
struct WignerShiftJson {
    delta_t: f64,
    collective_shift_orthonormal: Option<f64>,
    collective_shift_sum: Option<f64>,
    marginal_shifts: Vec<f64>,
    ratio: Option<f64>,
}

fn write_wigner_pair(out: &str, before: &WignerMap, after: &WignerMap) -> Result<(), CliError> {
    for (map, tag) in [(before, "before"), (after, "after")] {
        let csv = output::matrix_csv("phi\\tau", map.phi_grid(), map.tau_grid(), |i, j| {
            map.values()[(i, j)]
        });
        output::write_atomic(
            std::path::Path::new(&format!("{out}_{tag}.csv")),
            csv.as_bytes(),
        )?;
        let pgm = output::pgm_from_matrix(map.phi_grid().len(), map.tau_grid().len(), |i, j| {
            map.values()[(i, j)]
        });
        output::write_atomic(
            std::path::Path::new(&format!("{out}_{tag}.pgm")),
            pgm.as_bytes(),
        )?;
    }
    Ok(())
}

fn cmd_wigner(state: &std::path::Path, delta_t: f64, out: &str) -> Result<(), CliError> {
    let spec = load_spec(state)?;
    let realized = statedef::realize(&spec)?;

    let single: Option<Spectrum1D> = match &realized {
        RealizedState::Coherent(c) => Some(c.spectrum().clone()),
        RealizedState::Gaussian(g) if g.n() == 1 => {
            let grid = spec.grid_for(g.mean()[0], g.per_photon_variance(0).sqrt())?;
            Some(gaussian_to_spectrum(g, grid)?)
        }
        _ => None,
    };

    let shift_json = if let Some(s) = single {
        let moments = s.moments()?;
        let time_std = 1.0 / (2.0 * moments.variance.sqrt());
        let half = 6.0 * time_std + 2.0 * delta_t.abs();
        let tau = default_tau_grid(s.grid(), half, 161)?;
        let alphas = if spec.alphas.len() == 1 {
            spec.alphas.clone()
        } else {
            SignVector::all_plus(1)
        };
        let before = wigner_single(&s, tau)?;
        let after = wigner_single(&s.evolve(&alphas, delta_t)?, tau)?;
        let shift = after.tau_centroid_abs() - before.tau_centroid_abs();
        write_wigner_pair(out, &before, &after)?;
        WignerShiftJson {
            delta_t,
            collective_shift_orthonormal: None,
            collective_shift_sum: None,
            marginal_shifts: vec![shift],
            ratio: None,
        }
    } else {
        let j: Jsa2D = statedef::realize_jsa(&spec)?;
        let result = collective_wigner_shift_check(&j, &spec.alphas, delta_t)?;
        write_wigner_pair(out, &result.before, &result.after)?;
        WignerShiftJson {
            delta_t,
            collective_shift_orthonormal: Some(result.report.collective_shift_orthonormal),
            collective_shift_sum: Some(result.report.collective_shift_sum),
            marginal_shifts: result.report.marginal_shifts.clone(),
            ratio: result.report.ratio,
        }
    };
    let json = output::json_document(&shift_json);
    output::write_atomic(
        std::path::Path::new(&format!("{out}_shift.json")),
        json.as_bytes(),
    )?;
    Ok(())
}

#[derive(Serialize)]
struct SchmidtPayload {
    /// Leading coefficients (at most 16).
    coefficients: Vec<f64>,
    entropy_bits: f64,
    schmidt_number: f64,
    norm_residue: f64,
}

fn cmd_schmidt(
    state: &std::path::Path,
    format: FormatArg,
    out: Option<&str>,
) -> Result<(), CliError> {
    let spec = load_spec(state)?;
    let j = statedef::realize_jsa(&spec)?;
    let report = schmidt(&j)?;
    let payload = SchmidtPayload {
        coefficients: report.coefficients.iter().copied().take(16).collect(),
        entropy_bits: report.entropy_bits,
        schmidt_number: report.schmidt_number,
        norm_residue: report.norm_residue,
    };
    let text = match format {
        FormatArg::Json => output::json_document(&payload),
        FormatArg::Csv => {
            let mut s = String::from("k,coefficient\n");
            for (k, c) in payload.coefficients.iter().enumerate() {
                s.push_str(&format!("{k},{}\n", output::format_f64(*c)));
            }
            s.push_str(&format!(
                "# entropy_bits = {}\n# schmidt_number = {}\n",
                output::format_f64(payload.entropy_bits),
                output::format_f64(payload.schmidt_number)
            ));
            s
        }
    };
    emit(out, &text)
}
