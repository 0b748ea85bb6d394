//! The five experiments behind the CLI subcommands.
//!
//! Each `compute_*` function returns in-memory results; [`run`] computes and
//! writes the artifacts. Holes come from the config, so a config with an
//! empty `holes` list runs the reference (no-hole) case only.

use std::fs;
use std::path::Path;

use holeburn_core::analysis::{
    fit_asymptotic_decay_rate, fit_decay_rate, gamma_estimate, peak_enhancement, rabi_splitting, DecayFit,
};
use holeburn_core::dynamics::{
    build_kernel, make_pulse_train, solve_spin_bins, solve_volterra, ComplexTimeSeries, DriveSignal, KernelTable,
};
use holeburn_core::peaks::find_peaks;
use holeburn_core::response::{
    hole_scan, lamb_shift, resonances_in, transmission_spectrum, HoleScanMap, Resonance, ResonanceOptions,
    TransmissionSpectrum,
};
use holeburn_core::spectral::{build_q_gaussian, burn_holes, removed_fraction, HoleSpec, SpectralDensity};
use holeburn_core::units::{density_per_mhz, ns, to_mhz};
use holeburn_core::Complex64;
use serde::Serialize;

use crate::config::{ExperimentConfig, FitWindow};
use crate::io::{self, FitReport};
use crate::AppError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Transmission,
    Scan,
    Decay,
    Drive,
    Verify,
}

/// Reference density and, when holes are configured, its burnt copy.
pub struct Densities {
    pub reference: SpectralDensity,
    pub holes: Option<SpectralDensity>,
}

pub fn densities(cfg: &ExperimentConfig, holes: &[HoleSpec]) -> Result<Densities, AppError> {
    let reference = build_q_gaussian(&cfg.q_gaussian()?, &cfg.density_grid()?)?;
    let holes = if holes.is_empty() {
        None
    } else {
        Some(burn_holes(&reference, holes)?)
    };
    Ok(Densities { reference, holes })
}

fn resonance_options(cfg: &ExperimentConfig) -> ResonanceOptions {
    ResonanceOptions {
        prominence: cfg.resonances.prominence,
        condition_i_tol: cfg.resonances.condition_i_tol,
        condition_ii_tol: cfg.resonances.condition_ii_tol,
    }
}

// ---------------------------------------------------------------- transmission

#[derive(Debug, Clone, Serialize)]
pub struct ResonanceEntry {
    #[serde(rename = "omega_over_2pi_MHz")]
    pub omega_over_2pi_mhz: f64,
    #[serde(rename = "T_abs2")]
    pub t_abs2: f64,
    pub condition_i_residual: f64,
    #[serde(rename = "condition_ii_residual_per_MHz")]
    pub condition_ii_residual_per_mhz: f64,
    pub full_resonance: bool,
}

impl From<&Resonance> for ResonanceEntry {
    fn from(r: &Resonance) -> Self {
        Self {
            omega_over_2pi_mhz: to_mhz(r.omega),
            t_abs2: r.t_abs2,
            condition_i_residual: r.condition_i_residual,
            condition_ii_residual_per_mhz: density_per_mhz(r.condition_ii_residual),
            full_resonance: r.full_resonance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TransmissionSummary {
    pub strong_coupling: bool,
    #[serde(rename = "rabi_splitting_MHz")]
    pub rabi_splitting_mhz: Option<f64>,
    #[serde(rename = "max_T_abs2_reference")]
    pub max_t_abs2_reference: f64,
    #[serde(rename = "max_T_abs2_holes")]
    pub max_t_abs2_holes: Option<f64>,
    pub peak_enhancement: Option<f64>,
    pub removed_fraction: Option<f64>,
    #[serde(rename = "gamma_estimate_reference_MHz")]
    pub gamma_estimate_reference_mhz: Option<f64>,
    #[serde(rename = "gamma_estimate_holes_MHz")]
    pub gamma_estimate_holes_mhz: Option<f64>,
    pub resonances_reference: Vec<ResonanceEntry>,
    pub resonances_holes: Option<Vec<ResonanceEntry>>,
}

pub struct TransmissionResult {
    pub densities: Densities,
    pub reference: TransmissionSpectrum,
    pub holes: Option<TransmissionSpectrum>,
    pub resonances_reference: Vec<Resonance>,
    pub resonances_holes: Option<Vec<Resonance>>,
    pub summary: TransmissionSummary,
}

pub fn compute_transmission(cfg: &ExperimentConfig) -> Result<TransmissionResult, AppError> {
    let params = cfg.system_params()?;
    let probe = cfg.probe_grid()?;
    let opts = resonance_options(cfg);
    let densities = densities(cfg, &cfg.stationary_holes())?;

    let reference = transmission_spectrum(&densities.reference, &params, &probe)?;
    let resonances_reference = resonances_in(&reference, &densities.reference, &params, &opts)?;
    let (holes, resonances_holes) = match &densities.holes {
        Some(rho) => {
            let s = transmission_spectrum(rho, &params, &probe)?;
            let r = resonances_in(&s, rho, &params, &opts)?;
            (Some(s), Some(r))
        }
        None => (None, None),
    };

    let summary = TransmissionSummary {
        strong_coupling: params.is_strong_coupling(),
        rabi_splitting_mhz: rabi_splitting(&reference).ok().map(to_mhz),
        max_t_abs2_reference: reference.max_abs2(),
        max_t_abs2_holes: holes.as_ref().map(|s| s.max_abs2()),
        peak_enhancement: holes.as_ref().map(|s| peak_enhancement(s, &reference)).transpose()?,
        removed_fraction: densities
            .holes
            .as_ref()
            .map(|h| removed_fraction(&densities.reference, h))
            .transpose()?,
        gamma_estimate_reference_mhz: gamma_estimate(&densities.reference, &params).ok().map(to_mhz),
        gamma_estimate_holes_mhz: densities
            .holes
            .as_ref()
            .and_then(|h| gamma_estimate(h, &params).ok())
            .map(to_mhz),
        resonances_reference: resonances_reference.iter().map(Into::into).collect(),
        resonances_holes: resonances_holes.as_ref().map(|r| r.iter().map(Into::into).collect()),
    };
    Ok(TransmissionResult {
        densities,
        reference,
        holes,
        resonances_reference,
        resonances_holes,
        summary,
    })
}

// ------------------------------------------------------------------------ scan

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    #[serde(rename = "omega_bar_MHz")]
    pub omega_bar_mhz: f64,
    #[serde(rename = "max_T_abs2")]
    pub max_t_abs2: f64,
    pub enhancement: f64,
    /// Maxima at or above half the row maximum, as offsets from ωs.
    #[serde(rename = "major_peaks_MHz")]
    pub major_peaks_mhz: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanSummary {
    #[serde(rename = "max_T_abs2_reference")]
    pub max_t_abs2_reference: f64,
    #[serde(rename = "global_max_omega_bar_MHz")]
    pub global_max_omega_bar_mhz: f64,
    #[serde(rename = "global_max_T_abs2")]
    pub global_max_t_abs2: f64,
    pub rows: Vec<ScanRow>,
}

pub struct ScanResult {
    pub map: HoleScanMap,
    pub summary: ScanSummary,
}

pub fn compute_scan(cfg: &ExperimentConfig) -> Result<ScanResult, AppError> {
    let template = cfg
        .holes
        .first()
        .map(|h| cfg.hole_spec(h, None))
        .ok_or_else(|| AppError::Config("scan needs at least one hole as the template".into()))?;
    let params = cfg.system_params()?;
    let probe = cfg.probe_grid()?;
    let base = build_q_gaussian(&cfg.q_gaussian()?, &cfg.density_grid()?)?;
    let reference_max = transmission_spectrum(&base, &params, &probe)?.max_abs2();
    let offsets: Vec<f64> = cfg.scan_offsets().into_iter().map(holeburn_core::units::mhz).collect();
    let map = hole_scan(&params, &base, &offsets, &template, &probe)?;

    let rows = (0..map.rows.len())
        .map(|r| {
            let max = map.row_max(r);
            ScanRow {
                omega_bar_mhz: to_mhz(map.offsets[r]),
                max_t_abs2: max,
                enhancement: max / reference_max,
                major_peaks_mhz: find_peaks(&map.rows[r], cfg.resonances.prominence)
                    .iter()
                    .filter(|p| p.value >= 0.5 * max)
                    .map(|p| to_mhz(probe.point(p.index) - params.omega_s))
                    .collect(),
            }
        })
        .collect();
    let (best, best_value) = map.global_max();
    let summary = ScanSummary {
        max_t_abs2_reference: reference_max,
        global_max_omega_bar_mhz: to_mhz(map.offsets[best]),
        global_max_t_abs2: best_value,
        rows,
    };
    Ok(ScanResult { map, summary })
}

// ------------------------------------------------------------------- dynamics

/// One time-domain run (with or without holes).
pub struct DynamicsRun {
    pub label: &'static str,
    pub kernel: KernelTable,
    pub drive: Option<DriveSignal>,
    pub series: ComplexTimeSeries,
    pub fit: DecayFit,
}

fn fit(series: &ComplexTimeSeries, w: &FitWindow) -> Result<DecayFit, AppError> {
    let n = series.occupation();
    let window = (w.window_us[0], w.window_us[1].min(n.t_max()));
    Ok(if w.asymptotic {
        fit_asymptotic_decay_rate(&n, window)?
    } else {
        fit_decay_rate(&n, window)?
    })
}

fn dynamics_runs(
    cfg: &ExperimentConfig,
    drive: Option<DriveSignal>,
    windows: [&FitWindow; 2],
) -> Result<Vec<DynamicsRun>, AppError> {
    let params = cfg.system_params()?;
    let dt = cfg.dt();
    let t_max = cfg.dynamics.t_max_us;
    let densities = densities(cfg, &cfg.dynamic_holes())?;
    let a0 = if drive.is_some() {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(1.0, 0.0)
    };
    let eta = drive.clone().unwrap_or_else(DriveSignal::none);
    let mut runs = Vec::new();
    for (label, rho, w) in [
        ("reference", Some(&densities.reference), windows[0]),
        ("holes", densities.holes.as_ref(), windows[1]),
    ] {
        let Some(rho) = rho else { continue };
        let kernel = build_kernel(rho, &params, dt, t_max)?;
        let series = solve_volterra(&kernel, &params, &eta, a0, dt, t_max)?;
        let fit = fit(&series, w)?;
        runs.push(DynamicsRun {
            label,
            kernel,
            drive: drive.clone(),
            series,
            fit,
        });
    }
    Ok(runs)
}

/// Single photon in the cavity at t = 0, no drive.
pub fn compute_decay(cfg: &ExperimentConfig) -> Result<Vec<DynamicsRun>, AppError> {
    dynamics_runs(cfg, None, [&cfg.fit.decay_reference, &cfg.fit.decay_holes])
}

pub fn pulse_train(cfg: &ExperimentConfig) -> Result<DriveSignal, AppError> {
    let d = &cfg.drive;
    Ok(make_pulse_train(
        d.n_pulses,
        ns(d.pulse_ns),
        Complex64::new(d.amplitude, 0.0),
        d.phase_flip,
    )?)
}

/// Empty cavity driven by the configured pulse train.
pub fn compute_drive(cfg: &ExperimentConfig) -> Result<Vec<DynamicsRun>, AppError> {
    dynamics_runs(
        cfg,
        Some(pulse_train(cfg)?),
        [&cfg.fit.drive_reference, &cfg.fit.drive_holes],
    )
}

// --------------------------------------------------------------------- verify

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            passed: value <= limit,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

/// Largest `|a − b|` relative to `max(1, max|a|)`.
pub fn relative_max_difference(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = a.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
}

/// Volterra against spin bins, plus the invariant checks.
pub fn compute_verify(cfg: &ExperimentConfig) -> Result<VerifyReport, AppError> {
    let params = cfg.system_params()?;
    let v = &cfg.verify;
    let dt = ns(v.dt_ns);
    let probe = cfg.probe_grid()?;
    let stationary = densities(cfg, &cfg.stationary_holes())?;
    let dynamic = densities(cfg, &cfg.dynamic_holes())?;
    let mut checks = Vec::new();

    checks.push(Check::at_most(
        "density normalization |∫ρ − 1|",
        (stationary.reference.integral() - 1.0).abs(),
        1e-6,
    ));
    if let Some(h) = &stationary.holes {
        let excess = h
            .values()
            .iter()
            .zip(stationary.reference.values())
            .map(|(a, b)| a - b)
            .fold(f64::NEG_INFINITY, f64::max);
        checks.push(Check::at_most("burning never raises ρ", excess, 0.0));
    }

    for (label, rho) in [
        ("reference", Some(&stationary.reference)),
        ("holes", stationary.holes.as_ref()),
    ] {
        let Some(rho) = rho else { continue };
        let s = transmission_spectrum(rho, &params, &probe)?;
        checks.push(Check::at_most(format!("max |T|² ({label})"), s.max_abs2(), 1.0 + 1e-9));
        if params.omega_c == params.omega_s && is_symmetric(rho) {
            let mut worst = 0.0f64;
            for i in 0..probe.len() / 2 {
                let up = lamb_shift(rho, params.omega_s + probe.offset(probe.len() - 1 - i, params.omega_s))?;
                let down = lamb_shift(rho, params.omega_s + probe.offset(i, params.omega_s))?;
                worst = worst.max((up + down).abs() / up.abs().max(down.abs()).max(f64::MIN_POSITIVE));
            }
            checks.push(Check::at_most(format!("δ antisymmetry ({label})"), worst, 1e-6));
        }
    }

    let drive = pulse_train(cfg)?;
    for (label, rho) in [
        ("reference", Some(&dynamic.reference)),
        ("holes", dynamic.holes.as_ref()),
    ] {
        let Some(rho) = rho else { continue };
        let kernel = build_kernel(rho, &params, dt, v.t_max_us)?;
        let k0 = kernel.values()[0].norm();
        let kmax = kernel.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
        checks.push(Check::at_most(format!("|K(t)|/K(0) ({label})"), kmax / k0, 1.0 + 1e-12));

        for (case, a0, eta) in [
            ("single photon", Complex64::new(1.0, 0.0), DriveSignal::none()),
            ("pulse train", Complex64::new(0.0, 0.0), drive.clone()),
        ] {
            let volterra = solve_volterra(&kernel, &params, &eta, a0, dt, v.t_max_us)?;
            let record = eta.is_zero();
            let bins = solve_spin_bins(rho, &params, &eta, a0, v.n_bins, dt, v.t_max_us, record)?;
            checks.push(Check::at_most(
                format!("volterra vs bins, {case} ({label})"),
                relative_max_difference(&volterra.amplitudes, &bins.amplitudes),
                v.tolerance,
            ));
            if let Some(e) = bins.excitation() {
                let rise = e.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
                checks.push(Check::at_most(
                    format!("bin excitation never rises ({label})"),
                    rise,
                    1e-9,
                ));
            }
        }
    }
    Ok(VerifyReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

fn is_symmetric(rho: &SpectralDensity) -> bool {
    let v = rho.values();
    let n = v.len();
    (0..n / 2).all(|k| (v[k] - v[n - 1 - k]).abs() <= 1e-9 * v[k].max(v[n - 1 - k]))
}

// ------------------------------------------------------------------------ run

/// Runs `command`, writing its artifacts and `effective_config.toml` to `out`.
pub fn run(command: Command, cfg: &ExperimentConfig, out: &Path) -> Result<(), AppError> {
    cfg.validate()?;
    fs::create_dir_all(out).map_err(|e| AppError::io(out, e))?;
    io::write_text(&out.join("effective_config.toml"), &cfg.to_toml())?;
    match command {
        Command::Transmission => write_transmission(cfg, out),
        Command::Scan => {
            let r = compute_scan(cfg)?;
            io::write_scan(&out.join("scan.csv"), &r.map)?;
            io::write_json(&out.join("scan_summary.json"), &r.summary)
        }
        Command::Decay => write_dynamics(cfg, out, "decay", compute_decay(cfg)?),
        Command::Drive => write_dynamics(cfg, out, "drive", compute_drive(cfg)?),
        Command::Verify => {
            let report = compute_verify(cfg)?;
            io::write_json(&out.join("verify.json"), &report)?;
            if report.passed {
                Ok(())
            } else {
                let failed: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| c.name.as_str())
                    .collect();
                Err(AppError::VerifyFailed(failed.join("; ")))
            }
        }
    }
}

fn write_transmission(cfg: &ExperimentConfig, out: &Path) -> Result<(), AppError> {
    let r = compute_transmission(cfg)?;
    io::write_density(&out.join("density_reference.csv"), &r.densities.reference)?;
    io::write_spectrum(&out.join("spectrum_reference.csv"), &r.reference)?;
    if let (Some(rho), Some(s)) = (&r.densities.holes, &r.holes) {
        io::write_density(&out.join("density_holes.csv"), rho)?;
        io::write_spectrum(&out.join("spectrum_holes.csv"), s)?;
    }
    io::write_json(&out.join("transmission_summary.json"), &r.summary)
}

fn write_dynamics(cfg: &ExperimentConfig, out: &Path, prefix: &str, runs: Vec<DynamicsRun>) -> Result<(), AppError> {
    let params = cfg.system_params()?;
    for run in &runs {
        let stem = format!("{prefix}_{}", run.label);
        io::write_time_series(
            &out.join(format!("{stem}.csv")),
            &run.series,
            run.drive.as_ref(),
            cfg.dynamics.output_every,
        )?;
        io::write_json(
            &out.join(format!("{stem}_fit.json")),
            &FitReport::new(&run.fit, &params),
        )?;
        if cfg.dynamics.dump_kernel {
            io::write_kernel(&out.join(format!("kernel_{}.csv", run.label)), &run.kernel)?;
        }
    }
    Ok(())
}
