//! CSV and JSON artifacts.
//!
//! Frequencies are written as f/2π in MHz, densities per MHz of f/2π, times
//! in µs. Floats use the shortest round-trip representation, so identical
//! results give identical bytes.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use holeburn_core::analysis::DecayFit;
use holeburn_core::dynamics::{ComplexTimeSeries, DriveSignal, KernelTable};
use holeburn_core::response::{HoleScanMap, TransmissionSpectrum};
use holeburn_core::spectral::{SpectralDensity, SystemParams};
use holeburn_core::units::{density_per_mhz, to_mhz};
use serde::{Deserialize, Serialize};

use crate::AppError;

fn writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>, AppError> {
    let file = File::create(path).map_err(|e| AppError::io(path, e))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn row<const N: usize>(w: &mut csv::Writer<BufWriter<File>>, values: [f64; N]) -> Result<(), AppError> {
    w.write_record(values.iter().map(|v| v.to_string()))?;
    Ok(())
}

fn finish(mut w: csv::Writer<BufWriter<File>>, path: &Path) -> Result<(), AppError> {
    w.flush().map_err(|e| AppError::io(path, e))
}

/// `omega_over_2pi_MHz,rho_per_MHz`
pub fn write_density(path: &Path, density: &SpectralDensity) -> Result<(), AppError> {
    let mut w = writer(path)?;
    w.write_record(["omega_over_2pi_MHz", "rho_per_MHz"])?;
    for (omega, rho) in density.grid().points().zip(density.values()) {
        row(&mut w, [to_mhz(omega), density_per_mhz(*rho)])?;
    }
    finish(w, path)
}

/// `omega_over_2pi_MHz,T_re,T_im,T_abs2,delta_lamb`, with δ in 1/(rad/µs).
pub fn write_spectrum(path: &Path, spectrum: &TransmissionSpectrum) -> Result<(), AppError> {
    let mut w = writer(path)?;
    w.write_record(["omega_over_2pi_MHz", "T_re", "T_im", "T_abs2", "delta_lamb"])?;
    for (i, omega) in spectrum.probe.points().enumerate() {
        let t = spectrum.t_complex[i];
        row(
            &mut w,
            [to_mhz(omega), t.re, t.im, spectrum.t_abs2[i], spectrum.lamb_shift[i]],
        )?;
    }
    finish(w, path)
}

/// Long format `omega_bar_MHz,omega_over_2pi_MHz,T_abs2`.
pub fn write_scan(path: &Path, scan: &HoleScanMap) -> Result<(), AppError> {
    let mut w = writer(path)?;
    w.write_record(["omega_bar_MHz", "omega_over_2pi_MHz", "T_abs2"])?;
    for (offset, values) in scan.offsets.iter().zip(&scan.rows) {
        let bar = to_mhz(*offset);
        for (omega, t) in scan.probe.points().zip(values) {
            row(&mut w, [bar, to_mhz(omega), *t])?;
        }
    }
    finish(w, path)
}

/// `t_us,A_re,A_im,N`, plus `drive_re,drive_im` when a drive is given.
pub fn write_time_series(
    path: &Path,
    series: &ComplexTimeSeries,
    drive: Option<&DriveSignal>,
    every: usize,
) -> Result<(), AppError> {
    let mut w = writer(path)?;
    let mut header = vec!["t_us", "A_re", "A_im", "N"];
    if drive.is_some() {
        header.extend(["drive_re", "drive_im"]);
    }
    w.write_record(&header)?;
    for (i, a) in series.amplitudes.iter().enumerate().step_by(every.max(1)) {
        let t = series.time(i);
        match drive {
            Some(d) => {
                let eta = d.amplitude_at(t);
                row(&mut w, [t, a.re, a.im, a.norm_sqr(), eta.re, eta.im])?
            }
            None => row(&mut w, [t, a.re, a.im, a.norm_sqr()])?,
        }
    }
    finish(w, path)
}

/// `t_us,K_re,K_im`
pub fn write_kernel(path: &Path, kernel: &KernelTable) -> Result<(), AppError> {
    let mut w = writer(path)?;
    w.write_record(["t_us", "K_re", "K_im"])?;
    for (i, k) in kernel.values().iter().enumerate() {
        row(&mut w, [i as f64 * kernel.dt(), k.re, k.im])?;
    }
    finish(w, path)
}

/// Fit report as written to JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    #[serde(rename = "gamma_total_over_2pi_MHz")]
    pub gamma_total_over_2pi_mhz: f64,
    pub gamma_over_kappa: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub window_us: [f64; 2],
    pub residual: f64,
    pub n_peaks_used: usize,
}

impl FitReport {
    pub fn new(fit: &DecayFit, params: &SystemParams) -> Self {
        Self {
            gamma_total_over_2pi_mhz: to_mhz(fit.gamma_total),
            gamma_over_kappa: fit.gamma_total / params.kappa,
            c: fit.prefactor,
            window_us: [fit.window.0, fit.window.1],
            residual: fit.residual,
            n_peaks_used: fit.n_peaks_used,
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), AppError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), AppError> {
    std::fs::write(path, text).map_err(|e| AppError::io(path, e))
}
