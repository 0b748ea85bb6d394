//! Observables extracted from spectra and time traces.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::dynamics::RealTimeSeries;
use crate::peaks::{find_peaks, parabolic_offset, parabolic_vertex};
use crate::response::TransmissionSpectrum;
use crate::spectral::{SpectralDensity, SystemParams};
use crate::{Error, Result};

/// Minimum number of Rabi maxima a decay fit uses.
pub const MIN_FIT_PEAKS: usize = 4;

/// Envelope fit `N_env(t) = C e^{−Γt}` through the Rabi maxima of `N(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// Γ, decay rate of the occupation envelope (rad/µs).
    pub gamma_total: f64,
    /// C.
    pub prefactor: f64,
    /// Span of the maxima actually used, `(first, last)` peak time.
    pub window: (f64, f64),
    /// RMS residual of the fit to `ln N_peak`.
    pub residual: f64,
    pub n_peaks_used: usize,
}

/// Local maxima of `series` with times in `window`, as `(t, ln N)`, refined
/// by a parabola through the log samples.
fn envelope_peaks(series: &RealTimeSeries, window: (f64, f64)) -> Result<Vec<(f64, f64)>> {
    let (t0, t1) = window;
    let span = series.t_max();
    if t0.is_nan() || t0 >= t1 || t0 < 0.0 || t1.is_nan() || t1 > span + 0.5 * series.dt {
        return Err(Error::usage("fit window must satisfy 0 <= start < end <= t_max"));
    }
    let y = &series.values;
    let mut out = Vec::new();
    for p in find_peaks(y, 0.0) {
        let t = series.time(p.index);
        if t < t0 || t > t1 {
            continue;
        }
        if p.value <= 0.0 {
            return Err(Error::domain("non-positive peak value in decay fit"));
        }
        let i = p.index;
        if y[i - 1] > 0.0 && y[i + 1] > 0.0 {
            let logs = [libm::log(y[i - 1]), libm::log(y[i]), libm::log(y[i + 1])];
            let (off, h) = parabolic_vertex(&logs, 1);
            out.push((t + off * series.dt, h));
        } else {
            out.push((t, libm::log(p.value)));
        }
    }
    Ok(out)
}

/// Least-squares line; returns `(slope, intercept, sum of squared residuals)`.
fn linear_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(x, y) in points {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse = points
        .iter()
        .map(|&(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    (slope, intercept, sse)
}

fn fit_points(points: &[(f64, f64)]) -> Result<DecayFit> {
    if points.len() < MIN_FIT_PEAKS {
        return Err(Error::InsufficientData {
            what: "Rabi maxima in the fit window",
            needed: MIN_FIT_PEAKS,
            found: points.len(),
        });
    }
    let (slope, intercept, sse) = linear_fit(points);
    if slope.is_nan() || slope >= 0.0 {
        return Err(Error::domain("envelope does not decay in the fit window"));
    }
    Ok(DecayFit {
        gamma_total: -slope,
        prefactor: libm::exp(intercept),
        window: (points[0].0, points[points.len() - 1].0),
        residual: libm::sqrt(sse / points.len() as f64),
        n_peaks_used: points.len(),
    })
}

/// Fits `ln N_peak = ln C − Γ t` over every maximum of `series` in `window`.
pub fn fit_decay_rate(series: &RealTimeSeries, window: (f64, f64)) -> Result<DecayFit> {
    fit_points(&envelope_peaks(series, window)?)
}

/// Like [`fit_decay_rate`], but first locates a crossover: the maxima are
/// split where a two-segment piecewise-linear fit of `ln N_peak` has the
/// least total squared error, and only the later (asymptotic) segment is
/// fitted. Falls back to a single fit with fewer than `2·MIN_FIT_PEAKS`
/// maxima.
pub fn fit_asymptotic_decay_rate(series: &RealTimeSeries, window: (f64, f64)) -> Result<DecayFit> {
    let points = envelope_peaks(series, window)?;
    if points.len() < 2 * MIN_FIT_PEAKS {
        return fit_points(&points);
    }
    let split = (MIN_FIT_PEAKS..=points.len() - MIN_FIT_PEAKS)
        .map(|s| {
            let left = linear_fit(&points[..s]).2;
            let right = linear_fit(&points[s..]).2;
            (s, left + right)
        })
        .fold(
            (MIN_FIT_PEAKS, f64::INFINITY),
            |best, cur| if cur.1 < best.1 { cur } else { best },
        )
        .0;
    fit_points(&points[split..])
}

/// `Γ ≈ κ + πΩ²ρ(ωs ± Ω)`, averaging the two polariton frequencies.
pub fn gamma_estimate(density: &SpectralDensity, params: &SystemParams) -> Result<f64> {
    let grid = density.grid();
    let lower = params.omega_s - params.coupling;
    let upper = params.omega_s + params.coupling;
    if !grid.contains(lower) || !grid.contains(upper) {
        return Err(Error::domain("ωs ± Ω lies outside the density grid"));
    }
    let rho = 0.5 * (density.value_at(lower) + density.value_at(upper));
    Ok(params.kappa + PI * params.coupling * params.coupling * rho)
}

/// `max |T_holes|² / max |T_ref|²`.
pub fn peak_enhancement(with_holes: &TransmissionSpectrum, reference: &TransmissionSpectrum) -> Result<f64> {
    if with_holes.probe != reference.probe {
        return Err(Error::usage("spectra must share the probe grid"));
    }
    let denom = reference.max_abs2();
    if denom <= 0.0 {
        return Err(Error::domain("reference spectrum has zero maximum"));
    }
    Ok(with_holes.max_abs2() / denom)
}

/// Distance between the two highest local maxima of `|T|²`.
pub fn rabi_splitting(spectrum: &TransmissionSpectrum) -> Result<f64> {
    let mut peaks = find_peaks(&spectrum.t_abs2, 0.0);
    if peaks.len() < 2 {
        return Err(Error::InsufficientData {
            what: "transmission maxima",
            needed: 2,
            found: peaks.len(),
        });
    }
    peaks.sort_by(|a, b| b.value.total_cmp(&a.value));
    let probe = &spectrum.probe;
    let position = |i: usize| probe.point(i) + parabolic_offset(&spectrum.t_abs2, i) * probe.spacing();
    Ok((position(peaks[0].index) - position(peaks[1].index)).abs())
}
