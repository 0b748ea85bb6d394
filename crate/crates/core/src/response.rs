//! Stationary response: nonlinear Lamb shift, transmission, resonances and
//! hole-position scans.
//!
//! With γ → 0 the stationary cavity amplitude gives
//!
//! ```text
//! T(ω) = iκ / (ω − ωc − Ω²δ(ω) + i[κ + πΩ²ρ(ω)]),    δ(ω) = P∫ ρ(ω̃)/(ω − ω̃) dω̃
//! ```
//!
//! so `|T| <= 1` whenever κ > 0 and ρ >= 0, with equality exactly when
//! `(ω − ωc)/Ω² = δ(ω)` and `ρ(ω) = 0`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::grid::FrequencyGrid;
use crate::map_indices;
use crate::peaks::{find_peaks, parabolic_offset};
use crate::spectral::{burn_holes, HoleSpec, SpectralDensity, SystemParams};
use crate::{Error, Result};

/// Probe points closer than this (rad/µs) to a density node are evaluated at
/// the node.
pub const SNAP_TOLERANCE: f64 = 1e-6;

/// Principal-value integral `P∫ρ(ω̃)/(ω − ω̃) dω̃` over the density grid.
///
/// Inside the grid the singularity is subtracted: `[ρ(ω̃) − ρ(ω)]/(ω − ω̃)`
/// is integrated by trapezoid (its limit `−ρ'(ω)` is used at a coinciding
/// node) and `ρ(ω)·ln((ω − ω_min)/(ω_max − ω))` is added back. Outside the
/// grid the integral is regular and summed directly.
pub fn lamb_shift(density: &SpectralDensity, omega: f64) -> Result<f64> {
    let grid = density.grid();
    let (lo, hi) = (grid.min(), grid.max());
    if !omega.is_finite() {
        return Err(Error::domain("probe frequency must be finite"));
    }
    if (omega - lo).abs() <= SNAP_TOLERANCE || (omega - hi).abs() <= SNAP_TOLERANCE {
        return Err(Error::domain(
            "principal value diverges at a density grid endpoint; shrink the probe range",
        ));
    }
    let rho = density.values();
    let n = rho.len();
    let h = grid.spacing();

    if omega < lo || omega > hi {
        let sum: f64 = (0..n).map(|k| grid.weight(k) * rho[k] / (omega - grid.point(k))).sum();
        return Ok(sum);
    }

    let j = grid.nearest(omega);
    let snapped = (omega - grid.point(j)).abs() <= SNAP_TOLERANCE;
    let (x, rx) = if snapped {
        (grid.point(j), rho[j])
    } else {
        (omega, density.value_at(omega))
    };

    let term = |k: usize| -> f64 {
        if snapped && k == j {
            -density.slope_at_node(j)
        } else {
            (rho[k] - rx) / (x - grid.point(k))
        }
    };
    let interior: f64 = (1..n - 1).map(term).sum();
    let sum = h * (interior + 0.5 * (term(0) + term(n - 1)));
    Ok(sum + rx * libm::log((x - lo) / (hi - x)))
}

/// Complex transmission at probe frequency `omega`.
pub fn transmission(density: &SpectralDensity, params: &SystemParams, omega: f64) -> Result<Complex64> {
    let delta = lamb_shift(density, omega)?;
    Ok(transmission_with(density, params, omega, delta))
}

fn transmission_with(density: &SpectralDensity, params: &SystemParams, omega: f64, delta: f64) -> Complex64 {
    let g2 = params.coupling * params.coupling;
    let rho = density.value_at(omega);
    let denom = Complex64::new(omega - params.omega_c - g2 * delta, params.kappa + PI * g2 * rho);
    Complex64::new(0.0, params.kappa) / denom
}

/// δ(ω) tabulated on a probe grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LambShiftTable {
    pub probe: FrequencyGrid,
    pub delta: Vec<f64>,
}

pub fn lamb_shift_table(density: &SpectralDensity, probe: &FrequencyGrid) -> Result<LambShiftTable> {
    let delta = map_indices(probe.len(), |i| lamb_shift(density, probe.point(i)))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    Ok(LambShiftTable { probe: *probe, delta })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionSpectrum {
    pub probe: FrequencyGrid,
    pub t_complex: Vec<Complex64>,
    /// `|T|²` per probe point.
    pub t_abs2: Vec<f64>,
    /// δ(ω) per probe point, kept for export and resonance analysis.
    pub lamb_shift: Vec<f64>,
}

impl TransmissionSpectrum {
    pub fn max_abs2(&self) -> f64 {
        self.t_abs2.iter().copied().fold(0.0, f64::max)
    }

    pub fn lamb_shift_table(&self) -> LambShiftTable {
        LambShiftTable {
            probe: self.probe,
            delta: self.lamb_shift.clone(),
        }
    }
}

/// [`transmission`] at every probe point.
pub fn transmission_spectrum(
    density: &SpectralDensity,
    params: &SystemParams,
    probe: &FrequencyGrid,
) -> Result<TransmissionSpectrum> {
    let points = map_indices(probe.len(), |i| {
        let w = probe.point(i);
        lamb_shift(density, w).map(|d| (d, transmission_with(density, params, w, d)))
    })
    .into_iter()
    .collect::<Result<Vec<(f64, Complex64)>>>()?;
    let lamb_shift = points.iter().map(|p| p.0).collect();
    let t_complex: Vec<Complex64> = points.iter().map(|p| p.1).collect();
    let t_abs2 = t_complex.iter().map(|t| t.norm_sqr()).collect();
    Ok(TransmissionSpectrum {
        probe: *probe,
        t_complex,
        t_abs2,
        lamb_shift,
    })
}

/// Thresholds for [`find_resonances`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceOptions {
    /// Minimum topographic prominence in `|T|²`.
    pub prominence: f64,
    /// Condition (i) tolerance relative to `max |δ|` over the probe grid.
    pub condition_i_tol: f64,
    /// Condition (ii) tolerance relative to `max ρ`.
    pub condition_ii_tol: f64,
}

impl Default for ResonanceOptions {
    fn default() -> Self {
        Self {
            prominence: 1e-4,
            condition_i_tol: 5e-3,
            condition_ii_tol: 1e-2,
        }
    }
}

/// A local maximum of `|T|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub omega: f64,
    pub t_abs2: f64,
    /// `|(ω − ωc)/Ω² − δ(ω)|`.
    pub condition_i_residual: f64,
    /// `ρ(ω)`.
    pub condition_ii_residual: f64,
    /// Both residuals are below tolerance, so `|T|² ≈ 1`.
    pub full_resonance: bool,
}

pub fn find_resonances(
    density: &SpectralDensity,
    params: &SystemParams,
    probe: &FrequencyGrid,
    options: &ResonanceOptions,
) -> Result<Vec<Resonance>> {
    let spectrum = transmission_spectrum(density, params, probe)?;
    resonances_in(&spectrum, density, params, options)
}

/// Resonance analysis of an already computed spectrum.
pub fn resonances_in(
    spectrum: &TransmissionSpectrum,
    density: &SpectralDensity,
    params: &SystemParams,
    options: &ResonanceOptions,
) -> Result<Vec<Resonance>> {
    if spectrum.t_abs2.is_empty() {
        return Err(Error::usage("empty probe grid"));
    }
    let delta_max = spectrum.lamb_shift.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let rho_max = density.max_value();
    let g2 = params.coupling * params.coupling;
    let probe = &spectrum.probe;

    let mut out = Vec::new();
    for peak in find_peaks(&spectrum.t_abs2, options.prominence) {
        let i = peak.index;
        let mut omega = probe.point(i);
        let mut delta = spectrum.lamb_shift[i];
        let mut t_abs2 = peak.value;
        let off = parabolic_offset(&spectrum.t_abs2, i);
        if off != 0.0 {
            let w = omega + off * probe.spacing();
            let d = lamb_shift(density, w)?;
            let t = transmission_with(density, params, w, d).norm_sqr();
            if t > t_abs2 {
                (omega, delta, t_abs2) = (w, d, t);
            }
        }
        let condition_i_residual = if g2 > 0.0 {
            ((omega - params.omega_c) / g2 - delta).abs()
        } else {
            f64::INFINITY
        };
        let condition_ii_residual = density.value_at(omega);
        let full_resonance = if g2 > 0.0 {
            condition_i_residual <= options.condition_i_tol * delta_max
                && condition_ii_residual <= options.condition_ii_tol * rho_max
        } else {
            // Bare cavity: both conditions hold trivially at ω = ωc.
            (omega - params.omega_c).abs() <= probe.spacing()
        };
        out.push(Resonance {
            omega,
            t_abs2,
            condition_i_residual,
            condition_ii_residual,
            full_resonance,
        });
    }
    Ok(out)
}

/// `|T(ω)|²` for a family of symmetric hole pairs `ωs ± ω̄`.
#[derive(Debug, Clone, PartialEq)]
pub struct HoleScanMap {
    pub offsets: Vec<f64>,
    pub probe: FrequencyGrid,
    pub rows: Vec<Vec<f64>>,
}

impl HoleScanMap {
    pub fn row_max(&self, row: usize) -> f64 {
        self.rows[row].iter().copied().fold(0.0, f64::max)
    }

    /// `(row, max |T|²)` of the highest row; the first one on ties.
    pub fn global_max(&self) -> (usize, f64) {
        (0..self.rows.len())
            .map(|r| (r, self.row_max(r)))
            .fold(
                (0, f64::NEG_INFINITY),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            )
    }
}

/// Burns `template`-shaped holes at `ωs ± ω̄` into a copy of `base` for each
/// offset and records the transmission.
pub fn hole_scan(
    params: &SystemParams,
    base: &SpectralDensity,
    offsets: &[f64],
    template: &HoleSpec,
    probe: &FrequencyGrid,
) -> Result<HoleScanMap> {
    let rows = map_indices(offsets.len(), |r| {
        let holes = template.symmetric_pair(params.omega_s, offsets[r]);
        let burnt = burn_holes(base, &holes)?;
        transmission_spectrum(&burnt, params, probe).map(|s| s.t_abs2)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(HoleScanMap {
        offsets: offsets.to_vec(),
        probe: *probe,
        rows,
    })
}
