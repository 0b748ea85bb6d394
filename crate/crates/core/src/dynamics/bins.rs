use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{sample_count, ComplexTimeSeries, DriveSignal};
use crate::spectral::{SpectralDensity, SystemParams};
use crate::{Error, Result};

/// A discrete ensemble: bin frequencies `ω_k` and couplings `g_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinBins {
    pub frequencies: Vec<f64>,
    pub couplings: Vec<f64>,
}

impl SpinBins {
    pub fn new(frequencies: Vec<f64>, couplings: Vec<f64>) -> Result<Self> {
        if frequencies.len() != couplings.len() || frequencies.is_empty() {
            return Err(Error::usage(
                "bins need matching, non-empty frequency and coupling lists",
            ));
        }
        Ok(Self { frequencies, couplings })
    }

    /// Splits the density grid into `n_bins` equal-width slices. Each bin
    /// carries `g_k² = Ω² ∫_bin ρ` and sits at the slice's centroid.
    pub fn from_density(density: &SpectralDensity, params: &SystemParams, n_bins: usize) -> Result<Self> {
        let grid = density.grid();
        let cells = grid.len() - 1;
        if n_bins == 0 || n_bins > cells {
            return Err(Error::usage(format!(
                "n_bins = {n_bins} must be between 1 and the {cells} grid cells"
            )));
        }
        let rho = density.values();
        let h = grid.spacing();
        let mut frequencies = Vec::with_capacity(n_bins);
        let mut couplings = Vec::with_capacity(n_bins);
        for b in 0..n_bins {
            let lo = b * cells / n_bins;
            let hi = (b + 1) * cells / n_bins;
            let (mut weight, mut moment) = (0.0, 0.0);
            for c in lo..hi {
                let (w0, w1) = (grid.point(c), grid.point(c + 1));
                weight += 0.5 * h * (rho[c] + rho[c + 1]);
                moment += 0.5 * h * (rho[c] * w0 + rho[c + 1] * w1);
            }
            frequencies.push(if weight > 0.0 {
                moment / weight
            } else {
                0.5 * (grid.point(lo) + grid.point(hi))
            });
            couplings.push(params.coupling * libm::sqrt(weight));
        }
        Ok(Self { frequencies, couplings })
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }
}

/// Cavity + spin-bin equations in the frame rotating at ωc:
///
/// ```text
/// dA/dt   = −κA + Σ_k g_k B_k − η(t)
/// dB_k/dt = −(γ + i(ω_k − ωc)) B_k − g_k A
/// ```
///
/// with bins taken from `density` (see [`SpinBins::from_density`]).
#[allow(clippy::too_many_arguments)]
pub fn solve_spin_bins(
    density: &SpectralDensity,
    params: &SystemParams,
    drive: &DriveSignal,
    a0: Complex64,
    n_bins: usize,
    dt: f64,
    t_max: f64,
    record_spins: bool,
) -> Result<ComplexTimeSeries> {
    let bins = SpinBins::from_density(density, params, n_bins)?;
    solve_bins(&bins, params, drive, a0, dt, t_max, record_spins)
}

/// Classical fixed-step RK4 for an explicit set of bins, spins starting at 0.
///
/// The drive is averaged over each step, which is exact when its switching
/// times fall on the time grid.
pub fn solve_bins(
    bins: &SpinBins,
    params: &SystemParams,
    drive: &DriveSignal,
    a0: Complex64,
    dt: f64,
    t_max: f64,
    record_spins: bool,
) -> Result<ComplexTimeSeries> {
    let n = sample_count(dt, t_max)?;
    let rate = bins
        .frequencies
        .iter()
        .map(|w| (w - params.omega_c).abs() + params.gamma)
        .fold(params.kappa.max(params.coupling), f64::max);
    let max_dt = 0.1 / rate;
    if dt >= max_dt {
        return Err(Error::StepSize {
            solver: "spin-bins",
            dt,
            max_dt,
        });
    }

    let g = &bins.couplings;
    let decay: Vec<Complex64> = bins
        .frequencies
        .iter()
        .map(|w| -Complex64::new(params.gamma, w - params.omega_c))
        .collect();
    let m = g.len();
    let kappa = params.kappa;

    let deriv = |a: Complex64, b: &[Complex64], eta: Complex64, da: &mut Complex64, db: &mut [Complex64]| {
        let mut feed = Complex64::new(0.0, 0.0);
        for k in 0..m {
            feed += g[k] * b[k];
            db[k] = decay[k] * b[k] - g[k] * a;
        }
        *da = -kappa * a + feed - eta;
    };

    let mut a = a0;
    let mut b = alloc::vec![Complex64::new(0.0, 0.0); m];
    let mut tmp = b.clone();
    let mut kb = [b.clone(), b.clone(), b.clone(), b.clone()];
    let mut ka = [Complex64::new(0.0, 0.0); 4];

    let mut amplitudes = Vec::with_capacity(n);
    amplitudes.push(a);
    let mut spins = record_spins.then(|| {
        let mut v = Vec::with_capacity(n);
        v.push(b.clone());
        v
    });

    for i in 1..n {
        let t0 = (i - 1) as f64 * dt;
        let eta = drive.integral(t0, t0 + dt) / dt;

        deriv(a, &b, eta, &mut ka[0], &mut kb[0]);
        for s in 1..4 {
            let frac = if s == 3 { 1.0 } else { 0.5 };
            let (done, rest) = kb.split_at_mut(s);
            let a_s = a + frac * dt * ka[s - 1];
            for k in 0..m {
                tmp[k] = b[k] + frac * dt * done[s - 1][k];
            }
            deriv(a_s, &tmp, eta, &mut ka[s], &mut rest[0]);
        }
        let w = dt / 6.0;
        a += w * (ka[0] + 2.0 * ka[1] + 2.0 * ka[2] + ka[3]);
        for k in 0..m {
            b[k] += w * (kb[0][k] + 2.0 * kb[1][k] + 2.0 * kb[2][k] + kb[3][k]);
        }
        if !(a.re.is_finite() && a.im.is_finite()) {
            return Err(Error::NumericalInstability {
                solver: "spin-bins",
                time: i as f64 * dt,
            });
        }
        amplitudes.push(a);
        if let Some(s) = spins.as_mut() {
            s.push(b.clone());
        }
    }
    Ok(ComplexTimeSeries { dt, amplitudes, spins })
}
