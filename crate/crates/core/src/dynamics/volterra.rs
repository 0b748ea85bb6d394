use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{build_kernel, sample_count, ComplexTimeSeries, DriveSignal, KernelTable, RealTimeSeries};
use crate::spectral::{SpectralDensity, SystemParams};
use crate::{Error, Result};

/// Integrates `dA/dt = −κA − ∫₀ᵗ K(t−τ)A(τ)dτ − η(t)` on `0, dt, ..., t_max`.
///
/// Second-order product integration: the memory integral is a trapezoidal
/// convolution over the kernel table, the time step is the trapezoidal rule
/// with the newest point implicit (solved in closed form, the equation being
/// linear), and the drive enters through its exact integral over each step.
pub fn solve_volterra(
    kernel: &KernelTable,
    params: &SystemParams,
    drive: &DriveSignal,
    a0: Complex64,
    dt: f64,
    t_max: f64,
) -> Result<ComplexTimeSeries> {
    let n = sample_count(dt, t_max)?;
    if (kernel.dt() - dt).abs() > 1e-12 * dt {
        return Err(Error::usage(format!(
            "kernel step {} does not match solver step {dt}",
            kernel.dt()
        )));
    }
    if kernel.len() < n {
        return Err(Error::usage(format!(
            "kernel covers {} steps, solver needs {n}",
            kernel.len()
        )));
    }
    let k = kernel.values();
    let kappa = params.kappa;
    let half = 0.5 * dt;
    let implicit = Complex64::new(1.0, 0.0) + half * (kappa + half * k[0]);

    let mut a = Vec::with_capacity(n);
    a.push(a0);
    // Right-hand side without the drive: −κA_i − (memory integral at t_i).
    let mut f_prev = -kappa * a0;
    for i in 1..n {
        // Trapezoidal memory sum without its (implicit) τ = t_i end point.
        let history: Complex64 = k[1..i].iter().rev().zip(&a[1..i]).map(|(kk, aa)| kk * aa).sum();
        let s = dt * (0.5 * k[i] * a0 + history);
        let forcing = drive.integral((i - 1) as f64 * dt, i as f64 * dt);
        let ai = (a[i - 1] + half * (f_prev - s) - forcing) / implicit;
        if !(ai.re.is_finite() && ai.im.is_finite()) {
            return Err(Error::NumericalInstability {
                solver: "volterra",
                time: i as f64 * dt,
            });
        }
        f_prev = -kappa * ai - s - half * k[0] * ai;
        a.push(ai);
    }
    Ok(ComplexTimeSeries {
        dt,
        amplitudes: a,
        spins: None,
    })
}

/// Cavity occupation `N(t) = |A(t)|²` after a single photon is placed in the
/// cavity at t = 0 with no drive.
pub fn single_photon_decay(
    density: &SpectralDensity,
    params: &SystemParams,
    dt: f64,
    t_max: f64,
) -> Result<RealTimeSeries> {
    let kernel = build_kernel(density, params, dt, t_max)?;
    let series = solve_volterra(
        &kernel,
        params,
        &DriveSignal::none(),
        Complex64::new(1.0, 0.0),
        dt,
        t_max,
    )?;
    Ok(series.occupation())
}
