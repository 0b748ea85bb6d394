use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;

use super::sample_count;
use crate::map_indices;
use crate::spectral::{SpectralDensity, SystemParams};
use crate::{Error, Result};

/// Phase factors are re-anchored exactly every this many frequency nodes.
const ANCHOR_BLOCK: usize = 256;

/// Memory kernel `K(t_n)`, `t_n = n·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    dt: f64,
    values: Vec<Complex64>,
}

impl KernelTable {
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn t_max(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.dt
    }
}

/// Tabulates `K(t) = Ω² e^{−γt} ∫ρ(ω) e^{−i(ω−ωc)t} dω` on `[0, t_max]` with
/// trapezoidal frequency quadrature.
///
/// `dt` must resolve both the Rabi period (`dt <= 2π/Ω / 40`) and the grid
/// bandwidth (`dt <= 1 / (2·max|ω − ωc|)`).
pub fn build_kernel(density: &SpectralDensity, params: &SystemParams, dt: f64, t_max: f64) -> Result<KernelTable> {
    let n = sample_count(dt, t_max)?;
    let grid = density.grid();
    if params.coupling > 0.0 {
        let limit = TAU / params.coupling / 40.0;
        if dt > limit {
            return Err(Error::resolution(format!(
                "dt = {dt} does not resolve the coupling (need dt <= {limit})"
            )));
        }
    }
    let half_span = (grid.max() - params.omega_c)
        .abs()
        .max((grid.min() - params.omega_c).abs());
    let limit = 0.5 / half_span;
    if dt > limit {
        return Err(Error::resolution(format!(
            "dt = {dt} does not resolve the density bandwidth (need dt <= {limit})"
        )));
    }

    let weighted: Vec<f64> = density
        .values()
        .iter()
        .enumerate()
        .map(|(k, r)| grid.weight(k) * r)
        .collect();
    let g2 = params.coupling * params.coupling;
    let h = grid.spacing();

    let values = map_indices(n, |i| {
        let t = i as f64 * dt;
        let step = Complex64::from_polar(1.0, -h * t);
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, block) in weighted.chunks(ANCHOR_BLOCK).enumerate() {
            let k0 = b * ANCHOR_BLOCK;
            let mut phase = Complex64::from_polar(1.0, -(grid.point(k0) - params.omega_c) * t);
            for &w in block {
                acc += phase * w;
                phase *= step;
            }
        }
        acc * (g2 * libm::exp(-params.gamma * t))
    });
    Ok(KernelTable { dt, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::FrequencyGrid;
    use crate::units::mhz;
    use core::f64::consts::PI;

    #[test]
    fn single_bin_at_cavity_gives_constant_kernel() {
        let params = SystemParams::nv_diamond().with_gamma(0.0);
        let grid = FrequencyGrid::centered(params.omega_c, mhz(50.0), 2001).unwrap();
        let mut v = alloc::vec![0.0; grid.len()];
        let k = grid.nearest(params.omega_c);
        v[k] = 0.7 / grid.spacing();
        let rho = SpectralDensity::from_values(grid, v).unwrap();
        let kern = build_kernel(&rho, &params, 1e-3, 1.0).unwrap();
        let want = params.coupling * params.coupling * 0.7;
        for z in kern.values() {
            assert!((z - want).norm() < 1e-9 * want, "{z}");
        }
    }

    #[test]
    fn lorentzian_kernel_is_exponential() {
        let params = SystemParams::nv_diamond().with_gamma(0.0);
        let hw = mhz(1.0);
        let grid = FrequencyGrid::centered(params.omega_s, mhz(200.0), 80001).unwrap();
        let rho = SpectralDensity::from_values(
            grid,
            grid.points()
                .map(|w| {
                    let d = w - params.omega_s;
                    hw / PI / (d * d + hw * hw)
                })
                .collect(),
        )
        .unwrap();
        let kern = build_kernel(&rho, &params, 2.5e-4, 0.5).unwrap();
        let g2 = params.coupling * params.coupling;
        for (i, z) in kern.values().iter().enumerate().skip(1) {
            let t = i as f64 * kern.dt();
            let want = g2 * (-hw * t).exp();
            // the truncated tails contribute a fast transient of relative size ~ 2γL/(πL)
            if t > 0.01 {
                assert!((z - want).norm() < 1e-3 * want, "t={t}: {z} vs {want}");
            }
        }
    }

    #[test]
    fn resolution_checks() {
        let params = SystemParams::nv_diamond();
        let grid = FrequencyGrid::centered(params.omega_s, mhz(50.0), 2001).unwrap();
        let rho = SpectralDensity::empty(grid);
        assert!(matches!(
            build_kernel(&rho, &params, 2e-3, 1.0),
            Err(Error::Resolution(_))
        ));
        assert!(build_kernel(&rho, &params, 1e-3, 1.0).is_ok());
        assert!(build_kernel(&rho, &params, -1e-3, 1.0).is_err());
    }
}
