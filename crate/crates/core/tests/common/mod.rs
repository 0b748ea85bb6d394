#![allow(dead_code)]

use holeburn_core::spectral::{build_q_gaussian, burn_holes, HoleSpec, QGaussianSpec, SpectralDensity, SystemParams};
use holeburn_core::units::mhz;
use holeburn_core::FrequencyGrid;

pub fn nv_grid() -> FrequencyGrid {
    FrequencyGrid::centered(SystemParams::nv_diamond().omega_s, mhz(50.0), 20001).unwrap()
}

pub fn nv_density() -> SpectralDensity {
    build_q_gaussian(&QGaussianSpec::nv_diamond(), &nv_grid()).unwrap()
}

pub fn holes(width_mhz: f64) -> [HoleSpec; 2] {
    let p = SystemParams::nv_diamond();
    HoleSpec::fermi_dirac(p.omega_s, mhz(width_mhz)).symmetric_pair(p.omega_s, p.coupling)
}

pub fn burnt_density(width_mhz: f64) -> SpectralDensity {
    burn_holes(&nv_density(), &holes(width_mhz)).unwrap()
}

/// Probe `ωs ± half_span_mhz` with the given step.
pub fn probe(half_span_mhz: f64, step_mhz: f64) -> FrequencyGrid {
    let n = (2.0 * half_span_mhz / step_mhz).round() as usize + 1;
    FrequencyGrid::centered(SystemParams::nv_diamond().omega_s, mhz(half_span_mhz), n).unwrap()
}
