//! Time-domain cavity dynamics in the frame rotating at ω = ωc.
//!
//! The spin ensemble enters the cavity equation only through the memory kernel
//! `K(t) = Ω² ∫ρ(ω) e^{−i(ω−ωc)t − γt} dω`:
//!
//! ```text
//! dA/dt = −κA(t) − ∫₀ᵗ K(t−τ) A(τ) dτ − η(t)
//! ```
//!
//! [`solve_volterra`] integrates this directly. [`solve_spin_bins`] integrates
//! the underlying cavity + spin-bin ODEs and serves as an independent check.

mod bins;
mod drive;
mod kernel;
mod volterra;

use alloc::vec::Vec;

use num_complex::Complex64;

pub use bins::{solve_bins, solve_spin_bins, SpinBins};
pub use drive::{make_pulse_train, DriveSegment, DriveSignal};
pub use kernel::{build_kernel, KernelTable};
pub use volterra::{single_photon_decay, solve_volterra};

use crate::{Error, Result};

/// Cavity amplitude A(t) sampled at `t_i = i·dt`, optionally with the spin-bin
/// amplitudes `B_k(t_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTimeSeries {
    pub dt: f64,
    pub amplitudes: Vec<Complex64>,
    /// `spins[i][k]` is bin `k` at step `i`.
    pub spins: Option<Vec<Vec<Complex64>>>,
}

impl ComplexTimeSeries {
    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    #[inline]
    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    pub fn t_max(&self) -> f64 {
        self.time(self.len().saturating_sub(1))
    }

    /// `|A(t)|²`.
    pub fn occupation(&self) -> RealTimeSeries {
        RealTimeSeries {
            dt: self.dt,
            values: self.amplitudes.iter().map(|a| a.norm_sqr()).collect(),
        }
    }

    /// `|A|² + Σ_k |B_k|²` per step, if spins were recorded.
    pub fn excitation(&self) -> Option<Vec<f64>> {
        let spins = self.spins.as_ref()?;
        Some(
            self.amplitudes
                .iter()
                .zip(spins)
                .map(|(a, b)| a.norm_sqr() + b.iter().map(|z| z.norm_sqr()).sum::<f64>())
                .collect(),
        )
    }
}

/// A real observable sampled at `t_i = i·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealTimeSeries {
    pub dt: f64,
    pub values: Vec<f64>,
}

impl RealTimeSeries {
    #[inline]
    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    pub fn t_max(&self) -> f64 {
        self.time(self.values.len().saturating_sub(1))
    }
}

/// Number of samples on `0, dt, ..., t_max`.
pub(crate) fn sample_count(dt: f64, t_max: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) || !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::usage("dt and t_max must be positive and finite"));
    }
    if t_max < dt {
        return Err(Error::usage("t_max must be at least one step"));
    }
    Ok(libm::round(t_max / dt) as usize + 1)
}
