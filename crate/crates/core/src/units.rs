//! Conversions between quoted `f/2π` values and internal angular units.
//!
//! Internally every frequency is an angular frequency in rad/µs, so that
//! products with times in µs are dimensionless phases.

use core::f64::consts::{PI, TAU};

/// `f/2π` in MHz to rad/µs.
#[inline]
pub fn mhz(f_over_2pi: f64) -> f64 {
    TAU * f_over_2pi
}

/// `f/2π` in GHz to rad/µs.
#[inline]
pub fn ghz(f_over_2pi: f64) -> f64 {
    TAU * 1.0e3 * f_over_2pi
}

/// rad/µs to `f/2π` in MHz.
#[inline]
pub fn to_mhz(omega: f64) -> f64 {
    omega / TAU
}

/// Nanoseconds to µs.
#[inline]
pub fn ns(t: f64) -> f64 {
    t * 1.0e-3
}

/// Density per unit angular frequency to density per MHz of `f = ω/2π`.
#[inline]
pub fn density_per_mhz(rho: f64) -> f64 {
    2.0 * PI * rho
}
