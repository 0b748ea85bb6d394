//! Numerical core of the `holeburn` simulator: a single-mode cavity coupled to an
//! inhomogeneously broadened spin ensemble, with spectral holes burnt into the
//! spin density.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled. The optional `rayon` feature parallelizes the embarrassingly
//! parallel loops (probe points, scan rows, kernel time points); every result is
//! computed per point, so outputs do not depend on the schedule.
//!
//! Units: angular frequencies are in rad/µs and times in µs. Use
//! [`units::mhz`] to convert a quoted `f/2π` value in MHz.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analysis;
pub mod dynamics;
mod error;
pub mod grid;
pub mod peaks;
pub mod response;
pub mod spectral;
pub mod units;

pub use error::{Error, Result};

/// `(0..n).map(f)`, in parallel when the `rayon` feature is on. Each item is
/// computed independently, so the output is identical either way.
pub(crate) fn map_indices<T, F>(n: usize, f: F) -> alloc::vec::Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "rayon")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "rayon"))]
    {
        (0..n).map(f).collect()
    }
}
pub use grid::FrequencyGrid;
pub use num_complex::Complex64;
