//! Uniform frequency grids and the quadrature/interpolation used on them.

use crate::{Error, Result};

/// A uniform grid `min, min + h, ..., max` with `n_points` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    min: f64,
    max: f64,
    n_points: usize,
}

impl FrequencyGrid {
    pub fn new(min: f64, max: f64, n_points: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(Error::config("grid bounds must be finite"));
        }
        if min >= max {
            return Err(Error::config("grid requires min < max"));
        }
        if n_points < 3 {
            return Err(Error::config("grid requires at least 3 points"));
        }
        Ok(Self { min, max, n_points })
    }

    /// Grid spanning `center ± half_span`.
    pub fn centered(center: f64, half_span: f64, n_points: usize) -> Result<Self> {
        Self::new(center - half_span, center + half_span, n_points)
    }

    #[inline]
    pub fn min(&self) -> f64 {
        self.min
    }

    #[inline]
    pub fn max(&self) -> f64 {
        self.max
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n_points
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.n_points - 1) as f64
    }

    /// Node `k`. The last node is `max` exactly.
    #[inline]
    pub fn point(&self, k: usize) -> f64 {
        if k + 1 == self.n_points {
            self.max
        } else {
            self.min + k as f64 * self.spacing()
        }
    }

    /// Signed distance of node `k` from `center`, computed from the node
    /// index so that mirrored nodes of a centered grid give opposite offsets.
    #[inline]
    pub fn offset(&self, k: usize, center: f64) -> f64 {
        let last = (self.n_points - 1) as f64;
        let half = 0.5 * (self.max - self.min);
        (2.0 * k as f64 - last) / last * half + (0.5 * (self.min + self.max) - center)
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(move |k| self.point(k))
    }

    /// Closed-interval membership.
    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        x >= self.min && x <= self.max
    }

    /// Index of the node nearest to `x` (clamped to the grid).
    pub fn nearest(&self, x: f64) -> usize {
        let pos = (x - self.min) / self.spacing();
        if pos <= 0.0 {
            0
        } else {
            let k = libm::round(pos) as usize;
            k.min(self.n_points - 1)
        }
    }

    /// Cell `(k, frac)` with `x = point(k) + frac * spacing`, `0 <= frac <= 1`,
    /// or `None` outside the grid.
    pub fn locate(&self, x: f64) -> Option<(usize, f64)> {
        if !self.contains(x) {
            return None;
        }
        let pos = (x - self.min) / self.spacing();
        let k = (libm::floor(pos) as usize).min(self.n_points - 2);
        Some((k, (pos - k as f64).clamp(0.0, 1.0)))
    }

    /// Composite trapezoidal rule over the whole grid.
    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n_points);
        trapezoid_uniform(values, self.spacing())
    }

    /// Trapezoid weight of node `k`.
    #[inline]
    pub fn weight(&self, k: usize) -> f64 {
        if k == 0 || k + 1 == self.n_points {
            0.5 * self.spacing()
        } else {
            self.spacing()
        }
    }

    /// Linear interpolation of node values at `x`; zero outside the grid.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        match self.locate(x) {
            Some((k, frac)) => values[k] + frac * (values[k + 1] - values[k]),
            None => 0.0,
        }
    }
}

/// Composite trapezoidal rule for samples with uniform spacing `h`.
pub fn trapezoid_uniform(values: &[f64], h: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => h * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}
