use alloc::vec::Vec;

use num_complex::Complex64;

use crate::{Error, Result};

/// Constant drive amplitude on `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSegment {
    pub start: f64,
    pub end: f64,
    pub amplitude: Complex64,
}

/// Piecewise-constant drive η(t), zero outside its segments.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DriveSignal {
    segments: Vec<DriveSegment>,
}

impl DriveSignal {
    pub fn new(segments: Vec<DriveSegment>) -> Result<Self> {
        for s in &segments {
            if !(s.start.is_finite() && s.end.is_finite() && s.start < s.end) {
                return Err(Error::usage("drive segment needs finite start < end"));
            }
            if !(s.amplitude.re.is_finite() && s.amplitude.im.is_finite()) {
                return Err(Error::usage("drive amplitude must be finite"));
            }
        }
        if segments.windows(2).any(|w| w[1].start < w[0].end) {
            return Err(Error::usage("drive segments must be time-ordered and non-overlapping"));
        }
        Ok(Self { segments })
    }

    /// No drive.
    pub fn none() -> Self {
        Self::default()
    }

    pub fn segments(&self) -> &[DriveSegment] {
        &self.segments
    }

    pub fn end_time(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.end)
    }

    pub fn is_zero(&self) -> bool {
        self.segments.iter().all(|s| s.amplitude == Complex64::new(0.0, 0.0))
    }

    pub fn amplitude_at(&self, t: f64) -> Complex64 {
        self.segments
            .iter()
            .find(|s| t >= s.start && t < s.end)
            .map_or(Complex64::new(0.0, 0.0), |s| s.amplitude)
    }

    /// Exact `∫_a^b η(t) dt` for `a <= b`.
    pub fn integral(&self, a: f64, b: f64) -> Complex64 {
        self.segments
            .iter()
            .filter(|s| s.end > a && s.start < b)
            .map(|s| s.amplitude * (s.end.min(b) - s.start.max(a)))
            .sum()
    }

    /// Every amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            segments: self
                .segments
                .iter()
                .map(|s| DriveSegment {
                    amplitude: s.amplitude * factor,
                    ..*s
                })
                .collect(),
        }
    }
}

/// `n_pulses` contiguous rectangles of length `duration` starting at t = 0.
/// With `phase_flip` the sign alternates `+η, −η, +η, ...`.
pub fn make_pulse_train(n_pulses: usize, duration: f64, amplitude: Complex64, phase_flip: bool) -> Result<DriveSignal> {
    if n_pulses == 0 {
        return Err(Error::usage("pulse train needs at least one pulse"));
    }
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::usage("pulse duration must be positive"));
    }
    let segments = (0..n_pulses)
        .map(|k| DriveSegment {
            start: k as f64 * duration,
            end: (k + 1) as f64 * duration,
            amplitude: if phase_flip && k % 2 == 1 {
                -amplitude
            } else {
                amplitude
            },
        })
        .collect();
    DriveSignal::new(segments)
}
