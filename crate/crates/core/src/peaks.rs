//! Local-maximum detection on uniformly sampled curves.

use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub index: usize,
    pub value: f64,
    /// Topographic prominence: height above the higher of the two lowest
    /// points separating it from taller peaks (or the curve ends).
    pub prominence: f64,
}

/// Interior 3-point maxima (`y[i-1] < y[i] >= y[i+1]`) with prominence at
/// least `min_prominence`, in index order.
pub fn find_peaks(y: &[f64], min_prominence: f64) -> Vec<Peak> {
    if y.len() < 3 {
        return Vec::new();
    }
    (1..y.len() - 1)
        .filter(|&i| y[i] > y[i - 1] && y[i] >= y[i + 1])
        .map(|i| Peak {
            index: i,
            value: y[i],
            prominence: prominence(y, i),
        })
        .filter(|p| p.prominence >= min_prominence)
        .collect()
}

fn prominence(y: &[f64], i: usize) -> f64 {
    let h = y[i];
    let mut left_min = h;
    for &v in y[..i].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &y[i + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

/// Vertex offset (in samples, within `[-0.5, 0.5]`) of the parabola through
/// `y[i-1], y[i], y[i+1]`.
pub fn parabolic_offset(y: &[f64], i: usize) -> f64 {
    if i == 0 || i + 1 >= y.len() {
        return 0.0;
    }
    let (a, b, c) = (y[i - 1], y[i], y[i + 1]);
    let denom = a - 2.0 * b + c;
    if denom >= 0.0 {
        return 0.0;
    }
    (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
}

/// Parabola vertex `(offset, height)` through the three samples around `i`.
pub fn parabolic_vertex(y: &[f64], i: usize) -> (f64, f64) {
    let off = parabolic_offset(y, i);
    if off == 0.0 {
        return (0.0, y[i]);
    }
    let (a, b, c) = (y[i - 1], y[i], y[i + 1]);
    (off, b - 0.25 * (a - c) * off)
}
