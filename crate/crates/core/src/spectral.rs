//! Spin spectral density ρ(ω) and spectral hole burning.
//!
//! ρ is normalized per unit angular frequency, `∫ρ dω = 1` before burning.
//! Burning multiplies ρ by notch masks and never renormalizes: the missing
//! weight is the fraction of spins removed from the coupling.

use alloc::format;
use alloc::vec::Vec;

use crate::grid::FrequencyGrid;
use crate::units::{ghz, mhz};
use crate::{Error, Result};

/// Cavity and ensemble constants, all angular frequencies in rad/µs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Cavity mode ωc.
    pub omega_c: f64,
    /// Center of the spin distribution ωs.
    pub omega_s: f64,
    /// Collective coupling Ω = (Σ g_j²)^½.
    pub coupling: f64,
    /// Cavity loss κ (HWHM).
    pub kappa: f64,
    /// Single-spin loss γ.
    pub gamma: f64,
}

impl SystemParams {
    /// Validates the constants.
    ///
    /// `coupling` and `kappa` may be zero here (bare cavity, closed system);
    /// the experiment layer requires them positive.
    pub fn new(omega_c: f64, omega_s: f64, coupling: f64, kappa: f64, gamma: f64) -> Result<Self> {
        let all = [omega_c, omega_s, coupling, kappa, gamma];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("system parameters must be finite"));
        }
        if omega_c <= 0.0 || omega_s <= 0.0 {
            return Err(Error::config("omega_c and omega_s must be positive"));
        }
        if coupling < 0.0 || kappa < 0.0 || gamma < 0.0 {
            return Err(Error::config("coupling, kappa and gamma must be non-negative"));
        }
        Ok(Self {
            omega_c,
            omega_s,
            coupling,
            kappa,
            gamma,
        })
    }

    /// NV-ensemble constants: ωc = ωs = 2π·2.6915 GHz, Ω = 2π·8.56 MHz,
    /// κ = 2π·0.4 MHz, γ = 2π·1 kHz.
    pub fn nv_diamond() -> Self {
        Self {
            omega_c: ghz(2.6915),
            omega_s: ghz(2.6915),
            coupling: mhz(8.56),
            kappa: mhz(0.4),
            gamma: mhz(0.001),
        }
    }

    /// Ω > κ, the regime the default analysis settings assume.
    pub fn is_strong_coupling(&self) -> bool {
        self.coupling > self.kappa
    }

    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }
}

/// Tsallis q-Gaussian line shape given by center, FWHM and `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QGaussianSpec {
    pub center: f64,
    pub fwhm: f64,
    pub q: f64,
}

impl QGaussianSpec {
    pub fn new(center: f64, fwhm: f64, q: f64) -> Result<Self> {
        let spec = Self { center, fwhm, q };
        spec.validate()?;
        Ok(spec)
    }

    /// ωs = 2π·2.6915 GHz, γq = 2π·9.44 MHz, q = 1.39.
    pub fn nv_diamond() -> Self {
        Self {
            center: ghz(2.6915),
            fwhm: mhz(9.44),
            q: 1.39,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.q > 1.0 && self.q < 3.0) {
            return Err(Error::domain(format!("q = {} outside (1, 3)", self.q)));
        }
        if !(self.fwhm > 0.0 && self.fwhm.is_finite()) || !self.center.is_finite() {
            return Err(Error::domain("q-Gaussian needs finite center and fwhm > 0"));
        }
        Ok(())
    }

    /// Scale Δ of `[1 + (q-1) x²/Δ²]^{-1/(q-1)}` that puts the half maximum
    /// at `x = ±fwhm/2`.
    pub fn scale(&self) -> f64 {
        q_gaussian_scale(self.fwhm, self.q)
    }
}

fn q_gaussian_scale(fwhm: f64, q: f64) -> f64 {
    0.5 * fwhm * libm::sqrt((q - 1.0) / (libm::pow(2.0, q - 1.0) - 1.0))
}

/// Unnormalized q-Gaussian, 1 at `x = 0`.
#[inline]
fn q_gaussian_shape(x: f64, scale: f64, q: f64) -> f64 {
    let u = x / scale;
    libm::pow(1.0 + (q - 1.0) * u * u, -1.0 / (q - 1.0))
}

/// Functional form of a hole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HoleProfile {
    /// Smooth-edged notch; `edge` is the Fermi-Dirac temperature-like scale.
    FermiDirac {
        edge: f64,
    },
    Rectangular,
    /// Inverted q-Gaussian whose FWHM is the hole width.
    QGaussianNotch {
        q: f64,
    },
}

/// One spectral hole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoleSpec {
    /// ωh.
    pub center: f64,
    /// Δh, full width at half depth.
    pub width: f64,
    /// 1 drives the density to zero at the center.
    pub depth: f64,
    pub profile: HoleProfile,
}

impl HoleSpec {
    /// Full-depth Fermi-Dirac hole with edge scale `width / 20`.
    pub fn fermi_dirac(center: f64, width: f64) -> Self {
        Self {
            center,
            width,
            depth: 1.0,
            profile: HoleProfile::FermiDirac { edge: width / 20.0 },
        }
    }

    pub fn rectangular(center: f64, width: f64) -> Self {
        Self {
            center,
            width,
            depth: 1.0,
            profile: HoleProfile::Rectangular,
        }
    }

    pub fn q_gaussian_notch(center: f64, width: f64, q: f64) -> Self {
        Self {
            center,
            width,
            depth: 1.0,
            profile: HoleProfile::QGaussianNotch { q },
        }
    }

    pub fn with_depth(mut self, depth: f64) -> Self {
        self.depth = depth;
        self
    }

    pub fn with_center(mut self, center: f64) -> Self {
        self.center = center;
        self
    }

    /// Holes at `omega_s ± offset` sharing this hole's shape.
    pub fn symmetric_pair(&self, omega_s: f64, offset: f64) -> [HoleSpec; 2] {
        [self.with_center(omega_s - offset), self.with_center(omega_s + offset)]
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.depth) {
            return Err(Error::domain(format!("hole depth {} outside [0, 1]", self.depth)));
        }
        if !(self.width > 0.0 && self.width.is_finite()) || !self.center.is_finite() {
            return Err(Error::domain("hole needs a finite center and width > 0"));
        }
        match self.profile {
            HoleProfile::FermiDirac { edge } if !(edge > 0.0 && edge.is_finite()) => {
                Err(Error::domain("Fermi-Dirac edge scale must be positive"))
            }
            HoleProfile::QGaussianNotch { q } if !(q > 1.0 && q < 3.0) => {
                Err(Error::domain(format!("notch q = {q} outside (1, 3)")))
            }
            _ => Ok(()),
        }
    }

    /// The hole must be wider than the single-spin linewidth.
    pub fn check_against(&self, params: &SystemParams) -> Result<()> {
        if self.width <= params.gamma {
            return Err(Error::config(format!(
                "hole width {} must exceed the spin decay rate {}",
                self.width, params.gamma
            )));
        }
        Ok(())
    }

    /// Multiplicative mask in `[1 - depth, 1]`, equal to `1 - depth` at the center.
    pub fn mask(&self, omega: f64) -> f64 {
        let d = (omega - self.center).abs();
        let half = 0.5 * self.width;
        let notch = match self.profile {
            HoleProfile::FermiDirac { edge } => {
                let fermi = |x: f64| 1.0 / (libm::exp((x - half) / edge) + 1.0);
                fermi(d) / fermi(0.0)
            }
            HoleProfile::Rectangular => {
                if d <= half {
                    1.0
                } else {
                    0.0
                }
            }
            HoleProfile::QGaussianNotch { q } => q_gaussian_shape(d, q_gaussian_scale(self.width, q), q),
        };
        1.0 - self.depth * notch
    }
}

/// Tabulated spin density on a uniform grid.
///
/// Keeps the unburnt table and the list of holes so that [`value_at`]
/// evaluates the notch masks exactly between nodes.
///
/// [`value_at`]: SpectralDensity::value_at
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity {
    grid: FrequencyGrid,
    base: Vec<f64>,
    holes: Vec<HoleSpec>,
    values: Vec<f64>,
    integral: f64,
}

impl SpectralDensity {
    /// Wraps arbitrary non-negative samples (not normalized).
    pub fn from_values(grid: FrequencyGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::usage(format!(
                "{} density values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::domain("density values must be finite and non-negative"));
        }
        let integral = grid.trapezoid(&values);
        Ok(Self {
            grid,
            base: values.clone(),
            holes: Vec::new(),
            values,
            integral,
        })
    }

    /// Samples `f` on the grid and rescales to unit integral.
    pub fn from_fn_normalized(grid: FrequencyGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values: Vec<f64> = grid.points().map(f).collect();
        let raw = Self::from_values(grid, values)?;
        if raw.integral <= 0.0 {
            return Err(Error::domain("density has zero weight on the grid"));
        }
        let norm = raw.integral;
        Self::from_values(grid, raw.values.iter().map(|v| v / norm).collect())
    }

    /// All-zero density (bare cavity).
    pub fn empty(grid: FrequencyGrid) -> Self {
        let n = grid.len();
        Self {
            grid,
            base: alloc::vec![0.0; n],
            holes: Vec::new(),
            values: alloc::vec![0.0; n],
            integral: 0.0,
        }
    }

    #[inline]
    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Trapezoidal `∫ρ dω`.
    #[inline]
    pub fn integral(&self) -> f64 {
        self.integral
    }

    pub fn holes(&self) -> &[HoleSpec] {
        &self.holes
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// ρ(ω): linear interpolation of the unburnt table times the exact hole
    /// masks. Zero outside the grid. Agrees with [`values`] at the nodes.
    ///
    /// [`values`]: SpectralDensity::values
    pub fn value_at(&self, omega: f64) -> f64 {
        let base = self.grid.interpolate(&self.base, omega);
        self.holes.iter().fold(base, |acc, h| acc * h.mask(omega))
    }

    /// Centered-difference dρ/dω at node `k` (one-sided at the ends).
    pub fn slope_at_node(&self, k: usize) -> f64 {
        let v = &self.values;
        let h = self.grid.spacing();
        let last = v.len() - 1;
        match k {
            0 => (v[1] - v[0]) / h,
            k if k == last => (v[last] - v[last - 1]) / h,
            k => (v[k + 1] - v[k - 1]) / (2.0 * h),
        }
    }
}

/// Normalized q-Gaussian density on `grid`, truncated at the grid edges.
pub fn build_q_gaussian(spec: &QGaussianSpec, grid: &FrequencyGrid) -> Result<SpectralDensity> {
    spec.validate()?;
    let reach = 4.0 * spec.fwhm;
    if grid.min() > spec.center - reach || grid.max() < spec.center + reach {
        return Err(Error::config(format!(
            "grid [{}, {}] does not cover center ± 4·fwhm = [{}, {}]",
            grid.min(),
            grid.max(),
            spec.center - reach,
            spec.center + reach
        )));
    }
    let scale = spec.scale();
    let values: Vec<f64> = (0..grid.len())
        .map(|k| q_gaussian_shape(grid.offset(k, spec.center), scale, spec.q))
        .collect();
    let norm = grid.trapezoid(&values);
    SpectralDensity::from_values(*grid, values.into_iter().map(|v| v / norm).collect())
}

/// Applies `holes` on top of any holes already in `density`.
pub fn burn_holes(density: &SpectralDensity, holes: &[HoleSpec]) -> Result<SpectralDensity> {
    let grid = density.grid;
    for h in holes {
        h.validate()?;
        if !grid.contains(h.center) {
            return Err(Error::domain(format!(
                "hole center {} outside the density grid [{}, {}]",
                h.center,
                grid.min(),
                grid.max()
            )));
        }
        if h.width < 2.0 * grid.spacing() {
            return Err(Error::resolution(format!(
                "hole width {} is below two grid spacings ({})",
                h.width,
                2.0 * grid.spacing()
            )));
        }
    }
    let mut all = density.holes.clone();
    all.extend_from_slice(holes);
    let values: Vec<f64> = density
        .base
        .iter()
        .enumerate()
        .map(|(k, &b)| {
            let w = grid.point(k);
            all.iter().fold(b, |acc, h| acc * h.mask(w))
        })
        .collect();
    let integral = grid.trapezoid(&values);
    Ok(SpectralDensity {
        grid,
        base: density.base.clone(),
        holes: all,
        values,
        integral,
    })
}

/// Fraction of the spin weight missing from `after` relative to `before`.
pub fn removed_fraction(before: &SpectralDensity, after: &SpectralDensity) -> Result<f64> {
    if before.grid != after.grid {
        return Err(Error::usage("removed_fraction needs identical grids"));
    }
    if before.integral <= 0.0 {
        return Err(Error::domain("reference density has zero weight"));
    }
    let fraction = 1.0 - after.integral / before.integral;
    if fraction < -1e-12 {
        return Err(Error::usage("`after` carries more weight than `before`"));
    }
    Ok(fraction.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::mhz;

    fn nv_grid() -> FrequencyGrid {
        FrequencyGrid::centered(ghz(2.6915), mhz(50.0), 20001).unwrap()
    }

    #[test]
    fn q_gaussian_is_normalized_with_correct_fwhm() {
        let grid = nv_grid();
        let rho = build_q_gaussian(&QGaussianSpec::nv_diamond(), &grid).unwrap();
        assert!((rho.integral() - 1.0).abs() < 1e-6);

        let vals = rho.values();
        let (kmax, &vmax) = vals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        assert_eq!(kmax, grid.nearest(ghz(2.6915)));

        // Half-maximum crossings by linear interpolation.
        let half = 0.5 * vmax;
        let cross = |range: &mut dyn Iterator<Item = usize>| -> f64 {
            for k in range {
                let (a, b) = (vals[k], vals[k + 1]);
                if (a - half) * (b - half) <= 0.0 && a != b {
                    return grid.point(k) + (half - a) / (b - a) * grid.spacing();
                }
            }
            panic!("no crossing");
        };
        let left = cross(&mut (0..kmax));
        let right = cross(&mut (kmax..grid.len() - 1));
        let fwhm = right - left;
        assert!((fwhm - mhz(9.44)).abs() <= grid.spacing(), "fwhm {fwhm}");
    }

    #[test]
    fn q_gaussian_near_one_is_gaussian() {
        let grid = nv_grid();
        let fwhm = mhz(9.44);
        let spec = QGaussianSpec::new(ghz(2.6915), fwhm, 1.0 + 1e-6).unwrap();
        let rho = build_q_gaussian(&spec, &grid).unwrap();
        let sigma = fwhm / (2.0 * libm::sqrt(2.0 * core::f64::consts::LN_2));
        let gauss = SpectralDensity::from_fn_normalized(grid, |w| {
            let x = (w - spec.center) / sigma;
            libm::exp(-0.5 * x * x)
        })
        .unwrap();
        for k in 0..grid.len() {
            if (grid.point(k) - spec.center).abs() <= 2.0 * fwhm {
                let (a, b) = (rho.values()[k], gauss.values()[k]);
                assert!(((a - b) / b).abs() < 1e-4, "k={k} {a} {b}");
            }
        }
    }

    #[test]
    fn q_gaussian_symmetric_on_centered_grid() {
        let grid = nv_grid();
        let rho = build_q_gaussian(&QGaussianSpec::nv_diamond(), &grid).unwrap();
        let n = grid.len();
        for k in 0..n / 2 {
            let (a, b) = (rho.values()[k], rho.values()[n - 1 - k]);
            assert!((a - b).abs() <= 1e-12 * a.max(b), "{k}");
        }
    }

    #[test]
    fn q_gaussian_errors() {
        let grid = nv_grid();
        let mut spec = QGaussianSpec::nv_diamond();
        spec.q = 3.0;
        assert!(matches!(build_q_gaussian(&spec, &grid), Err(Error::Domain(_))));
        spec.q = 1.0;
        assert!(matches!(build_q_gaussian(&spec, &grid), Err(Error::Domain(_))));
        let narrow = FrequencyGrid::centered(ghz(2.6915), mhz(30.0), 1001).unwrap();
        assert!(matches!(
            build_q_gaussian(&QGaussianSpec::nv_diamond(), &narrow),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn zero_depth_is_identity() {
        let grid = nv_grid();
        let rho = build_q_gaussian(&QGaussianSpec::nv_diamond(), &grid).unwrap();
        let hole = HoleSpec::fermi_dirac(ghz(2.6915) + mhz(8.56), mhz(0.7)).with_depth(0.0);
        let out = burn_holes(&rho, &[hole]).unwrap();
        assert_eq!(out.values(), rho.values());
        assert_eq!(removed_fraction(&rho, &out).unwrap(), 0.0);
    }

    #[test]
    fn full_depth_hole_zeroes_center() {
        let grid = nv_grid();
        let rho = build_q_gaussian(&QGaussianSpec::nv_diamond(), &grid).unwrap();
        let ws = ghz(2.6915);
        let holes = HoleSpec::fermi_dirac(0.0, mhz(0.7)).symmetric_pair(ws, mhz(8.56));
        let out = burn_holes(&rho, &holes).unwrap();
        for h in &holes {
            assert_eq!(out.value_at(h.center), 0.0);
            let k = grid.nearest(h.center);
            assert!(out.values()[k] <= 1e-6 * rho.max_value());
        }
        let frac = removed_fraction(&rho, &out).unwrap();
        assert!(frac > 0.0 && frac < 0.03, "{frac}");
        // the source density is untouched
        assert!(rho.holes().is_empty());
    }

    #[test]
    fn rectangular_hole_on_flat_density() {
        let grid = FrequencyGrid::new(0.0, 100.0, 10001).unwrap();
        let rho0 = 0.01;
        let flat = SpectralDensity::from_values(grid, alloc::vec![rho0; grid.len()]).unwrap();
        let width = 3.3;
        let out = burn_holes(&flat, &[HoleSpec::rectangular(47.123, width)]).unwrap();
        let lost = flat.integral() - out.integral();
        assert!((lost - rho0 * width).abs() <= rho0 * grid.spacing(), "{lost}");
    }

    #[test]
    fn hole_errors() {
        let grid = nv_grid();
        let rho = build_q_gaussian(&QGaussianSpec::nv_diamond(), &grid).unwrap();
        let ws = ghz(2.6915);
        let outside = HoleSpec::fermi_dirac(ws + mhz(60.0), mhz(0.7));
        assert!(matches!(burn_holes(&rho, &[outside]), Err(Error::Domain(_))));
        let deep = HoleSpec::fermi_dirac(ws, mhz(0.7)).with_depth(1.5);
        assert!(matches!(burn_holes(&rho, &[deep]), Err(Error::Domain(_))));
        let thin = HoleSpec::fermi_dirac(ws, 1.5 * grid.spacing());
        assert!(matches!(burn_holes(&rho, &[thin]), Err(Error::Resolution(_))));
        let params = SystemParams::nv_diamond().with_gamma(mhz(1.0));
        assert!(HoleSpec::fermi_dirac(ws, mhz(0.7)).check_against(&params).is_err());
    }

    #[test]
    fn removed_fraction_bounds() {
        let grid = nv_grid();
        let rho = build_q_gaussian(&QGaussianSpec::nv_diamond(), &grid).unwrap();
        assert_eq!(removed_fraction(&rho, &rho).unwrap(), 0.0);
        assert_eq!(removed_fraction(&rho, &SpectralDensity::empty(grid)).unwrap(), 1.0);
        let other = SpectralDensity::empty(FrequencyGrid::new(0.0, 1.0, 11).unwrap());
        assert!(matches!(removed_fraction(&rho, &other), Err(Error::Usage(_))));
    }

    #[test]
    fn profiles_stay_within_depth_bounds() {
        let c = 10.0;
        for profile in [
            HoleProfile::FermiDirac { edge: 0.05 },
            HoleProfile::Rectangular,
            HoleProfile::QGaussianNotch { q: 1.39 },
        ] {
            let h = HoleSpec {
                center: c,
                width: 1.0,
                depth: 0.8,
                profile,
            };
            assert!((h.mask(c) - 0.2).abs() < 1e-12);
            for i in 0..400 {
                let m = h.mask(c - 5.0 + i as f64 * 0.025);
                assert!((0.2 - 1e-12..=1.0).contains(&m));
            }
        }
    }
}
