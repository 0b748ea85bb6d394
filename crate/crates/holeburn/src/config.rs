//! Experiment configuration (TOML).
//!
//! Every frequency is entered as f/2π in MHz or GHz and converted to rad/µs
//! once, when the core types are built. Times are entered in ns or µs.

use std::path::Path;

use holeburn_core::spectral::{HoleProfile, HoleSpec, QGaussianSpec, SystemParams};
use holeburn_core::units::{ghz, mhz, ns};
use holeburn_core::FrequencyGrid;
use serde::{Deserialize, Serialize};

use crate::AppError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemConfig,
    pub density: DensityConfig,
    #[serde(default)]
    pub holes: Vec<HoleConfig>,
    #[serde(default)]
    pub probe: ProbeConfig,
    #[serde(default)]
    pub resonances: ResonanceConfig,
    #[serde(default)]
    pub scan: ScanConfig,
    #[serde(default)]
    pub dynamics: DynamicsConfig,
    #[serde(default)]
    pub drive: DriveConfig,
    #[serde(default)]
    pub fit: FitConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub omega_c_ghz: f64,
    pub omega_s_ghz: f64,
    pub coupling_mhz: f64,
    pub kappa_mhz: f64,
    #[serde(default = "default_gamma")]
    pub gamma_mhz: f64,
}

fn default_gamma() -> f64 {
    0.001
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityConfig {
    pub fwhm_mhz: f64,
    pub q: f64,
    /// Grid half span around ωs.
    #[serde(default = "default_density_span")]
    pub half_span_mhz: f64,
    #[serde(default = "default_density_points")]
    pub n_points: usize,
}

fn default_density_span() -> f64 {
    50.0
}

fn default_density_points() -> usize {
    20001
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    FermiDirac,
    Rectangular,
    QGaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoleConfig {
    /// Hole center relative to ωs.
    pub detuning_mhz: f64,
    pub width_mhz: f64,
    #[serde(default = "one")]
    pub depth: f64,
    #[serde(default = "default_profile")]
    pub profile: ProfileKind,
    /// Fermi-Dirac edge scale, `width / 20` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_mhz: Option<f64>,
    /// q of the q-Gaussian notch, 1.39 when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notch_q: Option<f64>,
}

fn one() -> f64 {
    1.0
}

fn default_profile() -> ProfileKind {
    ProfileKind::FermiDirac
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeConfig {
    pub half_span_mhz: f64,
    pub step_mhz: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            half_span_mhz: 25.0,
            step_mhz: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResonanceConfig {
    pub prominence: f64,
    pub condition_i_tol: f64,
    pub condition_ii_tol: f64,
}

impl Default for ResonanceConfig {
    fn default() -> Self {
        let d = holeburn_core::response::ResonanceOptions::default();
        Self {
            prominence: d.prominence,
            condition_i_tol: d.condition_i_tol,
            condition_ii_tol: d.condition_ii_tol,
        }
    }
}

/// Hole half-spacings ω̄ from `min` to `max` inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub min_mhz: f64,
    pub max_mhz: f64,
    pub step_mhz: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            min_mhz: 0.0,
            max_mhz: 16.0,
            step_mhz: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DynamicsConfig {
    pub dt_ns: f64,
    pub t_max_us: f64,
    /// Overrides the width of every hole in the time-domain experiments.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hole_width_mhz: Option<f64>,
    /// Write every n-th sample of the time series.
    pub output_every: usize,
    pub dump_kernel: bool,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self {
            dt_ns: 0.1,
            t_max_us: 4.0,
            hole_width_mhz: None,
            output_every: 1,
            dump_kernel: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriveConfig {
    pub n_pulses: usize,
    pub pulse_ns: f64,
    pub amplitude: f64,
    pub phase_flip: bool,
}

impl Default for DriveConfig {
    fn default() -> Self {
        Self {
            n_pulses: 11,
            pulse_ns: 52.0,
            amplitude: 500.0,
            phase_flip: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitWindow {
    pub window_us: [f64; 2],
    /// Fit only the late segment after a two-segment changepoint search.
    #[serde(default)]
    pub asymptotic: bool,
}

impl FitWindow {
    const fn new(start: f64, end: f64, asymptotic: bool) -> Self {
        Self {
            window_us: [start, end],
            asymptotic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitConfig {
    pub decay_reference: FitWindow,
    pub decay_holes: FitWindow,
    pub drive_reference: FitWindow,
    pub drive_holes: FitWindow,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            decay_reference: FitWindow::new(0.05, 0.4, false),
            decay_holes: FitWindow::new(0.05, 4.0, true),
            drive_reference: FitWindow::new(0.6, 1.5, false),
            drive_holes: FitWindow::new(0.6, 4.0, true),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub dt_ns: f64,
    pub t_max_us: f64,
    pub n_bins: usize,
    pub tolerance: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            dt_ns: 0.25,
            t_max_us: 0.5,
            n_bins: 2000,
            tolerance: 1e-3,
        }
    }
}

impl ExperimentConfig {
    /// NV-ensemble constants with two 0.7 MHz holes at ωs ± Ω, and 1.4 MHz
    /// holes for the time-domain runs.
    pub fn nv_diamond() -> Self {
        let hole = |detuning_mhz| HoleConfig {
            detuning_mhz,
            width_mhz: 0.7,
            depth: 1.0,
            profile: ProfileKind::FermiDirac,
            edge_mhz: None,
            notch_q: None,
        };
        Self {
            system: SystemConfig {
                omega_c_ghz: 2.6915,
                omega_s_ghz: 2.6915,
                coupling_mhz: 8.56,
                kappa_mhz: 0.4,
                gamma_mhz: default_gamma(),
            },
            density: DensityConfig {
                fwhm_mhz: 9.44,
                q: 1.39,
                half_span_mhz: default_density_span(),
                n_points: default_density_points(),
            },
            holes: vec![hole(-8.56), hole(8.56)],
            probe: ProbeConfig::default(),
            resonances: ResonanceConfig::default(),
            scan: ScanConfig::default(),
            dynamics: DynamicsConfig {
                hole_width_mhz: Some(1.4),
                ..DynamicsConfig::default()
            },
            drive: DriveConfig::default(),
            fit: FitConfig::default(),
            verify: VerifyConfig::default(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, AppError> {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, AppError> {
        let cfg: Self = toml::from_str(text).map_err(|e| AppError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// TOML with every default written out.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Replace every hole (and the time-domain override) width.
    pub fn set_hole_width(&mut self, width_mhz: f64) {
        for h in &mut self.holes {
            h.width_mhz = width_mhz;
        }
        if self.dynamics.hole_width_mhz.is_some() {
            self.dynamics.hole_width_mhz = Some(width_mhz);
        }
    }

    /// Move every hole to `±offset`, keeping the side it was on.
    pub fn set_hole_offset(&mut self, offset_mhz: f64) {
        for h in &mut self.holes {
            h.detuning_mhz = if h.detuning_mhz < 0.0 { -offset_mhz } else { offset_mhz };
        }
    }

    /// Field-level checks, then the core constructors' own checks.
    pub fn validate(&self) -> Result<(), AppError> {
        let s = &self.system;
        positive("system.coupling_mhz", s.coupling_mhz)?;
        positive("system.kappa_mhz", s.kappa_mhz)?;
        non_negative("system.gamma_mhz", s.gamma_mhz)?;
        positive("density.half_span_mhz", self.density.half_span_mhz)?;
        positive("probe.half_span_mhz", self.probe.half_span_mhz)?;
        positive("probe.step_mhz", self.probe.step_mhz)?;
        if self.probe.half_span_mhz >= self.density.half_span_mhz {
            return Err(field(
                "probe.half_span_mhz",
                "must be smaller than density.half_span_mhz",
            ));
        }
        positive("scan.step_mhz", self.scan.step_mhz)?;
        non_negative("scan.min_mhz", self.scan.min_mhz)?;
        if self.scan.max_mhz < self.scan.min_mhz {
            return Err(field("scan.max_mhz", "must not be below scan.min_mhz"));
        }
        positive("dynamics.dt_ns", self.dynamics.dt_ns)?;
        positive("dynamics.t_max_us", self.dynamics.t_max_us)?;
        if self.dynamics.output_every == 0 {
            return Err(field("dynamics.output_every", "must be at least 1"));
        }
        if let Some(w) = self.dynamics.hole_width_mhz {
            positive("dynamics.hole_width_mhz", w)?;
        }
        if self.drive.n_pulses == 0 {
            return Err(field("drive.n_pulses", "must be at least 1"));
        }
        positive("drive.pulse_ns", self.drive.pulse_ns)?;
        finite("drive.amplitude", self.drive.amplitude)?;
        for (name, w) in [
            ("fit.decay_reference", &self.fit.decay_reference),
            ("fit.decay_holes", &self.fit.decay_holes),
            ("fit.drive_reference", &self.fit.drive_reference),
            ("fit.drive_holes", &self.fit.drive_holes),
        ] {
            let [a, b] = w.window_us;
            if !(a >= 0.0 && b > a) {
                return Err(field(name, "window_us must satisfy 0 <= start < end"));
            }
        }
        positive("verify.dt_ns", self.verify.dt_ns)?;
        positive("verify.t_max_us", self.verify.t_max_us)?;
        positive("verify.tolerance", self.verify.tolerance)?;
        if self.verify.n_bins == 0 {
            return Err(field("verify.n_bins", "must be at least 1"));
        }

        let params = self.system_params()?;
        self.q_gaussian()?;
        let grid = self.density_grid()?;
        FrequencyGrid::new(grid.min(), grid.max(), grid.len()).map_err(|e| field("density", &e.to_string()))?;
        self.probe_grid()?;
        for (i, h) in self.holes.iter().enumerate() {
            let spec = self.hole_spec(h, None);
            spec.validate()
                .and_then(|_| spec.check_against(&params))
                .map_err(|e| field(&format!("holes[{i}]"), &e.to_string()))?;
            if !grid.contains(spec.center) {
                return Err(field(&format!("holes[{i}].detuning_mhz"), "outside the density grid"));
            }
        }
        Ok(())
    }

    pub fn system_params(&self) -> Result<SystemParams, AppError> {
        let s = &self.system;
        SystemParams::new(
            ghz(s.omega_c_ghz),
            ghz(s.omega_s_ghz),
            mhz(s.coupling_mhz),
            mhz(s.kappa_mhz),
            mhz(s.gamma_mhz),
        )
        .map_err(|e| field("system", &e.to_string()))
    }

    pub fn q_gaussian(&self) -> Result<QGaussianSpec, AppError> {
        QGaussianSpec::new(ghz(self.system.omega_s_ghz), mhz(self.density.fwhm_mhz), self.density.q)
            .map_err(|e| field("density", &e.to_string()))
    }

    pub fn density_grid(&self) -> Result<FrequencyGrid, AppError> {
        FrequencyGrid::centered(
            ghz(self.system.omega_s_ghz),
            mhz(self.density.half_span_mhz),
            self.density.n_points,
        )
        .map_err(|e| field("density", &e.to_string()))
    }

    pub fn probe_grid(&self) -> Result<FrequencyGrid, AppError> {
        let p = &self.probe;
        let n = (2.0 * p.half_span_mhz / p.step_mhz).round() as usize + 1;
        FrequencyGrid::centered(ghz(self.system.omega_s_ghz), mhz(p.half_span_mhz), n)
            .map_err(|e| field("probe", &e.to_string()))
    }

    pub fn scan_offsets(&self) -> Vec<f64> {
        let s = &self.scan;
        let n = ((s.max_mhz - s.min_mhz) / s.step_mhz + 1e-9).floor() as usize + 1;
        (0..n)
            .map(|i| ((s.min_mhz + i as f64 * s.step_mhz) * 1e9).round() / 1e9)
            .collect()
    }

    /// Core hole spec; `width_mhz` replaces the configured width when given.
    pub fn hole_spec(&self, h: &HoleConfig, width_mhz: Option<f64>) -> HoleSpec {
        let width = mhz(width_mhz.unwrap_or(h.width_mhz));
        let profile = match h.profile {
            // an explicit edge keeps its ratio to the width under overrides
            ProfileKind::FermiDirac => HoleProfile::FermiDirac {
                edge: h.edge_mhz.map_or(width / 20.0, |e| mhz(e) * width / mhz(h.width_mhz)),
            },
            ProfileKind::Rectangular => HoleProfile::Rectangular,
            ProfileKind::QGaussian => HoleProfile::QGaussianNotch {
                q: h.notch_q.unwrap_or(1.39),
            },
        };
        HoleSpec {
            center: ghz(self.system.omega_s_ghz) + mhz(h.detuning_mhz),
            width,
            depth: h.depth,
            profile,
        }
    }

    /// Holes for the stationary experiments.
    pub fn stationary_holes(&self) -> Vec<HoleSpec> {
        self.holes.iter().map(|h| self.hole_spec(h, None)).collect()
    }

    /// Holes for the time-domain experiments.
    pub fn dynamic_holes(&self) -> Vec<HoleSpec> {
        let w = self.dynamics.hole_width_mhz;
        self.holes.iter().map(|h| self.hole_spec(h, w)).collect()
    }

    pub fn dt(&self) -> f64 {
        ns(self.dynamics.dt_ns)
    }
}

fn field(name: &str, msg: &str) -> AppError {
    AppError::Config(format!("{name}: {msg}"))
}

fn finite(name: &str, v: f64) -> Result<(), AppError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(field(name, "must be finite"))
    }
}

fn positive(name: &str, v: f64) -> Result<(), AppError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(field(name, &format!("must be positive (got {v})")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<(), AppError> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(field(name, &format!("must be non-negative (got {v})")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_and_partial_files_are_rejected() {
        assert!(matches!(ExperimentConfig::parse(""), Err(AppError::Config(_))));
        let text = ExperimentConfig::nv_diamond()
            .to_toml()
            .replace("[density]", "[densty]");
        assert!(ExperimentConfig::parse(&text).is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = ExperimentConfig::nv_diamond().to_toml() + "\n[extra]\nx = 1\n";
        assert!(ExperimentConfig::parse(&text).is_err());
        let text = ExperimentConfig::nv_diamond()
            .to_toml()
            .replace("kappa_mhz", "kappa_mhz = 0.4\nkapa_mhz");
        assert!(ExperimentConfig::parse(&text).is_err());
    }

    #[test]
    fn minimal_file_fills_defaults() {
        let text = "[system]\nomega_c_ghz = 2.6915\nomega_s_ghz = 2.6915\ncoupling_mhz = 8.56\nkappa_mhz = 0.4\n\n[density]\nfwhm_mhz = 9.44\nq = 1.39\n";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert!(cfg.holes.is_empty());
        assert_eq!(cfg.dynamics, DynamicsConfig::default());
        assert_eq!(cfg.system_params().unwrap(), SystemParams::nv_diamond());
    }

    #[test]
    fn shipped_config_matches_defaults() {
        let cfg = ExperimentConfig::parse(include_str!("../configs/nv_diamond.toml")).unwrap();
        assert_eq!(cfg, ExperimentConfig::nv_diamond());
    }

    #[test]
    fn round_trip_is_identity() {
        let mut cfg = ExperimentConfig::nv_diamond();
        cfg.holes[0].edge_mhz = Some(0.05);
        cfg.holes[1].profile = ProfileKind::QGaussian;
        cfg.holes[1].notch_q = Some(1.2);
        let again = ExperimentConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn field_errors_name_the_field() {
        let mut cfg = ExperimentConfig::nv_diamond();
        cfg.system.kappa_mhz = 0.0;
        let msg = cfg.validate().unwrap_err().to_string();
        assert!(msg.contains("system.kappa_mhz"), "{msg}");
        let mut cfg = ExperimentConfig::nv_diamond();
        cfg.holes[0].detuning_mhz = 80.0;
        let msg = cfg.validate().unwrap_err().to_string();
        assert!(msg.contains("holes[0]"), "{msg}");
        let mut cfg = ExperimentConfig::nv_diamond();
        cfg.holes[0].width_mhz = 0.0005;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn overrides_and_offsets() {
        let mut cfg = ExperimentConfig::nv_diamond();
        cfg.set_hole_offset(3.0);
        cfg.set_hole_width(1.0);
        assert_eq!(cfg.holes[0].detuning_mhz, -3.0);
        assert_eq!(cfg.holes[1].detuning_mhz, 3.0);
        assert_eq!(cfg.dynamics.hole_width_mhz, Some(1.0));
        let h = cfg.dynamic_holes();
        assert_eq!(h[0].width, mhz(1.0));
        assert_eq!(cfg.scan_offsets().len(), 161);
        assert_eq!(cfg.scan_offsets()[3], 0.3);
        assert_eq!(cfg.scan_offsets()[160], 16.0);
    }
}
