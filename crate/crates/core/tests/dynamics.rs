mod common;

use common::*;
use holeburn_core::analysis::{fit_asymptotic_decay_rate, fit_decay_rate};
use holeburn_core::dynamics::{
    build_kernel, make_pulse_train, single_photon_decay, solve_spin_bins, solve_volterra, DriveSignal,
};
use holeburn_core::spectral::{QGaussianSpec, SystemParams};
use holeburn_core::units::{mhz, ns};
use holeburn_core::Complex64;
use rustfft::FftPlanner;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Kernel of the truncated q-Gaussian by a direct FFT of analytically
/// sampled values, independent of the crate's density table and quadrature.
#[test]
fn kernel_matches_fft_oracle() {
    let p = SystemParams::nv_diamond().with_gamma(0.0);
    let spec = QGaussianSpec::nv_diamond();
    let m = 1usize << 17;
    let dt = ns(1.0);
    let dw = std::f64::consts::TAU / (m as f64 * dt);
    let half = mhz(50.0);
    let scale = spec.scale();
    let mut buf: Vec<rustfft::num_complex::Complex64> = (0..m)
        .map(|k| {
            let x = (k as f64 - (m / 2) as f64) * dw;
            let v = if x.abs() <= half {
                let u = x / scale;
                (1.0 + (spec.q - 1.0) * u * u).powf(-1.0 / (spec.q - 1.0))
            } else {
                0.0
            };
            rustfft::num_complex::Complex64::new(v, 0.0)
        })
        .collect();
    let norm: f64 = buf.iter().map(|z| z.re).sum::<f64>() * dw;
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let g2 = p.coupling * p.coupling;
    let oracle = |j: usize| {
        let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
        buf[j] * (sign * dw / norm * g2)
    };

    let t_max = 2.0;
    let kern = build_kernel(&nv_density(), &p, dt, t_max).unwrap();
    let k0 = kern.values()[0].norm();
    for (j, z) in kern.values().iter().enumerate() {
        let o = oracle(j);
        let diff = ((z.re - o.re).powi(2) + (z.im - o.im).powi(2)).sqrt();
        assert!(diff < 1e-4 * k0, "t = {} µs: {z} vs {o}", j as f64 * dt);
    }

    let j = (std::f64::consts::TAU / spec.fwhm / dt).round() as usize;
    assert!(kern.values()[j].norm() / k0 < 0.5);
}

#[test]
fn symmetric_kernel_is_real() {
    let p = SystemParams::nv_diamond();
    for rho in [nv_density(), burnt_density(0.7)] {
        let kern = build_kernel(&rho, &p, ns(0.5), 1.0).unwrap();
        let k0 = kern.values()[0].norm();
        assert!((k0 - p.coupling.powi(2) * rho.integral()).abs() < 1e-9 * k0);
        for z in kern.values() {
            assert!(z.im.abs() < 1e-9 * k0, "{z}");
            assert!(z.norm() <= k0 * (1.0 + 1e-12));
        }
    }
}

#[test]
fn volterra_agrees_with_spin_bins() {
    let p = SystemParams::nv_diamond();
    let dt = ns(0.25);
    let t_max = 0.5;
    let drive = make_pulse_train(3, ns(52.0), Complex64::new(5.0, 0.0), true).unwrap();
    for rho in [nv_density(), burnt_density(1.4)] {
        for (a0, eta) in [(one(), DriveSignal::none()), (Complex64::new(0.0, 0.0), drive.clone())] {
            let kern = build_kernel(&rho, &p, dt, t_max).unwrap();
            let v = solve_volterra(&kern, &p, &eta, a0, dt, t_max).unwrap();
            let b = solve_spin_bins(&rho, &p, &eta, a0, 2000, dt, t_max, false).unwrap();
            let scale = v.amplitudes.iter().fold(1.0f64, |m, z| m.max(z.norm()));
            let err = v
                .amplitudes
                .iter()
                .zip(&b.amplitudes)
                .fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
            assert!(err < 1e-3 * scale, "{err} (scale {scale})");
        }
    }
}

#[test]
fn bin_solver_dissipates_monotonically() {
    let p = SystemParams::nv_diamond();
    let s = solve_spin_bins(
        &burnt_density(1.4),
        &p,
        &DriveSignal::none(),
        one(),
        500,
        ns(0.25),
        0.5,
        true,
    )
    .unwrap();
    let e = s.excitation().unwrap();
    assert!((e[0] - 1.0).abs() < 1e-15);
    for w in e.windows(2) {
        assert!(w[1] <= w[0] + 1e-9, "{} -> {}", w[0], w[1]);
    }
}

#[test]
fn volterra_is_second_order() {
    let p = SystemParams::nv_diamond();
    let rho = nv_density();
    let t_max = 0.5;
    let run = |dt: f64| {
        let kern = build_kernel(&rho, &p, dt, t_max).unwrap();
        solve_volterra(&kern, &p, &DriveSignal::none(), one(), dt, t_max)
            .unwrap()
            .amplitudes
    };
    let dt = ns(1.0);
    let reference = run(dt / 8.0);
    let err = |a: &[Complex64], stride: usize| {
        a.iter()
            .enumerate()
            .map(|(i, z)| (z - reference[i * stride]).norm())
            .fold(0.0, f64::max)
    };
    let e1 = err(&run(dt), 8);
    let e2 = err(&run(dt / 2.0), 4);
    let ratio = e1 / e2;
    assert!((3.5..=4.5).contains(&ratio), "{e1} {e2} {ratio}");
}

#[test]
fn rates_are_insensitive_to_small_spin_loss() {
    // The slow hole mode is largely spin-like, so N can pick up to 2γ.
    let dt = ns(0.5);
    let base = SystemParams::nv_diamond();
    let mut bare = Vec::new();
    let mut holes = Vec::new();
    let gammas: Vec<f64> = [0.0, 1.0, 10.0].iter().map(|k| mhz(k * 1e-3)).collect();
    for &g in &gammas {
        let p = base.with_gamma(g);
        let n = single_photon_decay(&nv_density(), &p, dt, 0.5).unwrap();
        bare.push(fit_decay_rate(&n, (0.05, 0.4)).unwrap().gamma_total);
        let n = single_photon_decay(&burnt_density(1.4), &p, dt, 3.0).unwrap();
        holes.push(fit_decay_rate(&n, (1.0, 3.0)).unwrap().gamma_total);
    }
    for set in [&bare, &holes] {
        for (rate, g) in set.iter().zip(&gammas) {
            assert!((rate - set[0]).abs() <= 2.0 * g + 0.01 * set[0], "{set:?}");
        }
    }
}

#[test]
fn holes_slow_the_asymptotic_decay_below_kappa() {
    let p = SystemParams::nv_diamond();
    let n = single_photon_decay(&burnt_density(1.4), &p, ns(1.0), 4.0).unwrap();
    let fit = fit_asymptotic_decay_rate(&n, (0.05, 4.0)).unwrap();
    assert!(fit.gamma_total < p.kappa, "{}", fit.gamma_total / p.kappa);
}
