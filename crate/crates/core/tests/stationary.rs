mod common;

use common::*;
use holeburn_core::analysis::{gamma_estimate, peak_enhancement, rabi_splitting};
use holeburn_core::response::{find_resonances, resonances_in, transmission, transmission_spectrum, ResonanceOptions};
use holeburn_core::spectral::{build_q_gaussian, burn_holes, removed_fraction, QGaussianSpec, SystemParams};
use holeburn_core::units::{mhz, to_mhz};
use holeburn_core::FrequencyGrid;

#[test]
fn center_transmission_matches_symmetry_point_formula() {
    let p = SystemParams::nv_diamond();
    let rho = nv_density();
    let t = transmission(&rho, &p, p.omega_s).unwrap().norm_sqr();
    let r = rho.value_at(p.omega_s);
    let want = (p.kappa / (p.kappa + std::f64::consts::PI * p.coupling * p.coupling * r)).powi(2);
    assert!((t - want).abs() < 1e-9 * want, "{t} {want}");
    assert!(t < 1e-3);
}

#[test]
fn polariton_peaks_and_resonance_flags() {
    let p = SystemParams::nv_diamond();
    let opts = ResonanceOptions::default();
    let probe = probe(20.0, 0.01);

    let rho = nv_density();
    let bare = transmission_spectrum(&rho, &p, &probe).unwrap();
    let res = resonances_in(&bare, &rho, &p, &opts).unwrap();
    assert_eq!(res.len(), 2, "{res:?}");
    assert!(res.iter().all(|r| !r.full_resonance));
    for r in &res {
        let off = to_mhz((r.omega - p.omega_s).abs());
        assert!((off - 8.56).abs() < 1.5, "polariton at {off} MHz");
    }

    let burnt = burnt_density(0.7);
    let res = find_resonances(&burnt, &p, &probe, &opts).unwrap();
    let full: Vec<_> = res.iter().filter(|r| r.full_resonance).collect();
    assert_eq!(full.len(), 2, "{res:?}");
    for r in full {
        assert!(r.t_abs2 >= 0.9, "{r:?}");
        assert!((to_mhz((r.omega - p.omega_s).abs()) - 8.56).abs() < 0.5);
    }

    let holes = transmission_spectrum(&burnt, &p, &probe).unwrap();
    assert!(peak_enhancement(&holes, &bare).unwrap() >= 50.0);
}

#[test]
fn sharp_peaks_sit_on_polariton_background() {
    let p = SystemParams::nv_diamond();
    let probe = probe(20.0, 0.01);
    let bare = transmission_spectrum(&nv_density(), &p, &probe).unwrap();
    let holes = transmission_spectrum(&burnt_density(0.7), &p, &probe).unwrap();
    for sign in [-1.0, 1.0] {
        let wh = p.omega_s + sign * p.coupling;
        let k = probe.nearest(wh);
        assert!(holes.t_abs2[k] > bare.t_abs2[k]);
        // background between 1.5 and 3 MHz from the notch
        for i in 0..probe.len() {
            let d = to_mhz((probe.point(i) - wh).abs());
            if (1.5..=3.0).contains(&d) {
                let rel = (holes.t_abs2[i] - bare.t_abs2[i]).abs() / bare.t_abs2[i];
                assert!(rel < 0.2, "{d} MHz: {rel}");
            }
        }
    }
}

#[test]
fn spin_removal_below_three_percent() {
    let f = removed_fraction(&nv_density(), &burnt_density(0.7)).unwrap();
    assert!(f > 0.0 && f < 0.03, "{f}");
}

#[test]
fn estimate_with_and_without_holes() {
    let p = SystemParams::nv_diamond();
    let bare = gamma_estimate(&nv_density(), &p).unwrap();
    // fitted no-hole rate is about 2π·3 MHz
    let fitted = mhz(3.0);
    assert!(bare > fitted / 2.0 && bare < 2.0 * fitted, "{}", to_mhz(bare));
    assert_eq!(gamma_estimate(&burnt_density(0.7), &p).unwrap(), p.kappa);
}

#[test]
fn grid_refinement_moves_peaks_less_than_one_percent() {
    let p = SystemParams::nv_diamond();
    let probe = probe(20.0, 0.01);
    let peaks = |n: usize| {
        let grid = FrequencyGrid::centered(p.omega_s, mhz(50.0), n).unwrap();
        let rho = build_q_gaussian(&QGaussianSpec::nv_diamond(), &grid).unwrap();
        let mut out = Vec::new();
        for r in [rho.clone(), burn_holes(&rho, &holes(0.7)).unwrap()] {
            let mut res = find_resonances(&r, &p, &probe, &ResonanceOptions::default()).unwrap();
            res.sort_by(|a, b| b.t_abs2.total_cmp(&a.t_abs2));
            out.push(res[0].t_abs2);
        }
        out
    };
    let coarse = peaks(20001);
    let fine = peaks(40001);
    for (c, f) in coarse.iter().zip(&fine) {
        assert!(((c - f) / f).abs() < 0.01, "{c} {f}");
    }
}

#[test]
fn splitting_is_close_to_twice_the_coupling() {
    // Checked loosely here; the acceptance suite pins the 10% band.
    let p = SystemParams::nv_diamond();
    let s = transmission_spectrum(&nv_density(), &p, &probe(20.0, 0.01)).unwrap();
    let split = to_mhz(rabi_splitting(&s).unwrap());
    assert!((split - 2.0 * 8.56).abs() / (2.0 * 8.56) < 0.2, "{split}");
}
