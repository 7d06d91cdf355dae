//! Estimators against the closed-form spectrum of a depth-8 cascade.

use mfia::cascade::{analytic_tau_spectrum, generate_cascade, CascadeSpec};
use mfia::holder::{alpha_map, hausdorff_spectrum, large_deviation_spectrum, DEFAULT_WINDOWS};
use mfia::moments::{
    chhabra_spectrum, estimate_tau, generalized_dimensions, legendre_spectrum, QGrid, ScaleSet,
    SpectrumCurve, SpectrumMethod, SpectrumPoint,
};
use mfia::segment::SpectrumLookup;
use mfia::MeasureGrid;

const W: [f64; 4] = [0.4, 0.3, 0.2, 0.1];

// Independent evaluation of the closed forms (numpy, double precision).
const ALPHA_0: f64 = 2.175687469707073;
const ALPHA_1: f64 = 1.8464393446710157;
const TAU_2: f64 = 1.7369655941662059;
const ALPHA_2: f64 = 1.6464393446710155;
const F_2: f64 = 1.555913095175825;

fn c8() -> MeasureGrid {
    generate_cascade(&CascadeSpec::new(W, 8)).unwrap()
}

fn analytic_curve() -> SpectrumCurve {
    let q = QGrid::default();
    let a = analytic_tau_spectrum(&W, q.values()).unwrap();
    SpectrumCurve::new(
        SpectrumMethod::Chhabra,
        a.alpha.iter().zip(&a.f).map(|(&alpha, &f)| SpectrumPoint { alpha, f, q: None }).collect(),
    )
}

#[test]
fn closed_forms_match_frozen_values() {
    let a = analytic_tau_spectrum(&W, &[0.0, 1.0, 2.0]).unwrap();
    assert!((a.alpha[0] - ALPHA_0).abs() < 1e-12);
    assert!((a.alpha[1] - ALPHA_1).abs() < 1e-12);
    assert!((a.tau[2] - TAU_2).abs() < 1e-12);
    assert!((a.alpha[2] - ALPHA_2).abs() < 1e-12);
    assert!((a.f[2] - F_2).abs() < 1e-12);
}

#[test]
fn tau_matches_closed_form() {
    let q = QGrid::default();
    let tau = estimate_tau(&c8(), &q, &ScaleSet::default()).unwrap();
    let an = analytic_tau_spectrum(&W, q.values()).unwrap();
    for (i, &qq) in q.values().iter().enumerate() {
        let tol = if qq >= 0.0 { 0.05 } else { 0.15 };
        assert!((tau.tau()[i] - an.tau[i]).abs() <= tol, "q={qq}");
    }
    assert!(tau.at(1.0).unwrap().abs() < 1e-6);
}

#[test]
fn shuffling_keeps_moment_estimates() {
    let q = QGrid::default();
    let plain = estimate_tau(&c8(), &q, &ScaleSet::default()).unwrap();
    let shuffled = generate_cascade(&CascadeSpec::new(W, 8).shuffled(17)).unwrap();
    let sh = estimate_tau(&shuffled, &q, &ScaleSet::default()).unwrap();
    for (a, b) in plain.tau().iter().zip(sh.tau()) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn chhabra_points_match_closed_form() {
    let q = QGrid::default();
    let ch = chhabra_spectrum(&c8(), &q, &ScaleSet::default()).unwrap();
    let an = analytic_tau_spectrum(&W, &[0.0, 1.0, 2.0]).unwrap();
    for (i, qq) in [0.0, 1.0, 2.0].into_iter().enumerate() {
        let p = ch.at_q(qq).unwrap();
        assert!((p.alpha - an.alpha[i]).abs() <= 0.08, "alpha at q={qq}");
        assert!((p.f - an.f[i]).abs() <= 0.08, "f at q={qq}");
    }
    assert!((ch.at_q(0.0).unwrap().f - 2.0).abs() <= 0.08);
}

#[test]
fn legendre_and_dq_shape() {
    let q = QGrid::default();
    let tau = estimate_tau(&c8(), &q, &ScaleSet::default()).unwrap();
    let leg = legendre_spectrum(&tau).unwrap();
    let pts = leg.points();
    // α decreases along q; concavity of f(α) in discrete form
    for w in pts.windows(3) {
        let (a0, a1, a2) = (w[0].alpha, w[1].alpha, w[2].alpha);
        let chord = w[0].f + (w[2].f - w[0].f) * (a1 - a0) / (a2 - a0);
        assert!(w[1].f >= chord - 0.03);
    }
    let at1 = leg.at_q(1.0).unwrap();
    assert!((at1.f - at1.alpha).abs() <= 0.02);
    assert!((leg.max_f().unwrap().f - 2.0).abs() <= 0.05);
    let dq = generalized_dimensions(&tau).unwrap();
    for w in dq.d().windows(2) {
        assert!(w[1] <= w[0] + 0.05);
    }
}

#[test]
fn large_deviation_agrees_with_chhabra() {
    let m = c8();
    let q = QGrid::default();
    let ch = chhabra_spectrum(&m, &q, &ScaleSet::default()).unwrap();
    let ld = large_deviation_spectrum(&m, &ScaleSet::default(), 0.05).unwrap();
    let lookup = SpectrumLookup::new(&ch).unwrap();
    let mut compared = 0;
    for p in ld.points() {
        if let Some(f) = lookup.f_at(p.alpha) {
            compared += 1;
            assert!((f - p.f).abs() <= 0.25, "alpha {}: LD {} vs {}", p.alpha, p.f, f);
        }
    }
    assert!(compared >= 20);
}

#[test]
fn large_deviation_tracks_closed_form() {
    let ld = large_deviation_spectrum(&c8(), &ScaleSet::default(), 0.05).unwrap();
    let w = 0.05;
    let bin = ld
        .points()
        .iter()
        .find(|p| (p.alpha - ALPHA_2).abs() <= w / 2.0)
        .expect("a bin holds alpha(2)");
    assert!((bin.f - F_2).abs() <= 0.15);
    // observed peak 2.13; see the LD estimator notes
    assert!((ld.max_f().unwrap().f - 2.0).abs() <= 0.15);
    let analytic = SpectrumLookup::new(&analytic_curve()).unwrap();
    let errs: Vec<f64> = ld
        .points()
        .iter()
        .filter_map(|p| analytic.f_at(p.alpha).map(|f| (f - p.f).abs()))
        .collect();
    assert!(errs.iter().sum::<f64>() / (errs.len() as f64) < 0.1);
}

#[test]
fn alpha_map_means() {
    for spec in [CascadeSpec::new(W, 8), CascadeSpec::new(W, 8).shuffled(3)] {
        let m = generate_cascade(&spec).unwrap();
        let map = alpha_map(&m, &DEFAULT_WINDOWS).unwrap();
        assert_eq!(map.defined_count(), 256 * 256);
        // mass-weighted: the typical exponent of the measure
        assert!((map.mass_weighted_mean(&m).unwrap() - ALPHA_1).abs() <= 0.1);
        // unweighted: the typical exponent of a pixel
        assert!((map.mean_std().unwrap().0 - ALPHA_0).abs() <= 0.1);
    }
}

#[test]
fn hausdorff_spectrum_is_bounded_and_peaks_at_typical_pixels() {
    let m = generate_cascade(&CascadeSpec::new(W, 8).shuffled(5)).unwrap();
    let map = alpha_map(&m, &DEFAULT_WINDOWS).unwrap();
    let sides = ScaleSet::new(vec![1, 2, 4, 8, 16, 32]).unwrap();
    let hd = hausdorff_spectrum(&map, 0.05, &sides).unwrap();
    assert!(hd.points().iter().all(|p| p.f >= -1e-9 && p.f <= 2.0 + 1e-9));
    let peak = hd.max_f().unwrap();
    assert!(peak.f > 1.0 && peak.f < 2.0);
    assert!((peak.alpha - ALPHA_0).abs() <= 0.2);
}
