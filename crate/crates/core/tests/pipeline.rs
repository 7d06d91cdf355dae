use mfia::cascade::{generate_cascade, CascadeSpec};
use mfia::features::FEATURE_NAMES;
use mfia::measures::{to_measure, BitDepth, GrayImage, MeasureKind};
use mfia::moments::{chhabra_spectrum, estimate_tau, generalized_dimensions, QGrid, ScaleSet};
use mfia::pipeline::{analyze_measure, extract_features, AnalysisConfig};
use mfia::MeasureGrid;

fn textured(scale: u16) -> GrayImage {
    GrayImage::from_fn(256, 256, BitDepth::Sixteen, |r, c| {
        let v = 1 + ((r * 7 + c * 13) ^ (r * c)) % 61;
        v as u16 * scale
    })
    .unwrap()
}

#[test]
fn uniform_measure_is_monofractal() {
    let m = MeasureGrid::from_values(256, vec![1.0; 256 * 256], MeasureKind::Sum).unwrap();
    let a = analyze_measure(&m, &AnalysisConfig::default(), "u", None).unwrap();
    assert!(a.dq.d().iter().all(|d| (d - 2.0).abs() <= 1e-3));
    assert!(a.chhabra.points().iter().all(|p| (p.alpha - 2.0).abs() <= 1e-3 && (p.f - 2.0).abs() <= 1e-3));
    assert!(a.alpha_map.alpha().iter().all(|x| (x.unwrap() - 2.0).abs() <= 1e-6));
    let f = &a.features;
    assert!((f.moments.d_max - 2.0).abs() < 1e-9);
    assert_eq!(f.moments.q_at_dmax, -5.0);
    assert!((f.map.alpha_mean - 2.0).abs() < 1e-9);
    assert!((f.map.f_mean - 2.0).abs() < 1e-6);
    assert!(f.map.alpha_std.abs() < 1e-12);
}

#[test]
fn intensity_scaling_leaves_features_unchanged() {
    let cfg = AnalysisConfig::default();
    let a = extract_features(&to_measure(&textured(1), MeasureKind::Sum).unwrap(), &cfg, "a", None).unwrap();
    let b = extract_features(&to_measure(&textured(997), MeasureKind::Sum).unwrap(), &cfg, "b", None).unwrap();
    for (name, (x, y)) in FEATURE_NAMES.iter().zip(a.values().iter().zip(b.values())) {
        assert!((x - y).abs() <= 1e-9, "{name}: {x} vs {y}");
    }
}

#[test]
fn rotation_keeps_moment_route() {
    let m = generate_cascade(&CascadeSpec::new([0.4, 0.3, 0.2, 0.1], 7).shuffled(2)).unwrap();
    let r = m.rotate90();
    let q = QGrid::default();
    let s = ScaleSet::new(vec![2, 4, 8, 16, 32]).unwrap();
    let (ta, tb) = (estimate_tau(&m, &q, &s).unwrap(), estimate_tau(&r, &q, &s).unwrap());
    for (a, b) in ta.tau().iter().zip(tb.tau()) {
        assert!((a - b).abs() < 1e-12);
    }
    let (da, db) = (generalized_dimensions(&ta).unwrap(), generalized_dimensions(&tb).unwrap());
    assert_eq!(da.d().len(), db.d().len());
    let (ca, cb) = (chhabra_spectrum(&m, &q, &s).unwrap(), chhabra_spectrum(&r, &q, &s).unwrap());
    for (a, b) in ca.points().iter().zip(cb.points()) {
        assert!((a.alpha - b.alpha).abs() < 1e-12 && (a.f - b.f).abs() < 1e-12);
    }
}

#[test]
fn analysis_is_deterministic() {
    let m = generate_cascade(&CascadeSpec::new([0.34, 0.28, 0.22, 0.16], 8).shuffled(4)).unwrap();
    let cfg = AnalysisConfig::default();
    let a = extract_features(&m, &cfg, "x", Some("k".into())).unwrap();
    let b = extract_features(&m, &cfg, "x", Some("k".into())).unwrap();
    assert!(a.values().iter().zip(b.values()).all(|(x, y)| x.to_bits() == y.to_bits()));
}

#[test]
fn config_echo_lists_every_parameter() {
    let text = AnalysisConfig::default().to_string();
    for key in ["q=", "scales=", "windows=", "bin_width=", "hausdorff_sides="] {
        assert!(text.contains(key), "{text}");
    }
}
