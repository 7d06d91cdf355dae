use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use mfia::cascade::{analytic_tau_spectrum, generate_cascade, CascadeSpec};
use mfia::holder::{alpha_map, hausdorff_spectrum, AlphaMap, DEFAULT_HAUSDORFF_SIDES, DEFAULT_WINDOWS};
use mfia::measures::{to_measure, BitDepth, GrayImage, MeasureKind};
use mfia::moments::{ScaleSet, SpectrumCurve};
use mfia::segment::{box_dimension, select_by_alpha, select_by_f, BitMask, Selection};

fn hd_sides() -> ScaleSet {
    ScaleSet::new(DEFAULT_HAUSDORFF_SIDES.to_vec()).unwrap()
}

fn square_image(side: usize, square: usize, fg: u16, bg: u16) -> GrayImage {
    let off = (side - square) / 2;
    let inside = |r: usize, c: usize| (off..off + square).contains(&r) && (off..off + square).contains(&c);
    GrayImage::from_fn(side, side, BitDepth::Eight, |r, c| if inside(r, c) { fg } else { bg }).unwrap()
}

fn map_and_spectrum(img: &GrayImage) -> (AlphaMap, SpectrumCurve) {
    let m = to_measure(img, MeasureKind::Sum).unwrap();
    let map = alpha_map(&m, &DEFAULT_WINDOWS).unwrap();
    let hd = hausdorff_spectrum(&map, 0.05, &hd_sides()).unwrap();
    (map, hd)
}

fn digest(map: &AlphaMap) -> u64 {
    let mut h = DefaultHasher::new();
    for a in map.alpha() {
        a.map(f64::to_bits).hash(&mut h);
    }
    h.finish()
}

#[test]
fn square_edges_have_dimension_one() {
    let img = square_image(256, 128, 200, 50);
    let (map, hd) = map_and_spectrum(&img);
    let mask = select_by_f(&map, &hd, 1.0, 0.2).unwrap();
    // the selection hugs the boundary: nothing deep inside or far outside
    for i in mask.set_pixels() {
        let (r, c) = ((i / 256) as i64, (i % 256) as i64);
        let dist = [r - 64, 191 - r, c - 64, 191 - c]
            .iter()
            .map(|d| d.abs())
            .min()
            .unwrap();
        assert!(dist <= 5, "pixel ({r},{c}) is {dist} px from the edge");
    }
    let d = box_dimension(&mask, &ScaleSet::default()).unwrap();
    assert!((d - 1.0).abs() <= 0.15, "edge dimension {d}");

    let ring: Vec<bool> = (0..256 * 256)
        .map(|i| {
            let (r, c) = (i / 256, i % 256);
            let on = |v: usize| v == 64 || v == 191;
            (64..192).contains(&r) && (64..192).contains(&c) && (on(r) || on(c))
        })
        .collect();
    let ring = BitMask::new(256, ring, Selection::AlphaRange { lo: 0.0, hi: 0.0 }).unwrap();
    let ideal = box_dimension(&ring, &ScaleSet::default()).unwrap();
    assert!((d - ideal).abs() <= 0.15);
}

#[test]
fn uniform_image_is_all_smooth_region() {
    let img = GrayImage::from_fn(256, 256, BitDepth::Eight, |_, _| 90).unwrap();
    let (map, hd) = map_and_spectrum(&img);
    let mask = select_by_f(&map, &hd, 2.0, 0.1).unwrap();
    assert_eq!(mask.count(), 256 * 256);
    assert_eq!(select_by_f(&map, &hd, -1.0, 0.5).unwrap().count(), 0);
    assert_eq!(select_by_alpha(&map, 1.9, 2.1).unwrap().count(), 256 * 256);
    assert_eq!(select_by_alpha(&map, 0.0, 1.0).unwrap().count(), 0);
}

#[test]
fn cascade_alpha_band_is_a_proper_subset() {
    let w = [0.4, 0.3, 0.2, 0.1];
    let m = generate_cascade(&CascadeSpec::new(w, 8).shuffled(9)).unwrap();
    let map = alpha_map(&m, &DEFAULT_WINDOWS).unwrap();
    let a2 = analytic_tau_spectrum(&w, &[2.0]).unwrap().alpha[0];
    let n = select_by_alpha(&map, a2 - 0.05, a2 + 0.05).unwrap().count();
    assert!(n > 0 && n < 256 * 256);
    let all = select_by_alpha(&map, f64::NEG_INFINITY, f64::INFINITY).unwrap();
    assert_eq!(all.count(), map.defined_count());
}

#[test]
fn selection_leaves_inputs_untouched() {
    let img = square_image(128, 64, 220, 30);
    let before_img = img.clone();
    let (map, hd) = map_and_spectrum(&img);
    let map_digest = digest(&map);
    let spectrum_before = hd.clone();
    let _ = select_by_f(&map, &hd, 1.0, 0.2).unwrap();
    let _ = select_by_alpha(&map, 1.5, 2.5).unwrap();
    assert_eq!(img, before_img);
    assert_eq!(digest(&map), map_digest);
    assert_eq!(hd, spectrum_before);
}
