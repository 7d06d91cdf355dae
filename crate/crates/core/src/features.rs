//! Scalar features of one image.
//!
//! Two sets are extracted. The moment set reads extrema off D(q) and the
//! direct f(α) curve. The map set summarizes the Hausdorff spectrum of the
//! Hölder exponent map by the unweighted mean and population standard
//! deviation of its sample points. The pixel-level mean/std of the map is
//! kept alongside as a diagnostic.
//!
//! Ties: values within [`TIE_TOLERANCE`] of an extremum count as attaining
//! it; the smallest q (moment set) or smallest α (map set) wins.

use crate::error::{Error, Result};
use crate::moments::{DQCurve, SpectrumCurve};

pub const TIE_TOLERANCE: f64 = 1e-9;

/// Numeric feature columns in CSV order.
pub const FEATURE_NAMES: [&str; 13] = [
    "d_max",
    "q_at_dmax",
    "alpha_at_fmin",
    "f_min",
    "alpha_at_fmax",
    "f_max",
    "alpha_mean",
    "f_mean",
    "alpha_at_fmax_hd",
    "alpha_std",
    "f_std",
    "map_alpha_mean",
    "map_alpha_std",
];

/// The moment-route subset.
pub const MOMENT_FEATURES: [&str; 6] = [
    "d_max",
    "q_at_dmax",
    "alpha_at_fmin",
    "f_min",
    "alpha_at_fmax",
    "f_max",
];

/// The Hausdorff-spectrum subset.
pub const MAP_FEATURES: [&str; 5] = ["alpha_mean", "f_mean", "alpha_at_fmax_hd", "alpha_std", "f_std"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentFeatures {
    pub d_max: f64,
    pub q_at_dmax: f64,
    pub alpha_at_fmin: f64,
    pub f_min: f64,
    pub alpha_at_fmax: f64,
    pub f_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapFeatures {
    pub alpha_mean: f64,
    pub f_mean: f64,
    pub alpha_at_fmax_hd: f64,
    pub alpha_std: f64,
    pub f_std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub source_id: String,
    pub label: Option<String>,
    pub moments: MomentFeatures,
    pub map: MapFeatures,
    pub map_alpha_mean: f64,
    pub map_alpha_std: f64,
}

impl FeatureVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        let m = &self.moments;
        let h = &self.map;
        Some(match name {
            "d_max" => m.d_max,
            "q_at_dmax" => m.q_at_dmax,
            "alpha_at_fmin" => m.alpha_at_fmin,
            "f_min" => m.f_min,
            "alpha_at_fmax" => m.alpha_at_fmax,
            "f_max" => m.f_max,
            "alpha_mean" => h.alpha_mean,
            "f_mean" => h.f_mean,
            "alpha_at_fmax_hd" => h.alpha_at_fmax_hd,
            "alpha_std" => h.alpha_std,
            "f_std" => h.f_std,
            "map_alpha_mean" => self.map_alpha_mean,
            "map_alpha_std" => self.map_alpha_std,
            _ => return None,
        })
    }

    /// Values in [`FEATURE_NAMES`] order.
    pub fn values(&self) -> [f64; 13] {
        FEATURE_NAMES.map(|n| self.get(n).expect("known feature"))
    }

    /// Inverse of [`FeatureVector::values`].
    pub fn from_values(source_id: String, label: Option<String>, v: [f64; 13]) -> Self {
        Self {
            source_id,
            label,
            moments: MomentFeatures {
                d_max: v[0],
                q_at_dmax: v[1],
                alpha_at_fmin: v[2],
                f_min: v[3],
                alpha_at_fmax: v[4],
                f_max: v[5],
            },
            map: MapFeatures {
                alpha_mean: v[6],
                f_mean: v[7],
                alpha_at_fmax_hd: v[8],
                alpha_std: v[9],
                f_std: v[10],
            },
            map_alpha_mean: v[11],
            map_alpha_std: v[12],
        }
    }
}

/// Index of the first element within tolerance of the extremum picked by
/// `better`.
fn first_extremum(values: impl Iterator<Item = f64> + Clone, better: fn(f64, f64) -> bool) -> usize {
    let best = values.clone().reduce(|a, b| if better(b, a) { b } else { a }).unwrap();
    values
        .clone()
        .position(|v| (v - best).abs() <= TIE_TOLERANCE)
        .unwrap()
}

pub fn moment_features(dq: &DQCurve, spectrum: &SpectrumCurve) -> Result<MomentFeatures> {
    if dq.d().is_empty() || spectrum.is_empty() {
        return Err(Error::EmptyCurve);
    }
    let grid = dq.q_grid().values();
    if spectrum.len() != grid.len()
        || spectrum.points().iter().zip(grid).any(|(p, q)| p.q != Some(*q))
    {
        return Err(Error::QGridMismatch);
    }
    let i = first_extremum(dq.d().iter().copied(), |a, b| a > b);
    let f = spectrum.points().iter().map(|p| p.f);
    // spectrum points follow the q grid, so the first hit is the smallest q
    let lo = first_extremum(f.clone(), |a, b| a < b);
    let hi = first_extremum(f, |a, b| a > b);
    let pts = spectrum.points();
    Ok(MomentFeatures {
        d_max: dq.d()[i],
        q_at_dmax: grid[i],
        alpha_at_fmin: pts[lo].alpha,
        f_min: pts[lo].f,
        alpha_at_fmax: pts[hi].alpha,
        f_max: pts[hi].f,
    })
}

fn mean_std(v: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = v.clone().count() as f64;
    let mean = v.clone().sum::<f64>() / n;
    let var = v.map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Statistics over the sample points of a (Hausdorff) spectrum.
pub fn map_features(spectrum: &SpectrumCurve) -> Result<MapFeatures> {
    if spectrum.is_empty() {
        return Err(Error::EmptyCurve);
    }
    let pts = spectrum.points();
    let (alpha_mean, alpha_std) = mean_std(pts.iter().map(|p| p.alpha));
    let (f_mean, f_std) = mean_std(pts.iter().map(|p| p.f));
    let f_best = pts.iter().map(|p| p.f).fold(f64::NEG_INFINITY, f64::max);
    let alpha_at_fmax_hd = pts
        .iter()
        .filter(|p| (p.f - f_best).abs() <= TIE_TOLERANCE)
        .map(|p| p.alpha)
        .fold(f64::INFINITY, f64::min);
    Ok(MapFeatures {
        alpha_mean,
        f_mean,
        alpha_at_fmax_hd,
        alpha_std,
        f_std,
    })
}
