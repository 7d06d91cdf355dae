//! Pointwise route: a Hölder exponent per pixel from centered windows, and
//! the two histogram spectra built on exponents (large deviation from coarse
//! box exponents, Hausdorff from level sets of the pointwise map).

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measures::MeasureGrid;
use crate::moments::{ScaleSet, SpectrumCurve, SpectrumMethod, SpectrumPoint};
use crate::regression::ols;
use crate::segment::pixels_box_dimension;

pub const DEFAULT_WINDOWS: [usize; 5] = [1, 3, 5, 7, 9];
pub const DEFAULT_BIN_WIDTH: f64 = 0.05;
/// Box sides for level-set dimensions.
pub const DEFAULT_HAUSDORFF_SIDES: [usize; 6] = [1, 2, 4, 8, 16, 32];
/// A Hausdorff bin needs at least this fraction of the defined pixels.
pub const MIN_BIN_FRACTION: f64 = 0.001;

/// Per-pixel Hölder exponents. `None` marks pixels with zero mass.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaMap {
    side: usize,
    alpha: Vec<Option<f64>>,
    window_sides: Vec<usize>,
    /// R² of each pixel's fit; NaN where the exponent is undefined.
    fit_r2: Vec<f64>,
}

impl AlphaMap {
    /// A map from given exponents, for synthetic segmentation inputs.
    pub fn from_values(side: usize, alpha: Vec<Option<f64>>) -> Result<Self> {
        if alpha.len() != side * side {
            return Err(Error::InvalidArgument(format!(
                "alpha map of side {side} needs {} values, got {}",
                side * side,
                alpha.len()
            )));
        }
        if alpha.iter().flatten().any(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument("alpha values must be finite".into()));
        }
        let fit_r2 = alpha.iter().map(|a| if a.is_some() { 1.0 } else { f64::NAN }).collect();
        Ok(Self {
            side,
            alpha,
            window_sides: Vec::new(),
            fit_r2,
        })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn alpha(&self) -> &[Option<f64>] {
        &self.alpha
    }

    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        self.alpha[row * self.side + col]
    }

    pub fn window_sides(&self) -> &[usize] {
        &self.window_sides
    }

    pub fn fit_r2(&self) -> &[f64] {
        &self.fit_r2
    }

    pub fn defined_count(&self) -> usize {
        self.alpha.iter().filter(|a| a.is_some()).count()
    }

    /// Mean and population standard deviation over defined pixels.
    pub fn mean_std(&self) -> Option<(f64, f64)> {
        let n = self.defined_count();
        if n == 0 {
            return None;
        }
        let mean = self.alpha.iter().flatten().sum::<f64>() / n as f64;
        let var = self.alpha.iter().flatten().map(|a| (a - mean).powi(2)).sum::<f64>() / n as f64;
        Some((mean, var.sqrt()))
    }

    /// Mean exponent with each pixel weighted by its mass, the typical
    /// exponent of the measure itself. Undefined pixels carry no mass.
    pub fn mass_weighted_mean(&self, measure: &MeasureGrid) -> Result<f64> {
        if measure.side() != self.side {
            return Err(Error::DimensionMismatch {
                expected: self.side,
                got: measure.side(),
            });
        }
        Ok(self
            .alpha
            .iter()
            .zip(measure.mass())
            .filter_map(|(a, m)| a.map(|a| a * m))
            .sum())
    }

    /// Smallest and largest defined exponent.
    pub fn range(&self) -> Option<(f64, f64)> {
        self.alpha.iter().flatten().fold(None, |acc, &a| match acc {
            None => Some((a, a)),
            Some((lo, hi)) => Some((f64::min(lo, a), f64::max(hi, a))),
        })
    }

    /// Rotates the map by 90° clockwise.
    pub fn rotate90(&self) -> Self {
        let n = self.side;
        let mut alpha = vec![None; n * n];
        let mut fit_r2 = vec![f64::NAN; n * n];
        for r in 0..n {
            for c in 0..n {
                alpha[c * n + (n - 1 - r)] = self.alpha[r * n + c];
                fit_r2[c * n + (n - 1 - r)] = self.fit_r2[r * n + c];
            }
        }
        Self {
            side: n,
            alpha,
            window_sides: self.window_sides.clone(),
            fit_r2,
        }
    }
}

fn check_windows(windows: &[usize], side: usize) -> Result<()> {
    if windows.len() < 2 {
        return Err(Error::InvalidWindows("need at least two window sides".into()));
    }
    if let Some(w) = windows.iter().find(|w| *w % 2 == 0) {
        return Err(Error::InvalidWindows(format!("window side {w} is not odd")));
    }
    if windows.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::InvalidWindows("window sides must be strictly increasing".into()));
    }
    let largest = *windows.last().unwrap();
    if largest >= side {
        return Err(Error::WindowTooLarge {
            window: largest,
            side,
        });
    }
    Ok(())
}

/// Reflect-about-the-edge index (the edge pixel itself is not repeated).
fn mirror(i: isize, n: usize) -> usize {
    let n = n as isize;
    let j = if i < 0 {
        -i
    } else if i >= n {
        2 * (n - 1) - i
    } else {
        i
    };
    j as usize
}

/// α(x) as the least-squares slope of ln μ(W(x, s)) against ln(s / side),
/// with W the s×s window centered on x, mirror-padded at the borders.
pub fn alpha_map(measure: &MeasureGrid, window_sides: &[usize]) -> Result<AlphaMap> {
    let side = measure.side();
    check_windows(window_sides, side)?;
    let radius = window_sides.last().unwrap() / 2;
    let padded_side = side + 2 * radius;
    let mass = measure.mass();
    let mut padded = vec![0.0; padded_side * padded_side];
    for pr in 0..padded_side {
        let r = mirror(pr as isize - radius as isize, side);
        for pc in 0..padded_side {
            let c = mirror(pc as isize - radius as isize, side);
            padded[pr * padded_side + pc] = mass[r * side + c];
        }
    }
    let log_scale: Vec<f64> = window_sides
        .iter()
        .map(|&s| (s as f64 / side as f64).ln())
        .collect();

    let rows: Vec<(Vec<Option<f64>>, Vec<f64>)> = (0..side)
        .into_par_iter()
        .map(|r| {
            let mut alphas = Vec::with_capacity(side);
            let mut r2s = Vec::with_capacity(side);
            let mut log_mass = vec![0.0; window_sides.len()];
            for c in 0..side {
                if mass[r * side + c] <= 0.0 {
                    alphas.push(None);
                    r2s.push(f64::NAN);
                    continue;
                }
                let (cr, cc) = (r + radius, c + radius);
                for (k, &s) in window_sides.iter().enumerate() {
                    let h = s / 2;
                    let mut sum = 0.0;
                    for wr in cr - h..=cr + h {
                        let row = &padded[wr * padded_side + cc - h..][..s];
                        for &v in row {
                            sum += v;
                        }
                    }
                    log_mass[k] = sum.ln();
                }
                let fit = ols(&log_scale, &log_mass).expect("window sides are distinct");
                alphas.push(Some(fit.slope));
                r2s.push(fit.r2);
            }
            (alphas, r2s)
        })
        .collect();

    let mut alpha = Vec::with_capacity(side * side);
    let mut fit_r2 = Vec::with_capacity(side * side);
    for (a, r2) in rows {
        alpha.extend(a);
        fit_r2.extend(r2);
    }
    Ok(AlphaMap {
        side,
        alpha,
        window_sides: window_sides.to_vec(),
        fit_r2,
    })
}

/// Uniform α bins of width `w` centered at `lo, lo + w, …`, covering
/// `[lo, hi]`. Values outside are clamped into the end bins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaBins {
    first_center: f64,
    width: f64,
    count: usize,
}

impl AlphaBins {
    pub fn new(lo: f64, hi: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::InvalidBinWidth(width));
        }
        if !(lo.is_finite() && hi.is_finite() && hi >= lo) {
            return Err(Error::InvalidArgument(format!("bad alpha range [{lo}, {hi}]")));
        }
        let count = ((hi - lo) / width).round() as usize + 1;
        Ok(Self {
            first_center: lo,
            width,
            count,
        })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn center(&self, k: usize) -> f64 {
        self.first_center + k as f64 * self.width
    }

    /// Bin edges, `count + 1` values.
    pub fn edges(&self) -> Vec<f64> {
        (0..=self.count)
            .map(|k| self.first_center + (k as f64 - 0.5) * self.width)
            .collect()
    }

    pub fn index(&self, alpha: f64) -> usize {
        let k = ((alpha - self.first_center) / self.width).round();
        if k <= 0.0 {
            0
        } else {
            (k as usize).min(self.count - 1)
        }
    }
}

/// Counts of coarse exponents per bin, one row per scale.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaHistogram {
    pub bins: AlphaBins,
    pub box_sides: Vec<usize>,
    /// `counts[scale][bin]`.
    pub counts: Vec<Vec<usize>>,
}

impl AlphaHistogram {
    pub fn bin_edges(&self) -> Vec<f64> {
        self.bins.edges()
    }
}

/// Precision constant of the large-deviation counts: at a box spanning `j`
/// dyadic levels a box counts toward a bin when its exponent lies within
/// `LD_PRECISION / (2·√j)` of the bin center.
pub const LD_PRECISION: f64 = 0.5;

/// Coarse box exponents α = ln μ_box / ln δ, sorted, one list per scale.
fn coarse_exponents(measure: &MeasureGrid, scales: &ScaleSet) -> Result<Vec<Vec<f64>>> {
    let side = measure.side();
    scales.check_against(side)?;
    if scales.box_sides().iter().any(|&s| s >= side) {
        return Err(Error::InvalidScales(format!(
            "large-deviation scales must be smaller than the measure side {side}"
        )));
    }
    scales
        .box_sides()
        .iter()
        .map(|&s| {
            let ln_delta = (s as f64 / side as f64).ln();
            measure.box_masses(s).map(|boxes| {
                let mut a: Vec<f64> = boxes
                    .into_iter()
                    .filter(|&m| m > 0.0)
                    .map(|m| m.ln() / ln_delta)
                    .collect();
                a.sort_by(f64::total_cmp);
                a
            })
        })
        .collect()
}

fn finest_bins(per_scale: &[Vec<f64>], bin_width: f64) -> Result<AlphaBins> {
    if !(bin_width > 0.0) || !bin_width.is_finite() {
        return Err(Error::InvalidBinWidth(bin_width));
    }
    let finest = &per_scale[0];
    match (finest.first(), finest.last()) {
        (Some(&lo), Some(&hi)) => AlphaBins::new(lo, hi, bin_width),
        _ => Err(Error::EmptyMeasure),
    }
}

/// Histogram of coarse box exponents at every scale, with bins fixed by the
/// exponent range at the finest scale.
pub fn coarse_alpha_histogram(
    measure: &MeasureGrid,
    scales: &ScaleSet,
    bin_width: f64,
) -> Result<AlphaHistogram> {
    let per_scale = coarse_exponents(measure, scales)?;
    let bins = finest_bins(&per_scale, bin_width)?;
    let counts = per_scale
        .iter()
        .map(|alphas| {
            let mut row = vec![0usize; bins.count()];
            for &a in alphas {
                row[bins.index(a)] += 1;
            }
            row
        })
        .collect();
    Ok(AlphaHistogram {
        bins,
        box_sides: scales.box_sides().to_vec(),
        counts,
    })
}

/// f(α) = slope of ln N_δ(α) against ln(1/δ), where N_δ(α) counts boxes of
/// side δ whose coarse exponent lies within ε_j/2 of α and ε_j =
/// [`LD_PRECISION`]/√j shrinks with the number of levels j. The shrinking
/// window tracks the 1/√j spread of coarse exponents, which removes the
/// scale-dependent prefactor a fixed window leaves in the counts. Bins
/// occupied at fewer than three scales are dropped.
pub fn large_deviation_spectrum(
    measure: &MeasureGrid,
    scales: &ScaleSet,
    bin_width: f64,
) -> Result<SpectrumCurve> {
    let per_scale = coarse_exponents(measure, scales)?;
    let bins = finest_bins(&per_scale, bin_width)?;
    let side = measure.side() as f64;
    let levels: Vec<f64> = scales
        .box_sides()
        .iter()
        .map(|&s| (side / s as f64).log2())
        .collect();
    let mut points = Vec::new();
    for k in 0..bins.count() {
        let center = bins.center(k);
        let mut x = Vec::with_capacity(levels.len());
        let mut y = Vec::with_capacity(levels.len());
        for (alphas, &j) in per_scale.iter().zip(&levels) {
            let half = LD_PRECISION / (2.0 * j.sqrt());
            let n = alphas.partition_point(|&a| a <= center + half)
                - alphas.partition_point(|&a| a < center - half);
            if n > 0 {
                x.push(j * std::f64::consts::LN_2);
                y.push((n as f64).ln());
            }
        }
        if x.len() < 3 {
            continue;
        }
        if let Some(fit) = ols(&x, &y) {
            points.push(SpectrumPoint {
                alpha: center,
                f: fit.slope,
                q: None,
            });
        }
    }
    if points.is_empty() {
        return Err(Error::NoOccupiedBins);
    }
    Ok(SpectrumCurve::new(SpectrumMethod::LargeDeviation, points))
}

/// Pixel counts of the defined exponents per bin.
pub fn map_histogram(map: &AlphaMap, bin_width: f64) -> Result<(AlphaBins, Vec<usize>)> {
    let (lo, hi) = map.range().ok_or(Error::NoDefinedPixels)?;
    let bins = AlphaBins::new(lo, hi, bin_width)?;
    let mut counts = vec![0usize; bins.count()];
    for a in map.alpha().iter().flatten() {
        counts[bins.index(*a)] += 1;
    }
    Ok((bins, counts))
}

/// For every α bin holding at least 0.1% of the defined pixels, the
/// box-counting dimension of the set of pixels whose exponent falls in it.
pub fn hausdorff_spectrum(map: &AlphaMap, bin_width: f64, box_sides: &ScaleSet) -> Result<SpectrumCurve> {
    box_sides.check_against(map.side())?;
    let (bins, counts) = map_histogram(map, bin_width)?;
    let defined = map.defined_count();
    let mut members: Vec<Vec<usize>> = counts.iter().map(|&n| Vec::with_capacity(n)).collect();
    for (i, a) in map.alpha().iter().enumerate() {
        if let Some(a) = a {
            members[bins.index(*a)].push(i);
        }
    }
    let mut points = Vec::new();
    for (k, pixels) in members.iter().enumerate() {
        if pixels.is_empty() || (pixels.len() as f64) < MIN_BIN_FRACTION * defined as f64 {
            continue;
        }
        let dim = pixels_box_dimension(map.side(), pixels, box_sides)?;
        points.push(SpectrumPoint {
            alpha: bins.center(k),
            f: dim,
            q: None,
        });
    }
    if points.is_empty() {
        return Err(Error::NoDefinedPixels);
    }
    Ok(SpectrumCurve::new(SpectrumMethod::Hausdorff, points))
}
