//! Inverse multifractal segmentation: keep the pixels whose Hölder exponent,
//! or whose spectrum value f(α), satisfies a selection rule. Inputs are only
//! read; a selection is a separate mask.

use std::fmt;

use crate::error::{Error, Result};
use crate::holder::AlphaMap;
use crate::moments::{ScaleSet, SpectrumCurve, SpectrumMethod};
use crate::regression::ols;

/// The rule that produced a mask.
#[derive(Debug, Clone, PartialEq)]
pub enum Selection {
    AlphaRange { lo: f64, hi: f64 },
    SpectrumValue { method: SpectrumMethod, target: f64, tol: f64 },
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selection::AlphaRange { lo, hi } => write!(f, "alpha in [{lo}, {hi}]"),
            Selection::SpectrumValue { method, target, tol } => {
                write!(f, "f({}) = {target} ± {tol}", method.as_str())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BitMask {
    side: usize,
    bits: Vec<bool>,
    provenance: Selection,
}

impl BitMask {
    pub fn new(side: usize, bits: Vec<bool>, provenance: Selection) -> Result<Self> {
        if bits.len() != side * side {
            return Err(Error::InvalidArgument(format!(
                "mask of side {side} needs {} bits, got {}",
                side * side,
                bits.len()
            )));
        }
        Ok(Self {
            side,
            bits,
            provenance,
        })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn provenance(&self) -> &Selection {
        &self.provenance
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.side + col]
    }

    pub fn set_pixels(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }
}

/// Pixels with a defined exponent in `[lo, hi]`.
pub fn select_by_alpha(map: &AlphaMap, lo: f64, hi: f64) -> Result<BitMask> {
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::InvalidArgument(format!("bad alpha range [{lo}, {hi}]")));
    }
    let bits = map
        .alpha()
        .iter()
        .map(|a| matches!(a, Some(a) if *a >= lo && *a <= hi))
        .collect();
    BitMask::new(map.side(), bits, Selection::AlphaRange { lo, hi })
}

/// Piecewise-linear f(α) over spectrum points sorted by α. Outside the
/// sampled α range there is no value.
#[derive(Debug, Clone)]
pub struct SpectrumLookup {
    points: Vec<(f64, f64)>,
}

/// Slack on the ends of the sampled α range.
const RANGE_SLACK: f64 = 1e-9;

impl SpectrumLookup {
    pub fn new(spectrum: &SpectrumCurve) -> Result<Self> {
        if spectrum.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        let mut points: Vec<(f64, f64)> = spectrum.points().iter().map(|p| (p.alpha, p.f)).collect();
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { points })
    }

    pub fn f_at(&self, alpha: f64) -> Option<f64> {
        let first = self.points[0];
        let last = *self.points.last().unwrap();
        if alpha < first.0 - RANGE_SLACK || alpha > last.0 + RANGE_SLACK {
            return None;
        }
        if alpha <= first.0 {
            return Some(first.1);
        }
        if alpha >= last.0 {
            return Some(last.1);
        }
        let hi = self.points.partition_point(|p| p.0 < alpha);
        let (a1, f1) = self.points[hi];
        if a1 == alpha {
            return Some(f1);
        }
        let (a0, f0) = self.points[hi - 1];
        Some(f0 + (f1 - f0) * (alpha - a0) / (a1 - a0))
    }
}

/// Pixels whose exponent maps through the spectrum to `f_target ± tol`.
pub fn select_by_f(map: &AlphaMap, spectrum: &SpectrumCurve, f_target: f64, tol: f64) -> Result<BitMask> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let lookup = SpectrumLookup::new(spectrum)?;
    let bits = map
        .alpha()
        .iter()
        .map(|a| {
            a.and_then(|a| lookup.f_at(a))
                .is_some_and(|f| (f - f_target).abs() <= tol)
        })
        .collect();
    BitMask::new(
        map.side(),
        bits,
        Selection::SpectrumValue {
            method: spectrum.method(),
            target: f_target,
            tol,
        },
    )
}

/// Box-counting dimension of a pixel set given by row-major indices.
pub(crate) fn pixels_box_dimension(side: usize, pixels: &[usize], box_sides: &ScaleSet) -> Result<f64> {
    if pixels.is_empty() {
        return Err(Error::EmptyMask);
    }
    box_sides.check_against(side)?;
    let mut x = Vec::with_capacity(box_sides.len());
    let mut y = Vec::with_capacity(box_sides.len());
    for &s in box_sides.box_sides() {
        let nb = side / s;
        let mut hit = vec![false; nb * nb];
        let mut n = 0usize;
        for &p in pixels {
            let b = (p / side / s) * nb + (p % side) / s;
            if !hit[b] {
                hit[b] = true;
                n += 1;
            }
        }
        x.push((1.0 / s as f64).ln());
        y.push((n as f64).ln());
    }
    Ok(ols(&x, &y)
        .ok_or_else(|| Error::InvalidScales("degenerate scales".into()))?
        .slope)
}

/// Slope of ln N(s) against ln(1/s), N(s) the number of s×s boxes holding a
/// set pixel.
pub fn box_dimension(mask: &BitMask, box_sides: &ScaleSet) -> Result<f64> {
    pixels_box_dimension(mask.side, &mask.set_pixels(), box_sides)
}
