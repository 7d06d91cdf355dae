//! Grayscale images and the box measures built from them.

use std::path::Path;

use crate::error::{Error, Result};
use crate::formats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    pub fn max_value(self) -> u16 {
        match self {
            BitDepth::Eight => u8::MAX as u16,
            BitDepth::Sixteen => u16::MAX,
        }
    }

    pub fn bits(self) -> u32 {
        match self {
            BitDepth::Eight => 8,
            BitDepth::Sixteen => 16,
        }
    }
}

/// Row-major grayscale raster with a declared bit depth.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    depth: BitDepth,
    data: Vec<u16>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, depth: BitDepth, data: Vec<u16>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "expected {} intensities, got {}",
                width * height,
                data.len()
            )));
        }
        let max = depth.max_value();
        if let Some(v) = data.iter().find(|&&v| v > max) {
            return Err(Error::InvalidImage(format!(
                "intensity {v} exceeds {}-bit range",
                depth.bits()
            )));
        }
        Ok(Self {
            width,
            height,
            depth,
            data,
        })
    }

    /// Builds an image from a closure evaluated at every `(row, col)`.
    pub fn from_fn(
        width: usize,
        height: usize,
        depth: BitDepth,
        mut f: impl FnMut(usize, usize) -> u16,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c));
            }
        }
        Self::new(width, height, depth, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn depth(&self) -> BitDepth {
        self.depth
    }

    pub fn data(&self) -> &[u16] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> u16 {
        self.data[row * self.width + col]
    }

    pub fn is_dyadic_square(&self) -> bool {
        self.width == self.height && self.width >= 2 && self.width.is_power_of_two()
    }
}

/// Decodes a PGM (P2/P5), grayscale PNG or nothing else. Color rasters are
/// rejected, never converted.
pub fn load_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    formats::decode_image(&bytes)
}

/// Centered square crop with the largest power-of-two side that fits.
///
/// When the margin is odd the extra column/row is dropped on the right/bottom.
pub fn crop_dyadic(img: &GrayImage, min_side: usize) -> Result<GrayImage> {
    if min_side < 2 {
        return Err(Error::InvalidArgument(format!(
            "min_side must be at least 2, got {min_side}"
        )));
    }
    let short = img.width.min(img.height);
    if short < min_side {
        return Err(Error::ImageTooSmall {
            width: img.width,
            height: img.height,
            min_side,
        });
    }
    let side = 1usize << (usize::BITS - 1 - short.leading_zeros());
    let left = (img.width - side) / 2;
    let top = (img.height - side) / 2;
    let mut data = Vec::with_capacity(side * side);
    for r in top..top + side {
        let start = r * img.width + left;
        data.extend_from_slice(&img.data[start..start + side]);
    }
    GrayImage::new(side, side, img.depth, data)
}

/// How a measure is coarse-grained onto boxes larger than one pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MeasureKind {
    /// Box mass is the sum of covered pixel masses.
    #[default]
    Sum,
    /// Box value is the largest covered value, renormalized per scale.
    Max,
    /// Box value is the smallest covered value, renormalized per scale.
    Min,
}

impl MeasureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MeasureKind::Sum => "sum",
            MeasureKind::Max => "max",
            MeasureKind::Min => "min",
        }
    }
}

impl std::str::FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sum" => Ok(MeasureKind::Sum),
            "max" => Ok(MeasureKind::Max),
            "min" => Ok(MeasureKind::Min),
            other => Err(Error::InvalidArgument(format!("unknown measure kind `{other}`"))),
        }
    }
}

/// Square dyadic grid of non-negative masses summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureGrid {
    side: usize,
    mass: Vec<f64>,
    kind: MeasureKind,
    source_total: f64,
}

impl MeasureGrid {
    /// Normalizes `values` to unit total. `source_total` records the
    /// pre-normalization sum.
    pub fn from_values(side: usize, values: Vec<f64>, kind: MeasureKind) -> Result<Self> {
        if side < 2 || !side.is_power_of_two() {
            return Err(Error::InvalidMeasure(format!(
                "side must be a power of two >= 2, got {side}"
            )));
        }
        if values.len() != side * side {
            return Err(Error::InvalidMeasure(format!(
                "expected {} values, got {}",
                side * side,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidMeasure(format!(
                "mass values must be finite and non-negative, found {v}"
            )));
        }
        let total: f64 = values.iter().sum();
        if total <= 0.0 {
            return Err(Error::EmptyMeasure);
        }
        let mass = values.into_iter().map(|v| v / total).collect();
        Ok(Self {
            side,
            mass,
            kind,
            source_total: total,
        })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn source_total(&self) -> f64 {
        self.source_total
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.mass[row * self.side + col]
    }

    /// Same masses, different coarse-graining rule.
    pub fn with_kind(mut self, kind: MeasureKind) -> Self {
        self.kind = kind;
        self
    }

    /// Coarse box values at `box_side`, row-major over boxes.
    ///
    /// SUM boxes keep their summed mass. MAX/MIN boxes take the extreme
    /// covered value and are renormalized to sum to one at this scale.
    pub fn box_masses(&self, box_side: usize) -> Result<Vec<f64>> {
        if box_side == 0 || !self.side.is_multiple_of(box_side) {
            return Err(Error::InvalidScales(format!(
                "box side {box_side} does not divide measure side {}",
                self.side
            )));
        }
        if box_side == 1 {
            return Ok(self.mass.clone());
        }
        let nb = self.side / box_side;
        let mut out = Vec::with_capacity(nb * nb);
        for by in 0..nb {
            for bx in 0..nb {
                let mut acc = match self.kind {
                    MeasureKind::Sum | MeasureKind::Max => 0.0,
                    MeasureKind::Min => f64::INFINITY,
                };
                for r in by * box_side..(by + 1) * box_side {
                    let row = &self.mass[r * self.side + bx * box_side..][..box_side];
                    for &m in row {
                        match self.kind {
                            MeasureKind::Sum => acc += m,
                            MeasureKind::Max => acc = acc.max(m),
                            MeasureKind::Min => acc = acc.min(m),
                        }
                    }
                }
                out.push(acc);
            }
        }
        if self.kind != MeasureKind::Sum {
            let total: f64 = out.iter().sum();
            if total <= 0.0 {
                return Err(Error::EmptyMeasure);
            }
            out.iter_mut().for_each(|v| *v /= total);
        }
        Ok(out)
    }

    /// Rotates the grid by 90° clockwise.
    pub fn rotate90(&self) -> Self {
        let n = self.side;
        let mut mass = vec![0.0; n * n];
        for r in 0..n {
            for c in 0..n {
                mass[c * n + (n - 1 - r)] = self.mass[r * n + c];
            }
        }
        Self {
            mass,
            ..self.clone()
        }
    }
}

/// Intensity image → normalized measure.
///
/// The stored masses are the normalized intensities for every kind; the kind
/// only changes how boxes are coarse-grained.
pub fn to_measure(img: &GrayImage, kind: MeasureKind) -> Result<MeasureGrid> {
    if !img.is_dyadic_square() {
        return Err(Error::NonDyadicImage {
            width: img.width,
            height: img.height,
        });
    }
    if img.data.iter().all(|&v| v == 0) {
        return Err(Error::AllZeroImage);
    }
    let values = img.data.iter().map(|&v| f64::from(v)).collect();
    MeasureGrid::from_values(img.width, values, kind)
}
