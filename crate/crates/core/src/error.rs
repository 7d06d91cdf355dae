use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt file: {0}")]
    CorruptFile(String),
    #[error("color image rejected: {0}")]
    ColorImageRejected(String),
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("image too small: {width}x{height} is below the minimum side {min_side}")]
    ImageTooSmall {
        width: usize,
        height: usize,
        min_side: usize,
    },
    #[error("image is not a square with power-of-two side ({width}x{height})")]
    NonDyadicImage { width: usize, height: usize },
    #[error("every intensity is zero")]
    AllZeroImage,
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid cascade: {0}")]
    InvalidCascade(String),
    #[error("cascade depth {depth} gives side {side}, above the cap {cap}")]
    DepthTooLarge { depth: u32, side: u64, cap: usize },
    #[error("invalid scale set: {0}")]
    InvalidScales(String),
    #[error("invalid q grid: {0}")]
    InvalidQGrid(String),
    #[error("q grid has {0} points, at least 5 are needed")]
    QGridTooCoarse(usize),
    #[error("q grid step is not uniform")]
    NonUniformQGrid,
    #[error("no box has positive mass")]
    EmptyMeasure,
    #[error("invalid window sides: {0}")]
    InvalidWindows(String),
    #[error("window side {window} is not smaller than measure side {side}")]
    WindowTooLarge { window: usize, side: usize },
    #[error("bin width must be positive and finite, got {0}")]
    InvalidBinWidth(f64),
    #[error("no histogram bin is occupied at three or more scales")]
    NoOccupiedBins,
    #[error("alpha map has no defined pixel")]
    NoDefinedPixels,
    #[error("curve is empty")]
    EmptyCurve,
    #[error("curves are sampled on different q grids")]
    QGridMismatch,
    #[error("spectrum is empty")]
    EmptySpectrum,
    #[error("mask has no set bit")]
    EmptyMask,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("pooled covariance is not positive definite after ridge")]
    SingularCovariance,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("fold holding out {held_out} failed: {source}")]
    FoldFailed {
        held_out: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
