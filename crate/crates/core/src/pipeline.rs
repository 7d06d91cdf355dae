//! Per-image analysis: measure → curves → feature vector.

use std::fmt;

use crate::error::{Error, Result};
use crate::features::{map_features, moment_features, FeatureVector};
use crate::holder::{
    alpha_map, hausdorff_spectrum, AlphaMap, DEFAULT_BIN_WIDTH, DEFAULT_HAUSDORFF_SIDES,
    DEFAULT_WINDOWS,
};
use crate::measures::MeasureGrid;
use crate::moments::{
    chhabra_spectrum, estimate_tau, generalized_dimensions, DQCurve, QGrid, ScaleSet,
    SpectrumCurve, TauCurve,
};

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub q_grid: QGrid,
    /// Box sides for the moment route.
    pub scales: ScaleSet,
    pub windows: Vec<usize>,
    pub bin_width: f64,
    /// Box sides for level-set dimensions in the Hausdorff spectrum.
    pub hausdorff_sides: ScaleSet,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            q_grid: QGrid::default(),
            scales: ScaleSet::default(),
            windows: DEFAULT_WINDOWS.to_vec(),
            bin_width: DEFAULT_BIN_WIDTH,
            hausdorff_sides: ScaleSet::new(DEFAULT_HAUSDORFF_SIDES.to_vec())
                .expect("default sides are valid"),
        }
    }
}

impl AnalysisConfig {
    /// Checks everything that does not depend on a particular image.
    pub fn validate(&self) -> Result<()> {
        if !(self.bin_width > 0.0) || !self.bin_width.is_finite() {
            return Err(Error::InvalidBinWidth(self.bin_width));
        }
        if self.windows.len() < 2
            || self.windows.iter().any(|w| w % 2 == 0)
            || self.windows.windows(2).any(|p| p[0] >= p[1])
        {
            return Err(Error::InvalidWindows(format!(
                "need two or more strictly increasing odd sides, got {:?}",
                self.windows
            )));
        }
        Ok(())
    }
}

impl fmt::Display for AnalysisConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let windows: Vec<String> = self.windows.iter().map(|w| w.to_string()).collect();
        write!(
            f,
            "q={} scales={} windows={} bin_width={} hausdorff_sides={}",
            self.q_grid,
            self.scales,
            windows.join(","),
            self.bin_width,
            self.hausdorff_sides
        )
    }
}

/// Every intermediate curve of one analysis.
#[derive(Debug, Clone)]
pub struct ImageAnalysis {
    pub tau: TauCurve,
    pub dq: DQCurve,
    pub chhabra: SpectrumCurve,
    pub alpha_map: AlphaMap,
    pub hausdorff: SpectrumCurve,
    pub features: FeatureVector,
}

pub fn analyze_measure(
    measure: &MeasureGrid,
    cfg: &AnalysisConfig,
    source_id: impl Into<String>,
    label: Option<String>,
) -> Result<ImageAnalysis> {
    cfg.validate()?;
    let tau = estimate_tau(measure, &cfg.q_grid, &cfg.scales)?;
    let dq = generalized_dimensions(&tau)?;
    let chhabra = chhabra_spectrum(measure, &cfg.q_grid, &cfg.scales)?;
    let alpha_map = alpha_map(measure, &cfg.windows)?;
    let hausdorff = hausdorff_spectrum(&alpha_map, cfg.bin_width, &cfg.hausdorff_sides)?;
    let (map_alpha_mean, map_alpha_std) = alpha_map.mean_std().ok_or(Error::NoDefinedPixels)?;
    let features = FeatureVector {
        source_id: source_id.into(),
        label,
        moments: moment_features(&dq, &chhabra)?,
        map: map_features(&hausdorff)?,
        map_alpha_mean,
        map_alpha_std,
    };
    Ok(ImageAnalysis {
        tau,
        dq,
        chhabra,
        alpha_map,
        hausdorff,
        features,
    })
}

/// Shorthand for the feature vector alone.
pub fn extract_features(
    measure: &MeasureGrid,
    cfg: &AnalysisConfig,
    source_id: impl Into<String>,
    label: Option<String>,
) -> Result<FeatureVector> {
    analyze_measure(measure, cfg, source_id, label).map(|a| a.features)
}
