//! Box-moment route: partition functions Z(q, δ) = Σ μᵢ(δ)^q over
//! nonempty dyadic boxes, mass exponents τ(q), generalized dimensions D(q),
//! and f(α) by the direct (Chhabra–Jensen) method and by Legendre transform.
//!
//! Every exponent is an unweighted least-squares slope against ln δ where
//! δ = box side / measure side. Zero-mass boxes never enter a sum.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::measures::MeasureGrid;
use crate::regression::ols;

/// Box sides (powers of two) used for scaling regressions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScaleSet {
    box_sides: Vec<usize>,
}

impl ScaleSet {
    pub fn new(box_sides: Vec<usize>) -> Result<Self> {
        if box_sides.len() < 3 {
            return Err(Error::InvalidScales(format!(
                "need at least 3 box sides, got {}",
                box_sides.len()
            )));
        }
        if let Some(s) = box_sides.iter().find(|s| !s.is_power_of_two()) {
            return Err(Error::InvalidScales(format!("{s} is not a power of two")));
        }
        if box_sides.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidScales("box sides must be strictly increasing".into()));
        }
        Ok(Self { box_sides })
    }

    pub fn box_sides(&self) -> &[usize] {
        &self.box_sides
    }

    pub fn len(&self) -> usize {
        self.box_sides.len()
    }

    pub fn is_empty(&self) -> bool {
        self.box_sides.is_empty()
    }

    /// Checks every box side against a measure of side `side`.
    pub fn check_against(&self, side: usize) -> Result<()> {
        match self.box_sides.iter().find(|&&s| s > side || !side.is_multiple_of(s)) {
            Some(s) => Err(Error::InvalidScales(format!(
                "box side {s} does not fit measure side {side}"
            ))),
            None => Ok(()),
        }
    }

    /// ln δ for each box side.
    pub fn log_deltas(&self, side: usize) -> Vec<f64> {
        self.box_sides
            .iter()
            .map(|&s| (s as f64 / side as f64).ln())
            .collect()
    }
}

impl Default for ScaleSet {
    fn default() -> Self {
        Self {
            box_sides: vec![2, 4, 8, 16, 32, 64],
        }
    }
}

impl fmt::Display for ScaleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.box_sides.iter().map(|s| s.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for ScaleSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let sides = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidScales(format!("bad box side `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(sides)
    }
}

/// Sorted moment orders. Always contains 0, 1 and 2.
#[derive(Debug, Clone, PartialEq)]
pub struct QGrid {
    values: Vec<f64>,
}

fn snap(v: f64) -> f64 {
    let s = (v * 1e12).round() / 1e12;
    if s == 0.0 {
        0.0
    } else {
        s
    }
}

impl QGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidQGrid("values must be finite".into()));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidQGrid("values must be strictly increasing".into()));
        }
        for needed in [0.0, 1.0, 2.0] {
            if !values.contains(&needed) {
                return Err(Error::InvalidQGrid(format!("grid must contain q = {needed}")));
            }
        }
        Ok(Self { values })
    }

    /// `start, start + step, …` up to `end` inclusive, snapped to 1e−12 so
    /// that integer orders land exactly.
    pub fn range(start: f64, end: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !start.is_finite() || !end.is_finite() || end < start {
            return Err(Error::InvalidQGrid(format!("bad range {start}:{end}:{step}")));
        }
        let n = ((end - start) / step + 1e-9).floor() as usize;
        if n > 100_000 {
            return Err(Error::InvalidQGrid("range has too many points".into()));
        }
        Self::new((0..=n).map(|i| snap(start + i as f64 * step)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn index_of(&self, q: f64) -> Option<usize> {
        self.values.iter().position(|&v| v == q)
    }

    /// The common step when the grid is uniform within 1e−9.
    pub fn uniform_step(&self) -> Option<f64> {
        if self.values.len() < 2 {
            return None;
        }
        let step = self.values[1] - self.values[0];
        self.values
            .windows(2)
            .all(|w| ((w[1] - w[0]) - step).abs() <= 1e-9 * step.abs().max(1.0))
            .then_some(step)
    }
}

impl Default for QGrid {
    fn default() -> Self {
        Self::range(-5.0, 5.0, 0.25).expect("default q grid is valid")
    }
}

impl fmt::Display for QGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.uniform_step(), self.values.first(), self.values.last()) {
            (Some(step), Some(a), Some(b)) if self.values.len() > 2 => {
                write!(f, "{a}:{b}:{}", snap(step))
            }
            _ => {
                let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

impl FromStr for QGrid {
    type Err = Error;

    /// `start:end:step` or a comma-separated list.
    fn from_str(s: &str) -> Result<Self> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidQGrid(format!("bad number `{t}`")))
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [a, b, c] => Self::range(num(a)?, num(b)?, num(c)?),
            [list] => Self::new(list.split(',').map(num).collect::<Result<_>>()?),
            _ => Err(Error::InvalidQGrid(format!("cannot parse `{s}`"))),
        }
    }
}

/// Natural logs of the positive box masses at `box_side`.
fn positive_log_masses(measure: &MeasureGrid, box_side: usize) -> Result<Vec<f64>> {
    let logs: Vec<f64> = measure
        .box_masses(box_side)?
        .into_iter()
        .filter(|&m| m > 0.0)
        .map(f64::ln)
        .collect();
    if logs.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    Ok(logs)
}

/// ln Σ exp(q · ln μᵢ), evaluated with a max shift.
fn log_partition(log_masses: &[f64], q: f64) -> f64 {
    let shift = log_masses
        .iter()
        .map(|&l| q * l)
        .fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = log_masses.iter().map(|&l| (q * l - shift).exp()).sum();
    shift + sum.ln()
}

/// Z(q, δ) over boxes with positive mass.
pub fn partition_function(measure: &MeasureGrid, q: f64, box_side: usize) -> Result<f64> {
    let logs = positive_log_masses(measure, box_side)?;
    Ok(log_partition(&logs, q).exp())
}

/// μ̂ᵢ = μᵢ^q / Σⱼ μⱼ^q over the positive entries of `box_masses`.
pub fn normalized_weights(box_masses: &[f64], q: f64) -> Vec<f64> {
    let logs: Vec<f64> = box_masses.iter().filter(|&&m| m > 0.0).map(|m| m.ln()).collect();
    let lz = log_partition(&logs, q);
    logs.iter().map(|&l| (q * l - lz).exp()).collect()
}

/// Mass exponents with the per-scale data needed downstream.
#[derive(Debug, Clone, PartialEq)]
pub struct TauCurve {
    q_grid: QGrid,
    tau: Vec<f64>,
    fit_r2: Vec<f64>,
    scales: ScaleSet,
    log_delta: Vec<f64>,
    /// Σ μᵢ ln μᵢ per scale.
    entropy_sums: Vec<f64>,
}

impl TauCurve {
    /// Builds a curve from known τ values (no per-scale data, so D(1) falls
    /// back to the derivative of τ at q = 1).
    pub fn from_values(q_grid: QGrid, tau: Vec<f64>) -> Result<Self> {
        if tau.len() != q_grid.len() {
            return Err(Error::QGridMismatch);
        }
        let n = tau.len();
        Ok(Self {
            q_grid,
            tau,
            fit_r2: vec![1.0; n],
            scales: ScaleSet::default(),
            log_delta: Vec::new(),
            entropy_sums: Vec::new(),
        })
    }

    pub fn q_grid(&self) -> &QGrid {
        &self.q_grid
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    pub fn fit_r2(&self) -> &[f64] {
        &self.fit_r2
    }

    pub fn scales(&self) -> &ScaleSet {
        &self.scales
    }

    pub fn at(&self, q: f64) -> Option<f64> {
        self.q_grid.index_of(q).map(|i| self.tau[i])
    }
}

/// τ(q) as the least-squares slope of ln Z(q, δ) against ln δ.
pub fn estimate_tau(measure: &MeasureGrid, q_grid: &QGrid, scales: &ScaleSet) -> Result<TauCurve> {
    scales.check_against(measure.side())?;
    let log_delta = scales.log_deltas(measure.side());
    let per_scale = scales
        .box_sides()
        .iter()
        .map(|&s| positive_log_masses(measure, s))
        .collect::<Result<Vec<_>>>()?;
    let entropy_sums = per_scale
        .iter()
        .map(|logs| logs.iter().map(|&l| l.exp() * l).sum())
        .collect();

    let mut tau = Vec::with_capacity(q_grid.len());
    let mut fit_r2 = Vec::with_capacity(q_grid.len());
    let mut ln_z = vec![0.0; per_scale.len()];
    for &q in q_grid.values() {
        for (z, logs) in ln_z.iter_mut().zip(&per_scale) {
            *z = log_partition(logs, q);
        }
        let fit = ols(&log_delta, &ln_z).ok_or_else(|| {
            Error::InvalidScales("scales do not span a range of box sizes".into())
        })?;
        tau.push(fit.slope);
        fit_r2.push(fit.r2);
    }
    Ok(TauCurve {
        q_grid: q_grid.clone(),
        tau,
        fit_r2,
        scales: scales.clone(),
        log_delta,
        entropy_sums,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DQCurve {
    q_grid: QGrid,
    d: Vec<f64>,
}

impl DQCurve {
    pub fn new(q_grid: QGrid, d: Vec<f64>) -> Result<Self> {
        if d.len() != q_grid.len() {
            return Err(Error::QGridMismatch);
        }
        Ok(Self { q_grid, d })
    }

    pub fn q_grid(&self) -> &QGrid {
        &self.q_grid
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn at(&self, q: f64) -> Option<f64> {
        self.q_grid.index_of(q).map(|i| self.d[i])
    }
}

/// D(q) = τ(q)/(q − 1); D(1) is the slope of Σ μ ln μ against ln δ.
pub fn generalized_dimensions(tau: &TauCurve) -> Result<DQCurve> {
    let qs = tau.q_grid.values();
    let mut d = Vec::with_capacity(qs.len());
    for (i, &q) in qs.iter().enumerate() {
        if q == 1.0 {
            let info = if tau.entropy_sums.is_empty() {
                // analytic curves carry no per-scale sums: D(1) = τ'(1)
                central_difference(qs, &tau.tau, i)
            } else {
                ols(&tau.log_delta, &tau.entropy_sums)
                    .ok_or_else(|| Error::InvalidScales("degenerate scales".into()))?
                    .slope
            };
            d.push(info);
        } else {
            d.push(tau.tau[i] / (q - 1.0));
        }
    }
    DQCurve::new(tau.q_grid.clone(), d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectrumMethod {
    Chhabra,
    Legendre,
    LargeDeviation,
    Hausdorff,
}

impl SpectrumMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectrumMethod::Chhabra => "chhabra",
            SpectrumMethod::Legendre => "legendre",
            SpectrumMethod::LargeDeviation => "large-deviation",
            SpectrumMethod::Hausdorff => "hausdorff",
        }
    }
}

impl FromStr for SpectrumMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chhabra" => Ok(Self::Chhabra),
            "legendre" => Ok(Self::Legendre),
            "large-deviation" | "ld" => Ok(Self::LargeDeviation),
            "hausdorff" => Ok(Self::Hausdorff),
            other => Err(Error::InvalidArgument(format!("unknown spectrum method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub alpha: f64,
    pub f: f64,
    pub q: Option<f64>,
}

/// Sampled f(α).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumCurve {
    method: SpectrumMethod,
    points: Vec<SpectrumPoint>,
}

impl SpectrumCurve {
    pub fn new(method: SpectrumMethod, points: Vec<SpectrumPoint>) -> Self {
        Self { method, points }
    }

    pub fn method(&self) -> SpectrumMethod {
        self.method
    }

    pub fn points(&self) -> &[SpectrumPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn at_q(&self, q: f64) -> Option<SpectrumPoint> {
        self.points.iter().copied().find(|p| p.q == Some(q))
    }

    pub fn max_f(&self) -> Option<SpectrumPoint> {
        self.points.iter().copied().reduce(|a, b| if b.f > a.f { b } else { a })
    }
}

/// Direct f(α): with μ̂ᵢ = μᵢ^q / Σ μⱼ^q, α(q) is the slope of Σ μ̂ᵢ ln μᵢ
/// and f(q) the slope of Σ μ̂ᵢ ln μ̂ᵢ, both against ln δ.
pub fn chhabra_spectrum(
    measure: &MeasureGrid,
    q_grid: &QGrid,
    scales: &ScaleSet,
) -> Result<SpectrumCurve> {
    scales.check_against(measure.side())?;
    let log_delta = scales.log_deltas(measure.side());
    let per_scale = scales
        .box_sides()
        .iter()
        .map(|&s| positive_log_masses(measure, s))
        .collect::<Result<Vec<_>>>()?;

    let mut points = Vec::with_capacity(q_grid.len());
    let mut a_sums = vec![0.0; per_scale.len()];
    let mut f_sums = vec![0.0; per_scale.len()];
    for &q in q_grid.values() {
        for (k, logs) in per_scale.iter().enumerate() {
            let lz = log_partition(logs, q);
            let (mut a, mut f) = (0.0, 0.0);
            for &l in logs {
                let log_w = q * l - lz;
                let w = log_w.exp();
                a += w * l;
                f += w * log_w;
            }
            a_sums[k] = a;
            f_sums[k] = f;
        }
        let degenerate = || Error::InvalidScales("degenerate scales".into());
        let alpha = ols(&log_delta, &a_sums).ok_or_else(degenerate)?.slope;
        let f = ols(&log_delta, &f_sums).ok_or_else(degenerate)?.slope;
        points.push(SpectrumPoint { alpha, f, q: Some(q) });
    }
    Ok(SpectrumCurve::new(SpectrumMethod::Chhabra, points))
}

fn central_difference(q: &[f64], y: &[f64], i: usize) -> f64 {
    let n = q.len();
    let (lo, hi) = if i == 0 {
        (0, 1)
    } else if i == n - 1 {
        (n - 2, n - 1)
    } else {
        (i - 1, i + 1)
    };
    (y[hi] - y[lo]) / (q[hi] - q[lo])
}

/// Numerical Legendre transform: α = dτ/dq (central differences, one-sided
/// at the ends), f = qα − τ.
pub fn legendre_spectrum(tau: &TauCurve) -> Result<SpectrumCurve> {
    let qs = tau.q_grid.values();
    if qs.len() < 5 {
        return Err(Error::QGridTooCoarse(qs.len()));
    }
    if tau.q_grid.uniform_step().is_none() {
        return Err(Error::NonUniformQGrid);
    }
    let points = (0..qs.len())
        .map(|i| {
            let alpha = central_difference(qs, &tau.tau, i);
            SpectrumPoint {
                alpha,
                f: qs[i] * alpha - tau.tau[i],
                q: Some(qs[i]),
            }
        })
        .collect();
    Ok(SpectrumCurve::new(SpectrumMethod::Legendre, points))
}
