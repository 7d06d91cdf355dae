use statrs::function::beta::checked_beta_reg;

use super::dataset::LabeledDataset;
use super::fsum::fsum;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnovaResult {
    /// `+∞` when every group is internally constant but the groups differ.
    pub f: f64,
    pub p: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub zero_within_variance: bool,
}

/// Classical one-way ANOVA: F = MS_between / MS_within, p from the upper
/// tail of F(k − 1, N − k) via the regularized incomplete beta function.
pub fn anova_groups(groups: &[Vec<f64>]) -> Result<AnovaResult> {
    let k = groups.len();
    let n: usize = groups.iter().map(Vec::len).sum();
    if k < 2 || groups.iter().any(Vec::is_empty) {
        return Err(Error::InvalidDataset("ANOVA needs two or more non-empty groups".into()));
    }
    if n <= k {
        return Err(Error::InvalidDataset("ANOVA needs more observations than groups".into()));
    }
    if groups.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidDataset("ANOVA input has non-finite values".into()));
    }
    let grand = fsum(groups.iter().flatten().copied()) / n as f64;
    let means: Vec<f64> = groups
        .iter()
        .map(|g| fsum(g.iter().copied()) / g.len() as f64)
        .collect();
    let ss_between = fsum(
        groups
            .iter()
            .zip(&means)
            .map(|(g, m)| g.len() as f64 * (m - grand).powi(2)),
    );
    let ss_within = fsum(
        groups
            .iter()
            .zip(&means)
            .flat_map(|(g, m)| g.iter().map(move |v| (v - m).powi(2))),
    );
    let df_between = k - 1;
    let df_within = n - k;
    let zero_within = ss_within == 0.0;
    let (f, p) = if zero_within {
        if ss_between > 0.0 {
            (f64::INFINITY, 0.0)
        } else {
            (0.0, 1.0)
        }
    } else {
        let f = (ss_between / df_between as f64) / (ss_within / df_within as f64);
        (f, f_upper_tail(f, df_between as f64, df_within as f64))
    };
    Ok(AnovaResult {
        f,
        p,
        df_between,
        df_within,
        zero_within_variance: zero_within,
    })
}

/// P(F > f) for F ~ F(d1, d2).
fn f_upper_tail(f: f64, d1: f64, d2: f64) -> f64 {
    if f <= 0.0 {
        return 1.0;
    }
    let x = d2 / (d2 + d1 * f);
    checked_beta_reg(d2 / 2.0, d1 / 2.0, x).unwrap_or(f64::NAN)
}

pub fn anova_oneway(ds: &LabeledDataset, feature: &str) -> Result<AnovaResult> {
    anova_groups(&ds.groups(feature)?)
}
