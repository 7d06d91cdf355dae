//! Pooled-covariance linear discriminant and leave-one-out evaluation.
//!
//! Sums go through [`fsum`], so a model does not depend on row order and a
//! dataset duplicated row-for-row yields bit-identical means and covariance.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rayon::prelude::*;

use super::dataset::{LabeledDataset, LabeledRow};
use super::fsum::fsum;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LdaOptions {
    /// Ridge λ = factor × mean diagonal of the pooled covariance.
    pub ridge_factor: f64,
    /// Per-class priors in class-name order; equal when `None`.
    pub priors: Option<Vec<f64>>,
}

impl Default for LdaOptions {
    fn default() -> Self {
        Self {
            ridge_factor: 1e-6,
            priors: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LdaModel {
    class_names: Vec<String>,
    class_means: Vec<DVector<f64>>,
    pooled_cov: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
    log_priors: Vec<f64>,
    ridge: f64,
}

impl LdaModel {
    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn class_means(&self) -> &[DVector<f64>] {
        &self.class_means
    }

    /// Pooled covariance including the ridge term.
    pub fn pooled_cov(&self) -> &DMatrix<f64> {
        &self.pooled_cov
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    pub fn priors(&self) -> Vec<f64> {
        self.log_priors.iter().map(|l| l.exp()).collect()
    }

    /// Squared Mahalanobis distance to each class mean.
    pub fn mahalanobis(&self, x: &[f64]) -> Result<Vec<f64>> {
        let dim = self.pooled_cov.nrows();
        if x.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: x.len(),
            });
        }
        let x = DVector::from_column_slice(x);
        Ok(self
            .class_means
            .iter()
            .map(|m| {
                let d = &x - m;
                let y = self
                    .chol
                    .l_dirty()
                    .solve_lower_triangular(&d)
                    .expect("cholesky factor has a positive diagonal");
                y.norm_squared()
            })
            .collect())
    }

    /// Class minimizing ½·D² − ln prior; near-ties (relative 1e−12) go to
    /// the class that sorts first.
    pub fn predict(&self, x: &[f64]) -> Result<&str> {
        let d2 = self.mahalanobis(x)?;
        let mut best = 0;
        let mut best_score = 0.5 * d2[0] - self.log_priors[0];
        for (k, (d, lp)) in d2.iter().zip(&self.log_priors).enumerate().skip(1) {
            let score = 0.5 * d - lp;
            if score < best_score - 1e-12 * best_score.abs().max(1.0) {
                best = k;
                best_score = score;
            }
        }
        Ok(&self.class_names[best])
    }
}

pub fn fit_lda(ds: &LabeledDataset) -> Result<LdaModel> {
    fit_lda_with(ds, &LdaOptions::default())
}

pub fn fit_lda_with(ds: &LabeledDataset, opts: &LdaOptions) -> Result<LdaModel> {
    let rows: Vec<&LabeledRow> = ds.rows().iter().collect();
    fit_rows(&rows, ds.class_names(), ds.dim(), opts)
}

/// Fit on a subset of rows; every class must keep at least one row.
fn fit_rows(rows: &[&LabeledRow], class_names: &[String], dim: usize, opts: &LdaOptions) -> Result<LdaModel> {
    let k = class_names.len();
    let n = rows.len();
    if dim + k >= n {
        return Err(Error::InvalidDataset(format!(
            "{dim} features need more than {} rows for {k} classes, got {n}",
            dim + k
        )));
    }
    if !(opts.ridge_factor >= 0.0) {
        return Err(Error::InvalidArgument("ridge factor must be non-negative".into()));
    }
    let log_priors = match &opts.priors {
        None => vec![-(k as f64).ln(); k],
        Some(p) => {
            if p.len() != k || p.iter().any(|v| !(*v > 0.0)) || (fsum(p.iter().copied()) - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidArgument("priors must be positive and sum to 1".into()));
            }
            p.iter().map(|v| v.ln()).collect()
        }
    };

    let members: Vec<Vec<&LabeledRow>> = class_names
        .iter()
        .map(|c| rows.iter().copied().filter(|r| &r.label == c).collect())
        .collect();
    if let Some(i) = members.iter().position(Vec::is_empty) {
        return Err(Error::InvalidDataset(format!("class `{}` has no rows", class_names[i])));
    }
    let class_means: Vec<DVector<f64>> = members
        .iter()
        .map(|m| {
            DVector::from_fn(dim, |j, _| fsum(m.iter().map(|r| r.values[j])) / m.len() as f64)
        })
        .collect();

    let mut cov = DMatrix::zeros(dim, dim);
    for a in 0..dim {
        for b in a..dim {
            let s = fsum(members.iter().zip(&class_means).flat_map(|(m, mean)| {
                m.iter().map(move |r| (r.values[a] - mean[a]) * (r.values[b] - mean[b]))
            }));
            cov[(a, b)] = s / n as f64;
            cov[(b, a)] = cov[(a, b)];
        }
    }
    let ridge = opts.ridge_factor * fsum((0..dim).map(|i| cov[(i, i)])) / dim as f64;
    for i in 0..dim {
        cov[(i, i)] += ridge;
    }
    if cov.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularCovariance);
    }
    let chol = Cholesky::new(cov.clone()).ok_or(Error::SingularCovariance)?;
    if chol.l_dirty().diagonal().iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
        return Err(Error::SingularCovariance);
    }
    Ok(LdaModel {
        class_names: class_names.to_vec(),
        class_means,
        pooled_cov: cov,
        chol,
        log_priors,
        ridge,
    })
}

/// Counts of (true class, predicted class); rows are the truth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub class_names: Vec<String>,
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        self.correct() as f64 / self.total() as f64
    }

    /// Fraction of each class predicted correctly.
    pub fn recall(&self) -> Vec<f64> {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let n: usize = row.iter().sum();
                if n == 0 {
                    0.0
                } else {
                    row[i] as f64 / n as f64
                }
            })
            .collect()
    }
}

fn check_pair(ds: &LabeledDataset, pair: Option<(&str, &str)>) -> Result<LabeledDataset> {
    match pair {
        None => Ok(ds.clone()),
        Some((a, b)) if a == b => Err(Error::InvalidArgument(format!("pair `{a}:{b}` repeats a class"))),
        Some((a, b)) => ds.filter_classes(&[a, b]),
    }
}

/// Leave-one-out: each row is predicted by a model fit on all other rows.
pub fn loocv(ds: &LabeledDataset, pair: Option<(&str, &str)>, opts: &LdaOptions) -> Result<ConfusionMatrix> {
    let ds = check_pair(ds, pair)?;
    let keys: Vec<usize> = (0..ds.len()).collect();
    run_folds(&ds, &keys, opts)
}

/// Leave-one-group-out: rows sharing a key are held out together.
pub fn loocv_grouped(
    ds: &LabeledDataset,
    pair: Option<(&str, &str)>,
    group_of_row: impl Fn(&LabeledRow) -> String,
    opts: &LdaOptions,
) -> Result<ConfusionMatrix> {
    let ds = check_pair(ds, pair)?;
    let mut names: Vec<String> = ds.rows().iter().map(&group_of_row).collect();
    let ids = {
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        names
            .drain(..)
            .map(|g| sorted.binary_search(&g).expect("key present"))
            .collect::<Vec<_>>()
    };
    run_folds(&ds, &ids, opts)
}

fn run_folds(ds: &LabeledDataset, fold_of_row: &[usize], opts: &LdaOptions) -> Result<ConfusionMatrix> {
    let classes = ds.class_names();
    let mut folds: Vec<usize> = fold_of_row.to_vec();
    folds.sort_unstable();
    folds.dedup();

    let outcomes: Vec<Result<Vec<(usize, usize)>>> = folds
        .par_iter()
        .map(|&fold| {
            let train: Vec<&LabeledRow> = ds
                .rows()
                .iter()
                .zip(fold_of_row)
                .filter(|(_, &f)| f != fold)
                .map(|(r, _)| r)
                .collect();
            let held: Vec<&LabeledRow> = ds
                .rows()
                .iter()
                .zip(fold_of_row)
                .filter(|(_, &f)| f == fold)
                .map(|(r, _)| r)
                .collect();
            let wrap = |e: Error| Error::FoldFailed {
                held_out: held.iter().map(|r| r.id.as_str()).collect::<Vec<_>>().join(","),
                source: Box::new(e),
            };
            let model = fit_rows(&train, classes, ds.dim(), opts).map_err(wrap)?;
            held.iter()
                .map(|r| {
                    let truth = classes.iter().position(|c| c == &r.label).expect("known class");
                    let pred = model.predict(&r.values).map_err(wrap)?;
                    let pred = classes.iter().position(|c| c == pred).expect("known class");
                    Ok((truth, pred))
                })
                .collect()
        })
        .collect();

    let mut counts = vec![vec![0usize; classes.len()]; classes.len()];
    for outcome in outcomes {
        for (t, p) in outcome? {
            counts[t][p] += 1;
        }
    }
    Ok(ConfusionMatrix {
        class_names: classes.to_vec(),
        counts,
    })
}

/// LOOCV restricted to every unordered pair of classes, in class order.
pub fn pairwise_loocv(ds: &LabeledDataset, opts: &LdaOptions) -> Result<Vec<((String, String), ConfusionMatrix)>> {
    let names = ds.class_names();
    let mut out = Vec::new();
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            let cm = loocv(ds, Some((&names[i], &names[j])), opts)?;
            out.push(((names[i].clone(), names[j].clone()), cm));
        }
    }
    Ok(out)
}
