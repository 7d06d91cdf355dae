//! Group statistics and classification of labeled feature vectors.

mod anova;
mod dataset;
mod fsum;
mod lda;

pub use anova::{anova_groups, anova_oneway, AnovaResult};
pub use dataset::{LabeledDataset, LabeledRow};
pub use fsum::fsum;
pub use lda::{
    fit_lda, fit_lda_with, loocv, loocv_grouped, pairwise_loocv, ConfusionMatrix, LdaModel,
    LdaOptions,
};
