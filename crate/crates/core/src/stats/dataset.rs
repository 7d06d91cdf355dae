use crate::error::{Error, Result};
use crate::features::FeatureVector;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledRow {
    pub id: String,
    pub label: String,
    pub values: Vec<f64>,
}

/// Feature rows with class labels: at least two classes, two rows per
/// class, every value finite.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    feature_names: Vec<String>,
    class_names: Vec<String>,
    rows: Vec<LabeledRow>,
}

impl LabeledDataset {
    pub fn new(feature_names: Vec<String>, rows: Vec<LabeledRow>) -> Result<Self> {
        if feature_names.is_empty() {
            return Err(Error::InvalidDataset("no feature columns".into()));
        }
        for row in &rows {
            if row.label.is_empty() {
                return Err(Error::InvalidDataset(format!("row `{}` has no label", row.id)));
            }
            if row.values.len() != feature_names.len() {
                return Err(Error::DimensionMismatch {
                    expected: feature_names.len(),
                    got: row.values.len(),
                });
            }
            if let Some(i) = row.values.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidDataset(format!(
                    "row `{}` has a non-finite `{}`",
                    row.id, feature_names[i]
                )));
            }
        }
        let mut class_names: Vec<String> = rows.iter().map(|r| r.label.clone()).collect();
        class_names.sort();
        class_names.dedup();
        if class_names.len() < 2 {
            return Err(Error::InvalidDataset(format!(
                "need at least 2 classes, found {}",
                class_names.len()
            )));
        }
        for c in &class_names {
            let n = rows.iter().filter(|r| &r.label == c).count();
            if n < 2 {
                return Err(Error::InvalidDataset(format!("class `{c}` has {n} row(s), need 2")));
            }
        }
        Ok(Self {
            feature_names,
            class_names,
            rows,
        })
    }

    /// Selects the named columns from labeled feature vectors.
    pub fn from_features(vectors: &[FeatureVector], names: &[&str]) -> Result<Self> {
        let rows = vectors
            .iter()
            .map(|v| {
                let label = v
                    .label
                    .clone()
                    .filter(|l| !l.is_empty())
                    .ok_or_else(|| Error::InvalidDataset(format!("`{}` has no label", v.source_id)))?;
                let values = names
                    .iter()
                    .map(|n| v.get(n).ok_or_else(|| Error::UnknownFeature(n.to_string())))
                    .collect::<Result<_>>()?;
                Ok(LabeledRow {
                    id: v.source_id.clone(),
                    label,
                    values,
                })
            })
            .collect::<Result<_>>()?;
        Self::new(names.iter().map(|s| s.to_string()).collect(), rows)
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn rows(&self) -> &[LabeledRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_index(&self, name: &str) -> Result<usize> {
        self.feature_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownFeature(name.to_string()))
    }

    /// Keeps only rows of the listed classes.
    pub fn filter_classes(&self, keep: &[&str]) -> Result<Self> {
        for k in keep {
            if !self.class_names.iter().any(|c| c == k) {
                return Err(Error::InvalidDataset(format!("unknown class `{k}`")));
            }
        }
        let rows = self
            .rows
            .iter()
            .filter(|r| keep.contains(&r.label.as_str()))
            .cloned()
            .collect();
        Self::new(self.feature_names.clone(), rows)
    }

    /// Values of one feature grouped by class, in class-name order.
    pub fn groups(&self, feature: &str) -> Result<Vec<Vec<f64>>> {
        let j = self.feature_index(feature)?;
        Ok(self
            .class_names
            .iter()
            .map(|c| {
                self.rows
                    .iter()
                    .filter(|r| &r.label == c)
                    .map(|r| r.values[j])
                    .collect()
            })
            .collect())
    }
}
