//! `classify` and `anova` over a feature CSV.

use std::fmt::Write as _;

use mfia::formats::sig9;
use mfia::stats::{anova_oneway, loocv, loocv_grouped, ConfusionMatrix, LabeledDataset, LabeledRow, LdaOptions};

use crate::args::{AnovaArgs, ClassifyArgs};
use crate::error::{CliError, CliResult};
use crate::output::{commented, emit, header_lines, read, sha256_hex};
use crate::table::{feature_subset, read_csv};
use crate::Outcome;

fn load(input: &std::path::Path, features: &str) -> CliResult<(LabeledDataset, String)> {
    let names = feature_subset(features)?;
    let bytes = read(input)?;
    let rows = read_csv(input, &bytes)?;
    if rows.is_empty() {
        return Err(CliError::EmptyDataset(format!("{} has no rows", input.display())));
    }
    Ok((LabeledDataset::from_features(&rows, &names)?, sha256_hex(&bytes)))
}

fn parse_pair(s: &str) -> CliResult<(String, String)> {
    match s.split_once(':') {
        Some((a, b)) if !a.is_empty() && !b.is_empty() && !b.contains(':') => Ok((a.into(), b.into())),
        _ => Err(CliError::Usage(format!("--pair expects a:b, got `{s}`"))),
    }
}

/// Class label plus the file-name prefix before the first `_`.
pub fn group_key(row: &LabeledRow) -> String {
    let file = row.id.rsplit('/').next().unwrap_or(&row.id);
    let stem = file.split('_').next().unwrap_or(file);
    format!("{}/{stem}", row.label)
}

fn pct(cm: &ConfusionMatrix) -> String {
    format!("{:.1}% ({}/{})", 100.0 * cm.accuracy(), cm.correct(), cm.total())
}

fn anova_table(ds: &LabeledDataset) -> CliResult<String> {
    let mut s = String::from("feature\tF\tp\tdf_between\tdf_within\n");
    for name in ds.feature_names() {
        let r = anova_oneway(ds, name)?;
        writeln!(s, "{name}\t{}\t{}\t{}\t{}", sig9(r.f), sig9(r.p), r.df_between, r.df_within).unwrap();
    }
    Ok(s)
}

pub fn run_classify(a: &ClassifyArgs) -> CliResult<Outcome> {
    if !(a.ridge >= 0.0) || !a.ridge.is_finite() {
        return Err(CliError::Usage(format!("--ridge must be finite and non-negative, got {}", a.ridge)));
    }
    let pair = a.pair.as_deref().map(parse_pair).transpose()?;
    let (ds, digest) = load(&a.input, &a.features)?;
    let opts = LdaOptions {
        ridge_factor: a.ridge,
        priors: None,
    };
    let evaluate = |p: Option<(&str, &str)>| {
        if a.group_by_prefix {
            loocv_grouped(&ds, p, group_key, &opts)
        } else {
            loocv(&ds, p, &opts)
        }
    };
    let pair_ref = pair.as_ref().map(|(x, y)| (x.as_str(), y.as_str()));
    let cm = evaluate(pair_ref)?;
    let pairs: Vec<(String, String)> = match &pair {
        Some(p) => vec![p.clone()],
        None => {
            let c = ds.class_names();
            (0..c.len())
                .flat_map(|i| (i + 1..c.len()).map(move |j| (c[i].clone(), c[j].clone())))
                .collect()
        }
    };

    let echo = format!(
        "features={} pair={} group_by_prefix={} ridge={}",
        a.features,
        a.pair.as_deref().unwrap_or("-"),
        a.group_by_prefix,
        a.ridge
    );
    let mut s = commented(&header_lines("classify", &echo, &digest));
    writeln!(s, "rows\t{}", cm.total()).unwrap();
    writeln!(s, "classes\t{}", cm.class_names.len()).unwrap();
    writeln!(s, "features\t{}", ds.dim()).unwrap();
    writeln!(s, "validation\t{}", if a.group_by_prefix { "leave-one-group-out" } else { "leave-one-out" }).unwrap();
    writeln!(s, "accuracy\t{}", pct(&cm)).unwrap();
    s.push_str("\nrecall\n");
    for (c, r) in cm.class_names.iter().zip(cm.recall()) {
        writeln!(s, "{c}\t{:.1}%", 100.0 * r).unwrap();
    }
    s.push_str("\npairwise\n");
    for (x, y) in &pairs {
        let pcm = if pair.is_some() { cm.clone() } else { evaluate(Some((x, y)))? };
        writeln!(s, "{x}:{y}\t{}", pct(&pcm)).unwrap();
    }
    s.push_str("\nconfusion (rows truth, columns predicted)\n");
    writeln!(s, "\t{}", cm.class_names.join("\t")).unwrap();
    for (c, row) in cm.class_names.iter().zip(&cm.counts) {
        let cells: Vec<String> = row.iter().map(|n| n.to_string()).collect();
        writeln!(s, "{c}\t{}", cells.join("\t")).unwrap();
    }
    let scope = match pair_ref {
        Some((x, y)) => ds.filter_classes(&[x, y])?,
        None => ds.clone(),
    };
    s.push_str("\nanova\n");
    s.push_str(&anova_table(&scope)?);
    emit(a.output.as_deref(), &s)?;
    Ok(Outcome::Complete)
}

pub fn run_anova(a: &AnovaArgs) -> CliResult<Outcome> {
    let (ds, digest) = load(&a.input, &a.features)?;
    let echo = format!("features={}", a.features);
    let mut s = commented(&header_lines("anova", &echo, &digest));
    s.push_str(&anova_table(&ds)?);
    emit(a.output.as_deref(), &s)?;
    Ok(Outcome::Complete)
}
