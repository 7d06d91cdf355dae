//! The feature CSV: writing, schema check and reading.

use std::path::Path;

use mfia::features::{FeatureVector, FEATURE_NAMES, MAP_FEATURES, MOMENT_FEATURES};

use crate::error::{CliError, CliResult};

pub fn schema() -> Vec<&'static str> {
    let mut cols = vec!["source_id", "label"];
    cols.extend(FEATURE_NAMES);
    cols
}

/// Header comment, column row, then one row per vector in the given order.
/// Floats use the shortest representation that reads back exactly.
pub fn write_csv(header: &str, rows: &[FeatureVector]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(header.as_bytes().to_vec());
    let csv_err = |e: csv::Error| CliError::Csv {
        path: "<memory>".into(),
        source: e,
    };
    w.write_record(schema()).map_err(csv_err)?;
    for fv in rows {
        let mut rec = vec![fv.source_id.clone(), fv.label.clone().unwrap_or_default()];
        rec.extend(fv.values().iter().map(|v| format!("{v:?}")));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| CliError::io("<memory>", e.into_error()))
}

/// Reads a feature CSV, skipping `#` comment lines. The column row must
/// match the schema exactly.
pub fn read_csv(path: &Path, bytes: &[u8]) -> CliResult<Vec<FeatureVector>> {
    let csv_err = |e: csv::Error| CliError::Csv {
        path: path.to_path_buf(),
        source: e,
    };
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(bytes);
    let headers = r.headers().map_err(csv_err)?.clone();
    let expected = schema();
    for (i, want) in expected.iter().enumerate() {
        match headers.get(i) {
            Some(got) if got == *want => {}
            Some(got) => {
                return Err(CliError::SchemaMismatch(format!(
                    "column {} is `{got}`, expected `{want}`",
                    i + 1
                )))
            }
            None => return Err(CliError::SchemaMismatch(format!("missing column `{want}`"))),
        }
    }
    if let Some(extra) = headers.get(expected.len()) {
        return Err(CliError::SchemaMismatch(format!("unexpected column `{extra}`")));
    }
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let row = line + 1;
        let mut values = [0.0; 13];
        for (j, v) in values.iter_mut().enumerate() {
            let field = rec.get(j + 2).unwrap_or("");
            *v = field.trim().parse().map_err(|_| {
                CliError::SchemaMismatch(format!(
                    "row {row}, column `{}`: `{field}` is not a number",
                    FEATURE_NAMES[j]
                ))
            })?;
        }
        let label = rec.get(1).unwrap_or("").to_string();
        out.push(FeatureVector::from_values(
            rec.get(0).unwrap_or("").to_string(),
            (!label.is_empty()).then_some(label),
            values,
        ));
    }
    Ok(out)
}

/// Resolves a `--features` value: `all`, `moments`, `map`, or a comma list
/// of column names.
pub fn feature_subset(spec: &str) -> CliResult<Vec<&'static str>> {
    match spec.trim() {
        "all" => Ok(FEATURE_NAMES.to_vec()),
        "moments" => Ok(MOMENT_FEATURES.to_vec()),
        "map" => Ok(MAP_FEATURES.to_vec()),
        list => {
            let mut out = Vec::new();
            for name in list.split(',').map(str::trim) {
                let known = FEATURE_NAMES
                    .iter()
                    .find(|f| **f == name)
                    .ok_or_else(|| CliError::Usage(format!("unknown feature `{name}`")))?;
                if out.contains(known) {
                    return Err(CliError::Usage(format!("feature `{name}` listed twice")));
                }
                out.push(*known);
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(id: &str, label: &str, x: f64) -> FeatureVector {
        FeatureVector::from_values(id.into(), Some(label.into()), [x; 13])
    }

    #[test]
    fn round_trip_is_exact() {
        let rows = vec![fv("a/1.pgm", "a", 0.1 + 0.2), fv("b/\"odd\",name.pgm", "b", -1e-300)];
        let bytes = write_csv("# hello\n", &rows).unwrap();
        let back = read_csv(Path::new("x.csv"), &bytes).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn renamed_column_is_named() {
        let bytes = write_csv("", &[fv("a", "a", 1.0)]).unwrap();
        let text = String::from_utf8(bytes).unwrap().replace("f_mean", "fmean");
        let err = read_csv(Path::new("x.csv"), text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("fmean"), "{err}");
    }

    #[test]
    fn subsets() {
        assert_eq!(feature_subset("all").unwrap().len(), 13);
        assert_eq!(feature_subset("d_max, f_std").unwrap(), vec!["d_max", "f_std"]);
        assert!(feature_subset("d_max,bogus").is_err());
        assert!(feature_subset("d_max,d_max").is_err());
    }
}
