//! `analyze`: labeled directory tree → feature CSV.

use std::fs;
use std::path::{Path, PathBuf};

use mfia::formats::{dq_tsv, spectrum_tsv, tau_tsv};
use mfia::pipeline::{analyze_measure, AnalysisConfig, ImageAnalysis};
use mfia::MeasureKind;
use rayon::prelude::*;

use crate::args::AnalyzeArgs;
use crate::error::{CliError, CliResult};
use crate::output::{combined_digest, commented, header_lines, load_input, sha256_hex, write};
use crate::table::write_csv;
use crate::Outcome;

/// One input file: `label/filename`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Job {
    pub label: String,
    pub file_name: String,
    pub path: PathBuf,
}

impl Job {
    pub fn source_id(&self) -> String {
        format!("{}/{}", self.label, self.file_name)
    }
}

fn list_dir(dir: &Path) -> CliResult<Vec<(String, PathBuf, bool)>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
        let entry = entry.map_err(|e| CliError::io(dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.starts_with('.') {
            continue;
        }
        let is_dir = entry.path().is_dir();
        out.push((name, entry.path(), is_dir));
    }
    out.sort();
    Ok(out)
}

/// Files of every class subdirectory, sorted by label then file name.
/// Hidden entries and nested directories are skipped.
pub fn discover(root: &Path) -> CliResult<Vec<Job>> {
    if !root.is_dir() {
        return Err(CliError::Usage(format!("{} is not a directory", root.display())));
    }
    let mut jobs = Vec::new();
    for (label, dir, is_dir) in list_dir(root)? {
        if !is_dir {
            continue;
        }
        for (file_name, path, sub_is_dir) in list_dir(&dir)? {
            if !sub_is_dir {
                jobs.push(Job {
                    label: label.clone(),
                    file_name,
                    path,
                });
            }
        }
    }
    jobs.sort();
    Ok(jobs)
}

struct JobResult {
    digest: String,
    outcome: Result<ImageAnalysis, String>,
}

fn process(job: &Job, kind: MeasureKind, min_side: usize, cfg: &AnalysisConfig) -> JobResult {
    let bytes = match fs::read(&job.path) {
        Ok(b) => b,
        Err(e) => {
            return JobResult {
                digest: "unreadable".into(),
                outcome: Err(e.to_string()),
            }
        }
    };
    let digest = sha256_hex(&bytes);
    let outcome = load_input(&bytes, kind, min_side)
        .and_then(|input| analyze_measure(&input.measure, cfg, job.source_id(), Some(job.label.clone())))
        .map_err(|e| e.to_string())
        .and_then(|a| {
            if a.features.values().iter().all(|v| v.is_finite()) {
                Ok(a)
            } else {
                Err("non-finite feature value".into())
            }
        });
    JobResult { digest, outcome }
}

fn curve_stem(job: &Job) -> String {
    let stem = Path::new(&job.file_name)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| job.file_name.clone());
    format!("{}__{}", job.label, stem)
}

fn write_curves(dir: &Path, job: &Job, a: &ImageAnalysis, cfg: &AnalysisConfig, header: &[String]) -> CliResult<()> {
    let mut lines = header.to_vec();
    lines.push(format!("source: {}", job.source_id()));
    let stem = curve_stem(job);
    let q = cfg.q_grid.to_string();
    let files = [
        ("tau", tau_tsv(&a.tau, &lines)),
        ("dq", dq_tsv(&a.dq, &cfg.scales, &lines)),
        ("chhabra", spectrum_tsv(&a.chhabra, &cfg.scales, &q, &lines)),
        ("hausdorff", spectrum_tsv(&a.hausdorff, &cfg.hausdorff_sides, "-", &lines)),
    ];
    for (name, text) in files {
        write(&dir.join(format!("{stem}.{name}.tsv")), text.as_bytes())?;
    }
    Ok(())
}

pub fn error_log_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".errors.log");
    PathBuf::from(s)
}

pub fn run(a: &AnalyzeArgs) -> CliResult<Outcome> {
    let cfg = a.analysis.config()?;
    let echo = a.analysis.echo()?;
    let jobs = discover(&a.input)?;
    if jobs.is_empty() {
        return Err(CliError::EmptyDataset(format!(
            "no files in class subdirectories of {}",
            a.input.display()
        )));
    }
    let results: Vec<JobResult> = jobs
        .par_iter()
        .map(|job| process(job, a.analysis.measure, a.analysis.min_side, &cfg))
        .collect();

    let ids: Vec<String> = jobs.iter().map(Job::source_id).collect();
    let digest = combined_digest(ids.iter().map(String::as_str).zip(results.iter().map(|r| r.digest.as_str())));
    let header = header_lines("analyze", &echo, &digest);

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for ((job, id), r) in jobs.iter().zip(&ids).zip(&results) {
        match &r.outcome {
            Ok(analysis) => {
                if let Some(dir) = &a.curves {
                    write_curves(dir, job, analysis, &cfg, &header)?;
                }
                rows.push(analysis.features.clone());
            }
            Err(reason) => failures.push(format!("{id}\t{reason}")),
        }
    }
    let log = error_log_path(&a.output);
    if failures.is_empty() {
        if log.exists() {
            fs::remove_file(&log).map_err(|e| CliError::io(&log, e))?;
        }
    } else {
        let mut text = commented(&header);
        for f in &failures {
            text.push_str(f);
            text.push('\n');
        }
        write(&log, text.as_bytes())?;
        eprintln!("mfia: {} of {} inputs failed; see {}", failures.len(), jobs.len(), log.display());
    }
    if rows.is_empty() {
        return Err(CliError::EmptyDataset("every input failed".into()));
    }
    write(&a.output, &write_csv(&commented(&header), &rows)?)?;
    Ok(if failures.is_empty() {
        Outcome::Complete
    } else {
        Outcome::Partial
    })
}
