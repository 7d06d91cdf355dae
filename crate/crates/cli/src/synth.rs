use std::path::Path;

use mfia::cascade::{generate_cascade, CascadeSpec};
use mfia::formats::{encode_measure, encode_pgm, preview_8bit};

use crate::args::SynthArgs;
use crate::error::{CliError, CliResult};
use crate::output::{header_lines, write};
use crate::Outcome;

fn spec_for(a: &SynthArgs, seed: u64) -> CliResult<CascadeSpec> {
    let weights: [f64; 4] = a
        .weights
        .as_slice()
        .try_into()
        .map_err(|_| CliError::Usage(format!("--weights needs 4 values, got {}", a.weights.len())))?;
    let spec = CascadeSpec {
        weights,
        depth: a.depth,
        shuffle: a.shuffle,
        seed,
    };
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(spec)
}

fn write_one(spec: &CascadeSpec, path: &Path, preview: Option<&Path>) -> CliResult<()> {
    let m = generate_cascade(spec)?;
    write(path, &encode_measure(&m))?;
    if let Some(p) = preview {
        let w: Vec<String> = spec.weights.iter().map(|w| w.to_string()).collect();
        let config = format!(
            "weights={} depth={} shuffle={} seed={}",
            w.join(","),
            spec.depth,
            spec.shuffle,
            spec.seed
        );
        let mut lines = header_lines("synth", &config, "-");
        lines.push("preview only: mass linearly rescaled to 0..255".into());
        let img = preview_8bit(m.side(), &m.mass().iter().map(|&v| Some(v)).collect::<Vec<_>>());
        write(p, &encode_pgm(&img, &lines))?;
    }
    Ok(())
}

pub fn run(a: &SynthArgs) -> CliResult<Outcome> {
    match a.count {
        None => {
            let spec = spec_for(a, a.seed)?;
            write_one(&spec, &a.output, a.preview.as_deref())?;
        }
        Some(n) => {
            if a.preview.is_some() {
                return Err(CliError::Usage("--preview applies to a single measure".into()));
            }
            if a.prefix.is_empty() || a.prefix.contains(['/', '\\']) {
                return Err(CliError::Usage(format!("bad --prefix `{}`", a.prefix)));
            }
            let specs = (0..n)
                .map(|i| spec_for(a, a.seed.wrapping_add(i as u64)))
                .collect::<CliResult<Vec<_>>>()?;
            let width = n.saturating_sub(1).to_string().len().max(3);
            for (i, spec) in specs.iter().enumerate() {
                let path = a.output.join(format!("{}_{i:0width$}.mfm", a.prefix));
                write_one(spec, &path, None)?;
            }
        }
    }
    Ok(Outcome::Complete)
}
