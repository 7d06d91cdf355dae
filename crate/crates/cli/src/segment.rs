//! `segment`: masks from the exponent map, leaving the input untouched.

use mfia::formats::{encode_alpha_map, encode_pgm, preview_8bit};
use mfia::holder::{alpha_map, hausdorff_spectrum, large_deviation_spectrum, AlphaMap};
use mfia::moments::{chhabra_spectrum, estimate_tau, legendre_spectrum, SpectrumCurve, SpectrumMethod};
use mfia::pipeline::AnalysisConfig;
use mfia::segment::{box_dimension, select_by_alpha, select_by_f, BitMask};
use mfia::{BitDepth, GrayImage, MeasureGrid};

use crate::args::SegmentArgs;
use crate::error::{CliError, CliResult};
use crate::output::{header_lines, load_input, read, sha256_hex, write};
use crate::Outcome;

fn parse_range(s: &str) -> CliResult<(f64, f64)> {
    let bad = || CliError::Usage(format!("--alpha-range expects lo:hi, got `{s}`"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn spectrum_for(
    method: SpectrumMethod,
    m: &MeasureGrid,
    map: &AlphaMap,
    cfg: &AnalysisConfig,
) -> mfia::Result<SpectrumCurve> {
    match method {
        SpectrumMethod::Hausdorff => hausdorff_spectrum(map, cfg.bin_width, &cfg.hausdorff_sides),
        SpectrumMethod::LargeDeviation => large_deviation_spectrum(m, &cfg.scales, cfg.bin_width),
        SpectrumMethod::Chhabra => chhabra_spectrum(m, &cfg.q_grid, &cfg.scales),
        SpectrumMethod::Legendre => legendre_spectrum(&estimate_tau(m, &cfg.q_grid, &cfg.scales)?),
    }
}

fn mask_image(mask: &BitMask) -> GrayImage {
    let data = mask.bits().iter().map(|&b| if b { 255 } else { 0 }).collect();
    GrayImage::new(mask.side(), mask.side(), BitDepth::Eight, data).expect("square mask")
}

/// Source at half brightness with selected pixels forced to 255.
fn overlay(source: &GrayImage, mask: &BitMask) -> GrayImage {
    let max = source.depth().max_value() as f64;
    let data = source
        .data()
        .iter()
        .zip(mask.bits())
        .map(|(&v, &sel)| if sel { 255 } else { ((v as f64 / max) * 127.5).round() as u16 })
        .collect();
    GrayImage::new(source.width(), source.height(), BitDepth::Eight, data).expect("same shape")
}

pub fn run(a: &SegmentArgs) -> CliResult<Outcome> {
    let cfg = a.analysis.config()?;
    let range = a.alpha_range.as_deref().map(parse_range).transpose()?;
    let selection = match (a.f_target, range) {
        (Some(f), None) => {
            if !(a.tol > 0.0) {
                return Err(CliError::Usage(format!("--tol must be positive, got {}", a.tol)));
            }
            format!("f_target={f} tol={} spectrum={}", a.tol, a.spectrum.as_str())
        }
        (None, Some((lo, hi))) => format!("alpha_range={lo}:{hi}"),
        _ => return Err(CliError::Usage("give exactly one of --f-target or --alpha-range".into())),
    };
    let echo = format!("{} {selection}", a.analysis.echo()?);
    let bytes = read(&a.input)?;
    let header = header_lines("segment", &echo, &sha256_hex(&bytes));
    let input = load_input(&bytes, a.analysis.measure, a.analysis.min_side)?;
    let map = alpha_map(&input.measure, &cfg.windows)?;
    let mask = match (a.f_target, range) {
        (Some(f), _) => {
            let spec = spectrum_for(a.spectrum, &input.measure, &map, &cfg)?;
            select_by_f(&map, &spec, f, a.tol)?
        }
        (_, Some((lo, hi))) => select_by_alpha(&map, lo, hi)?,
        _ => unreachable!("validated above"),
    };

    let mut mask_header = header.clone();
    mask_header.push(format!("selection: {}", mask.provenance()));
    write(&a.output, &encode_pgm(&mask_image(&mask), &mask_header))?;
    if let Some(path) = &a.overlay {
        let source = match &input.image {
            Some(img) => img.clone(),
            None => {
                let mass: Vec<Option<f64>> = input.measure.mass().iter().map(|&v| Some(v)).collect();
                preview_8bit(input.measure.side(), &mass)
            }
        };
        write(path, &encode_pgm(&overlay(&source, &mask), &mask_header))?;
    }
    if let Some(path) = &a.alpha_map {
        write(path, &encode_alpha_map(&map))?;
    }
    if let Some(path) = &a.alpha_preview {
        let vals: Vec<Option<f64>> = map.alpha().to_vec();
        let mut lines = header.clone();
        lines.push("preview only: alpha linearly rescaled, undefined = 0".into());
        write(path, &encode_pgm(&preview_8bit(map.side(), &vals), &lines))?;
    }

    let total = mask.side() * mask.side();
    print!(
        "selected\t{}\nfraction\t{:.6}\n",
        mask.count(),
        mask.count() as f64 / total as f64
    );
    if mask.count() > 0 {
        println!("box_dimension\t{:.6}", box_dimension(&mask, &cfg.scales)?);
    } else {
        println!("box_dimension\t-");
    }
    Ok(Outcome::Complete)
}
