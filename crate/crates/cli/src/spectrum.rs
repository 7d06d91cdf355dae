//! `spectrum`: one curve of one input as TSV.

use mfia::formats::{dq_tsv, spectrum_tsv, tau_tsv};
use mfia::holder::{alpha_map, hausdorff_spectrum, large_deviation_spectrum};
use mfia::moments::{chhabra_spectrum, estimate_tau, generalized_dimensions, legendre_spectrum, SpectrumMethod};

use crate::args::{CurveKind, SpectrumArgs};
use crate::error::CliResult;
use crate::output::{emit, header_lines, load_input, read, sha256_hex};
use crate::Outcome;

pub fn run(a: &SpectrumArgs) -> CliResult<Outcome> {
    let cfg = a.analysis.config()?;
    let echo = a.analysis.echo()?;
    let bytes = read(&a.input)?;
    let header = header_lines("spectrum", &echo, &sha256_hex(&bytes));
    let m = load_input(&bytes, a.analysis.measure, a.analysis.min_side)?.measure;
    let q = cfg.q_grid.to_string();
    let text = match a.method {
        CurveKind::Tau => tau_tsv(&estimate_tau(&m, &cfg.q_grid, &cfg.scales)?, &header),
        CurveKind::Dq => {
            let tau = estimate_tau(&m, &cfg.q_grid, &cfg.scales)?;
            dq_tsv(&generalized_dimensions(&tau)?, &cfg.scales, &header)
        }
        CurveKind::Spectrum(SpectrumMethod::Chhabra) => {
            spectrum_tsv(&chhabra_spectrum(&m, &cfg.q_grid, &cfg.scales)?, &cfg.scales, &q, &header)
        }
        CurveKind::Spectrum(SpectrumMethod::Legendre) => {
            let tau = estimate_tau(&m, &cfg.q_grid, &cfg.scales)?;
            spectrum_tsv(&legendre_spectrum(&tau)?, &cfg.scales, &q, &header)
        }
        CurveKind::Spectrum(SpectrumMethod::LargeDeviation) => spectrum_tsv(
            &large_deviation_spectrum(&m, &cfg.scales, cfg.bin_width)?,
            &cfg.scales,
            "-",
            &header,
        ),
        CurveKind::Spectrum(SpectrumMethod::Hausdorff) => {
            let map = alpha_map(&m, &cfg.windows)?;
            spectrum_tsv(
                &hausdorff_spectrum(&map, cfg.bin_width, &cfg.hausdorff_sides)?,
                &cfg.hausdorff_sides,
                "-",
                &header,
            )
        }
    };
    emit(a.output.as_deref(), &text)?;
    Ok(Outcome::Complete)
}
