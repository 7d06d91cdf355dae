//! Header comments, digests and file helpers shared by every command.

use std::fs;
use std::path::Path;

use mfia::formats::{self, Sniffed};
use mfia::measures::{crop_dyadic, to_measure};
use mfia::{GrayImage, MeasureGrid, MeasureKind};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Header lines (without the comment marker) identifying tool, command,
/// configuration and input.
pub fn header_lines(command: &str, config: &str, digest: &str) -> Vec<String> {
    vec![
        format!("mfia {VERSION} {command}"),
        format!("config: {config}"),
        format!("input-sha256: {digest}"),
    ]
}

pub fn commented(lines: &[String]) -> String {
    lines.iter().map(|l| format!("# {l}\n")).collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Digest over (name, content digest) pairs in the given order.
pub fn combined_digest<'a>(entries: impl IntoIterator<Item = (&'a str, &'a str)>) -> String {
    let mut h = Sha256::new();
    for (name, digest) in entries {
        h.update(name.as_bytes());
        h.update([0]);
        h.update(digest.as_bytes());
        h.update(b"\n");
    }
    hex(&h.finalize())
}

pub fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

pub fn write(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Writes to `path`, or to standard output when absent.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => write(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// A decoded input: the measure, plus the cropped image when the input was
/// an image rather than an `MFM1` measure.
pub struct LoadedInput {
    pub measure: MeasureGrid,
    pub image: Option<GrayImage>,
}

pub fn load_input(bytes: &[u8], kind: MeasureKind, min_side: usize) -> mfia::Result<LoadedInput> {
    match formats::sniff(bytes) {
        Sniffed::Measure => Ok(LoadedInput {
            measure: formats::decode_measure(bytes, kind)?,
            image: None,
        }),
        _ => {
            let img = crop_dyadic(&formats::decode_image(bytes)?, min_side)?;
            Ok(LoadedInput {
                measure: to_measure(&img, kind)?,
                image: Some(img),
            })
        }
    }
}
