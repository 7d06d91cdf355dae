//! File formats: PGM/PNG decoding, PGM encoding, the `MFM1` measure and
//! `AMF1` alpha-map binaries, and tab-separated curve exports.

use std::io::{Cursor, Write};

use crate::error::{Error, Result};
use crate::holder::AlphaMap;
use crate::measures::{BitDepth, GrayImage, MeasureGrid, MeasureKind};
use crate::moments::{DQCurve, ScaleSet, SpectrumCurve, TauCurve};

pub const MFM_MAGIC: &[u8; 4] = b"MFM1";
pub const AMF_MAGIC: &[u8; 4] = b"AMF1";
const PNG_SIGNATURE: &[u8; 8] = b"\x89PNG\r\n\x1a\n";

/// What a file on disk holds, judged from its leading bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sniffed {
    Pgm,
    Png,
    Measure,
    Unknown,
}

pub fn sniff(bytes: &[u8]) -> Sniffed {
    if bytes.starts_with(MFM_MAGIC) {
        Sniffed::Measure
    } else if bytes.starts_with(PNG_SIGNATURE) {
        Sniffed::Png
    } else if bytes.len() >= 2 && bytes[0] == b'P' && bytes[1].is_ascii_digit() {
        Sniffed::Pgm
    } else {
        Sniffed::Unknown
    }
}

pub fn decode_image(bytes: &[u8]) -> Result<GrayImage> {
    match sniff(bytes) {
        Sniffed::Pgm => decode_pnm(bytes),
        Sniffed::Png => decode_png(bytes),
        Sniffed::Measure => Err(Error::UnsupportedFormat(
            "MFM1 measure is not an image".into(),
        )),
        Sniffed::Unknown => Err(Error::UnsupportedFormat(
            "not a PGM or PNG file".into(),
        )),
    }
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn next_uint(&mut self, what: &str) -> Result<u32> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::CorruptFile(format!("missing {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::CorruptFile(format!("{what} out of range")))
    }
}

fn decode_pnm(bytes: &[u8]) -> Result<GrayImage> {
    let ascii = match &bytes[..2] {
        b"P2" => true,
        b"P5" => false,
        b"P3" | b"P6" | b"P7" => {
            return Err(Error::ColorImageRejected(format!(
                "netpbm type {}",
                String::from_utf8_lossy(&bytes[..2])
            )))
        }
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "netpbm type {}",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let mut hdr = HeaderReader { bytes, pos: 2 };
    let width = hdr.next_uint("width")? as usize;
    let height = hdr.next_uint("height")? as usize;
    let maxval = hdr.next_uint("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::CorruptFile(format!("zero dimension {width}x{height}")));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::CorruptFile(format!("maxval {maxval} outside 1..=65535")));
    }
    let depth = if maxval > 255 {
        BitDepth::Sixteen
    } else {
        BitDepth::Eight
    };
    let count = width
        .checked_mul(height)
        .ok_or_else(|| Error::CorruptFile("dimensions overflow".into()))?;

    let mut data = Vec::with_capacity(count);
    if ascii {
        for i in 0..count {
            let v = hdr.next_uint("sample").map_err(|_| {
                Error::CorruptFile(format!("raster ends after {i} of {count} samples"))
            })?;
            data.push(v);
        }
    } else {
        // exactly one whitespace byte separates maxval from the raster
        if hdr.pos >= bytes.len() || !bytes[hdr.pos].is_ascii_whitespace() {
            return Err(Error::CorruptFile("missing raster".into()));
        }
        let raster = &bytes[hdr.pos + 1..];
        let width_bytes = if maxval > 255 { 2 } else { 1 };
        let need = count * width_bytes;
        if raster.len() < need {
            return Err(Error::CorruptFile(format!(
                "raster has {} bytes, {need} expected",
                raster.len()
            )));
        }
        if width_bytes == 1 {
            data.extend(raster[..need].iter().map(|&b| u32::from(b)));
        } else {
            data.extend(
                raster[..need]
                    .chunks_exact(2)
                    .map(|p| u32::from(u16::from_be_bytes([p[0], p[1]]))),
            );
        }
    }
    if let Some(v) = data.iter().find(|&&v| v > maxval) {
        return Err(Error::CorruptFile(format!("sample {v} exceeds maxval {maxval}")));
    }
    GrayImage::new(width, height, depth, data.into_iter().map(|v| v as u16).collect())
}

fn decode_png(bytes: &[u8]) -> Result<GrayImage> {
    let corrupt = |e: png::DecodingError| Error::CorruptFile(format!("png: {e}"));
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(corrupt)?;
    match reader.info().color_type {
        png::ColorType::Grayscale => {}
        png::ColorType::GrayscaleAlpha => {
            return Err(Error::UnsupportedFormat("grayscale PNG with alpha".into()))
        }
        other => return Err(Error::ColorImageRejected(format!("png color type {other:?}"))),
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::CorruptFile("png: image too large".into()))?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(corrupt)?;
    let (w, h) = (info.width as usize, info.height as usize);
    let buf = &buf[..info.buffer_size()];
    match info.bit_depth {
        png::BitDepth::Sixteen => {
            let mut data = Vec::with_capacity(w * h);
            for row in buf.chunks_exact(info.line_size) {
                data.extend(
                    row[..2 * w]
                        .chunks_exact(2)
                        .map(|p| u16::from_be_bytes([p[0], p[1]])),
                );
            }
            GrayImage::new(w, h, BitDepth::Sixteen, data)
        }
        _ => {
            let mut data = Vec::with_capacity(w * h);
            for row in buf.chunks_exact(info.line_size) {
                data.extend(row[..w].iter().map(|&b| u16::from(b)));
            }
            GrayImage::new(w, h, BitDepth::Eight, data)
        }
    }
}

/// Binary PGM (P5). `comments` become `#` lines after the magic number.
pub fn encode_pgm(img: &GrayImage, comments: &[String]) -> Vec<u8> {
    let maxval = img.depth().max_value();
    let mut out = Vec::with_capacity(img.data().len() * 2 + 64);
    out.extend_from_slice(b"P5\n");
    for c in comments {
        for line in c.lines() {
            out.extend_from_slice(b"# ");
            out.extend_from_slice(line.as_bytes());
            out.push(b'\n');
        }
    }
    out.extend_from_slice(format!("{} {}\n{}\n", img.width(), img.height(), maxval).as_bytes());
    match img.depth() {
        BitDepth::Eight => out.extend(img.data().iter().map(|&v| v as u8)),
        BitDepth::Sixteen => {
            for &v in img.data() {
                out.extend_from_slice(&v.to_be_bytes());
            }
        }
    }
    out
}

/// Linear rescale of finite values to 8-bit, `None` → 0. Constant inputs map
/// to 255. Lossy; for inspection only.
pub fn preview_8bit(side: usize, values: &[Option<f64>]) -> GrayImage {
    let finite = values.iter().flatten().copied();
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    let data = values
        .iter()
        .map(|v| match v {
            None => 0,
            Some(_) if hi <= lo => 255,
            Some(v) => ((v - lo) / (hi - lo) * 255.0).round().clamp(0.0, 255.0) as u16,
        })
        .collect();
    GrayImage::new(side, side, BitDepth::Eight, data).expect("preview dimensions are consistent")
}

pub fn encode_measure(m: &MeasureGrid) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + m.mass().len() * 8);
    out.extend_from_slice(MFM_MAGIC);
    out.extend_from_slice(&(m.side() as u32).to_le_bytes());
    for v in m.mass() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Reads an `MFM1` measure. The stored masses are renormalized, so files
/// written by other tools need not sum to one exactly.
pub fn decode_measure(bytes: &[u8], kind: MeasureKind) -> Result<MeasureGrid> {
    if !bytes.starts_with(MFM_MAGIC) {
        return Err(Error::UnsupportedFormat("missing MFM1 magic".into()));
    }
    if bytes.len() < 8 {
        return Err(Error::CorruptFile("MFM1 header truncated".into()));
    }
    let side = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let n = side
        .checked_mul(side)
        .ok_or_else(|| Error::CorruptFile("MFM1 side overflow".into()))?;
    let body = &bytes[8..];
    if body.len() != n * 8 {
        return Err(Error::CorruptFile(format!(
            "MFM1 payload has {} bytes, {} expected",
            body.len(),
            n * 8
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    MeasureGrid::from_values(side, values, kind).map_err(|e| match e {
        Error::InvalidMeasure(msg) => Error::CorruptFile(format!("MFM1: {msg}")),
        other => other,
    })
}

pub fn encode_alpha_map(map: &AlphaMap) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + map.alpha().len() * 4);
    out.extend_from_slice(AMF_MAGIC);
    out.extend_from_slice(&(map.side() as u32).to_le_bytes());
    for a in map.alpha() {
        let v = a.map_or(f32::NAN, |v| v as f32);
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Reads the per-pixel exponents of an `AMF1` file (NaN → `None`).
pub fn decode_alpha_values(bytes: &[u8]) -> Result<(usize, Vec<Option<f32>>)> {
    if !bytes.starts_with(AMF_MAGIC) || bytes.len() < 8 {
        return Err(Error::UnsupportedFormat("missing AMF1 header".into()));
    }
    let side = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let body = &bytes[8..];
    if body.len() != side * side * 4 {
        return Err(Error::CorruptFile("AMF1 payload size mismatch".into()));
    }
    let vals = body
        .chunks_exact(4)
        .map(|c| {
            let v = f32::from_le_bytes(c.try_into().unwrap());
            (!v.is_nan()).then_some(v)
        })
        .collect();
    Ok((side, vals))
}

/// Formats `x` with nine significant digits.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..9).contains(&mag) {
        return format!("{x:.8e}");
    }
    let decimals = (8 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

fn write_header(out: &mut String, method: &str, scales: &ScaleSet, q: &str, extra: &[String]) {
    out.push_str(&format!("# method={method} scales={scales} q={q}\n"));
    for line in extra {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
}

/// `q  tau  r2` rows.
pub fn tau_tsv(tau: &TauCurve, extra_header: &[String]) -> String {
    let mut out = String::new();
    write_header(&mut out, "tau", tau.scales(), &tau.q_grid().to_string(), extra_header);
    for ((q, t), r2) in tau.q_grid().values().iter().zip(tau.tau()).zip(tau.fit_r2()) {
        out.push_str(&format!("{}\t{}\t{}\n", sig9(*q), sig9(*t), sig9(*r2)));
    }
    out
}

/// `q  d` rows.
pub fn dq_tsv(dq: &DQCurve, scales: &ScaleSet, extra_header: &[String]) -> String {
    let mut out = String::new();
    write_header(&mut out, "dq", scales, &dq.q_grid().to_string(), extra_header);
    for (q, d) in dq.q_grid().values().iter().zip(dq.d()) {
        out.push_str(&format!("{}\t{}\n", sig9(*q), sig9(*d)));
    }
    out
}

/// `q  alpha  f` rows; `q` is `-` for spectra not indexed by q.
pub fn spectrum_tsv(spec: &SpectrumCurve, scales: &ScaleSet, q_label: &str, extra_header: &[String]) -> String {
    let mut out = String::new();
    write_header(&mut out, spec.method().as_str(), scales, q_label, extra_header);
    for p in spec.points() {
        let q = p.q.map_or_else(|| "-".to_string(), sig9);
        out.push_str(&format!("{q}\t{}\t{}\n", sig9(p.alpha), sig9(p.f)));
    }
    out
}

pub fn write_file(path: &std::path::Path, bytes: &[u8]) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}
