//! Image files.
//!
//! `.nlmf` is a lossless raw-float container:
//!
//! | offset | size | content                          |
//! |--------|------|----------------------------------|
//! | 0      | 4    | magic `NLMF`                     |
//! | 4      | 1    | version, currently 1             |
//! | 5      | 4    | width, u32 little-endian         |
//! | 9      | 4    | height, u32 little-endian        |
//! | 13     | 4·wh | pixels, f32 little-endian, row-major |
//!
//! `.pgm` is binary P5 with 8- or 16-bit samples. Samples read as their raw
//! integer values; on write the image is scaled so that a chosen full-scale
//! value (by default the image maximum) maps to maxval, then rounded.

use std::fs;
use std::path::Path;

use rnlm::{Domain, Image};

use crate::error::{CliError, Result};

pub const NLMF_MAGIC: &[u8; 4] = b"NLMF";
pub const NLMF_VERSION: u8 = 1;
const NLMF_HEADER: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Nlmf,
    Pgm,
}

impl Format {
    pub fn of(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase) {
            Some(e) if e == "nlmf" => Ok(Format::Nlmf),
            Some(e) if e == "pgm" => Ok(Format::Pgm),
            _ => Err(CliError::usage(format!(
                "{}: unsupported image extension (expected .nlmf or .pgm)",
                path.display()
            ))),
        }
    }
}

pub fn read_image(path: &Path, domain: Domain) -> Result<Image> {
    let format = Format::of(path)?;
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    match format {
        Format::Nlmf => decode_nlmf(&bytes, domain).map_err(|m| CliError::format(path, m)),
        Format::Pgm => decode_pgm(&bytes, domain).map_err(|m| CliError::format(path, m)),
    }
}

pub fn write_image(path: &Path, img: &Image) -> Result<()> {
    write_image_scaled(path, img, None)
}

/// Like [`write_image`]; for PGM, `full_scale` is the value mapped to maxval.
pub fn write_image_scaled(path: &Path, img: &Image, full_scale: Option<f64>) -> Result<()> {
    let bytes = match Format::of(path)? {
        Format::Nlmf => encode_nlmf(img),
        Format::Pgm => encode_pgm(img, full_scale.unwrap_or_else(|| img.max()), 255),
    };
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

pub fn encode_nlmf(img: &Image) -> Vec<u8> {
    let mut out = Vec::with_capacity(NLMF_HEADER + 4 * img.len());
    out.extend_from_slice(NLMF_MAGIC);
    out.push(NLMF_VERSION);
    out.extend_from_slice(&(img.width() as u32).to_le_bytes());
    out.extend_from_slice(&(img.height() as u32).to_le_bytes());
    for &v in img.pixels() {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    out
}

pub fn decode_nlmf(bytes: &[u8], domain: Domain) -> std::result::Result<Image, String> {
    if bytes.len() < NLMF_HEADER {
        return Err(format!(
            "truncated header: expected {NLMF_HEADER} bytes, found {}",
            bytes.len()
        ));
    }
    if &bytes[..4] != NLMF_MAGIC {
        return Err(format!("bad magic at byte offset 0: {:?}", &bytes[..4]));
    }
    if bytes[4] != NLMF_VERSION {
        return Err(format!("unsupported version {} at byte offset 4", bytes[4]));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
    let (w, h) = (u32_at(5) as usize, u32_at(9) as usize);
    if w == 0 || h == 0 {
        return Err(format!("empty image {w}x{h} at byte offset 5"));
    }
    let expected = w
        .checked_mul(h)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| format!("dimensions {w}x{h} overflow"))?;
    let actual = bytes.len() - NLMF_HEADER;
    if actual != expected {
        return Err(format!(
            "payload at byte offset {NLMF_HEADER}: expected {expected} bytes for {w}x{h}, found {actual}"
        ));
    }
    let mut pixels = Vec::with_capacity(w * h);
    for (i, chunk) in bytes[NLMF_HEADER..].chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().expect("4 bytes"));
        if !(v.is_finite() && v >= 0.0) {
            return Err(format!(
                "pixel {i} at byte offset {} is {v}; values must be finite and >= 0",
                NLMF_HEADER + 4 * i
            ));
        }
        pixels.push(f64::from(v));
    }
    Image::new(w, h, pixels, domain).map_err(|e| e.to_string())
}

pub fn encode_pgm(img: &Image, full_scale: f64, maxval: u16) -> Vec<u8> {
    let scale = if full_scale > 0.0 {
        f64::from(maxval) / full_scale
    } else {
        0.0
    };
    let mut out = format!("P5\n{} {}\n{}\n", img.width(), img.height(), maxval).into_bytes();
    for &v in img.pixels() {
        let q = (v * scale).round().clamp(0.0, f64::from(maxval)) as u16;
        if maxval > 255 {
            out.extend_from_slice(&q.to_be_bytes());
        } else {
            out.push(q as u8);
        }
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> std::result::Result<usize, String> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(format!("expected {what} at byte offset {start}"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| format!("{what} out of range at byte offset {start}"))
    }
}

pub fn decode_pgm(bytes: &[u8], domain: Domain) -> std::result::Result<Image, String> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err("bad magic at byte offset 0: expected P5".into());
    }
    let mut c = Cursor { bytes, pos: 2 };
    let w = c.number("width")?;
    let h = c.number("height")?;
    let maxval_at = c.pos;
    let maxval = c.number("maxval")?;
    if !(1..=65535).contains(&maxval) {
        return Err(format!("maxval {maxval} at byte offset {maxval_at} outside 1..=65535"));
    }
    if w == 0 || h == 0 {
        return Err(format!("empty image {w}x{h}"));
    }
    if c.pos >= bytes.len() || !bytes[c.pos].is_ascii_whitespace() {
        return Err(format!("expected whitespace after maxval at byte offset {}", c.pos));
    }
    let start = c.pos + 1;
    let depth = if maxval > 255 { 2 } else { 1 };
    let expected = w * h * depth;
    let actual = bytes.len() - start;
    if actual < expected {
        return Err(format!(
            "payload at byte offset {start}: expected {expected} bytes for {w}x{h}, found {actual}"
        ));
    }
    let data = &bytes[start..start + expected];
    let pixels: Vec<f64> = if depth == 2 {
        data.chunks_exact(2)
            .map(|p| f64::from(u16::from_be_bytes([p[0], p[1]])))
            .collect()
    } else {
        data.iter().map(|&b| f64::from(b)).collect()
    };
    if let Some(i) = pixels.iter().position(|&v| v > maxval as f64) {
        return Err(format!(
            "sample {} at byte offset {} exceeds maxval {maxval}",
            pixels[i],
            start + i * depth
        ));
    }
    Image::new(w, h, pixels, domain).map_err(|e| e.to_string())
}
