use std::fs;
use std::path::Path;

use super::RasterImage;
use crate::error::{GacError, Result};

/// PGM encoding variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmFormat {
    /// `P2`, whitespace-separated decimal samples.
    Ascii,
    /// `P5`, one byte per sample for maxval < 256, else two bytes big-endian.
    Binary,
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<RasterImage> {
    parse_pgm(&fs::read(path)?)
}

pub fn save_pgm(path: impl AsRef<Path>, img: &RasterImage, format: PgmFormat, maxval: u16) -> Result<()> {
    fs::write(path, encode_pgm(img, format, maxval)?)?;
    Ok(())
}

struct Header<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    fn skip_space(&mut self) {
        while self.pos < self.data.len() {
            match self.data[self.pos] {
                b'#' => {
                    while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.data.len() && self.data[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(GacError::Pgm(format!("expected {what} at byte {start}")));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| GacError::Pgm(format!("{what} out of range")))
    }
}

/// Decodes a P2 or P5 file, dividing samples by maxval.
pub fn parse_pgm(data: &[u8]) -> Result<RasterImage> {
    if data.len() < 2 || data[0] != b'P' {
        return Err(GacError::Pgm("missing magic number".into()));
    }
    let binary = match data[1] {
        b'2' => false,
        b'5' => true,
        m => return Err(GacError::Pgm(format!("unsupported magic P{}", m as char))),
    };
    let mut h = Header { data, pos: 2 };
    let width = h.number("width")? as usize;
    let height = h.number("height")? as usize;
    let maxval = h.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(GacError::Pgm(format!("zero dimension {width}x{height}")));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(GacError::Pgm(format!("maxval {maxval} outside 1..=65535")));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| GacError::Pgm("dimensions overflow".into()))?;
    let scale = 1.0 / maxval as f64;
    let mut pixels = Vec::with_capacity(count);
    if binary {
        // Exactly one whitespace byte separates the header from the raster.
        if h.pos >= data.len() || !data[h.pos].is_ascii_whitespace() {
            return Err(GacError::Pgm("missing separator before raster".into()));
        }
        let body = &data[h.pos + 1..];
        let bytes = if maxval < 256 { 1 } else { 2 };
        if body.len() < count * bytes {
            return Err(GacError::Pgm(format!(
                "truncated raster: {} of {} bytes",
                body.len(),
                count * bytes
            )));
        }
        for i in 0..count {
            let v = if bytes == 1 {
                body[i] as u32
            } else {
                u16::from_be_bytes([body[2 * i], body[2 * i + 1]]) as u32
            };
            pixels.push(sample(v, maxval, scale)?);
        }
    } else {
        for i in 0..count {
            let v = h
                .number("sample")
                .map_err(|_| GacError::Pgm(format!("truncated raster: {i} of {count} samples")))?;
            pixels.push(sample(v, maxval, scale)?);
        }
    }
    RasterImage::new(width, height, pixels)
}

fn sample(v: u32, maxval: u32, scale: f64) -> Result<f64> {
    if v > maxval {
        return Err(GacError::Pgm(format!("sample {v} exceeds maxval {maxval}")));
    }
    Ok(v as f64 * scale)
}

/// Encodes with samples rounded to the nearest multiple of `1 / maxval`.
pub fn encode_pgm(img: &RasterImage, format: PgmFormat, maxval: u16) -> Result<Vec<u8>> {
    if maxval == 0 {
        return Err(GacError::InvalidParameter("maxval must be positive".into()));
    }
    let m = maxval as f64;
    let q = |p: f64| (p * m).round() as u16;
    let magic = match format {
        PgmFormat::Ascii => "P2",
        PgmFormat::Binary => "P5",
    };
    let mut out = format!("{magic}\n{} {}\n{maxval}\n", img.width(), img.height()).into_bytes();
    match format {
        PgmFormat::Binary => {
            for &p in img.pixels() {
                if maxval < 256 {
                    out.push(q(p) as u8);
                } else {
                    out.extend_from_slice(&q(p).to_be_bytes());
                }
            }
        }
        PgmFormat::Ascii => {
            for row in img.pixels().chunks(img.width()) {
                let line: Vec<String> = row.iter().map(|&p| q(p).to_string()).collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
    }
    Ok(out)
}
