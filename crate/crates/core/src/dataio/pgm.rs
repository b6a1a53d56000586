//! Netpbm greymap reading (`P2` plain and `P5` raw) and writing.
//!
//! Pixels are scaled to `[0, 1]` by dividing by maxval. Comments (`#` to end
//! of line) are accepted anywhere whitespace is allowed in the header and,
//! for `P2`, in the raster too.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::write_atomic;

pub fn load_pgm(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_pgm(&bytes)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(match self.bytes.get(start) {
                None => Error::format(start, format!("unexpected end of file, expected {what}")),
                Some(&b) => {
                    Error::format(start, format!("expected {what}, found {:?}", char::from(b)))
                }
            });
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        text.parse()
            .map_err(|_| Error::format(start, format!("{what} {text} is too large")))
    }
}

/// Parses a `P2` or `P5` image from memory.
pub fn parse_pgm(bytes: &[u8]) -> Result<Matrix> {
    let raw = match bytes.get(..2) {
        Some(b"P2") => false,
        Some(b"P5") => true,
        _ => return Err(Error::format(0, "not a PGM file (expected magic P2 or P5)")),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    if !cur
        .bytes
        .get(2)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(Error::format(2, "expected whitespace after magic number"));
    }
    let width_at = cur.pos;
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    if width == 0 || height == 0 {
        return Err(Error::format(
            width_at,
            format!("empty image {width}x{height}"),
        ));
    }
    let maxval_at = cur.pos;
    let maxval = cur.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::format(
            maxval_at,
            format!("maxval {maxval} outside 1..=65535"),
        ));
    }
    let count = width * height;
    let maxval_f = maxval as f64;
    let mut data = Vec::with_capacity(count);
    if raw {
        match bytes.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            _ => {
                return Err(Error::format(
                    cur.pos,
                    "expected one whitespace byte after maxval",
                ))
            }
        }
        let sample = if maxval < 256 { 1 } else { 2 };
        let need = count * sample;
        let payload = &bytes[cur.pos..];
        if payload.len() < need {
            return Err(Error::format(
                bytes.len(),
                format!("truncated raster: {} of {need} bytes", payload.len()),
            ));
        }
        for i in 0..count {
            let at = cur.pos + i * sample;
            let v = if sample == 1 {
                payload[i] as u32
            } else {
                u16::from_be_bytes([payload[2 * i], payload[2 * i + 1]]) as u32
            };
            if v > maxval {
                return Err(Error::format(
                    at,
                    format!("pixel value {v} exceeds maxval {maxval}"),
                ));
            }
            data.push(v as f64 / maxval_f);
        }
    } else {
        for _ in 0..count {
            cur.skip_space_and_comments();
            let at = cur.pos;
            let v = cur.number("pixel value")?;
            if v > maxval {
                return Err(Error::format(
                    at,
                    format!("pixel value {v} exceeds maxval {maxval}"),
                ));
            }
            data.push(v as f64 / maxval_f);
        }
    }
    Matrix::new(height, width, data)
}

fn quantize(m: &Matrix, maxval: u16) -> impl Iterator<Item = u16> + '_ {
    m.as_slice()
        .iter()
        .map(move |&v| (v.clamp(0.0, 1.0) * maxval as f64).round() as u16)
}

/// Encodes a `[0, 1]` image as raw `P5`. Values are clamped and rounded to
/// the nearest level; maxval above 255 uses two bytes per sample.
pub fn encode_pgm_raw(m: &Matrix, maxval: u16) -> Vec<u8> {
    let maxval = maxval.max(1);
    let mut out = format!("P5\n{} {}\n{}\n", m.cols(), m.rows(), maxval).into_bytes();
    for v in quantize(m, maxval) {
        if maxval < 256 {
            out.push(v as u8);
        } else {
            out.extend_from_slice(&v.to_be_bytes());
        }
    }
    out
}

/// Encodes a `[0, 1]` image as plain `P2`, one image row per line.
pub fn encode_pgm_plain(m: &Matrix, maxval: u16) -> Vec<u8> {
    let maxval = maxval.max(1);
    let mut out = format!("P2\n{} {}\n{}\n", m.cols(), m.rows(), maxval);
    let levels: Vec<u16> = quantize(m, maxval).collect();
    for row in levels.chunks(m.cols()) {
        let line: Vec<String> = row.iter().map(u16::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out.into_bytes()
}

/// Writes `m` as an 8-bit `P5` file.
pub fn save_pgm(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    write_atomic(path.as_ref(), &encode_pgm_raw(m, 255))
}
