//! Binary PGM (`P5`) codec, 8-bit only.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::Image;

/// Decodes a binary PGM stream. Bytes after the raster are ignored.
pub fn load_pgm(bytes: &[u8]) -> Result<Image> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::PgmMagic);
    }
    let mut cursor = HeaderCursor { bytes, pos: 2 };
    if !cursor.peek().is_some_and(is_pgm_whitespace) {
        return Err(Error::PgmMagic);
    }
    let width = cursor.number("width")?;
    let height = cursor.number("height")?;
    let maxval = cursor.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::PgmDimensions { width, height });
    }
    if maxval != 255 {
        return Err(Error::PgmMaxval(maxval));
    }
    match cursor.peek() {
        Some(b) if is_pgm_whitespace(b) => cursor.pos += 1,
        Some(_) => return Err(Error::PgmHeader("maxval not followed by whitespace".into())),
        None => {
            return Err(Error::PgmTruncated {
                expected: (width * height) as usize,
                actual: 0,
            })
        }
    }

    let (width, height) = (width as usize, height as usize);
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| Error::PgmHeader(format!("{width}x{height} is too large")))?;
    let payload = &bytes[cursor.pos..];
    if payload.len() < expected {
        return Err(Error::PgmTruncated {
            expected,
            actual: payload.len(),
        });
    }
    Image::new(width, height, payload[..expected].to_vec())
}

/// Encodes with the header `P5\n<w> <h>\n255\n`.
pub fn save_pgm(img: &Image) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", img.width(), img.height());
    let mut out = Vec::with_capacity(header.len() + img.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(img.pixels());
    out
}

pub fn read_pgm_file(path: impl AsRef<Path>) -> std::io::Result<Image> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    load_pgm(&bytes).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
}

pub fn write_pgm_file(path: impl AsRef<Path>, img: &Image) -> std::io::Result<()> {
    let mut writer = std::io::BufWriter::new(std::fs::File::create(path)?);
    writer.write_all(&save_pgm(img))?;
    writer.flush()
}

fn is_pgm_whitespace(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\n' | b'\r' | 0x0b | 0x0c)
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_separators(&mut self) {
        while let Some(b) = self.peek() {
            if is_pgm_whitespace(b) {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(c) = self.peek() {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn number(&mut self, field: &str) -> Result<u64> {
        self.skip_separators();
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(match self.peek() {
                Some(b'-') => Error::PgmHeader(format!("negative {field}")),
                Some(_) => Error::PgmHeader(format!("expected decimal {field}")),
                None => Error::PgmHeader(format!("header ends before {field}")),
            });
        }
        // digits only, so utf8 and parse failures mean overflow
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse::<u64>().ok())
            .ok_or_else(|| Error::PgmHeader(format!("{field} out of range")))
    }
}
