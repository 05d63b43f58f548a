//! Netpbm reader for the bilevel and greyscale variants (P1, P2, P4, P5).

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum PnmKind {
    PbmAscii,
    PgmAscii,
    PbmBinary,
    PgmBinary,
}

/// Decoded image: PBM samples are 1 for black, PGM samples are scaled to 0..=255.
#[derive(Debug)]
pub(crate) struct PnmImage {
    pub kind: PnmKind,
    pub width: usize,
    pub height: usize,
    pub samples: Vec<u8>,
}

impl PnmKind {
    pub fn is_bitmap(self) -> bool {
        matches!(self, PnmKind::PbmAscii | PnmKind::PbmBinary)
    }
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn header_number(&mut self, what: &str) -> Result<usize> {
        self.skip_ws_and_comments();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::CorruptHeader(format!("missing {what}")));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::CorruptHeader(format!("{what} out of range")))
    }
}

pub(crate) fn decode(bytes: &[u8]) -> Result<PnmImage> {
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(Error::UnsupportedFormat("not a Netpbm file".into()));
    }
    let kind = match bytes[1] {
        b'1' => PnmKind::PbmAscii,
        b'2' => PnmKind::PgmAscii,
        b'4' => PnmKind::PbmBinary,
        b'5' => PnmKind::PgmBinary,
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "Netpbm variant P{}",
                other as char
            )))
        }
    };
    let mut cur = Cursor {
        data: bytes,
        pos: 2,
    };
    if !cur
        .data
        .get(2)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(Error::CorruptHeader("no separator after magic".into()));
    }
    let width = cur.header_number("width")?;
    let height = cur.header_number("height")?;
    if width == 0 || height == 0 {
        return Err(Error::CorruptHeader(format!(
            "zero dimension {width}x{height}"
        )));
    }
    let maxval = if kind.is_bitmap() {
        1
    } else {
        let v = cur.header_number("maxval")?;
        if v == 0 {
            return Err(Error::CorruptHeader("maxval is zero".into()));
        }
        if v > 255 {
            return Err(Error::UnsupportedFormat(format!(
                "16-bit greymap (maxval {v})"
            )));
        }
        v
    };
    let count = width
        .checked_mul(height)
        .ok_or_else(|| Error::CorruptHeader("dimensions overflow".into()))?;

    let samples = match kind {
        PnmKind::PbmAscii => {
            let mut out = Vec::with_capacity(count);
            while out.len() < count {
                cur.skip_ws_and_comments();
                match cur.data.get(cur.pos) {
                    None => break,
                    Some(b'0') => out.push(0),
                    Some(b'1') => out.push(1),
                    Some(&b) => {
                        return Err(Error::CorruptData(format!(
                            "unexpected byte {b:#04x} in bitmap"
                        )))
                    }
                }
                cur.pos += 1;
            }
            out
        }
        PnmKind::PgmAscii => {
            let mut out = Vec::with_capacity(count);
            while out.len() < count {
                cur.skip_ws_and_comments();
                if cur.pos >= cur.data.len() {
                    break;
                }
                let v = cur
                    .header_number("sample")
                    .map_err(|_| Error::CorruptData("non-numeric sample".into()))?;
                if v > maxval {
                    return Err(Error::CorruptData(format!(
                        "sample {v} exceeds maxval {maxval}"
                    )));
                }
                out.push(scale(v, maxval));
            }
            out
        }
        PnmKind::PbmBinary | PnmKind::PgmBinary => {
            // exactly one whitespace byte separates the header from the raster
            if !cur.data.get(cur.pos).is_some_and(u8::is_ascii_whitespace) {
                return Err(Error::CorruptHeader("missing raster separator".into()));
            }
            let raster = &cur.data[cur.pos + 1..];
            if kind == PnmKind::PbmBinary {
                let stride = width.div_ceil(8);
                let rows = (raster.len() / stride).min(height);
                let mut out = Vec::with_capacity(rows * width);
                for row in raster.chunks_exact(stride).take(rows) {
                    out.extend((0..width).map(|x| (row[x / 8] >> (7 - x % 8)) & 1));
                }
                out
            } else {
                raster
                    .iter()
                    .take(count)
                    .map(|&v| {
                        if usize::from(v) > maxval {
                            Err(Error::CorruptData(format!(
                                "sample {v} exceeds maxval {maxval}"
                            )))
                        } else {
                            Ok(scale(v.into(), maxval))
                        }
                    })
                    .collect::<Result<_>>()?
            }
        }
    };
    if samples.len() < count {
        return Err(Error::TruncatedData {
            expected: count,
            found: samples.len(),
        });
    }
    Ok(PnmImage {
        kind,
        width,
        height,
        samples,
    })
}

fn scale(v: usize, maxval: usize) -> u8 {
    ((v * 255 + maxval / 2) / maxval) as u8
}
