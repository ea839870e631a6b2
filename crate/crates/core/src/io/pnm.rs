//! Binary PGM (P5) and PPM (P6).

use std::path::Path;

use crate::error::{Error, Result};
use crate::raster::Raster;

struct Header {
    channels: usize,
    width: usize,
    height: usize,
    maxval: u32,
    data_start: usize,
}

fn is_space(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\n' | b'\r' | 0x0b | 0x0c)
}

/// Reads the next decimal header field, skipping whitespace and comments.
fn next_field(bytes: &[u8], pos: &mut usize, what: &str) -> Result<u32> {
    loop {
        match bytes.get(*pos) {
            Some(&b) if is_space(b) => *pos += 1,
            Some(b'#') => {
                while bytes.get(*pos).is_some_and(|&b| b != b'\n' && b != b'\r') {
                    *pos += 1;
                }
            }
            Some(_) => break,
            None => return Err(Error::MalformedHeader(format!("missing {what}"))),
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(u8::is_ascii_digit) {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::MalformedHeader(format!("{what} is not a number")));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::MalformedHeader(format!("{what} out of range")))
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    if bytes.len() < 2 {
        return Err(Error::MalformedHeader("file shorter than magic number".into()));
    }
    let channels = match &bytes[..2] {
        b"P5" => 1,
        b"P6" => 3,
        other => return Err(Error::UnsupportedMagic(String::from_utf8_lossy(other).into_owned())),
    };
    let mut pos = 2;
    let width = next_field(bytes, &mut pos, "width")? as usize;
    let height = next_field(bytes, &mut pos, "height")? as usize;
    let maxval = next_field(bytes, &mut pos, "maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader(format!("empty image {width}x{height}")));
    }
    if !(1..=65535).contains(&maxval) {
        return Err(Error::MalformedHeader(format!("maxval {maxval} outside 1..=65535")));
    }
    match bytes.get(pos) {
        Some(&b) if is_space(b) => pos += 1,
        _ => return Err(Error::MalformedHeader("no whitespace after maxval".into())),
    }
    Ok(Header {
        channels,
        width,
        height,
        maxval,
        data_start: pos,
    })
}

/// Decodes a P5/P6 image into samples normalized to `[0, 1]`.
pub fn decode_pnm(bytes: &[u8]) -> Result<Raster> {
    let h = parse_header(bytes)?;
    let wide = h.maxval > 255;
    let samples = h
        .width
        .checked_mul(h.height)
        .and_then(|n| n.checked_mul(h.channels))
        .ok_or_else(|| Error::MalformedHeader("image dimensions overflow".into()))?;
    let expected = samples * if wide { 2 } else { 1 };
    let payload = &bytes[h.data_start..];
    if payload.len() < expected {
        return Err(Error::TruncatedPayload {
            expected,
            found: payload.len(),
        });
    }
    let scale = h.maxval as f64;
    let data = if wide {
        payload[..expected]
            .chunks_exact(2)
            .map(|p| u16::from_be_bytes([p[0], p[1]]) as f64 / scale)
            .collect()
    } else {
        payload[..expected].iter().map(|&b| b as f64 / scale).collect()
    };
    Ok(Raster {
        width: h.width,
        height: h.height,
        channels: h.channels,
        data,
    })
}

/// Encodes `[0, 1]` samples (clamped) with the given maxval; values above
/// 255 use 16-bit big-endian samples.
pub fn encode_pnm(raster: &Raster, maxval: u16) -> Result<Vec<u8>> {
    let magic = match raster.channels {
        1 => "P5",
        3 => "P6",
        c => return Err(Error::InvalidArgument(format!("cannot encode {c}-channel image as PNM"))),
    };
    if maxval == 0 {
        return Err(Error::InvalidArgument("maxval must be >= 1".into()));
    }
    let mut out = format!("{magic}\n{} {}\n{maxval}\n", raster.width, raster.height).into_bytes();
    let quant = |v: f64| (v.clamp(0.0, 1.0) * maxval as f64).round() as u16;
    if maxval > 255 {
        for &v in &raster.data {
            out.extend_from_slice(&quant(v).to_be_bytes());
        }
    } else {
        out.extend(raster.data.iter().map(|&v| quant(v) as u8));
    }
    Ok(out)
}

pub fn read_raster(path: &Path) -> Result<Raster> {
    decode_pnm(&super::read_bytes(path)?)
}

pub fn write_raster(raster: &Raster, path: &Path, maxval: u16) -> Result<()> {
    super::write_atomic(path, &encode_pnm(raster, maxval)?)
}
