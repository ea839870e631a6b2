//! Binary polar-lightfield archive.
//!
//! ```text
//! magic     8 bytes  "LFPOLAR\0"
//! version   u32 LE   1
//! r1max     u32 LE
//! r2max     u32 LE
//! channels  u32 LE   1 or 3
//! blocks, R1-major, R2 inner; per block (n = (7·R1+1)(7·R2+1)):
//!   values  n·channels f32 LE, bins row-major (θ1 rows), channels interleaved
//!   mask    n u8, 1 = valid, 0 = outside the captured data
//! ```

use std::path::Path;

use crate::error::{Error, Result};
use crate::resample::{angular_bins, PolarBlock, PolarLightfield};

pub const ARCHIVE_MAGIC: &[u8; 8] = b"LFPOLAR\0";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 8 + 4 * 4;

pub fn encode_polar_archive(pl: &PolarLightfield) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN);
    out.extend_from_slice(ARCHIVE_MAGIC);
    for v in [VERSION, pl.r1max() as u32, pl.r2max() as u32, pl.channels() as u32] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for b in pl.blocks() {
        for v in b.values() {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend(b.mask().iter().map(|&m| u8::from(m)));
    }
    out
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4-byte slice"))
}

/// Total payload size implied by the header, or `None` on overflow.
fn payload_len(r1max: usize, r2max: usize, channels: usize) -> Option<usize> {
    ring_bins_total(r1max)?
        .checked_mul(ring_bins_total(r2max)?)?
        .checked_mul(4 * channels + 1)
}

/// `Σ_{r=0..=rmax} (7r + 1)`.
fn ring_bins_total(rmax: usize) -> Option<usize> {
    let n = rmax.checked_add(1)?;
    n.checked_mul(rmax)?.checked_mul(7)?.checked_div(2)?.checked_add(n)
}

pub fn decode_polar_archive(bytes: &[u8]) -> Result<PolarLightfield> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Archive(format!("{} bytes is shorter than the header", bytes.len())));
    }
    if &bytes[..8] != ARCHIVE_MAGIC {
        return Err(Error::Archive("bad magic".into()));
    }
    let version = u32_at(bytes, 8);
    if version != VERSION {
        return Err(Error::Archive(format!("unsupported version {version}")));
    }
    let r1max = u32_at(bytes, 12) as usize;
    let r2max = u32_at(bytes, 16) as usize;
    let channels = u32_at(bytes, 20) as usize;
    if channels != 1 && channels != 3 {
        return Err(Error::Archive(format!("channel count {channels} not 1 or 3")));
    }
    let body = &bytes[HEADER_LEN..];
    let expected = payload_len(r1max, r2max, channels).ok_or_else(|| Error::Archive("header sizes overflow".into()))?;
    if body.len() != expected {
        return Err(Error::Archive(format!("payload is {} bytes, header implies {expected}", body.len())));
    }
    let mut pos = 0;
    let mut blocks = Vec::with_capacity((r1max + 1) * (r2max + 1));
    for r1 in 0..=r1max {
        for r2 in 0..=r2max {
            let n = angular_bins(r1) * angular_bins(r2);
            let values = body[pos..pos + 4 * n * channels]
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().expect("4-byte chunk")))
                .collect();
            pos += 4 * n * channels;
            let mask = body[pos..pos + n]
                .iter()
                .map(|&m| match m {
                    0 => Ok(false),
                    1 => Ok(true),
                    other => Err(Error::Archive(format!("mask byte {other} in block ({r1}, {r2})"))),
                })
                .collect::<Result<_>>()?;
            pos += n;
            blocks.push(PolarBlock::new(r1, r2, channels, values, mask)?);
        }
    }
    PolarLightfield::from_blocks(r1max, r2max, channels, blocks)
}

pub fn read_polar_archive(path: &Path) -> Result<PolarLightfield> {
    decode_polar_archive(&super::read_bytes(path)?)
}

pub fn write_polar_archive(pl: &PolarLightfield, path: &Path) -> Result<()> {
    super::write_atomic(path, &encode_polar_archive(pl))
}
