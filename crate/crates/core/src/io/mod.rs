//! File interchange: PGM/PPM rasters, scene and geometry text files, the
//! binary polar archive and CSV reports.
//!
//! Every reader validates the whole input before returning; no partially
//! populated value escapes on error. Writers go through [`write_atomic`].

mod archive;
mod pnm;
mod report;
mod text;

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

pub use archive::{decode_polar_archive, encode_polar_archive, read_polar_archive, write_polar_archive, ARCHIVE_MAGIC};
pub use pnm::{decode_pnm, encode_pnm, read_raster, write_raster};
pub use report::{pair_table, residual_table, theorem_table, write_csv_report, CsvTable};
pub use text::{
    format_geometry, format_scene, parse_geometry, parse_scene, read_geometry, read_scene, write_geometry,
    write_scene,
};

/// Writes `bytes` to a temporary file next to `path`, then renames it into
/// place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::file(path, e))?;
    tmp.write_all(bytes).map_err(|e| Error::file(path, e))?;
    tmp.persist(path).map_err(|e| Error::file(path, e.error))?;
    Ok(())
}

pub(crate) fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::file(path, e))
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::file(path, e))
}
