//! Atomic output writes.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use tempfile::NamedTempFile;

use crate::error::{write_error, Result};

/// Writes `path` through a temporary file in the same directory, renamed into
/// place only once `fill` succeeds. Readers never see a partial file.
pub fn write_atomic(path: &Path, fill: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let tmp = NamedTempFile::new_in(dir).map_err(|e| write_error(path, e))?;
    let mut w = BufWriter::new(tmp);
    fill(&mut w).and_then(|_| w.flush()).map_err(|e| write_error(path, e))?;
    let tmp = w.into_inner().map_err(|e| write_error(path, e.error()))?;
    tmp.persist(path).map_err(|e| write_error(path, e.error))?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, |w| w.write_all(text.as_bytes()))
}

pub fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| write_error(dir, e))
}
