use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use fpdc_core::simdata::Dataset;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{CliError, Result};

pub fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes =
        serde_json::to_vec_pretty(value).map_err(|source| CliError::Json { path: path.to_path_buf(), source })?;
    bytes.push(b'\n');
    fs::write(path, bytes).map_err(io_err(path))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).map_err(io_err(path))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|source| CliError::Json { path: path.to_path_buf(), source })
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    if !path.exists() {
        return Err(CliError::Config(format!("input {} does not exist", path.display())));
    }
    let file = File::open(path).map_err(io_err(path))?;
    Ok(Dataset::read_csv(BufReader::new(file))?)
}

pub fn write_dataset(path: &Path, d: &Dataset) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    d.write_csv(BufWriter::new(file))?;
    Ok(())
}

/// Writes `header` then one comma-joined line per row, LF-terminated.
pub fn write_csv_rows<I>(path: &Path, header: &str, rows: I) -> Result<()>
where
    I: IntoIterator<Item = String>,
{
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{header}").map_err(io_err(path))?;
    for row in rows {
        writeln!(w, "{row}").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}
