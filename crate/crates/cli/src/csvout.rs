//! Minimal RFC-4180-style CSV emission with a versioned schema comment on
//! the first line and deterministic number formatting.

use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub struct CsvFile {
    writer: BufWriter<std::fs::File>,
    path: PathBuf,
}

impl CsvFile {
    pub fn create(path: &Path, schema: &str, columns: &[&str]) -> std::io::Result<Self> {
        let mut writer = BufWriter::new(std::fs::File::create(path)?);
        writeln!(writer, "# {schema}")?;
        writeln!(writer, "{}", columns.join(","))?;
        Ok(CsvFile {
            writer,
            path: path.to_path_buf(),
        })
    }

    pub fn row(&mut self, fields: &[String]) -> std::io::Result<()> {
        writeln!(self.writer, "{}", fields.join(","))
    }

    pub fn finish(mut self) -> std::io::Result<PathBuf> {
        self.writer.flush()?;
        Ok(self.path)
    }
}

/// Fixed scientific formatting: deterministic and full precision.
pub fn num(value: f64) -> String {
    format!("{value:.12e}")
}

pub fn int(value: i64) -> String {
    value.to_string()
}

pub fn flag(value: bool) -> String {
    if value { "1".to_string() } else { "0".to_string() }
}
