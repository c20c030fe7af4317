use anyhow::{Context, Result};
use std::io::Write;
use std::path::{Path, PathBuf};

/// Where a report goes. Exit-status rules treat stdout as successfully
/// written once the bytes are flushed.
pub enum Sink {
    Stdout,
    File(PathBuf),
}

impl Sink {
    pub fn from_option(path: &Option<PathBuf>) -> Sink {
        match path {
            Some(p) => Sink::File(p.clone()),
            None => Sink::Stdout,
        }
    }

    pub fn write(&self, contents: &str) -> Result<()> {
        match self {
            Sink::Stdout => {
                let mut out = std::io::stdout().lock();
                out.write_all(contents.as_bytes())?;
                out.flush()?;
                Ok(())
            }
            Sink::File(path) => write_file(path, contents),
        }
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

/// Renders rows as comma-separated values with a header, LF line
/// endings, and `.` as the decimal point (Rust float formatting never
/// localizes, so formatting values with `format!` upholds that).
pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Shortest-roundtrip float formatting, so values parsed back from a
/// report are bit-identical to the values that were computed.
pub fn float(v: f64) -> String {
    format!("{v}")
}

pub fn millis(v: f64) -> String {
    format!("{v:.3}")
}
