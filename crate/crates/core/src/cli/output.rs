use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use super::{CliError, EXIT_FAILURE};

/// Opens `path` for writing (creating parent directories) or stdout.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
            }
            let f = File::create(p).map_err(|e| io_err(p, e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
    }
}

pub fn io_err(path: &Path, e: io::Error) -> CliError {
    CliError { code: EXIT_FAILURE, message: format!("{}: {e}", path.display()) }
}

pub fn write_err(e: io::Error) -> CliError {
    CliError { code: EXIT_FAILURE, message: format!("write failed: {e}") }
}

/// Quotes a text field when it contains CSV metacharacters.
pub fn text(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Numeric CSV field; non-finite values are refused.
pub fn num(x: f64) -> Result<String, CliError> {
    if x.is_finite() {
        Ok(format!("{x}"))
    } else {
        Err(CliError { code: EXIT_FAILURE, message: format!("refusing to write non-finite value {x} to CSV") })
    }
}

pub fn line<W: Write + ?Sized>(w: &mut W, fields: &[String]) -> Result<(), CliError> {
    writeln!(w, "{}", fields.join(",")).map_err(write_err)
}

pub fn json_file<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = sink(Some(path))?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError { code: EXIT_FAILURE, message: e.to_string() })?;
    writeln!(w).map_err(write_err)?;
    w.flush().map_err(write_err)
}
