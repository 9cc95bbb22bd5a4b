//! Output plumbing: CSV/JSON writers shared by the subcommands.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::CliError;

/// 17 significant digits: round-trips every finite f64 bit-exactly.
pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// An optional f64 as a CSV cell; absent values are empty cells.
pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

/// Buffered writer on `--out`, or stdout when no path was given.
pub fn writer(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => {
            let f = File::create(path).map_err(|e| CliError::Io {
                path: path.display().to_string(),
                source: e,
            })?;
            Box::new(BufWriter::new(f))
        }
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

/// One CSV row of already-formatted cells.
pub fn row(w: &mut dyn Write, cells: &[String]) -> Result<(), CliError> {
    writeln!(w, "{}", cells.join(","))?;
    Ok(())
}

/// Pretty JSON followed by a newline. Field order is fixed by the report
/// structs, so identical inputs produce identical bytes.
pub fn json<T: Serialize>(w: &mut dyn Write, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("reports always serialize");
    writeln!(w, "{text}")?;
    Ok(())
}

/// JSON to stdout (used for summaries when the series went to a file).
pub fn json_stdout<T: Serialize>(value: &T) -> Result<(), CliError> {
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    json(&mut w, value)?;
    w.flush()?;
    Ok(())
}
