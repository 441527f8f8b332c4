use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::error::{CliError, Result};

/// Fixed 16-significant-digit scientific notation, so that equal inputs give
/// byte-identical files.
pub fn fmt(v: f64) -> String {
    format!("{v:.15e}")
}

pub fn open(out: Option<&Path>) -> Result<Box<dyn Write>> {
    match out {
        Some(path) => {
            let f = File::create(path).map_err(|e| CliError::io(format!("creating {}", path.display()), e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

pub fn write_csv(out: Option<&Path>, header: &[String], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(open(out)?);
    w.write_record(header)?;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        w.write_record(row.iter().map(|&v| fmt(v)))?;
    }
    w.flush().map_err(|e| CliError::io("flushing output", e))?;
    Ok(())
}
