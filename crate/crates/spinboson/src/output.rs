use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::config::Format;
use crate::error::CliError;
use crate::sweep::{SweepRow, HEADER};

/// Writes to `path`, or to stdout when absent.
pub fn with_sink<T>(
    path: Option<&Path>,
    f: impl FnOnce(&mut dyn Write) -> Result<T, CliError>,
) -> Result<T, CliError> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::Config {
                field: "output.path".into(),
                message: format!("cannot create {}: {e}", p.display()),
            })?;
            let mut w = BufWriter::new(file);
            let out = f(&mut w)?;
            w.flush()?;
            Ok(out)
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            let out = f(&mut w)?;
            w.flush()?;
            Ok(out)
        }
    }
}

fn encode(e: impl std::fmt::Display) -> CliError {
    CliError::Encode(e.to_string())
}

pub fn write_rows(rows: &[SweepRow], format: Format, w: &mut dyn Write) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            let mut csv = csv::WriterBuilder::new().has_headers(false).from_writer(w);
            csv.write_record(HEADER).map_err(encode)?;
            for row in rows {
                csv.serialize(row).map_err(encode)?;
            }
            csv.flush()?;
        }
        Format::Json => write_json(rows, w)?,
    }
    Ok(())
}

pub fn rows_to_string(rows: &[SweepRow], format: Format) -> Result<String, CliError> {
    let mut buf = Vec::new();
    write_rows(rows, format, &mut buf)?;
    String::from_utf8(buf).map_err(encode)
}

pub fn parse_rows(text: &str, format: Format) -> Result<Vec<SweepRow>, CliError> {
    match format {
        Format::Json => serde_json::from_str(text).map_err(encode),
        Format::Csv => {
            let mut r = csv::Reader::from_reader(text.as_bytes());
            r.deserialize().collect::<Result<_, _>>().map_err(encode)
        }
    }
}

pub fn write_json<T: Serialize + ?Sized>(value: &T, w: &mut dyn Write) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *w, value).map_err(encode)?;
    writeln!(w)?;
    Ok(())
}

/// Two-column `quantity,value` CSV for scalar reports.
pub fn write_pairs(pairs: &[(&str, String)], w: &mut dyn Write) -> Result<(), CliError> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["quantity", "value"]).map_err(encode)?;
    for (k, v) in pairs {
        csv.write_record([*k, v.as_str()]).map_err(encode)?;
    }
    csv.flush()?;
    Ok(())
}
