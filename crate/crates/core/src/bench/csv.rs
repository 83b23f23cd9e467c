use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::BerRecord;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str =
    "detector,snr_db,frames,bit_errors,total_bits,ber,symbol_errors,ser,wall_time_ms";

const COLUMNS: usize = 9;

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(records: &[BerRecord], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.detector,
            real(r.snr_db),
            r.frames,
            r.bit_errors,
            r.total_bits,
            real(r.ber),
            r.symbol_errors,
            real(r.ser),
            real(r.wall_time_ms)
        )?;
    }
    w.flush()
}

pub fn emit_csv(records: &[BerRecord], path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path)?;
    write_csv(records, BufWriter::new(file))?;
    Ok(())
}

/// Parses CSV text produced by [`write_csv`]. Blank lines and lines starting
/// with `#` are skipped; line numbers in errors are 1-based.
pub fn parse_csv(text: &str) -> Result<Vec<BerRecord>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        Some((line, _)) => {
            return Err(Error::Csv {
                line,
                reason: format!("expected header `{CSV_HEADER}`"),
            })
        }
        None => {
            return Err(Error::Csv {
                line: 1,
                reason: "missing header".into(),
            })
        }
    }
    lines.map(|(line, l)| parse_row(line, l)).collect()
}

fn parse_row(line: usize, l: &str) -> Result<BerRecord> {
    let cols: Vec<&str> = l.split(',').collect();
    if cols.len() != COLUMNS {
        return Err(Error::Csv {
            line,
            reason: format!("expected {COLUMNS} columns, found {}", cols.len()),
        });
    }
    let bad = |name: &str, v: &str| Error::Csv {
        line,
        reason: format!("column `{name}`: cannot parse `{v}`"),
    };
    let int = |i: usize, name: &str| {
        cols[i]
            .trim()
            .parse::<usize>()
            .map_err(|_| bad(name, cols[i]))
    };
    let num = |i: usize, name: &str| {
        cols[i]
            .trim()
            .parse::<f64>()
            .map_err(|_| bad(name, cols[i]))
    };
    Ok(BerRecord {
        detector: cols[0].to_string(),
        snr_db: num(1, "snr_db")?,
        frames: int(2, "frames")?,
        bit_errors: int(3, "bit_errors")?,
        total_bits: int(4, "total_bits")?,
        ber: num(5, "ber")?,
        symbol_errors: int(6, "symbol_errors")?,
        ser: num(7, "ser")?,
        wall_time_ms: num(8, "wall_time_ms")?,
    })
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<BerRecord>> {
    parse_csv(&std::fs::read_to_string(path)?)
}
