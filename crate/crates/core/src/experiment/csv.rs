//! Result tables and the small two-column input files.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{MazerError, Result};

pub const HEADER: [&str; 6] = ["kL", "value", "R", "T", "n_max", "flux_defect"];

/// One κL grid point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResultRow {
    pub kl: f64,
    /// P_em (excited atom), absorption probability (ground atom) or δσ_aa
    /// (any other initial state).
    pub value: f64,
    pub reflection: f64,
    pub transmission: f64,
    /// Highest photon-number channel solved.
    pub n_max: usize,
    /// Largest |1 − |r|² − |t|²| among the channels used.
    pub flux_defect: f64,
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> MazerError + '_ {
    move |source| MazerError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_error(path: &Path, err: csv::Error) -> MazerError {
    MazerError::Parse {
        path: path.to_path_buf(),
        reason: err.to_string(),
    }
}

/// Header plus one LF-terminated line per row, floats as `{:.14e}`.
pub fn emit_csv<W: Write>(rows: &[ResultRow], out: W) -> std::result::Result<(), csv::Error> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(HEADER)?;
    for row in rows {
        writer.write_record([
            format!("{:.14e}", row.kl),
            format!("{:.14e}", row.value),
            format!("{:.14e}", row.reflection),
            format!("{:.14e}", row.transmission),
            row.n_max.to_string(),
            format!("{:.14e}", row.flux_defect),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_error(path))?;
    emit_csv(rows, BufWriter::new(file)).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => MazerError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => MazerError::Parse {
            path: path.to_path_buf(),
            reason: format!("{other:?}"),
        },
    })
}

/// Inverse of [`emit_csv`].
pub fn parse_csv<R: Read>(input: R) -> std::result::Result<Vec<ResultRow>, String> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers().map_err(|e| e.to_string())?;
    if header.iter().ne(HEADER) {
        return Err(format!("unexpected header {header:?}"));
    }
    reader
        .records()
        .enumerate()
        .map(|(i, record)| {
            let record = record.map_err(|e| e.to_string())?;
            let float = |j: usize| -> std::result::Result<f64, String> {
                record[j]
                    .parse()
                    .map_err(|_| format!("row {}: bad number `{}`", i + 1, &record[j]))
            };
            Ok(ResultRow {
                kl: float(0)?,
                value: float(1)?,
                reflection: float(2)?,
                transmission: float(3)?,
                n_max: record[4]
                    .parse()
                    .map_err(|_| format!("row {}: bad n_max `{}`", i + 1, &record[4]))?,
                flux_defect: float(5)?,
            })
        })
        .collect()
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let file = File::open(path).map_err(io_error(path))?;
    parse_csv(file).map_err(|reason| MazerError::Parse {
        path: path.to_path_buf(),
        reason,
    })
}

/// Numeric pairs from a two-column file. A non-numeric first line is taken
/// as a header; blank lines and `#` comments are skipped.
pub fn read_pairs(path: &Path) -> Result<Vec<(f64, f64)>> {
    let file = File::open(path).map_err(io_error(path))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file);
    let mut pairs = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed = match (record.get(0), record.get(1), record.len()) {
            (Some(a), Some(b), 2) => a.parse::<f64>().ok().zip(b.parse::<f64>().ok()),
            _ => None,
        };
        match parsed {
            Some(pair) => pairs.push(pair),
            None if i == 0 => continue,
            None => {
                return Err(MazerError::Parse {
                    path: path.to_path_buf(),
                    reason: format!("line {}: expected two numbers, got {:?}", i + 1, record),
                })
            }
        }
    }
    if pairs.is_empty() {
        return Err(MazerError::Parse {
            path: path.to_path_buf(),
            reason: "no data rows".to_string(),
        });
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(kl: f64) -> ResultRow {
        ResultRow {
            kl,
            value: 0.123_456_789_012_345_67,
            reflection: 1.0 / 3.0,
            transmission: 2.0 / 3.0,
            n_max: 37,
            flux_defect: 3.3e-17,
        }
    }

    #[test]
    fn empty_is_header_only() {
        let mut out = Vec::new();
        emit_csv(&[], &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "kL,value,R,T,n_max,flux_defect\n");
    }

    #[test]
    fn one_row_two_lines() {
        let mut out = Vec::new();
        emit_csv(&[row(0.5)], &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(!text.contains('\r'));
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn round_trip_to_twelve_digits() {
        let rows: Vec<_> = (0..5).map(|i| row(0.01 * i as f64)).collect();
        let mut out = Vec::new();
        emit_csv(&rows, &mut out).unwrap();
        let back = parse_csv(out.as_slice()).unwrap();
        assert_eq!(back.len(), rows.len());
        for (a, b) in rows.iter().zip(&back) {
            for (x, y) in [
                (a.kl, b.kl),
                (a.value, b.value),
                (a.reflection, b.reflection),
                (a.transmission, b.transmission),
                (a.flux_defect, b.flux_defect),
            ] {
                assert!((x - y).abs() <= 1e-12 * x.abs().max(1e-300));
            }
            assert_eq!(a.n_max, b.n_max);
        }
    }

    #[test]
    fn pairs_with_header_and_comments() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.csv");
        std::fs::write(&path, "z,u\n# shape\n0, 0\n0.5,1\n\n1,0\n").unwrap();
        assert_eq!(read_pairs(&path).unwrap(), vec![(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)]);
        std::fs::write(&path, "0,0\n0.5,x\n").unwrap();
        assert!(read_pairs(&path).is_err());
    }
}
