//! Matrix files: headerless CSV and the little-endian `DMC1` binary layout.
//!
//! Binary layout: the 4 ASCII bytes `DMC1`, `n` as u32 LE, `p` as u32 LE,
//! then `n · p` f64 LE values in row-major order.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;

pub const MAGIC: &[u8; 4] = b"DMC1";
const HEADER_LEN: usize = 12;

/// Loads a matrix, detecting the binary format by its magic bytes and
/// treating anything else as CSV. `header` skips the first CSV line.
pub fn load_matrix(path: &Path, header: bool) -> Result<DataMatrix> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(MAGIC) {
        decode_binary(&bytes)
    } else {
        parse_csv(&bytes, header)
    }
}

/// Writes binary when the extension is `.bin`, CSV otherwise.
pub fn save_matrix(path: &Path, m: &DataMatrix) -> Result<()> {
    let bytes = if path.extension().is_some_and(|e| e == "bin") {
        encode_binary(m)
    } else {
        encode_csv(m, None)?
    };
    write_file(path, &bytes)
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::File::create(path)
        .and_then(|mut f| f.write_all(bytes))
        .map_err(|e| Error::io(path, e))
}

pub fn encode_binary(m: &DataMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * m.as_slice().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(m.rows() as u32).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u32).to_le_bytes());
    for v in m.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_binary(bytes: &[u8]) -> Result<DataMatrix> {
    let parse = |offset: usize, message: String| Error::Parse {
        location: format!("byte offset {offset}"),
        message,
    };
    if bytes.len() < HEADER_LEN {
        return Err(parse(bytes.len(), "truncated header".into()));
    }
    if &bytes[..4] != MAGIC {
        return Err(parse(0, "missing DMC1 magic".into()));
    }
    let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes")) as usize;
    let (n, p) = (word(4), word(8));
    let expected = n
        .checked_mul(p)
        .and_then(|c| c.checked_mul(8))
        .and_then(|c| c.checked_add(HEADER_LEN))
        .ok_or_else(|| parse(4, format!("dimensions {n}x{p} overflow")))?;
    if bytes.len() < expected {
        return Err(parse(
            bytes.len(),
            format!("truncated data: {n}x{p} needs {expected} bytes, file has {}", bytes.len()),
        ));
    }
    if bytes.len() > expected {
        return Err(parse(expected, "trailing bytes after matrix data".into()));
    }
    let values = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    DataMatrix::new(n, p, values)
}

/// Parses comma-separated rows; blank lines are ignored.
pub fn parse_csv(bytes: &[u8], header: bool) -> Result<DataMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut values = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            location: e
                .position()
                .map_or_else(|| "unknown line".into(), |p| format!("line {}", p.line())),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let width = *cols.get_or_insert(record.len());
        if record.len() != width {
            return Err(Error::Parse {
                location: format!("line {line}"),
                message: format!("ragged row: {} fields, expected {width}", record.len()),
            });
        }
        for (col, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                location: format!("line {line}, column {}", col + 1),
                message: format!("not a number: {field:?}"),
            })?;
            values.push(v);
        }
        rows += 1;
    }
    DataMatrix::new(rows, cols.unwrap_or(0), values)
}

/// Formats values with the shortest representation that round-trips.
pub fn encode_csv(m: &DataMatrix, header: Option<&[String]>) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::invalid(format!("csv encoding failed: {e}"));
    if let Some(h) = header {
        w.write_record(h).map_err(csv_err)?;
    }
    for row in m.iter_rows() {
        w.write_record(row.iter().map(|v| format!("{v:?}"))).map_err(csv_err)?;
    }
    w.into_inner()
        .map_err(|e| Error::invalid(format!("csv flush failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_csv() {
        let m = parse_csv(b"0,1\n2,3\n", false).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 2));
        assert_eq!(m.as_slice(), &[0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn csv_with_header() {
        let m = parse_csv(b"a,b\n0,1\n2,3\n", true).unwrap();
        assert_eq!(m.as_slice(), &[0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn ragged_csv_reports_line() {
        match parse_csv(b"0,1\n2\n", false) {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "line 2"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_numeric_csv_reports_column() {
        match parse_csv(b"0,1\n2,x\n", false) {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "line 2, column 2"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn binary_layout() {
        let m = DataMatrix::from_rows(&[vec![1.0, -2.5], vec![0.0, 1e-300]]).unwrap();
        let bytes = encode_binary(&m);
        assert_eq!(&bytes[..4], b"DMC1");
        assert_eq!(&bytes[4..8], &2u32.to_le_bytes());
        assert_eq!(&bytes[8..12], &2u32.to_le_bytes());
        assert_eq!(&bytes[12..20], &1.0f64.to_le_bytes());
        assert_eq!(bytes.len(), 12 + 32);
        assert_eq!(decode_binary(&bytes).unwrap(), m);
    }

    #[test]
    fn truncated_binary() {
        let m = DataMatrix::from_rows(&[vec![1.0], vec![2.0]]).unwrap();
        let bytes = encode_binary(&m);
        for cut in [3, 11, bytes.len() - 1] {
            assert!(matches!(decode_binary(&bytes[..cut]), Err(Error::Parse { .. })));
        }
    }

    #[test]
    fn csv_text_round_trips_exactly() {
        let m = DataMatrix::from_rows(&[vec![0.1, -1e-7, 3.0], vec![1e300, 2.0 / 3.0, -0.0]]).unwrap();
        let text = encode_csv(&m, None).unwrap();
        assert!(!text.contains(&b'\r'));
        assert_eq!(parse_csv(&text, false).unwrap(), m);
    }
}
