//! CSV parsing helpers and atomic file output.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

/// Parses a numeric field; accepts `inf`, `+inf` and `-inf`.
pub fn parse_num(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "+inf" | "Inf" | "infinity" => Some(f64::INFINITY),
        "-inf" | "-Inf" => Some(f64::NEG_INFINITY),
        t => t.parse::<f64>().ok().filter(|v| !v.is_nan()),
    }
}

/// Reads CSV rows of numbers. A first row that does not parse is treated as a
/// header and skipped; blank lines and `#` comments are ignored.
pub fn read_float_rows<R: Read>(rdr: R) -> Result<Vec<Vec<f64>>> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(rdr);
    let mut out = Vec::new();
    for (i, rec) in csv.records().enumerate() {
        let rec = rec?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let row: Option<Vec<f64>> = rec.iter().map(parse_num).collect();
        match row {
            Some(r) => out.push(r),
            None if i == 0 => continue,
            None => {
                return Err(Error::Input(format!(
                    "non-numeric CSV field on line {}",
                    rec.position().map_or(i as u64 + 1, |p| p.line())
                )))
            }
        }
    }
    Ok(out)
}

/// Formats a float for CSV output; `+∞` is written as `inf`.
pub fn fmt_num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v}")
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    use std::io::Write;
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_inf_handling() {
        let rows = read_float_rows("v,value\n0,1\n1,inf\n# c\n2,-3.5\n".as_bytes()).unwrap();
        assert_eq!(rows, vec![vec![0.0, 1.0], vec![1.0, f64::INFINITY], vec![2.0, -3.5]]);
        assert!(read_float_rows("0,1\nx,2\n".as_bytes()).is_err());
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_num(0.5), "0.5");
    }
}
