//! Plain-text matrix format: a `rows cols` header followed by one line per
//! row of whitespace-separated reals. Lines starting with `#` and blank lines
//! are ignored. Values are written with 17 significant digits.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::DenseMatrix;
use crate::error::{Error, Result};

pub fn read_matrix<R: BufRead>(reader: R) -> Result<DenseMatrix> {
    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| match l {
            Ok(s) => {
                let t = s.trim();
                !t.is_empty() && !t.starts_with('#')
            }
            Err(_) => true,
        });

    let (line_no, header) = lines.next().ok_or(Error::Parse {
        line: 0,
        msg: "missing 'rows cols' header".into(),
    })?;
    let header = header?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse {
            line: line_no,
            msg: format!("bad header '{header}': {e}"),
        })?;
    let &[rows, cols] = dims.as_slice() else {
        return Err(Error::Parse {
            line: line_no,
            msg: format!("header must be 'rows cols', got '{header}'"),
        });
    };
    if rows == 0 || cols == 0 {
        return Err(Error::Parse {
            line: line_no,
            msg: "matrix dimensions must be positive".into(),
        });
    }

    let mut data = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let (line_no, line) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: format!("expected {rows} rows, found {r}"),
        })?;
        let line = line?;
        let before = data.len();
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("'{tok}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("non-finite entry '{tok}'"),
                });
            }
            data.push(v);
        }
        if data.len() - before != cols {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected {cols} entries, found {}", data.len() - before),
            });
        }
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(Error::Parse {
            line: line_no,
            msg: "trailing data after the last row".into(),
        });
    }
    Ok(DenseMatrix::from_row_slice(rows, cols, &data))
}

pub fn write_matrix<W: Write>(mut w: W, m: &DenseMatrix) -> Result<()> {
    writeln!(w, "{} {}", m.nrows(), m.ncols())?;
    for row in m.row_iter() {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn read_matrix_file(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    read_matrix(BufReader::new(File::open(path)?))
}

pub fn write_matrix_file(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_matrix(&mut w, m)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reads_comments_and_blank_lines() {
        let text = "# a basis\n2 2\n\n1 0\n# middle\n0 -1.5e-3\n";
        let m = read_matrix(text.as_bytes()).unwrap();
        assert_eq!(m, DenseMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.5e-3]));
    }

    #[test]
    fn rejects_malformed() {
        for text in ["", "2\n1 2\n", "2 2\n1 2\n3\n", "1 2\n1 x\n", "1 1\n1\n2\n", "0 3\n", "1 1\nNaN\n"] {
            assert!(matches!(read_matrix(text.as_bytes()), Err(Error::Parse { .. })), "{text:?}");
        }
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(
            rows in 1usize..6,
            cols in 1usize..6,
            seed in prop::collection::vec(-1e300f64..1e300, 36),
        ) {
            let m = DenseMatrix::from_fn(rows, cols, |i, j| seed[i * 6 + j] * 1e-150);
            let mut buf = Vec::new();
            write_matrix(&mut buf, &m).unwrap();
            let back = read_matrix(buf.as_slice()).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
