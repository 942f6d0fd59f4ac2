//! Plain-text formats shared by the library and the CLI.
//!
//! Matrix file: a header line `m n`, then `m` lines of `n` space-separated
//! decimal floats. Mask files are matrix files whose entries are exactly 0
//! or 1. Step-kernel file: header `p q`, a line of `p+1` row breakpoints, a
//! line of `q+1` column breakpoints, then `p` lines of `q` block values.

use crate::error::{Error, Result};
use crate::graphon::StepGraphon;
use crate::matcore::{DenseMatrix, RevealMask};
use crate::scalar::Real;
use std::fmt::Write as _;
use std::path::Path;

/// Parses a matrix from text. Errors carry 1-based line numbers.
pub fn parse_matrix<T: Real>(text: &str) -> Result<DenseMatrix<T>> {
    let mut lines = NumberedLines::new(text);
    let (m, n) = parse_header(&mut lines)?;
    let mut data = Vec::with_capacity(m * n);
    for _ in 0..m {
        let (line_no, line) = lines.next_content().ok_or_else(|| Error::Parse {
            line: lines.current(),
            message: format!("expected {m} data rows, file ended early"),
        })?;
        let row = parse_floats::<T>(line, line_no)?;
        if row.len() != n {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {n} entries, found {}", row.len()),
            });
        }
        data.extend(row);
    }
    lines.expect_end()?;
    DenseMatrix::from_vec(m, n, data).map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })
}

/// Parses a mask (matrix with 0/1 entries) from text.
pub fn parse_mask<T: Real>(text: &str) -> Result<RevealMask<T>> {
    let matrix = parse_matrix::<T>(text)?;
    RevealMask::from_matrix(matrix).map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })
}

/// Parses a step kernel from text.
pub fn parse_step_graphon<T: Real>(text: &str) -> Result<StepGraphon<T>> {
    let mut lines = NumberedLines::new(text);
    let (p, q) = parse_header(&mut lines)?;
    let breaks = |lines: &mut NumberedLines, want: usize, what: &str| -> Result<Vec<T>> {
        let (line_no, line) = lines.next_content().ok_or_else(|| Error::Parse {
            line: lines.current(),
            message: format!("missing {what} breakpoints"),
        })?;
        let vals = parse_floats::<T>(line, line_no)?;
        if vals.len() != want {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {want} {what} breakpoints, found {}", vals.len()),
            });
        }
        Ok(vals)
    };
    let row_breaks = breaks(&mut lines, p + 1, "row")?;
    let col_breaks = breaks(&mut lines, q + 1, "column")?;
    let mut values = Vec::with_capacity(p * q);
    for _ in 0..p {
        let (line_no, line) = lines.next_content().ok_or_else(|| Error::Parse {
            line: lines.current(),
            message: format!("expected {p} block-value rows, file ended early"),
        })?;
        let row = parse_floats::<T>(line, line_no)?;
        if row.len() != q {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {q} block values, found {}", row.len()),
            });
        }
        values.extend(row);
    }
    lines.expect_end()?;
    let values = DenseMatrix::from_vec(p, q, values).map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    StepGraphon::new(row_breaks, col_breaks, values).map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })
}

/// Renders a matrix in the shared text format.
pub fn render_matrix<T: Real>(a: &DenseMatrix<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", a.rows(), a.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{}", a.get(i, j));
        }
        out.push('\n');
    }
    out
}

/// Renders a step kernel in the shared text format.
pub fn render_step_graphon<T: Real>(w: &StepGraphon<T>) -> String {
    let join = |v: &[T]| {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut out = String::new();
    let vals = w.values();
    let _ = writeln!(out, "{} {}", vals.rows(), vals.cols());
    let _ = writeln!(out, "{}", join(w.row_breaks()));
    let _ = writeln!(out, "{}", join(w.col_breaks()));
    for i in 0..vals.rows() {
        for j in 0..vals.cols() {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{}", vals.get(i, j));
        }
        out.push('\n');
    }
    out
}

pub fn read_matrix_file<T: Real>(path: &Path) -> Result<DenseMatrix<T>> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

pub fn read_mask_file<T: Real>(path: &Path) -> Result<RevealMask<T>> {
    parse_mask(&std::fs::read_to_string(path)?)
}

pub fn read_step_graphon_file<T: Real>(path: &Path) -> Result<StepGraphon<T>> {
    parse_step_graphon(&std::fs::read_to_string(path)?)
}

/// Writes (or overwrites) a file atomically: the content lands in a
/// temporary sibling first and is renamed into place.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp_path = std::path::PathBuf::from(tmp);
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(&tmp_path, content)?;
    std::fs::rename(&tmp_path, path)?;
    Ok(())
}

pub fn write_matrix_file<T: Real>(path: &Path, a: &DenseMatrix<T>) -> Result<()> {
    write_atomic(path, &render_matrix(a))
}

pub fn write_mask_file<T: Real>(path: &Path, mask: &RevealMask<T>) -> Result<()> {
    write_atomic(path, &render_matrix(mask.matrix()))
}

pub fn write_step_graphon_file<T: Real>(path: &Path, w: &StepGraphon<T>) -> Result<()> {
    write_atomic(path, &render_step_graphon(w))
}

struct NumberedLines<'a> {
    inner: std::str::Lines<'a>,
    current: usize,
}

impl<'a> NumberedLines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines(),
            current: 0,
        }
    }

    fn current(&self) -> usize {
        self.current.max(1)
    }

    /// Next non-blank line with its 1-based number.
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        loop {
            let line = self.inner.next()?;
            self.current += 1;
            if !line.trim().is_empty() {
                return Some((self.current, line));
            }
        }
    }

    fn expect_end(&mut self) -> Result<()> {
        if let Some((line, _)) = self.next_content() {
            return Err(Error::Parse {
                line,
                message: "unexpected trailing content".into(),
            });
        }
        Ok(())
    }
}

fn parse_header(lines: &mut NumberedLines) -> Result<(usize, usize)> {
    let (line_no, line) = lines.next_content().ok_or(Error::Parse {
        line: 1,
        message: "empty file; expected a dimension header".into(),
    })?;
    let mut it = line.split_whitespace();
    let parse_dim = |tok: Option<&str>| -> Result<usize> {
        let tok = tok.ok_or(Error::Parse {
            line: line_no,
            message: "header needs two positive integers".into(),
        })?;
        let v: usize = tok.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad dimension {tok:?}"),
        })?;
        if v == 0 {
            return Err(Error::Parse {
                line: line_no,
                message: "dimensions must be positive".into(),
            });
        }
        Ok(v)
    };
    let m = parse_dim(it.next())?;
    let n = parse_dim(it.next())?;
    if it.next().is_some() {
        return Err(Error::Parse {
            line: line_no,
            message: "header has trailing tokens".into(),
        });
    }
    Ok((m, n))
}

fn parse_floats<T: Real>(line: &str, line_no: usize) -> Result<Vec<T>> {
    line.split_whitespace()
        .map(|tok| {
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad number {tok:?}"),
            })?;
            T::from_f64(v).ok_or(Error::Parse {
                line: line_no,
                message: format!("value {tok} not representable"),
            })
        })
        .collect()
}
