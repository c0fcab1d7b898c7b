use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Immutable GF(2) matrix kept as row and column adjacency lists.
///
/// Indices are 0-based in the API; the text format is 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseParityCheck {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<Vec<usize>>,
    cols: Vec<Vec<usize>>,
}

impl SparseParityCheck {
    /// Builds a matrix from per-row column lists. Lists may be unsorted; duplicates
    /// and out-of-range columns are rejected.
    pub fn from_rows(n_rows: usize, n_cols: usize, mut rows: Vec<Vec<usize>>) -> Result<Self> {
        if rows.len() != n_rows {
            return Err(Error::DimensionMismatch { expected: n_rows, actual: rows.len() });
        }
        let mut cols = vec![Vec::new(); n_cols];
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidParameter(format!("duplicate column in row {i}")));
            }
            for &j in row.iter() {
                if j >= n_cols {
                    return Err(Error::InvalidParameter(format!(
                        "column {j} out of range in row {i} (n_cols = {n_cols})"
                    )));
                }
                cols[j].push(i);
            }
        }
        Ok(SparseParityCheck { n_rows, n_cols, rows, cols })
    }

    pub fn from_dense(dense: &[Vec<u8>]) -> Result<Self> {
        let n_cols = dense.first().map_or(0, Vec::len);
        let mut rows = Vec::with_capacity(dense.len());
        for r in dense {
            if r.len() != n_cols {
                return Err(Error::DimensionMismatch { expected: n_cols, actual: r.len() });
            }
            rows.push(r.iter().enumerate().filter(|(_, &b)| b & 1 == 1).map(|(j, _)| j).collect());
        }
        Self::from_rows(dense.len(), n_cols, rows)
    }

    pub fn identity(k: usize) -> Self {
        Self::from_rows(k, k, (0..k).map(|i| vec![i]).collect()).expect("identity is well formed")
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn col(&self, j: usize) -> &[usize] {
        &self.cols[j]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn cols(&self) -> &[Vec<usize>] {
        &self.cols
    }

    pub fn weight(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        i < self.n_rows && self.rows[i].binary_search(&j).is_ok()
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut out = vec![vec![0u8; self.n_cols]; self.n_rows];
        for (i, row) in self.rows.iter().enumerate() {
            for &j in row {
                out[i][j] = 1;
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        SparseParityCheck {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            rows: self.cols.clone(),
            cols: self.rows.clone(),
        }
    }

    /// Checks that the row and column views describe the same matrix.
    pub fn is_consistent(&self) -> bool {
        let rebuilt = match Self::from_rows(self.n_rows, self.n_cols, self.rows.clone()) {
            Ok(m) => m,
            Err(_) => return false,
        };
        rebuilt.cols == self.cols
    }

    /// `bits · Hᵀ (mod 2)`, one entry per row.
    pub fn syndrome(&self, bits: &[u8]) -> Vec<u8> {
        self.rows
            .iter()
            .map(|row| row.iter().fold(0u8, |acc, &j| acc ^ (bits[j] & 1)))
            .collect()
    }

    pub fn is_codeword(&self, bits: &[u8]) -> bool {
        bits.len() == self.n_cols && self.syndrome(bits).iter().all(|&s| s == 0)
    }

    pub fn unsatisfied_rows(&self, bits: &[u8]) -> usize {
        self.syndrome(bits).iter().filter(|&&s| s == 1).count()
    }

    /// Writes `rows cols nnz` then one 1-based `i j` pair per line, row-major.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {} {}", self.n_rows, self.n_cols, self.weight())?;
        for (i, row) in self.rows.iter().enumerate() {
            for &j in row {
                writeln!(out, "{} {}", i + 1, j + 1)?;
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{} {} {}", self.n_rows, self.n_cols, self.weight()).unwrap();
        for (i, row) in self.rows.iter().enumerate() {
            for &j in row {
                writeln!(s, "{} {}", i + 1, j + 1).unwrap();
            }
        }
        s
    }

    /// Parses the coordinate format. Lines starting with `#` are skipped.
    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input
            .lines()
            .map(|l| l.map_err(Error::from))
            .filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty() && !s.starts_with('#')));
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))??;
        let dims = parse_numbers(&header, 3)?;
        let (n_rows, n_cols, nnz) = (dims[0], dims[1], dims[2]);
        let mut rows = vec![Vec::new(); n_rows];
        let mut count = 0;
        for line in lines {
            let ij = parse_numbers(&line?, 2)?;
            if ij[0] == 0 || ij[0] > n_rows || ij[1] == 0 {
                return Err(Error::Parse(format!("coordinate ({}, {}) out of range", ij[0], ij[1])));
            }
            rows[ij[0] - 1].push(ij[1] - 1);
            count += 1;
        }
        if count != nnz {
            return Err(Error::Parse(format!("header promises {nnz} entries, found {count}")));
        }
        Self::from_rows(n_rows, n_cols, rows)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::read_from(text.as_bytes())
    }
}

fn parse_numbers(line: &str, expected: usize) -> Result<Vec<usize>> {
    let nums = line
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    if nums.len() != expected {
        return Err(Error::Parse(format!("expected {expected} numbers in {line:?}")));
    }
    Ok(nums)
}
