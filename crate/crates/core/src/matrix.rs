//! Dense integer matrices and the shared `m n q` text format.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Row-major `m x n` matrix with entries in `[0, q)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    q: u64,
    data: Vec<u64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, q: u64, data: Vec<u64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(format!("matrix must be nonempty, got {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|&v| v >= q) {
            return Err(Error::InvalidInput(format!(
                "entry {} at row {}, column {} is not below q={q}",
                data[pos],
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self { rows, cols, q, data })
    }

    pub fn from_rows(rows: &[Vec<u64>], q: u64) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().position(|row| row.len() != cols) {
            return Err(Error::InvalidInput(format!("row {r} has {} entries, expected {cols}", rows[r].len())));
        }
        Self::new(rows.len(), cols, q, rows.concat())
    }

    pub fn from_columns(columns: &[Vec<u64>], q: u64) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if let Some(c) = columns.iter().position(|col| col.len() != rows) {
            return Err(Error::InvalidInput(format!("column {c} has {} entries, expected {rows}", columns[c].len())));
        }
        let data = (0..rows).flat_map(|r| columns.iter().map(move |col| col[r])).collect();
        Self::new(rows, columns.len(), q, data)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        Self::new(n, n, 2, data).expect("identity is well formed")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Alphabet size.
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_binary(&self) -> bool {
        self.data.iter().all(|&v| v <= 1)
    }

    /// First line `m n q`, then one line of space-separated entries per row.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.rows, self.cols, self.q);
        for r in 0..self.rows {
            let line = self.row(r).iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
            writeln!(out, "{line}").expect("writing to a String");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let dims = parse_numbers(header, 0)?;
        let [m, n, q] = dims[..] else {
            return Err(Error::Parse(format!("header must be `m n q`, got `{header}`")));
        };
        let mut data = Vec::with_capacity((m * n) as usize);
        for r in 0..m as usize {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("expected {m} rows, found {r}")))?;
            let row = parse_numbers(line, r + 1)?;
            if row.len() != n as usize {
                return Err(Error::Parse(format!("row {r} has {} entries, expected {n}", row.len())));
            }
            data.extend(row);
        }
        if lines.next().is_some() {
            return Err(Error::Parse(format!("more than {m} rows")));
        }
        Self::new(m as usize, n as usize, q, data).map_err(|e| Error::Parse(e.to_string()))
    }
}

fn parse_numbers(line: &str, line_no: usize) -> Result<Vec<u64>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<u64>()
                .map_err(|_| Error::Parse(format!("line {line_no}: `{tok}` is not a non-negative integer")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let m = Matrix::from_rows(&[vec![3, 0, 6], vec![0, 3, 0]], 13).unwrap();
        let text = m.to_text();
        assert_eq!(text, "2 3 13\n3 0 6\n0 3 0\n");
        assert_eq!(Matrix::from_text(&text).unwrap(), m);
        assert_eq!(m.column(2), vec![6, 0]);
        assert_eq!(Matrix::from_columns(&[vec![3, 0], vec![0, 3], vec![6, 0]], 13).unwrap(), m);
    }

    #[test]
    fn text_errors() {
        assert!(Matrix::from_text("").is_err());
        assert!(Matrix::from_text("2 2 2\n1 0\n").is_err());
        assert!(Matrix::from_text("1 2 2\n1 0 1\n").is_err());
        assert!(Matrix::from_text("1 2 2\n1 2\n").is_err());
        assert!(Matrix::from_text("1 2 2\n1 x\n").is_err());
        assert!(Matrix::from_text("1 2\n1 0\n").is_err());
    }

    #[test]
    fn identity() {
        let id = Matrix::identity(3);
        assert!(id.is_binary());
        assert_eq!(id.row(1), &[0, 1, 0]);
    }
}
