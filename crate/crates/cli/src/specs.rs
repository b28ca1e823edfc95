//! Parsing of the small textual specs the subcommands take, and file I/O.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use sqgt_core::disjunct::{identity_code, kautz_singleton, random_code, DEFAULT_ATTEMPTS};
use sqgt_core::{BinaryDisjunctCode, Error, Matrix, SqgtCode, TestOutcome, Thresholds};

use crate::CliError;

pub fn read(path: &Path) -> Result<String, CliError> {
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::Io(format!("stdin: {e}")))?;
        return Ok(text);
    }
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn thresholds(path: &Path) -> Result<Thresholds, CliError> {
    Ok(Thresholds::from_json(&read(path)?)?)
}

/// The matrix file next to a sidecar: same stem, `.txt` extension.
pub fn sibling_matrix(sidecar: &Path) -> PathBuf {
    sidecar.with_extension("txt")
}

pub fn load_code(sidecar: &Path, matrix: Option<&Path>) -> Result<SqgtCode, CliError> {
    let matrix_path = matrix.map_or_else(|| sibling_matrix(sidecar), Path::to_path_buf);
    Ok(SqgtCode::from_parts(&read(&matrix_path)?, &read(sidecar)?)?)
}

/// A result vector given as a space-separated line or as outcome JSON.
pub fn outcome(text: &str) -> Result<TestOutcome, CliError> {
    let trimmed = text.trim();
    Ok(if trimmed.starts_with('{') {
        TestOutcome::from_json(trimmed)?
    } else {
        TestOutcome::from_line(trimmed)?
    })
}

pub fn numbers<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| CliError::Usage(format!("bad {what} entry `{t}`"))))
        .collect()
}

/// 1-based column list to 0-based indices.
pub fn columns(text: &str) -> Result<Vec<usize>, CliError> {
    numbers::<usize>(text, "column")?
        .into_iter()
        .map(|c| c.checked_sub(1).ok_or_else(|| CliError::Usage("columns are numbered from 1".into())))
        .collect()
}

pub fn one_based(cols: &[usize]) -> String {
    cols.iter().map(|c| (c + 1).to_string()).collect::<Vec<_>>().join(" ")
}

/// `pos:value` pairs, positions counted from 0.
pub fn changes(text: &str) -> Result<Vec<(usize, usize)>, CliError> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (pos, value) = t
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("error `{t}` is not pos:value")))?;
            let parse = |s: &str| s.parse::<usize>().map_err(|_| CliError::Usage(format!("bad number in `{t}`")));
            Ok((parse(pos)?, parse(value)?))
        })
        .collect()
}

/// Base code from a spec string:
///
/// * `identity:N`
/// * `kautz-singleton:Q:K` or `kautz-singleton:Q:K:D` (also `ks:...`)
/// * `random:M:N:D:E` or `random:M:N:D:E:DENSITY`, drawn from `seed`
/// * `file:PATH:D:E`, a binary matrix in the `m n q` text format
pub fn base(spec: &str, seed: u64) -> Result<BinaryDisjunctCode, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let usage = || CliError::Usage(format!("bad base spec `{spec}`"));
    let int = |s: &str| s.parse::<usize>().map_err(|_| usage());
    let code = match parts.as_slice() {
        ["identity", n] => identity_code(int(n)?, 0)?,
        ["kautz-singleton" | "ks", q, k] => kautz_singleton(int(q)? as u64, int(k)?, None)?,
        ["kautz-singleton" | "ks", q, k, d] => kautz_singleton(int(q)? as u64, int(k)?, Some(int(d)?))?,
        ["random", m, n, d, e] => random_code(int(m)?, int(n)?, int(d)?, int(e)?, None, seed, DEFAULT_ATTEMPTS)?,
        ["random", m, n, d, e, density] => {
            let density: f64 = density.parse().map_err(|_| usage())?;
            random_code(int(m)?, int(n)?, int(d)?, int(e)?, Some(density), seed, DEFAULT_ATTEMPTS)?
        }
        ["file", path, d, e] => {
            let matrix = Matrix::from_text(&read(Path::new(path))?)?;
            BinaryDisjunctCode::from_matrix(matrix, int(d)?, int(e)?)?
        }
        _ => return Err(usage()),
    };
    Ok(code)
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}
