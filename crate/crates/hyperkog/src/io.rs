//! Text file formats for matrices, value lists and run statistics.
//!
//! Matrix files are line-oriented: a header `JKOG 1 <R|C> <n>`, a sign
//! line of `n` tokens `+1`/`-1`, then `n` row lines of `n` (real) or `2n`
//! (complex, re before im) whitespace-separated tokens.  Numeric tokens
//! are written in shortest round-trip exponent form, so writing and
//! re-reading reproduces every matrix bitwise.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::driver::RunStats;
use crate::matrix::{Matrix, SignDiagonal};
use crate::scalar::{Scalar, C64};

pub const MAGIC: &str = "JKOG";
pub const FORMAT_VERSION: &str = "1";

/// File-level failures, split so the front end can distinguish broken
/// plumbing (`Io`) from broken content (`Format`).
#[derive(Debug, Error)]
pub enum FileError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {msg}", path.display())]
    Format { path: PathBuf, msg: String },
}

impl FileError {
    fn format(path: &Path, msg: impl Into<String>) -> FileError {
        FileError::Format {
            path: path.to_path_buf(),
            msg: msg.into(),
        }
    }
}

/// A matrix file of either field, decided by the header tag.
#[derive(Clone, Debug)]
pub enum ParsedMatrix {
    Real { g: Matrix<f64>, j: SignDiagonal },
    Complex { g: Matrix<C64>, j: SignDiagonal },
}

impl ParsedMatrix {
    pub fn order(&self) -> usize {
        match self {
            ParsedMatrix::Real { g, .. } => g.order(),
            ParsedMatrix::Complex { g, .. } => g.order(),
        }
    }

    pub fn signs(&self) -> &SignDiagonal {
        match self {
            ParsedMatrix::Real { j, .. } => j,
            ParsedMatrix::Complex { j, .. } => j,
        }
    }
}

/// Writes `g` with its sign diagonal in the line-oriented text format.
pub fn write_matrix<S: Scalar>(
    path: &Path,
    g: &Matrix<S>,
    j: &SignDiagonal,
) -> Result<(), FileError> {
    let n = g.order();
    assert_eq!(j.order(), n, "matrix and sign orders must agree");
    let tag = if S::IS_COMPLEX { "C" } else { "R" };
    let mut text = String::new();
    let _ = writeln!(text, "{MAGIC} {FORMAT_VERSION} {tag} {n}");
    let signs: Vec<&str> = j
        .signs()
        .iter()
        .map(|s| if *s > 0 { "+1" } else { "-1" })
        .collect();
    let _ = writeln!(text, "{}", signs.join(" "));
    for i in 0..n {
        let mut row = String::new();
        for k in 0..n {
            if k > 0 {
                row.push(' ');
            }
            let z = g.get(i, k);
            if S::IS_COMPLEX {
                let _ = write!(row, "{:e} {:e}", z.re(), z.im());
            } else {
                let _ = write!(row, "{:e}", z.re());
            }
        }
        let _ = writeln!(text, "{row}");
    }
    fs::write(path, text).map_err(|source| FileError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a matrix file; empty lines are tolerated, everything else is
/// validated strictly (token counts, sign values, finite entries).
pub fn read_matrix(path: &Path) -> Result<ParsedMatrix, FileError> {
    let text = fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());

    let header = lines
        .next()
        .ok_or_else(|| FileError::format(path, "empty file"))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 4 || head[0] != MAGIC || head[1] != FORMAT_VERSION {
        return Err(FileError::format(
            path,
            format!("bad header {header:?}, expected `{MAGIC} {FORMAT_VERSION} <R|C> <n>`"),
        ));
    }
    let complex = match head[2] {
        "R" => false,
        "C" => true,
        other => {
            return Err(FileError::format(
                path,
                format!("bad field tag {other:?}, expected R or C"),
            ))
        }
    };
    let n: usize = head[3]
        .parse()
        .map_err(|_| FileError::format(path, format!("bad order {:?}", head[3])))?;
    if n == 0 {
        return Err(FileError::format(path, "order must be positive"));
    }

    let sign_line = lines
        .next()
        .ok_or_else(|| FileError::format(path, "missing sign line"))?;
    let mut signs = Vec::with_capacity(n);
    for tok in sign_line.split_whitespace() {
        match tok {
            "+1" => signs.push(1i8),
            "-1" => signs.push(-1i8),
            other => {
                return Err(FileError::format(
                    path,
                    format!("bad sign token {other:?}, expected +1 or -1"),
                ))
            }
        }
    }
    if signs.len() != n {
        return Err(FileError::format(
            path,
            format!("expected {n} signs, found {}", signs.len()),
        ));
    }
    let j = SignDiagonal::new(signs);

    let per_row = if complex { 2 * n } else { n };
    let mut entries: Vec<f64> = Vec::with_capacity(per_row * n);
    for i in 0..n {
        let row = lines
            .next()
            .ok_or_else(|| FileError::format(path, format!("missing data row {i}")))?;
        let before = entries.len();
        for tok in row.split_whitespace() {
            entries.push(parse_finite(path, tok)?);
        }
        let got = entries.len() - before;
        if got != per_row {
            return Err(FileError::format(
                path,
                format!("row {i} has {got} tokens, expected {per_row}"),
            ));
        }
    }
    if lines.next().is_some() {
        return Err(FileError::format(path, "trailing content after last row"));
    }

    if complex {
        let data: Vec<C64> = entries.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect();
        Ok(ParsedMatrix::Complex {
            g: Matrix::from_row_major(n, data),
            j,
        })
    } else {
        Ok(ParsedMatrix::Real {
            g: Matrix::from_row_major(n, entries),
            j,
        })
    }
}

fn parse_finite(path: &Path, tok: &str) -> Result<f64, FileError> {
    let v: f64 = tok
        .parse()
        .map_err(|_| FileError::format(path, format!("bad numeric token {tok:?}")))?;
    if !v.is_finite() {
        return Err(FileError::format(
            path,
            format!("non-finite entry {tok:?} not allowed in a matrix file"),
        ));
    }
    Ok(v)
}

/// Writes one value per line (σ or λ lists).  Non-finite values are
/// permitted here — a failed run may legitimately report them.
pub fn write_values(path: &Path, values: &[f64]) -> Result<(), FileError> {
    let mut text = String::new();
    for v in values {
        let _ = writeln!(text, "{v:e}");
    }
    fs::write(path, text).map_err(|source| FileError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a one-value-per-line list.
pub fn read_values(path: &Path) -> Result<Vec<f64>, FileError> {
    let text = fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let v: f64 = line
            .parse()
            .map_err(|_| FileError::format(path, format!("bad value line {line:?}")))?;
        out.push(v);
    }
    Ok(out)
}

/// Statistics file contents: the run counters plus the υ it ran with.
#[derive(Clone, Debug, PartialEq)]
pub struct StatsFile {
    pub steps: u64,
    pub multisteps: u64,
    pub cycles: f64,
    pub off_initial: f64,
    pub off_final: f64,
    pub outcome: String,
    pub upsilon: f64,
}

/// Writes the `key=value` stats file.
pub fn write_stats(path: &Path, stats: &RunStats, upsilon: f64) -> Result<(), FileError> {
    let mut text = String::new();
    let _ = writeln!(text, "steps={}", stats.steps);
    let _ = writeln!(text, "multisteps={}", stats.multisteps);
    let _ = writeln!(text, "cycles={:e}", stats.cycles);
    let _ = writeln!(text, "off_initial={:e}", stats.off_initial);
    let _ = writeln!(text, "off_final={:e}", stats.off_final);
    let _ = writeln!(text, "outcome={}", stats.outcome.as_str());
    let _ = writeln!(text, "upsilon={upsilon:e}");
    fs::write(path, text).map_err(|source| FileError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a stats file; all keys written by [`write_stats`] are required.
pub fn read_stats(path: &Path) -> Result<StatsFile, FileError> {
    let text = fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut steps = None;
    let mut multisteps = None;
    let mut cycles = None;
    let mut off_initial = None;
    let mut off_final = None;
    let mut outcome = None;
    let mut upsilon = None;
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| FileError::format(path, format!("bad stats line {line:?}")))?;
        let bad = || FileError::format(path, format!("bad value in {line:?}"));
        match key {
            "steps" => steps = Some(value.parse::<u64>().map_err(|_| bad())?),
            "multisteps" => multisteps = Some(value.parse::<u64>().map_err(|_| bad())?),
            "cycles" => cycles = Some(value.parse::<f64>().map_err(|_| bad())?),
            "off_initial" => off_initial = Some(value.parse::<f64>().map_err(|_| bad())?),
            "off_final" => off_final = Some(value.parse::<f64>().map_err(|_| bad())?),
            "outcome" => outcome = Some(value.to_string()),
            "upsilon" => upsilon = Some(value.parse::<f64>().map_err(|_| bad())?),
            other => {
                return Err(FileError::format(
                    path,
                    format!("unknown stats key {other:?}"),
                ))
            }
        }
    }
    let missing = |k: &str| FileError::format(path, format!("missing stats key {k}"));
    Ok(StatsFile {
        steps: steps.ok_or_else(|| missing("steps"))?,
        multisteps: multisteps.ok_or_else(|| missing("multisteps"))?,
        cycles: cycles.ok_or_else(|| missing("cycles"))?,
        off_initial: off_initial.ok_or_else(|| missing("off_initial"))?,
        off_final: off_final.ok_or_else(|| missing("off_final"))?,
        outcome: outcome.ok_or_else(|| missing("outcome"))?,
        upsilon: upsilon.ok_or_else(|| missing("upsilon"))?,
    })
}
