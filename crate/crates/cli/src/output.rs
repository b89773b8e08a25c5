//! Diagnostics, number formatting and all-or-nothing output writing.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use svs_core::Error;

/// A data or I/O failure, already formatted for the error stream.
#[derive(Debug)]
pub struct Failure(pub String);

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Failure {
    pub fn new(msg: impl Into<String>) -> Self {
        Failure(msg.into())
    }

    /// `path:line:column: message` when the error carries a position.
    pub fn at(path: &Path, err: Error) -> Self {
        let p = path.display();
        Failure(match err {
            Error::Syntax {
                line,
                column,
                message,
            } => format!("{p}:{line}:{column}: {message}"),
            Error::Mapping { line, message } => format!("{p}:{line}: {message}"),
            other => format!("{p}: {other}"),
        })
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;

/// Attaches `path` to library errors.
pub trait Located<T> {
    fn at(self, path: &Path) -> CliResult<T>;
}

impl<T> Located<T> for svs_core::Result<T> {
    fn at(self, path: &Path) -> CliResult<T> {
        self.map_err(|e| Failure::at(path, e))
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::new(format!("{}: {e}", path.display())))
}

/// Files produced by a command. Nothing touches the disk until
/// [`Outputs::commit`], which stages every file as a temporary in the output
/// directory before renaming any of them into place.
#[derive(Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, name: String, bytes: impl Into<Vec<u8>>) {
        self.files.push((name, bytes.into()));
    }

    pub fn commit(self, dir: &Path) -> CliResult<Vec<PathBuf>> {
        let io = |e: std::io::Error| Failure::new(format!("{}: {e}", dir.display()));
        if self.files.is_empty() {
            return Ok(Vec::new());
        }
        fs::create_dir_all(dir).map_err(io)?;
        let mut staged = Vec::with_capacity(self.files.len());
        for (name, bytes) in &self.files {
            let mut tmp = tempfile::Builder::new()
                .prefix(".svs-")
                .tempfile_in(dir)
                .map_err(io)?;
            tmp.write_all(bytes).map_err(io)?;
            tmp.as_file().sync_all().map_err(io)?;
            staged.push((tmp, dir.join(name)));
        }
        let mut written = Vec::with_capacity(staged.len());
        for (tmp, path) in staged {
            tmp.persist(&path).map_err(|e| io(e.error))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// `x` with `sig` significant digits, printed like C's `%g`: fixed notation
/// for exponents in `-5..sig`, scientific otherwise, trailing zeros removed.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= sig as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
