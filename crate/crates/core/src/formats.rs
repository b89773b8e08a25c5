//! Text and audio file formats.
//!
//! | kind  | layout                                                   |
//! |-------|----------------------------------------------------------|
//! | MAT   | `MAT <T> <D>` then T rows of D decimals                  |
//! | GAUSS | `GAUSS <S> <D>` then S mean rows then S log-std rows     |
//! | DUR   | `DUR <S>` then one integer per line                      |
//! | PRED  | `PRED <S>` then one decimal per line                     |
//! | MEL   | `MEL <T> <n_mels> <sr> <hop>` then T rows of n_mels      |
//! | F0    | one decimal Hz value per line, 0 = unvoiced              |
//!
//! Decimals are written in Rust's shortest round-trip form, so a write then
//! read reproduces every value exactly.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array2;

use crate::align::Durations;
use crate::dsp::F0Contour;
use crate::error::{Error, Result};
use crate::gaussian::DiagGaussian;

struct Lines<'a> {
    inner: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate().peekable(),
        }
    }

    /// Next non-blank line with its 1-based number.
    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        for (i, line) in self.inner.by_ref() {
            if !line.trim().is_empty() {
                return Some((i + 1, line));
            }
        }
        None
    }

    fn expect_line(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.next_line().ok_or_else(|| Error::Syntax {
            line: 0,
            column: 1,
            message: format!("unexpected end of file, expected {what}"),
        })
    }

    fn finish(mut self) -> Result<()> {
        match self.next_line() {
            Some((line, _)) => Err(Error::Syntax {
                line,
                column: 1,
                message: "trailing content".into(),
            }),
            None => Ok(()),
        }
    }
}

fn parse_token<T: std::str::FromStr>(tok: &str, line: usize, column: usize) -> Result<T> {
    tok.parse().map_err(|_| Error::Syntax {
        line,
        column,
        message: format!("cannot parse {tok:?}"),
    })
}

fn parse_header(lines: &mut Lines, tag: &str, n_fields: usize) -> Result<Vec<usize>> {
    let (line, text) = lines.expect_line(&format!("{tag} header"))?;
    let mut it = text.split_whitespace();
    if it.next() != Some(tag) {
        return Err(Error::Syntax {
            line,
            column: 1,
            message: format!("expected header starting with {tag}"),
        });
    }
    let fields: Vec<&str> = it.collect();
    if fields.len() != n_fields {
        return Err(Error::Syntax {
            line,
            column: 1,
            message: format!("{tag} header takes {n_fields} fields, found {}", fields.len()),
        });
    }
    fields
        .iter()
        .enumerate()
        .map(|(i, f)| parse_token(f, line, i + 2))
        .collect()
}

fn parse_rows(lines: &mut Lines, rows: usize, cols: usize) -> Result<Array2<f64>> {
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let (line, text) = lines.expect_line("matrix row")?;
        let before = data.len();
        for (i, tok) in text.split_whitespace().enumerate() {
            let v: f64 = parse_token(tok, line, i + 1)?;
            if !v.is_finite() {
                return Err(Error::value(format!("line {line}: non-finite value {tok}")));
            }
            data.push(v);
        }
        if data.len() - before != cols {
            return Err(Error::Syntax {
                line,
                column: 1,
                message: format!("expected {cols} values, found {}", data.len() - before),
            });
        }
    }
    Ok(Array2::from_shape_vec((rows, cols), data).expect("row lengths checked"))
}

fn write_rows(out: &mut String, m: &Array2<f64>) {
    for row in m.rows() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            write!(out, "{v}").unwrap();
        }
        out.push('\n');
    }
}

pub fn parse_matrix(text: &str) -> Result<Array2<f64>> {
    let mut lines = Lines::new(text);
    let h = parse_header(&mut lines, "MAT", 2)?;
    let m = parse_rows(&mut lines, h[0], h[1])?;
    lines.finish()?;
    Ok(m)
}

pub fn format_matrix(m: &Array2<f64>) -> String {
    let mut out = format!("MAT {} {}\n", m.nrows(), m.ncols());
    write_rows(&mut out, m);
    out
}

pub fn parse_gaussian(text: &str) -> Result<DiagGaussian> {
    let mut lines = Lines::new(text);
    let h = parse_header(&mut lines, "GAUSS", 2)?;
    let means = parse_rows(&mut lines, h[0], h[1])?;
    let log_stds = parse_rows(&mut lines, h[0], h[1])?;
    lines.finish()?;
    DiagGaussian::new(means, log_stds)
}

pub fn format_gaussian(g: &DiagGaussian) -> String {
    let (s, d) = g.dim();
    let mut out = format!("GAUSS {s} {d}\n");
    write_rows(&mut out, g.means());
    write_rows(&mut out, g.log_stds());
    out
}

fn parse_column<T: std::str::FromStr>(text: &str, tag: &str) -> Result<Vec<T>> {
    let mut lines = Lines::new(text);
    let n = parse_header(&mut lines, tag, 1)?[0];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let (line, text) = lines.expect_line("value")?;
        out.push(parse_token(text.trim(), line, 1)?);
    }
    lines.finish()?;
    Ok(out)
}

pub fn parse_durations(text: &str) -> Result<Durations> {
    Durations::new(parse_column(text, "DUR")?)
}

pub fn format_durations(d: &Durations) -> String {
    let mut out = format!("DUR {}\n", d.len());
    for v in d.as_slice() {
        writeln!(out, "{v}").unwrap();
    }
    out
}

pub fn parse_predictions(text: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = parse_column(text, "PRED")?;
    if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
        return Err(Error::value(format!("non-finite prediction {bad}")));
    }
    Ok(v)
}

pub fn format_predictions(v: &[f64]) -> String {
    let mut out = format!("PRED {}\n", v.len());
    for x in v {
        writeln!(out, "{x}").unwrap();
    }
    out
}

/// Mel frames plus the sample rate and hop they were computed with.
#[derive(Debug, Clone, PartialEq)]
pub struct MelFile {
    pub frames: Array2<f64>,
    pub sample_rate: u32,
    pub hop: usize,
}

pub fn parse_mel(text: &str) -> Result<MelFile> {
    let mut lines = Lines::new(text);
    let h = parse_header(&mut lines, "MEL", 4)?;
    let frames = parse_rows(&mut lines, h[0], h[1])?;
    lines.finish()?;
    Ok(MelFile {
        frames,
        sample_rate: u32::try_from(h[2]).map_err(|_| Error::value("sample rate too large"))?,
        hop: h[3],
    })
}

pub fn format_mel(frames: &Array2<f64>, sample_rate: u32, hop: usize) -> String {
    let mut out = format!("MEL {} {} {sample_rate} {hop}\n", frames.nrows(), frames.ncols());
    write_rows(&mut out, frames);
    out
}

pub fn parse_f0(text: &str) -> Result<F0Contour> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        values.push(parse_token(t, i + 1, 1)?);
    }
    F0Contour::new(values)
}

pub fn format_f0(f0: &F0Contour) -> String {
    let mut out = String::new();
    for v in f0.values() {
        writeln!(out, "{v}").unwrap();
    }
    out
}

/// Reads a mono 16-bit PCM WAV as samples in `[-1, 1)`, returning them with
/// the file's sample rate.
pub fn read_wav(path: &Path) -> Result<(Vec<f64>, u32)> {
    let reader = hound::WavReader::open(path)?;
    let spec = reader.spec();
    if spec.channels != 1 || spec.bits_per_sample != 16 || spec.sample_format != hound::SampleFormat::Int {
        return Err(Error::value(format!(
            "{}: expected mono 16-bit PCM, found {} channel(s), {} bits, {:?}",
            path.display(),
            spec.channels,
            spec.bits_per_sample,
            spec.sample_format
        )));
    }
    let samples = reader
        .into_samples::<i16>()
        .map(|s| s.map(|v| f64::from(v) / 32768.0))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok((samples, spec.sample_rate))
}

/// Encodes samples as mono 16-bit PCM. Samples are scaled down by the peak
/// when it exceeds 1.
pub fn encode_wav(samples: &[f64], sample_rate: u32) -> Result<Vec<u8>> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let peak = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let gain = if peak > 1.0 { 1.0 / peak } else { 1.0 };
    let mut cursor = std::io::Cursor::new(Vec::new());
    {
        let mut writer = hound::WavWriter::new(&mut cursor, spec)?;
        for &s in samples {
            let v = (s * gain * 32767.0).round().clamp(-32768.0, 32767.0) as i16;
            writer.write_sample(v)?;
        }
        writer.finalize()?;
    }
    Ok(cursor.into_inner())
}
