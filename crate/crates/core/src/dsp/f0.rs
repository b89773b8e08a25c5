use super::reflect_index;
use crate::error::{Error, Result};

/// Lower bound (exclusive) for a plausible voiced F0 in Hz.
pub const F0_VOICED_MIN: f64 = 20.0;
/// Upper bound (exclusive) for a plausible voiced F0 in Hz.
pub const F0_VOICED_MAX: f64 = 2000.0;

/// Per-frame F0 in Hz; `0.0` marks an unvoiced frame.
#[derive(Debug, Clone, PartialEq)]
pub struct F0Contour {
    values: Vec<f64>,
}

impl F0Contour {
    /// Accepts any finite, non-negative values.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::value(format!("F0 frame {i}: invalid value {v}")));
        }
        Ok(F0Contour { values })
    }

    /// Checks every voiced frame lies in the singing range (20, 2000) Hz.
    pub fn validate_range(&self) -> Result<()> {
        match self
            .values
            .iter()
            .enumerate()
            .find(|(_, &v)| v != 0.0 && !(v > F0_VOICED_MIN && v < F0_VOICED_MAX))
        {
            Some((i, v)) => Err(Error::value(format!(
                "F0 frame {i}: {v} Hz outside ({F0_VOICED_MIN}, {F0_VOICED_MAX})"
            ))),
            None => Ok(()),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn voiced_mask(&self) -> Vec<bool> {
        self.values.iter().map(|&v| v > 0.0).collect()
    }

    /// Maximal runs of consecutive voiced frames as `start..end`.
    pub fn voiced_runs(&self) -> Vec<std::ops::Range<usize>> {
        let mut runs = Vec::new();
        let mut start = None;
        for (i, &v) in self.values.iter().enumerate() {
            match (v > 0.0, start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    runs.push(s..i);
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            runs.push(s..self.values.len());
        }
        runs
    }
}

/// Median filter applied separately to each voiced run, with reflect padding
/// at run edges. Unvoiced frames stay at zero.
pub fn median_smooth_f0(f0: &F0Contour, kernel: usize) -> Result<F0Contour> {
    if kernel == 0 || kernel.is_multiple_of(2) {
        return Err(Error::value(format!(
            "median kernel must be odd and positive, got {kernel}"
        )));
    }
    let half = (kernel / 2) as isize;
    let mut out = f0.values.clone();
    let mut window = Vec::with_capacity(kernel);
    for run in f0.voiced_runs() {
        let seg = &f0.values[run.clone()];
        for i in 0..seg.len() {
            window.clear();
            window.extend(
                (i as isize - half..=i as isize + half).map(|j| seg[reflect_index(j, seg.len())]),
            );
            window.sort_unstable_by(f64::total_cmp);
            out[run.start + i] = window[kernel / 2];
        }
    }
    Ok(F0Contour { values: out })
}

/// Natural-log F0 with its voicing mask. Unvoiced entries of `values` are 0
/// and must be ignored via `voiced`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogF0 {
    pub values: Vec<f64>,
    pub voiced: Vec<bool>,
}

impl LogF0 {
    pub fn n_voiced(&self) -> usize {
        self.voiced.iter().filter(|&&v| v).count()
    }
}

pub fn log_f0_masked(f0: &F0Contour) -> LogF0 {
    let voiced = f0.voiced_mask();
    let values = f0
        .values
        .iter()
        .zip(&voiced)
        .map(|(&v, &on)| if on { v.ln() } else { 0.0 })
        .collect();
    LogF0 { values, voiced }
}
