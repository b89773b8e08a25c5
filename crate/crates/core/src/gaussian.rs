use ndarray::Array2;

use crate::error::{Error, Result};

/// Bound on log standard deviations accepted by [`DiagGaussian::new`].
pub const LOG_STD_BOUND: f64 = 7.0;

/// Rows of diagonal Gaussians: one `(mean, log_std)` vector pair per step.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagGaussian {
    means: Array2<f64>,
    log_stds: Array2<f64>,
}

/// Per-phoneme (or per-frame) Gaussian statistics.
pub type GaussianSeq = DiagGaussian;
/// Batch of Gaussians entering the KL objectives.
pub type DiagGaussianBatch = DiagGaussian;

impl DiagGaussian {
    pub fn new(means: Array2<f64>, log_stds: Array2<f64>) -> Result<Self> {
        if means.dim() != log_stds.dim() {
            return Err(Error::shape(format!(
                "means {:?} vs log_stds {:?}",
                means.dim(),
                log_stds.dim()
            )));
        }
        if means.iter().any(|v| !v.is_finite()) {
            return Err(Error::value("non-finite mean"));
        }
        if let Some(v) = log_stds
            .iter()
            .find(|v| !(v.is_finite() && v.abs() <= LOG_STD_BOUND))
        {
            return Err(Error::value(format!(
                "log_std {v} outside [-{LOG_STD_BOUND}, {LOG_STD_BOUND}]"
            )));
        }
        Ok(DiagGaussian { means, log_stds })
    }

    pub fn means(&self) -> &Array2<f64> {
        &self.means
    }

    pub fn log_stds(&self) -> &Array2<f64> {
        &self.log_stds
    }

    /// `(rows, dims)`.
    pub fn dim(&self) -> (usize, usize) {
        self.means.dim()
    }

    pub fn into_parts(self) -> (Array2<f64>, Array2<f64>) {
        (self.means, self.log_stds)
    }

    /// Fits one Gaussian per segment of consecutive rows of `x`, where
    /// segment `s` covers `lengths[s]` rows. Standard deviations are floored
    /// at `min_std`.
    pub fn fit_segments(x: &Array2<f64>, lengths: &[usize], min_std: f64) -> Result<Self> {
        let total: usize = lengths.iter().sum();
        if total != x.nrows() {
            return Err(Error::shape(format!(
                "segments cover {total} rows, matrix has {}",
                x.nrows()
            )));
        }
        if lengths.contains(&0) {
            return Err(Error::value("empty segment"));
        }
        let d = x.ncols();
        let mut means = Array2::zeros((lengths.len(), d));
        let mut log_stds = Array2::zeros((lengths.len(), d));
        let mut start = 0;
        for (s, &len) in lengths.iter().enumerate() {
            let seg = x.slice(ndarray::s![start..start + len, ..]);
            for j in 0..d {
                let col = seg.column(j);
                let mean = col.sum() / len as f64;
                let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / len as f64;
                means[[s, j]] = mean;
                log_stds[[s, j]] = var
                    .sqrt()
                    .max(min_std)
                    .ln()
                    .clamp(-LOG_STD_BOUND, LOG_STD_BOUND);
            }
            start += len;
        }
        DiagGaussian::new(means, log_stds)
    }
}
