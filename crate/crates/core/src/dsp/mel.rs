use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::reflect_index;
use crate::error::{Error, Result};

/// STFT and mel filterbank settings. Defaults are 44.1 kHz, 2048-point FFT and
/// window, hop 512, 80 mel bands over 0..Nyquist, log floor 1e-5.
#[derive(Debug, Clone, PartialEq)]
pub struct MelConfig {
    pub sample_rate: u32,
    pub fft_size: usize,
    pub win_size: usize,
    pub hop: usize,
    pub n_mels: usize,
    pub fmin: f64,
    pub fmax: f64,
    pub log_floor: f64,
}

impl Default for MelConfig {
    fn default() -> Self {
        MelConfig {
            sample_rate: 44_100,
            fft_size: 2048,
            win_size: 2048,
            hop: 512,
            n_mels: 80,
            fmin: 0.0,
            fmax: 22_050.0,
            log_floor: 1e-5,
        }
    }
}

impl MelConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.sample_rate == 0 {
            return bad("sample_rate must be positive".into());
        }
        if self.fft_size == 0 || self.win_size == 0 || self.hop == 0 {
            return bad("fft_size, win_size and hop must be positive".into());
        }
        if self.win_size > self.fft_size {
            return bad(format!(
                "win_size {} exceeds fft_size {}",
                self.win_size, self.fft_size
            ));
        }
        if self.hop > self.win_size {
            return bad(format!(
                "hop {} exceeds win_size {}",
                self.hop, self.win_size
            ));
        }
        if self.n_mels == 0 {
            return bad("n_mels must be at least 1".into());
        }
        let nyquist = f64::from(self.sample_rate) / 2.0;
        if !(self.fmin >= 0.0 && self.fmin < self.fmax && self.fmax <= nyquist) {
            return bad(format!(
                "need 0 <= fmin < fmax <= {nyquist}, got fmin {} fmax {}",
                self.fmin, self.fmax
            ));
        }
        if !(self.log_floor.is_finite() && self.log_floor > 0.0) {
            return bad(format!("log_floor must be positive, got {}", self.log_floor));
        }
        Ok(())
    }

    pub fn n_bins(&self) -> usize {
        self.fft_size / 2 + 1
    }

    /// Frames produced for `n_samples` input samples under center padding.
    pub fn n_frames(&self, n_samples: usize) -> usize {
        n_samples / self.hop + 1
    }

    pub fn frame_rate(&self) -> f64 {
        f64::from(self.sample_rate) / self.hop as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MelSpectrogram {
    /// `T × n_mels` natural-log mel magnitudes.
    pub frames: Array2<f64>,
    pub config: MelConfig,
}

impl MelSpectrogram {
    pub fn n_frames(&self) -> usize {
        self.frames.nrows()
    }
}

/// Periodic Hann window.
pub fn hann_window(len: usize) -> Array1<f64> {
    Array1::from_iter((0..len).map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / len as f64).cos()))
}

fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular HTK-scale filterbank, `n_mels × (fft_size/2 + 1)`, unnormalized
/// (peak weight 1).
pub fn mel_filterbank(config: &MelConfig) -> Array2<f64> {
    let n_bins = config.n_bins();
    let mel_lo = hz_to_mel(config.fmin);
    let mel_hi = hz_to_mel(config.fmax);
    let edges: Vec<f64> = (0..config.n_mels + 2)
        .map(|i| mel_to_hz(mel_lo + (mel_hi - mel_lo) * i as f64 / (config.n_mels + 1) as f64))
        .collect();
    let bin_hz = f64::from(config.sample_rate) / config.fft_size as f64;

    let mut fb = Array2::zeros((config.n_mels, n_bins));
    for m in 0..config.n_mels {
        let (left, center, right) = (edges[m], edges[m + 1], edges[m + 2]);
        for k in 0..n_bins {
            let f = k as f64 * bin_hz;
            let rising = (f - left) / (center - left);
            let falling = (right - f) / (right - center);
            fb[[m, k]] = rising.min(falling).max(0.0);
        }
    }
    fb
}

/// Linear magnitude STFT, `T × (fft_size/2 + 1)`, with a centered Hann window
/// and reflect padding of `fft_size / 2` on both ends.
pub fn magnitude_spectrogram(samples: &[f64], config: &MelConfig) -> Result<Array2<f64>> {
    config.validate()?;
    if samples.is_empty() {
        return Err(Error::value("empty waveform"));
    }
    let n_fft = config.fft_size;
    let pad = (n_fft / 2) as isize;
    let n_frames = config.n_frames(samples.len());
    let n_bins = config.n_bins();

    // window of win_size zero-padded to fft_size, centered
    let mut window = vec![0.0; n_fft];
    let offset = (n_fft - config.win_size) / 2;
    for (w, h) in window[offset..offset + config.win_size]
        .iter_mut()
        .zip(hann_window(config.win_size))
    {
        *w = h;
    }

    let fft = FftPlanner::new().plan_fft_forward(n_fft);
    let mut buf = vec![Complex::new(0.0, 0.0); n_fft];
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut out = Array2::zeros((n_frames, n_bins));

    for t in 0..n_frames {
        let start = (t * config.hop) as isize - pad;
        for (j, slot) in buf.iter_mut().enumerate() {
            let x = samples[reflect_index(start + j as isize, samples.len())];
            *slot = Complex::new(x * window[j], 0.0);
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for (k, c) in buf[..n_bins].iter().enumerate() {
            out[[t, k]] = c.norm();
        }
    }
    Ok(out)
}

/// Log-mel spectrogram: `ln(max(filterbank · |STFT|, log_floor))`.
pub fn mel_spectrogram(samples: &[f64], config: &MelConfig) -> Result<MelSpectrogram> {
    let magnitude = magnitude_spectrogram(samples, config)?;
    let fb = mel_filterbank(config);
    let floor = config.log_floor;
    let frames = magnitude.dot(&fb.t()).mapv(|e| e.max(floor).ln());
    Ok(MelSpectrogram {
        frames,
        config: config.clone(),
    })
}
