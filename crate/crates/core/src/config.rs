//! Flat `section.key = value` configuration shared by every pipeline stage.
//!
//! ```text
//! # comment
//! mel.fft_size = 2048
//! f0.kernel = 13
//! loss.lambda_mel = 45
//! sample.tau = 0.667
//! synth.vibrato_depth = 10
//! ```
//!
//! Unknown keys are rejected. The synthesizer shares `mel.sample_rate` and
//! `mel.hop`; `mel.fmax` defaults to half the sample rate.

use std::collections::HashSet;
use std::str::FromStr;

use crate::dsp::MelConfig;
use crate::error::{Error, Result};
use crate::objectives::LossWeights;
use crate::synth::SynthConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub mel: MelConfig,
    pub median_kernel: usize,
    pub weights: LossWeights,
    pub tau: f64,
    pub synth: SynthConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            mel: MelConfig::default(),
            median_kernel: 13,
            weights: LossWeights::default(),
            tau: 0.667,
            synth: SynthConfig::default(),
        }
    }
}

fn value<T: FromStr>(key: &str, raw: &str, line: usize) -> Result<T> {
    raw.parse().map_err(|_| {
        Error::Config(format!("line {line}: cannot parse {raw:?} for {key}"))
    })
}

impl PipelineConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = PipelineConfig::default();
        let mut seen = HashSet::new();
        let mut fmax_set = false;

        for (i, raw_line) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw_line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((key, raw)) = trimmed.split_once('=') else {
                return Err(Error::Syntax {
                    line,
                    column: 1,
                    message: "expected `key = value`".into(),
                });
            };
            let (key, raw) = (key.trim(), raw.trim());
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!("line {line}: duplicate key {key}")));
            }
            let w = &mut cfg.weights;
            let s = &mut cfg.synth;
            match key {
                "mel.sample_rate" => cfg.mel.sample_rate = value(key, raw, line)?,
                "mel.fft_size" => cfg.mel.fft_size = value(key, raw, line)?,
                "mel.win_size" => cfg.mel.win_size = value(key, raw, line)?,
                "mel.hop" => cfg.mel.hop = value(key, raw, line)?,
                "mel.n_mels" => cfg.mel.n_mels = value(key, raw, line)?,
                "mel.fmin" => cfg.mel.fmin = value(key, raw, line)?,
                "mel.fmax" => {
                    cfg.mel.fmax = value(key, raw, line)?;
                    fmax_set = true;
                }
                "mel.log_floor" => cfg.mel.log_floor = value(key, raw, line)?,
                "f0.kernel" => cfg.median_kernel = value(key, raw, line)?,
                "loss.lambda_l" => w.lambda_l = value(key, raw, line)?,
                "loss.lambda_s" => w.lambda_s = value(key, raw, line)?,
                "loss.lambda_fm" => w.lambda_fm = value(key, raw, line)?,
                "loss.lambda_mel" => w.lambda_mel = value(key, raw, line)?,
                "loss.lambda_pitch" => w.lambda_pitch = value(key, raw, line)?,
                "loss.lambda_a" => w.lambda_a = value(key, raw, line)?,
                "loss.lambda_p" => w.lambda_p = value(key, raw, line)?,
                "loss.lambda_dur" => w.lambda_dur = value(key, raw, line)?,
                "sample.tau" => cfg.tau = value(key, raw, line)?,
                "synth.n_harmonics" => s.n_harmonics = value(key, raw, line)?,
                "synth.vibrato_rate" => s.vibrato_rate = value(key, raw, line)?,
                "synth.vibrato_depth" => s.vibrato_depth = value(key, raw, line)?,
                "synth.bend_depth" => s.bend_depth = value(key, raw, line)?,
                "synth.bend_frames" => s.bend_frames = value(key, raw, line)?,
                "synth.noise_level" => s.noise_level = value(key, raw, line)?,
                "synth.timbre_depth" => s.timbre_depth = value(key, raw, line)?,
                "synth.seed" => s.seed = value(key, raw, line)?,
                _ => return Err(Error::Config(format!("line {line}: unknown key {key}"))),
            }
        }
        if !fmax_set {
            cfg.mel.fmax = f64::from(cfg.mel.sample_rate) / 2.0;
        }
        cfg.synth.sample_rate = cfg.mel.sample_rate;
        cfg.synth.hop = cfg.mel.hop;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.mel.validate()?;
        self.weights.validate()?;
        self.synth.validate()?;
        if self.median_kernel == 0 || self.median_kernel.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "f0.kernel must be odd and positive, got {}",
                self.median_kernel
            )));
        }
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return Err(Error::Config(format!("sample.tau must be >= 0, got {}", self.tau)));
        }
        if self.synth.sample_rate != self.mel.sample_rate || self.synth.hop != self.mel.hop {
            return Err(Error::Config(
                "synth sample rate and hop must match the mel front end".into(),
            ));
        }
        Ok(())
    }
}
