//! End-to-end alignment recovery on synthetic singing: render a score, take
//! log-mel rows as latents, fit one Gaussian per phoneme from the rendering's
//! true segmentation, and check how closely note-bounded MAS recovers it.

use ndarray::s;

use crate::align::{gaussian_loglik_matrix, mas_note_bounded, Durations};
use crate::config::PipelineConfig;
use crate::dsp::mel_spectrogram;
use crate::error::{Error, Result};
use crate::gaussian::GaussianSeq;
use crate::score::Score;
use crate::synth::{generate_utterance, SynthOutput};

/// Floor on fitted per-dimension standard deviations.
pub const MIN_FIT_STD: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentReport {
    pub truth: Durations,
    pub recovered: Durations,
}

impl AlignmentReport {
    /// Phonemes whose recovered duration is within `tolerance` frames of the
    /// truth.
    pub fn within(&self, tolerance: usize) -> usize {
        self.truth
            .as_slice()
            .iter()
            .zip(self.recovered.as_slice())
            .filter(|(a, b)| a.abs_diff(**b) <= tolerance)
            .count()
    }

    pub fn n_phonemes(&self) -> usize {
        self.truth.len()
    }
}

/// Log-mel rows of `render`, trimmed to its frame count. The waveform has
/// `T * hop` samples, so the centred STFT yields one trailing extra frame.
pub fn latents_for(render: &SynthOutput, cfg: &PipelineConfig) -> Result<ndarray::Array2<f64>> {
    let mel = mel_spectrogram(&render.waveform, &cfg.mel)?;
    let frames = render.spans.total_frames();
    if mel.n_frames() < frames {
        return Err(Error::shape(format!(
            "{} mel frames for {frames} score frames",
            mel.n_frames()
        )));
    }
    Ok(mel.frames.slice(s![..frames, ..]).to_owned())
}

/// Renders `score`, fits oracle priors from the true segmentation and runs
/// note-bounded MAS against them.
pub fn recover_alignment(score: &Score, cfg: &PipelineConfig) -> Result<(SynthOutput, AlignmentReport)> {
    let render = generate_utterance(score, &cfg.synth)?;
    let latents = latents_for(&render, cfg)?;
    let priors = GaussianSeq::fit_segments(&latents, render.durations.as_slice(), MIN_FIT_STD)?;
    let loglik = gaussian_loglik_matrix(&latents, &priors)?;
    let recovered = mas_note_bounded(&loglik, &score.phoneme_note_idx, &render.spans)?;
    let report = AlignmentReport {
        truth: render.durations.clone(),
        recovered,
    };
    Ok((render, report))
}
