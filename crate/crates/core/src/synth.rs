//! Deterministic synthetic singing: a harmonic voice following the score's
//! pitches (with vibrato and onset bends) plus seeded noise, together with the
//! exact F0 contour and phoneme durations used to render it.
//!
//! Each phoneme scales every harmonic by its own gain derived from the
//! phoneme symbol, so phonemes sharing a note stay distinguishable in the
//! spectrum. `timbre_depth = 0` disables this and leaves the plain `1/k`
//! harmonic series. Noise comes from `ChaCha8Rng` seeded with `seed`.

use std::f64::consts::PI;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::align::Durations;
use crate::dsp::F0Contour;
use crate::error::{Error, Result};
use crate::regulator::{rhythm_adjust, PhonemeFrameExpansion};
use crate::score::{note_frame_boundaries, NoteFrameSpans, Score};

/// Lowest F0 the generator will emit on a voiced frame.
const MIN_VOICED_HZ: f64 = 1.0;
/// Per-harmonic timbre gains at `timbre_depth = 1` are log-uniform over
/// `[1/TIMBRE_RANGE, TIMBRE_RANGE]`.
const TIMBRE_RANGE: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub sample_rate: u32,
    /// Samples per F0 frame; matches the mel hop.
    pub hop: usize,
    pub n_harmonics: usize,
    pub vibrato_rate: f64,
    pub vibrato_depth: f64,
    pub bend_depth: f64,
    pub bend_frames: usize,
    pub noise_level: f64,
    pub timbre_depth: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            sample_rate: 44_100,
            hop: 512,
            n_harmonics: 8,
            vibrato_rate: 6.0,
            vibrato_depth: 10.0,
            bend_depth: 20.0,
            bend_frames: 5,
            noise_level: 0.01,
            timbre_depth: 1.0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.sample_rate == 0 || self.hop == 0 {
            return bad("synth sample_rate and hop must be positive".into());
        }
        if self.n_harmonics == 0 {
            return bad("n_harmonics must be at least 1".into());
        }
        for (name, v) in [
            ("vibrato_rate", self.vibrato_rate),
            ("vibrato_depth", self.vibrato_depth),
            ("bend_depth", self.bend_depth),
            ("timbre_depth", self.timbre_depth),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        if !(0.0..1.0).contains(&self.noise_level) {
            return bad(format!(
                "noise_level must be in [0, 1), got {}",
                self.noise_level
            ));
        }
        Ok(())
    }

    pub fn frame_rate(&self) -> f64 {
        f64::from(self.sample_rate) / self.hop as f64
    }
}

/// Rendered utterance with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    /// `spans.total_frames() * hop` samples.
    pub waveform: Vec<f64>,
    pub f0: F0Contour,
    pub durations: Durations,
    pub spans: NoteFrameSpans,
}

/// Per-frame F0 for a score: note pitch, plus a vibrato sinusoid restarted at
/// each onset, plus a bend that starts `bend_depth` Hz flat and ramps back to
/// the note pitch over `bend_frames`. Rest frames are 0.
pub fn score_f0(score: &Score, spans: &NoteFrameSpans, cfg: &SynthConfig) -> F0Contour {
    let fps = cfg.frame_rate();
    let mut f0 = vec![0.0; spans.total_frames()];
    for (note, span) in score.notes.iter().zip(spans.spans()) {
        let Some(hz) = note.pitch.hz() else { continue };
        for (local, t) in span.range().enumerate() {
            let vibrato =
                cfg.vibrato_depth * (2.0 * PI * cfg.vibrato_rate * local as f64 / fps).sin();
            let bend = if local < cfg.bend_frames {
                -cfg.bend_depth * (1.0 - local as f64 / cfg.bend_frames as f64)
            } else {
                0.0
            };
            f0[t] = (hz + vibrato + bend).max(MIN_VOICED_HZ);
        }
    }
    F0Contour::new(f0).expect("generated F0 is finite and non-negative")
}

/// FNV-1a followed by the splitmix64 finalizer.
fn symbol_hash(symbol: &str, salt: u64) -> u64 {
    let h = symbol
        .bytes()
        .chain(salt.to_le_bytes())
        .fold(0xcbf2_9ce4_8422_2325, |h, b| {
            (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
        });
    let h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    let h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

/// Gain of harmonic `k` for a phoneme symbol, log-uniform over
/// `[1/4, 4]` at `depth = 1`. `depth = 0` gives 1 for every harmonic.
pub fn timbre_gain(symbol: &str, k: usize, depth: f64) -> f64 {
    let u = (symbol_hash(symbol, k as u64) >> 11) as f64 / (1u64 << 53) as f64;
    TIMBRE_RANGE.powf(depth * (2.0 * u - 1.0))
}

pub fn generate_utterance(score: &Score, cfg: &SynthConfig) -> Result<SynthOutput> {
    cfg.validate()?;
    let spans = note_frame_boundaries(score, cfg.sample_rate, cfg.hop)?;
    let durations = rhythm_adjust(
        &vec![1.0; score.phonemes.len()],
        &score.phoneme_note_idx,
        &spans,
    )?;
    let f0 = score_f0(score, &spans, cfg);
    let frame_phoneme = PhonemeFrameExpansion::from_durations(&durations).frame_to_phoneme;
    let gains: Vec<Vec<f64>> = score
        .phonemes
        .iter()
        .map(|p| {
            (1..=cfg.n_harmonics)
                .map(|k| timbre_gain(p, k, cfg.timbre_depth) / k as f64)
                .collect()
        })
        .collect();

    let sr = f64::from(cfg.sample_rate);
    let nyquist = sr / 2.0;
    let n_samples = spans.total_frames() * cfg.hop;
    let frames = f0.values();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut waveform = Vec::with_capacity(n_samples);
    let mut phase = 0.0;

    for n in 0..n_samples {
        let t = n / cfg.hop;
        let here = frames[t];
        let noise = cfg.noise_level * rng.random_range(-1.0..1.0);
        if here <= 0.0 {
            phase = 0.0;
            waveform.push(noise);
            continue;
        }
        // linear interpolation towards the next frame when it is voiced too
        let next = frames.get(t + 1).copied().unwrap_or(0.0);
        let frac = (n % cfg.hop) as f64 / cfg.hop as f64;
        let hz = if next > 0.0 {
            here + (next - here) * frac
        } else {
            here
        };
        phase = (phase + 2.0 * PI * hz / sr) % (2.0 * PI);

        let amps = &gains[frame_phoneme[t]];
        let mut voice = 0.0;
        for (i, amp) in amps.iter().enumerate() {
            let k = (i + 1) as f64;
            if k * hz >= nyquist {
                break;
            }
            voice += amp * (k * phase).sin();
        }
        waveform.push(voice + noise);
    }

    Ok(SynthOutput {
        waveform,
        f0,
        durations,
        spans,
    })
}

fn rms(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

/// Replaces each sample range with low-passed noise scaled to the range's
/// original RMS, imitating breaths.
pub fn corrupt_with_breath(
    waveform: &[f64],
    spans: &[Range<usize>],
    seed: u64,
) -> Result<Vec<f64>> {
    if let Some(bad) = spans
        .iter()
        .find(|r| r.start > r.end || r.end > waveform.len())
    {
        return Err(Error::value(format!(
            "breath span {bad:?} outside 0..{}",
            waveform.len()
        )));
    }
    let mut out = waveform.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for span in spans {
        let target = rms(&waveform[span.clone()]);
        let mut state = 0.0;
        let burst: Vec<f64> = span
            .clone()
            .map(|_| {
                state = 0.85 * state + 0.15 * rng.random_range(-1.0..1.0);
                state
            })
            .collect();
        let level = rms(&burst);
        let gain = if level > 0.0 { target / level } else { 0.0 };
        for (dst, b) in out[span.clone()].iter_mut().zip(burst) {
            *dst = b * gain;
        }
    }
    Ok(out)
}
