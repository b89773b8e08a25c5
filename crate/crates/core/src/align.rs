//! Monotonic alignment search between frames and phonemes, optionally
//! restricted to note boundaries.
//!
//! Ties between equally good alignments are always broken the same way: a
//! phoneme is entered as late as possible. Equivalently, among optimal
//! alignments the one whose last phoneme starts latest wins, then the one
//! whose second-to-last phoneme starts latest, and so on.

use std::f64::consts::PI;

use ndarray::{s, Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::gaussian::GaussianSeq;
use crate::score::{phoneme_range, NoteFrameSpans};

/// `T × S` table of per-frame, per-phoneme log-likelihoods.
#[derive(Debug, Clone, PartialEq)]
pub struct LogLikMatrix {
    values: Array2<f64>,
}

impl LogLikMatrix {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::value("log-likelihood table has non-finite entries"));
        }
        Ok(LogLikMatrix { values })
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn n_frames(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_phonemes(&self) -> usize {
        self.values.ncols()
    }
}

/// Frames per phoneme. Every entry is at least one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Durations(Vec<usize>);

impl Durations {
    pub fn new(frames: Vec<usize>) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::value("no durations"));
        }
        if let Some(i) = frames.iter().position(|&d| d == 0) {
            return Err(Error::value(format!("phoneme {i} has zero duration")));
        }
        Ok(Durations(frames))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// Onset frame of each phoneme.
    pub fn starts(&self) -> Vec<usize> {
        self.0
            .iter()
            .scan(0, |acc, &d| {
                let start = *acc;
                *acc += d;
                Some(start)
            })
            .collect()
    }
}

impl std::ops::Index<usize> for Durations {
    type Output = usize;

    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

/// `values[t][s] = Σ_d [-½ln(2π) - log_std - (x - μ)² / (2σ²)]` for latent
/// frame `t` under prior row `s`.
pub fn gaussian_loglik_matrix(latents: &Array2<f64>, priors: &GaussianSeq) -> Result<LogLikMatrix> {
    let (n_rows, dims) = priors.dim();
    if latents.ncols() != dims {
        return Err(Error::shape(format!(
            "latents have {} dims, priors {dims}",
            latents.ncols()
        )));
    }
    let half_ln_2pi = 0.5 * (2.0 * PI).ln();
    let means = priors.means();
    let log_stds = priors.log_stds();
    let inv_var = log_stds.mapv(|l| (-2.0 * l).exp());

    let mut out = Array2::zeros((latents.nrows(), n_rows));
    for (t, x) in latents.rows().into_iter().enumerate() {
        for s in 0..n_rows {
            let mut acc = 0.0;
            for d in 0..dims {
                let r = x[d] - means[[s, d]];
                acc += -half_ln_2pi - log_stds[[s, d]] - 0.5 * r * r * inv_var[[s, d]];
            }
            out[[t, s]] = acc;
        }
    }
    LogLikMatrix::new(out)
}

/// Sum of `values[t][phoneme(t)]` along the alignment, accumulated in frame
/// order.
pub fn alignment_score(loglik: &LogLikMatrix, durations: &Durations) -> Result<f64> {
    check_durations_fit(loglik, durations)?;
    Ok(path_score(loglik.values.view(), durations.as_slice()))
}

fn path_score(values: ArrayView2<f64>, durations: &[usize]) -> f64 {
    let mut acc = 0.0;
    let mut t = 0;
    for (s, &d) in durations.iter().enumerate() {
        for _ in 0..d {
            acc += values[[t, s]];
            t += 1;
        }
    }
    acc
}

fn check_durations_fit(loglik: &LogLikMatrix, durations: &Durations) -> Result<()> {
    if durations.len() != loglik.n_phonemes() || durations.total() != loglik.n_frames() {
        return Err(Error::shape(format!(
            "durations ({} phonemes, {} frames) do not fit a {}x{} table",
            durations.len(),
            durations.total(),
            loglik.n_frames(),
            loglik.n_phonemes()
        )));
    }
    Ok(())
}

/// Best monotonic alignment in which every phoneme takes at least one frame.
pub fn mas(loglik: &LogLikMatrix) -> Result<Durations> {
    let (t, s) = loglik.values.dim();
    if s == 0 {
        return Err(Error::Infeasible("no phonemes".into()));
    }
    if t < s {
        return Err(Error::Infeasible(format!(
            "{t} frames cannot cover {s} phonemes"
        )));
    }
    Durations::new(mas_view(loglik.values.view()))
}

fn mas_view(values: ArrayView2<f64>) -> Vec<usize> {
    let (n_frames, n_phonemes) = values.dim();
    // best[t][s]: best score of frames 0..=t ending on phoneme s
    let mut best = Array2::from_elem((n_frames, n_phonemes), f64::NEG_INFINITY);
    best[[0, 0]] = values[[0, 0]];
    for t in 1..n_frames {
        for s in 0..n_phonemes.min(t + 1) {
            let stay = best[[t - 1, s]];
            let advance = if s > 0 {
                best[[t - 1, s - 1]]
            } else {
                f64::NEG_INFINITY
            };
            best[[t, s]] = values[[t, s]] + stay.max(advance);
        }
    }

    let mut durations = vec![0; n_phonemes];
    let mut s = n_phonemes - 1;
    for t in (1..n_frames).rev() {
        durations[s] += 1;
        // `>=`: on a tie, frame t is where phoneme s begins
        if s > 0 && best[[t - 1, s - 1]] >= best[[t - 1, s]] {
            s -= 1;
        }
    }
    debug_assert_eq!(s, 0);
    durations[0] += 1;
    durations
}

/// Largest instance [`brute_force_mas`] will enumerate.
pub const BRUTE_FORCE_MAX_FRAMES: usize = 12;
pub const BRUTE_FORCE_MAX_PHONEMES: usize = 5;

/// Exhaustive search over all compositions of `T` into `S` positive parts.
/// Test oracle for [`mas`]; applies the same tie rule.
pub fn brute_force_mas(loglik: &LogLikMatrix) -> Result<Durations> {
    let (t, s) = loglik.values.dim();
    if t > BRUTE_FORCE_MAX_FRAMES || s > BRUTE_FORCE_MAX_PHONEMES {
        return Err(Error::value(format!(
            "instance {t}x{s} too large for enumeration (max {BRUTE_FORCE_MAX_FRAMES}x{BRUTE_FORCE_MAX_PHONEMES})"
        )));
    }
    if s == 0 || t < s {
        return Err(Error::Infeasible(format!(
            "{t} frames cannot cover {s} phonemes"
        )));
    }

    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut current = Vec::with_capacity(s);
    for_each_composition(t, s, &mut current, &mut |d| {
        let score = path_score(loglik.values.view(), d);
        let better = match &best {
            None => true,
            Some((b, bd)) => score > *b || (score == *b && later_onsets(d, bd)),
        };
        if better {
            best = Some((score, d.to_vec()));
        }
    });
    Durations::new(best.expect("at least one composition").1)
}

/// True when `a` enters its phonemes later than `b`, comparing onsets from
/// the last phoneme backwards.
fn later_onsets(a: &[usize], b: &[usize]) -> bool {
    let (mut end_a, mut end_b) = (a.iter().sum::<usize>(), b.iter().sum::<usize>());
    for (da, db) in a.iter().rev().zip(b.iter().rev()) {
        end_a -= da;
        end_b -= db;
        if end_a != end_b {
            return end_a > end_b;
        }
    }
    false
}

fn for_each_composition(
    remaining: usize,
    parts: usize,
    current: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if parts == 1 {
        current.push(remaining);
        f(current);
        current.pop();
        return;
    }
    for first in 1..=remaining - (parts - 1) {
        current.push(first);
        for_each_composition(remaining - first, parts - 1, current, f);
        current.pop();
    }
}

/// MAS run independently inside each note: frames of a note align only to
/// that note's phonemes. A note with a single phoneme gives it the whole span.
pub fn mas_note_bounded(
    loglik: &LogLikMatrix,
    phoneme_note_idx: &[usize],
    spans: &NoteFrameSpans,
) -> Result<Durations> {
    if spans.total_frames() != loglik.n_frames() {
        return Err(Error::shape(format!(
            "note spans cover {} frames, table has {}",
            spans.total_frames(),
            loglik.n_frames()
        )));
    }
    if phoneme_note_idx.len() != loglik.n_phonemes() {
        return Err(Error::shape(format!(
            "mapping has {} phonemes, table has {}",
            phoneme_note_idx.len(),
            loglik.n_phonemes()
        )));
    }
    spans.check_feasible(phoneme_note_idx)?;

    let mut durations = Vec::with_capacity(phoneme_note_idx.len());
    for (note, span) in spans.spans().iter().enumerate() {
        let phonemes = phoneme_range(phoneme_note_idx, note);
        if phonemes.len() == 1 {
            durations.push(span.len());
        } else {
            let sub = loglik.values.slice(s![span.range(), phonemes]);
            durations.extend(mas_view(sub));
        }
    }
    Durations::new(durations)
}
