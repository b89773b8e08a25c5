#![allow(dead_code)]

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use svs_core::score::{Note, Pitch, Score};

pub const FD_STEP: f64 = 1e-4;

/// Central finite-difference gradient of `f` at `x`.
pub fn fd_gradient(x: &[f64], step: f64, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = probe[i];
            probe[i] = orig + step;
            let up = f(&probe);
            probe[i] = orig - step;
            let down = f(&probe);
            probe[i] = orig;
            (up - down) / (2.0 * step)
        })
        .collect()
}

/// Norm-wise relative error `|a - n| / max(|a|, |n|)` between two gradient
/// vectors. Two all-zero vectors compare as 0.
pub fn max_rel_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    assert_eq!(analytic.len(), numeric.len());
    let norm = |v: &mut dyn Iterator<Item = f64>| v.map(|x| x * x).sum::<f64>().sqrt();
    let diff = norm(&mut analytic.iter().zip(numeric).map(|(a, n)| a - n));
    let scale = norm(&mut analytic.iter().copied()).max(norm(&mut numeric.iter().copied()));
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

pub fn normal_matrix(rng: &mut impl Rng, rows: usize, cols: usize, scale: f64) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| scale * rng.sample::<f64, _>(StandardNormal))
}

pub fn uniform_matrix(rng: &mut impl Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.random_range(lo..hi))
}

const SYMBOLS: [&str; 16] = [
    "a", "e", "i", "o", "u", "ai", "ei", "ao", "ou", "an", "en", "ang", "eng", "ong", "er", "in",
];

/// Random singable score: `n_notes` notes of `min_sec..max_sec`, each with
/// 1-3 distinct phonemes; rests (single `SP` phoneme) appear with
/// probability `rest_prob`.
pub fn random_score(
    rng: &mut impl Rng,
    id: &str,
    n_notes: usize,
    min_sec: f64,
    max_sec: f64,
    rest_prob: f64,
) -> Score {
    let mut phonemes = Vec::new();
    let mut notes = Vec::new();
    let mut map = Vec::new();
    let mut prev_last: Option<String> = None;
    for n in 0..n_notes {
        let rest = n > 0 && rng.random_bool(rest_prob) && prev_last.as_deref() != Some("SP");
        let duration_sec = rng.random_range(min_sec..max_sec);
        if rest {
            notes.push(Note {
                pitch: Pitch::Rest,
                duration_sec,
            });
            phonemes.push("SP".to_string());
            map.push(n);
            prev_last = Some("SP".into());
            continue;
        }
        notes.push(Note {
            pitch: Pitch::Midi(rng.random_range(55..=72)),
            duration_sec,
        });
        let count = rng.random_range(1..=3);
        let mut pool: Vec<&str> = SYMBOLS
            .iter()
            .copied()
            .filter(|s| prev_last.as_deref() != Some(*s))
            .collect();
        pool.shuffle(rng);
        for sym in pool.into_iter().take(count) {
            phonemes.push(sym.to_string());
            map.push(n);
            prev_last = Some(sym.to_string());
        }
    }
    Score::new(id, phonemes, notes, map).expect("generated score is valid")
}
