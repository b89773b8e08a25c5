//! Length regulation: expanding phoneme-level rows to frames, and fitting
//! predicted phoneme durations into their note's frame span.

use ndarray::Array2;

use crate::align::Durations;
use crate::error::{Error, Result};
use crate::score::{phoneme_range, NoteFrameSpans};

/// Fractional parts closer than this are treated as equal, so that rounding
/// noise in the shares cannot reorder them.
const FRACTION_RESOLUTION: f64 = 1e-9;

/// Frame-to-phoneme index map produced by a set of durations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhonemeFrameExpansion {
    pub frame_to_phoneme: Vec<usize>,
}

impl PhonemeFrameExpansion {
    pub fn from_durations(durations: &Durations) -> Self {
        let frame_to_phoneme = durations
            .as_slice()
            .iter()
            .enumerate()
            .flat_map(|(s, &d)| std::iter::repeat_n(s, d))
            .collect();
        PhonemeFrameExpansion { frame_to_phoneme }
    }

    pub fn len(&self) -> usize {
        self.frame_to_phoneme.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frame_to_phoneme.is_empty()
    }
}

/// Repeats row `s` of `values` `durations[s]` times.
pub fn expand(values: &Array2<f64>, durations: &Durations) -> Result<Array2<f64>> {
    if values.nrows() != durations.len() {
        return Err(Error::shape(format!(
            "{} rows but {} durations",
            values.nrows(),
            durations.len()
        )));
    }
    let expansion = PhonemeFrameExpansion::from_durations(durations);
    Ok(values.select(ndarray::Axis(0), &expansion.frame_to_phoneme))
}

/// Splits `total` frames among parts in proportion to `weights`, using
/// largest-remainder apportionment (ties to the earlier part), then raises any
/// zero to one frame by taking from the currently largest part.
///
/// Requires `total >= weights.len()` and strictly positive weights.
pub fn apportion(weights: &[f64], total: usize) -> Result<Vec<usize>> {
    if weights.is_empty() {
        return Err(Error::value("nothing to apportion"));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(Error::value(format!("weights must be positive, got {w}")));
    }
    if total < weights.len() {
        return Err(Error::Infeasible(format!(
            "{total} frames cannot hold {} phonemes",
            weights.len()
        )));
    }

    let sum: f64 = weights.iter().sum();
    let mut counts = Vec::with_capacity(weights.len());
    let mut fractions = Vec::with_capacity(weights.len());
    for &w in weights {
        let share = w / sum * total as f64;
        // shares within the resolution of an integer count as that integer
        let whole = (share + FRACTION_RESOLUTION).floor();
        let frac = (share - whole).max(0.0);
        counts.push(whole as usize);
        fractions.push((frac / FRACTION_RESOLUTION).round() as u64);
    }

    let assigned: usize = counts.iter().sum();
    if assigned > total {
        // only reachable through the resolution snap; trim from the end
        let mut excess = assigned - total;
        for c in counts.iter_mut().rev() {
            let take = excess.min(*c);
            *c -= take;
            excess -= take;
        }
    } else {
        let mut order: Vec<usize> = (0..weights.len()).collect();
        // stable sort keeps earlier phonemes first among equal fractions
        order.sort_by(|&a, &b| fractions[b].cmp(&fractions[a]));
        for &i in order.iter().cycle().take(total - assigned) {
            counts[i] += 1;
        }
    }

    while let Some(zero) = counts.iter().position(|&c| c == 0) {
        let donor = counts
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i)
            .unwrap();
        counts[donor] -= 1;
        counts[zero] += 1;
    }
    Ok(counts)
}

/// Rescales predicted durations so each note's phonemes exactly fill the
/// note's frame span, keeping their within-note ratios.
pub fn rhythm_adjust(
    predicted: &[f64],
    phoneme_note_idx: &[usize],
    spans: &NoteFrameSpans,
) -> Result<Durations> {
    if predicted.len() != phoneme_note_idx.len() {
        return Err(Error::shape(format!(
            "{} predictions for {} phonemes",
            predicted.len(),
            phoneme_note_idx.len()
        )));
    }
    spans.check_feasible(phoneme_note_idx)?;
    let mut out = Vec::with_capacity(predicted.len());
    for (note, span) in spans.spans().iter().enumerate() {
        let phonemes = phoneme_range(phoneme_note_idx, note);
        out.extend(apportion(&predicted[phonemes], span.len())?);
    }
    Durations::new(out)
}

#[cfg(test)]
mod tests {
    use ndarray::array;

    use super::*;

    fn spans(b: &[usize]) -> NoteFrameSpans {
        NoteFrameSpans::from_boundaries(b).unwrap()
    }

    #[test]
    fn expand_repeats_rows() {
        let v = array![[1.0, 2.0], [3.0, 4.0]];
        let d = Durations::new(vec![2, 3]).unwrap();
        let e = expand(&v, &d).unwrap();
        assert_eq!(
            e,
            array![[1., 2.], [1., 2.], [3., 4.], [3., 4.], [3., 4.]]
        );
        let ones = Durations::new(vec![1, 1]).unwrap();
        assert_eq!(expand(&v, &ones).unwrap(), v);
        assert!(expand(&v, &Durations::new(vec![1]).unwrap()).is_err());
    }

    #[test]
    fn expand_then_average_recovers_rows() {
        let v = array![[0.1, -3.0], [2.5, 7.0], [1e-3, 4.0]];
        let d = Durations::new(vec![3, 1, 4]).unwrap();
        let e = expand(&v, &d).unwrap();
        let map = PhonemeFrameExpansion::from_durations(&d).frame_to_phoneme;
        for (row, &s) in e.rows().into_iter().zip(&map) {
            assert_eq!(row, v.row(s));
        }
        let mut start = 0;
        for (s, &len) in d.as_slice().iter().enumerate() {
            let mean = e
                .slice(ndarray::s![start..start + len, ..])
                .mean_axis(ndarray::Axis(0))
                .unwrap();
            for (a, b) in mean.iter().zip(v.row(s)) {
                assert!((a - b).abs() <= 1e-15 * b.abs().max(1.0));
            }
            start += len;
        }
    }

    #[test]
    fn exact_ratio() {
        let d = rhythm_adjust(&[3.0, 5.0], &[0, 0], &spans(&[0, 16])).unwrap();
        assert_eq!(d.as_slice(), [6, 10]);
    }

    #[test]
    fn largest_remainder() {
        let d = rhythm_adjust(&[3.0, 4.0], &[0, 0], &spans(&[0, 10])).unwrap();
        assert_eq!(d.as_slice(), [4, 6]);
    }

    #[test]
    fn single_phoneme_gets_span() {
        let d = rhythm_adjust(&[0.001], &[0], &spans(&[0, 10])).unwrap();
        assert_eq!(d.as_slice(), [10]);
    }

    #[test]
    fn equal_fractions_favour_earlier() {
        assert_eq!(apportion(&[1.0, 1.0, 1.0], 4).unwrap(), [2, 1, 1]);
        assert_eq!(apportion(&[1.0, 1.0, 1.0], 5).unwrap(), [2, 2, 1]);
    }

    #[test]
    fn zero_repair_steals_from_largest() {
        // shares 0.0297 / 2.97: floors [0, 2], remainder to the larger fraction
        assert_eq!(apportion(&[0.01, 1.0], 3).unwrap(), [1, 2]);
        assert_eq!(apportion(&[1.0, 1e-6, 1e-6], 3).unwrap(), [1, 1, 1]);
        assert_eq!(apportion(&[1e-6, 5.0, 5.0, 1e-6], 6).unwrap(), [1, 2, 2, 1]);
    }

    #[test]
    fn infeasible() {
        assert!(matches!(
            apportion(&[1.0, 1.0, 1.0], 2),
            Err(Error::Infeasible(_))
        ));
        assert!(apportion(&[1.0, 0.0], 5).is_err());
        assert!(rhythm_adjust(&[1.0, 1.0], &[0, 0], &spans(&[0, 1])).is_err());
    }

    #[test]
    fn multi_note() {
        let d = rhythm_adjust(&[1.0, 2.0, 9.0, 1.0], &[0, 1, 1, 2], &spans(&[0, 5, 11, 20])).unwrap();
        assert_eq!(d.as_slice(), [5, 1, 5, 9]);
    }
}
