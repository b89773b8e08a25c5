//! Feature extraction: log-mel spectrograms and F0 contour processing.

mod f0;
mod mel;

pub use f0::{log_f0_masked, median_smooth_f0, F0Contour, LogF0, F0_VOICED_MAX, F0_VOICED_MIN};
pub use mel::{
    hann_window, magnitude_spectrogram, mel_filterbank, mel_spectrogram, MelConfig,
    MelSpectrogram,
};

/// Index into a sequence of length `n` under whole-sample reflection
/// (`d c b | a b c d | c b a`), repeated as often as needed.
pub(crate) fn reflect_index(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let m = i.rem_euclid(period);
    if m < n as isize {
        m as usize
    } else {
        (period - m) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::reflect_index;

    #[test]
    fn reflection() {
        let got: Vec<usize> = (-3..7).map(|i| reflect_index(i, 4)).collect();
        assert_eq!(got, [3, 2, 1, 0, 1, 2, 3, 2, 1, 0]);
        assert_eq!(reflect_index(-5, 1), 0);
        assert_eq!(reflect_index(9, 2), 1);
    }
}
