mod common;

use ndarray::{s, Array2};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::normal_matrix;
use svs_core::align::{alignment_score, brute_force_mas, mas, mas_note_bounded, LogLikMatrix};
use svs_core::regulator::PhonemeFrameExpansion;
use svs_core::score::NoteFrameSpans;

fn loglik(v: Array2<f64>) -> LogLikMatrix {
    LogLikMatrix::new(v).unwrap()
}

/// T x S matrix with S <= T, entries on a coarse grid so ties are common.
fn small_instance(max_t: usize, max_s: usize) -> impl Strategy<Value = Array2<f64>> {
    (1..=max_s)
        .prop_flat_map(move |s| (Just(s), s..=max_t))
        .prop_flat_map(|(s, t)| {
            prop::collection::vec(-4i32..=4, t * s)
                .prop_map(move |v| Array2::from_shape_vec((t, s), v.into_iter().map(f64::from).collect()).unwrap())
        })
}

/// Phoneme-to-note map and spans with `counts[n] <= span[n]`.
fn note_layout() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    prop::collection::vec((1usize..=3, 0usize..=5), 1..=4).prop_map(|notes| {
        let mut map = Vec::new();
        let mut bounds = vec![0];
        for (note, (count, extra)) in notes.into_iter().enumerate() {
            map.extend(std::iter::repeat_n(note, count));
            bounds.push(bounds.last().unwrap() + count + extra);
        }
        (map, bounds)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn mas_matches_brute_force_with_ties(v in small_instance(12, 5)) {
        let ll = loglik(v);
        let fast = mas(&ll).unwrap();
        let slow = brute_force_mas(&ll).unwrap();
        prop_assert_eq!(alignment_score(&ll, &fast).unwrap(), alignment_score(&ll, &slow).unwrap());
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn durations_are_complete(v in small_instance(12, 5)) {
        let t = v.nrows();
        let s = v.ncols();
        let d = mas(&loglik(v)).unwrap();
        prop_assert_eq!(d.len(), s);
        prop_assert_eq!(d.total(), t);
        prop_assert!(d.as_slice().iter().all(|&x| x >= 1));
    }

    #[test]
    fn constant_shift_leaves_durations(v in small_instance(12, 5), shift in -1000i32..1000) {
        let shifted = &v + f64::from(shift);
        prop_assert_eq!(mas(&loglik(v)).unwrap(), mas(&loglik(shifted)).unwrap());
    }

    #[test]
    fn note_bounded_factorizes((map, bounds) in note_layout(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spans = NoteFrameSpans::from_boundaries(&bounds).unwrap();
        let ll = loglik(normal_matrix(&mut rng, spans.total_frames(), map.len(), 1.0));
        let d = mas_note_bounded(&ll, &map, &spans).unwrap();
        prop_assert_eq!(d.total(), spans.total_frames());
        prop_assert!(d.as_slice().iter().all(|&x| x >= 1));

        let path = PhonemeFrameExpansion::from_durations(&d).frame_to_phoneme;
        let mut per_note = 0.0;
        let mut p0 = 0;
        for (note, span) in spans.spans().iter().enumerate() {
            for t in span.range() {
                prop_assert_eq!(map[path[t]], note);
            }
            let count = map.iter().filter(|&&m| m == note).count();
            let sub = loglik(ll.values().slice(s![span.range(), p0..p0 + count]).to_owned());
            per_note += alignment_score(&sub, &mas(&sub).unwrap()).unwrap();
            p0 += count;
        }
        let total = alignment_score(&ll, &d).unwrap();
        prop_assert!((total - per_note).abs() <= 1e-9 * per_note.abs().max(1.0), "{} vs {}", total, per_note);
    }
}

#[test]
fn random_8x3_instances_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(83);
    for _ in 0..200 {
        let ll = loglik(normal_matrix(&mut rng, 8, 3, 1.0));
        assert_eq!(mas(&ll).unwrap(), brute_force_mas(&ll).unwrap());
    }
}

#[test]
fn two_notes_of_two_phonemes_match_per_note_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(84);
    let spans = NoteFrameSpans::from_boundaries(&[0, 4, 8]).unwrap();
    for _ in 0..50 {
        let ll = loglik(normal_matrix(&mut rng, 8, 4, 1.0));
        let d = mas_note_bounded(&ll, &[0, 0, 1, 1], &spans).unwrap();
        let mut expected = brute_force_mas(&loglik(ll.values().slice(s![0..4, 0..2]).to_owned()))
            .unwrap()
            .into_inner();
        expected.extend(brute_force_mas(&loglik(ll.values().slice(s![4..8, 2..4]).to_owned())).unwrap().into_inner());
        assert_eq!(d.as_slice(), expected);
    }
}

#[test]
fn brute_force_small_cases() {
    assert_eq!(brute_force_mas(&loglik(Array2::zeros((2, 2)))).unwrap().as_slice(), [1, 1]);
    let diag = ndarray::array![[5.0, 0.0], [0.0, 5.0]];
    assert_eq!(brute_force_mas(&loglik(diag)).unwrap().as_slice(), [1, 1]);
    assert!(brute_force_mas(&loglik(Array2::zeros((13, 2)))).is_err());
    assert!(brute_force_mas(&loglik(Array2::zeros((12, 6)))).is_err());
}
