mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use svs_core::score::{note_frame_boundaries, parse_score, parse_scores, seconds_to_frames, Score};

fn score_strategy() -> impl Strategy<Value = Score> {
    (any::<u64>(), 1usize..=10, any::<bool>()).prop_map(|(seed, n_notes, flagged)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut score = common::random_score(&mut rng, &format!("u{seed}"), n_notes, 0.05, 1.5, 0.2);
        if flagged {
            score.flags = Some((0..score.phonemes.len()).map(|i| if i % 3 == 0 { "slur" } else { "0" }.into()).collect());
        }
        score
    })
}

proptest! {
    #[test]
    fn round_trip(score in score_strategy()) {
        let text = score.to_string();
        let back = parse_score(&text).unwrap();
        prop_assert_eq!(&back, &score);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn spans_do_not_drift(score in score_strategy()) {
        let spans = note_frame_boundaries(&score, 44_100, 512).unwrap();
        prop_assert_eq!(spans.len(), score.notes.len());
        prop_assert_eq!(spans.total_frames(), seconds_to_frames(score.total_duration_sec(), 44_100, 512));
    }

    #[test]
    fn every_note_has_a_phoneme(score in score_strategy()) {
        for n in 0..score.notes.len() {
            prop_assert!(score.phoneme_note_idx.contains(&n));
        }
    }
}

#[test]
fn multi_utterance_files() {
    let text = "# two lines\na|x|60|0.5|0\n\nb|y z|rest 62|0.2 0.3|0 1\n";
    let scores = parse_scores(text).unwrap();
    assert_eq!(scores.len(), 2);
    assert_eq!(scores[1].utt_id, "b");
    assert!(parse_score(text).is_err());
}
