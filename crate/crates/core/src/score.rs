//! Music scores: lyrics as phonemes, notes with pitch and duration, and the
//! phoneme-to-note mapping.
//!
//! Text format, one utterance per line:
//!
//! ```text
//! utt_id|ph ph ph|60 62|0.5 0.5|0 0 1[|flag flag flag]
//! ```
//!
//! Pitches are MIDI numbers or `rest`. Lines starting with `#` and blank lines
//! are skipped.

use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};

/// Highest valid MIDI note number.
pub const MIDI_MAX: u8 = 127;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pitch {
    Rest,
    Midi(u8),
}

impl Pitch {
    /// Frequency in Hz, `None` for rests.
    pub fn hz(self) -> Option<f64> {
        match self {
            Pitch::Rest => None,
            Pitch::Midi(m) => Some(midi_to_hz(f64::from(m))),
        }
    }
}

impl fmt::Display for Pitch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pitch::Rest => f.write_str("rest"),
            Pitch::Midi(m) => write!(f, "{m}"),
        }
    }
}

/// Equal temperament, A4 (MIDI 69) = 440 Hz.
pub fn midi_to_hz(midi: f64) -> f64 {
    440.0 * 2f64.powf((midi - 69.0) / 12.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Note {
    pub pitch: Pitch,
    pub duration_sec: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Score {
    pub utt_id: String,
    pub phonemes: Vec<String>,
    pub notes: Vec<Note>,
    pub phoneme_note_idx: Vec<usize>,
    /// Optional per-phoneme flags (slur, aspirate, ...). Carried through, not
    /// interpreted.
    pub flags: Option<Vec<String>>,
}

impl Score {
    /// Builds a score and checks every invariant.
    pub fn new(
        utt_id: impl Into<String>,
        phonemes: Vec<String>,
        notes: Vec<Note>,
        phoneme_note_idx: Vec<usize>,
    ) -> Result<Self> {
        let score = Score {
            utt_id: utt_id.into(),
            phonemes,
            notes,
            phoneme_note_idx,
            flags: None,
        };
        score.validate(0)?;
        Ok(score)
    }

    fn validate(&self, line: usize) -> Result<()> {
        if self.utt_id.is_empty() || self.utt_id.contains(['|', '\n']) {
            return Err(Error::value(format!("bad utterance id {:?}", self.utt_id)));
        }
        if self.notes.is_empty() {
            return Err(Error::value("score has no notes"));
        }
        for (i, note) in self.notes.iter().enumerate() {
            if !(note.duration_sec.is_finite() && note.duration_sec > 0.0) {
                return Err(Error::value(format!(
                    "note {i}: duration must be positive, got {}",
                    note.duration_sec
                )));
            }
            if let Pitch::Midi(m) = note.pitch {
                if m > MIDI_MAX {
                    return Err(Error::value(format!("note {i}: pitch {m} out of range")));
                }
            }
        }
        if self.phoneme_note_idx.len() != self.phonemes.len() {
            return Err(Error::Mapping {
                line,
                message: format!(
                    "{} phonemes but {} mapping entries",
                    self.phonemes.len(),
                    self.phoneme_note_idx.len()
                ),
            });
        }
        if let Some(flags) = &self.flags {
            if flags.len() != self.phonemes.len() {
                return Err(Error::Mapping {
                    line,
                    message: format!(
                        "{} phonemes but {} flags",
                        self.phonemes.len(),
                        flags.len()
                    ),
                });
            }
        }
        check_mapping(&self.phoneme_note_idx, self.notes.len())
            .map_err(|message| Error::Mapping { line, message })
    }

    pub fn total_duration_sec(&self) -> f64 {
        self.notes.iter().map(|n| n.duration_sec).sum()
    }

    /// Range of phoneme indices owned by `note`.
    pub fn phonemes_of_note(&self, note: usize) -> Range<usize> {
        phoneme_range(&self.phoneme_note_idx, note)
    }

    /// Number of phonemes mapped to each note.
    pub fn phoneme_counts(&self) -> Vec<usize> {
        phoneme_counts(&self.phoneme_note_idx, self.notes.len())
    }
}

/// The mapping must start at 0, end at `n_notes - 1`, and never step by more
/// than one, so that it is monotone and covers every note.
fn check_mapping(map: &[usize], n_notes: usize) -> std::result::Result<(), String> {
    let Some(&first) = map.first() else {
        return Err("score has no phonemes".into());
    };
    if first != 0 {
        return Err(format!("mapping must start at note 0, starts at {first}"));
    }
    for (i, w) in map.windows(2).enumerate() {
        if w[1] < w[0] {
            return Err(format!(
                "mapping is not monotone at phoneme {}: {} after {}",
                i + 1,
                w[1],
                w[0]
            ));
        }
        if w[1] > w[0] + 1 {
            return Err(format!(
                "note {} has no phoneme (mapping jumps from {} to {})",
                w[0] + 1,
                w[0],
                w[1]
            ));
        }
    }
    let last = *map.last().unwrap();
    if last + 1 != n_notes {
        return Err(format!(
            "mapping ends at note {last} but the score has {n_notes} notes"
        ));
    }
    Ok(())
}

pub(crate) fn phoneme_counts(map: &[usize], n_notes: usize) -> Vec<usize> {
    let mut counts = vec![0; n_notes];
    for &n in map {
        if n < n_notes {
            counts[n] += 1;
        }
    }
    counts
}

pub(crate) fn phoneme_range(map: &[usize], note: usize) -> Range<usize> {
    let start = map.partition_point(|&n| n < note);
    let end = map.partition_point(|&n| n <= note);
    start..end
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}|", self.utt_id, self.phonemes.join(" "))?;
        write_joined(f, self.notes.iter().map(|n| n.pitch))?;
        f.write_str("|")?;
        write_joined(f, self.notes.iter().map(|n| n.duration_sec))?;
        f.write_str("|")?;
        write_joined(f, self.phoneme_note_idx.iter())?;
        if let Some(flags) = &self.flags {
            write!(f, "|{}", flags.join(" "))?;
        }
        Ok(())
    }
}

fn write_joined<T: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    items: impl Iterator<Item = T>,
) -> fmt::Result {
    for (i, item) in items.enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

/// Whitespace-separated tokens with their 1-based character column.
fn tokens(field: &str, field_col: usize) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (byte, ch) in field.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, byte));
            }
        } else if start.is_none() {
            start = Some(byte);
        }
    }
    if let Some(s) = start {
        out.push((s, field.len()));
    }
    out.into_iter()
        .map(move |(s, e)| (field_col + field[..s].chars().count(), &field[s..e]))
}

fn parse_line(line: &str, line_no: usize) -> Result<Score> {
    let syntax = |column: usize, message: String| Error::Syntax {
        line: line_no,
        column,
        message,
    };

    // (1-based column, text) of each pipe-separated field
    let mut fields = Vec::new();
    let mut col = 1;
    for part in line.split('|') {
        fields.push((col, part));
        col += part.chars().count() + 1;
    }
    if fields.len() < 5 || fields.len() > 6 {
        return Err(syntax(
            1,
            format!("expected 5 or 6 '|'-separated fields, found {}", fields.len()),
        ));
    }

    let (id_col, id) = fields[0];
    let utt_id = id.trim();
    if utt_id.is_empty() || utt_id.contains(char::is_whitespace) {
        return Err(syntax(id_col, format!("bad utterance id {id:?}")));
    }

    let (ph_col, ph) = fields[1];
    let phonemes: Vec<String> = tokens(ph, ph_col).map(|(_, t)| t.to_string()).collect();
    if phonemes.is_empty() {
        return Err(syntax(ph_col, "no phonemes".into()));
    }

    let (pitch_col, pitch_field) = fields[2];
    let mut pitches = Vec::new();
    for (c, tok) in tokens(pitch_field, pitch_col) {
        let pitch = if tok.eq_ignore_ascii_case("rest") {
            Pitch::Rest
        } else {
            let m: i64 = tok
                .parse()
                .map_err(|_| syntax(c, format!("bad pitch {tok:?}")))?;
            if !(0..=i64::from(MIDI_MAX)).contains(&m) {
                return Err(Error::value(format!(
                    "line {line_no}, column {c}: pitch {m} outside 0..=127"
                )));
            }
            Pitch::Midi(m as u8)
        };
        pitches.push(pitch);
    }

    let (dur_col, dur_field) = fields[3];
    let mut durations = Vec::new();
    for (c, tok) in tokens(dur_field, dur_col) {
        let d: f64 = tok
            .parse()
            .map_err(|_| syntax(c, format!("bad duration {tok:?}")))?;
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::value(format!(
                "line {line_no}, column {c}: duration must be positive, got {tok}"
            )));
        }
        durations.push(d);
    }
    if pitches.len() != durations.len() {
        return Err(syntax(
            dur_col,
            format!(
                "{} pitches but {} durations",
                pitches.len(),
                durations.len()
            ),
        ));
    }

    let (map_col, map_field) = fields[4];
    let mut map = Vec::new();
    for (c, tok) in tokens(map_field, map_col) {
        let idx: usize = tok
            .parse()
            .map_err(|_| syntax(c, format!("bad note index {tok:?}")))?;
        map.push(idx);
    }

    let flags = fields
        .get(5)
        .map(|(c, f)| tokens(f, *c).map(|(_, t)| t.to_string()).collect());

    let score = Score {
        utt_id: utt_id.to_string(),
        phonemes,
        notes: pitches
            .into_iter()
            .zip(durations)
            .map(|(pitch, duration_sec)| Note {
                pitch,
                duration_sec,
            })
            .collect(),
        phoneme_note_idx: map,
        flags,
    };
    score.validate(line_no)?;
    Ok(score)
}

/// Parses every utterance in a score document.
pub fn parse_scores(text: &str) -> Result<Vec<Score>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        out.push(parse_line(line.trim_end_matches('\r'), i + 1)?);
    }
    Ok(out)
}

/// Parses a document holding exactly one utterance.
pub fn parse_score(text: &str) -> Result<Score> {
    let mut scores = parse_scores(text)?;
    match scores.len() {
        1 => Ok(scores.pop().unwrap()),
        n => Err(Error::value(format!(
            "expected exactly one utterance, found {n}"
        ))),
    }
}

/// Half-open frame interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameSpan {
    pub start: usize,
    pub end: usize,
}

impl FrameSpan {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn range(&self) -> Range<usize> {
        self.start..self.end
    }
}

/// Contiguous per-note frame intervals starting at frame 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoteFrameSpans {
    spans: Vec<FrameSpan>,
}

impl NoteFrameSpans {
    /// Builds spans from boundaries `[0, b1, b2, ..., T]`.
    pub fn from_boundaries(boundaries: &[usize]) -> Result<Self> {
        if boundaries.len() < 2 || boundaries[0] != 0 {
            return Err(Error::value("boundaries must start at 0 and hold at least one span"));
        }
        let spans: Vec<FrameSpan> = boundaries
            .windows(2)
            .map(|w| FrameSpan {
                start: w[0],
                end: w[1],
            })
            .collect();
        if let Some(i) = spans.iter().position(FrameSpan::is_empty) {
            return Err(Error::DegenerateSpan {
                note: i,
                frames: 0,
                phonemes: 0,
            });
        }
        Ok(NoteFrameSpans { spans })
    }

    pub fn spans(&self) -> &[FrameSpan] {
        &self.spans
    }

    pub fn len(&self) -> usize {
        self.spans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn total_frames(&self) -> usize {
        self.spans.last().map_or(0, |s| s.end)
    }

    /// Checks that every note has at least as many frames as phonemes.
    pub fn check_feasible(&self, phoneme_note_idx: &[usize]) -> Result<()> {
        check_mapping(phoneme_note_idx, self.spans.len()).map_err(|message| Error::Mapping {
            line: 0,
            message,
        })?;
        let counts = phoneme_counts(phoneme_note_idx, self.spans.len());
        for (note, (span, &phonemes)) in self.spans.iter().zip(&counts).enumerate() {
            if span.len() < phonemes {
                return Err(Error::DegenerateSpan {
                    note,
                    frames: span.len(),
                    phonemes,
                });
            }
        }
        Ok(())
    }
}

/// Seconds to frame index, rounding half away from zero.
pub fn seconds_to_frames(sec: f64, sample_rate: u32, hop: usize) -> usize {
    (sec * f64::from(sample_rate) / hop as f64).round() as usize
}

/// Quantizes note durations to frame spans. Boundaries are rounded from the
/// cumulative onset time so per-note rounding error never accumulates.
pub fn note_frame_boundaries(score: &Score, sample_rate: u32, hop: usize) -> Result<NoteFrameSpans> {
    if sample_rate == 0 || hop == 0 {
        return Err(Error::value("sample rate and hop must be positive"));
    }
    let mut boundaries = Vec::with_capacity(score.notes.len() + 1);
    boundaries.push(0);
    let mut cumulative = 0.0;
    for note in &score.notes {
        cumulative += note.duration_sec;
        boundaries.push(seconds_to_frames(cumulative, sample_rate, hop));
    }
    let counts = score.phoneme_counts();
    for (note, w) in boundaries.windows(2).enumerate() {
        let frames = w[1].saturating_sub(w[0]);
        if frames == 0 || frames < counts[note] {
            return Err(Error::DegenerateSpan {
                note,
                frames,
                phonemes: counts[note],
            });
        }
    }
    NoteFrameSpans::from_boundaries(&boundaries)
}
