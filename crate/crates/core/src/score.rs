//! Musical constraints: notes, chords and the sonification timeline.
//!
//! Notes use twelve-tone equal temperament with A4 = 440 Hz. A score is a
//! sequence of chords spread over a fixed duration; sources are assigned to
//! chord notes by percentile binning of their mapped pitch values.

use crate::error::{Error, Result};
use crate::sources::percentile_sorted;

/// Twelve-tone-equal-temperament reference: A4.
pub const A4_FREQUENCY: f64 = 440.0;
const A4_MIDI: i32 = 69;

const SHARP_NAMES: [&str; 12] = [
    "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B",
];

/// A pitch with its equal-temperament frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Note {
    /// Chromatic pitch class, 0 = C .. 11 = B.
    pub pitch_class: u8,
    /// Scientific octave, -1..=9 (C4 = middle C).
    pub octave: i32,
}

impl Note {
    pub fn new(pitch_class: u8, octave: i32) -> Result<Self> {
        if pitch_class > 11 {
            return Err(Error::BadNoteName(format!("pitch class {pitch_class}")));
        }
        if !(-1..=9).contains(&octave) {
            return Err(Error::OctaveOutOfRange(octave));
        }
        Ok(Self {
            pitch_class,
            octave,
        })
    }

    pub fn midi(&self) -> i32 {
        12 * (self.octave + 1) + self.pitch_class as i32
    }

    /// Frequency in Hz: `440 * 2^((midi - 69) / 12)`.
    ///
    /// Whole octaves are applied as exact powers of two so that A notes
    /// (A2 = 110 Hz, A4 = 440 Hz, ...) are exact in f64.
    pub fn frequency(&self) -> f64 {
        let steps = self.midi() - A4_MIDI;
        let octaves = steps.div_euclid(12);
        let residue = steps.rem_euclid(12);
        A4_FREQUENCY * 2f64.powi(octaves) * (residue as f64 / 12.0).exp2()
    }

    /// Canonical name using sharp accidentals, e.g. `C#4`.
    pub fn name(&self) -> String {
        format!("{}{}", SHARP_NAMES[self.pitch_class as usize], self.octave)
    }
}

/// Parse a note name: letter, optional `#`/`b` accidental, octave.
///
/// Accepts ASCII accidentals only ("Ab3", "C#4"); octave -1..=9.
pub fn parse_note(text: &str) -> Result<Note> {
    let text = text.trim();
    let mut chars = text.chars();
    let letter = chars
        .next()
        .ok_or_else(|| Error::BadNoteName(text.to_string()))?;
    let base = match letter.to_ascii_uppercase() {
        'C' => 0i32,
        'D' => 2,
        'E' => 4,
        'F' => 5,
        'G' => 7,
        'A' => 9,
        'B' => 11,
        _ => return Err(Error::BadNoteName(text.to_string())),
    };
    let rest: String = chars.collect();
    let (accidental, octave_str) = match rest.chars().next() {
        Some('#') => (1i32, &rest[1..]),
        Some('b') => (-1, &rest[1..]),
        _ => (0, rest.as_str()),
    };
    if octave_str.is_empty() {
        return Err(Error::BadNoteName(text.to_string()));
    }
    let octave: i32 = octave_str
        .parse()
        .map_err(|_| Error::BadNoteName(text.to_string()))?;
    if !(-1..=9).contains(&octave) {
        return Err(Error::OctaveOutOfRange(octave));
    }
    // Accidentals may cross the octave boundary (Cb, B#).
    let chroma = base + accidental;
    let (pitch_class, octave) = match chroma {
        -1 => (11, octave - 1),
        12 => (0, octave + 1),
        pc => (pc, octave),
    };
    if !(-1..=9).contains(&octave) {
        return Err(Error::OctaveOutOfRange(octave));
    }
    Note::new(pitch_class as u8, octave)
}

/// Shift a base frequency by a (possibly fractional) number of semitones.
pub fn shifted_frequency(base: f64, semitones: f64) -> f64 {
    base * (semitones / 12.0).exp2()
}

/// An ordered list of chords; notes within a chord sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct ChordSequence {
    chords: Vec<Vec<Note>>,
}

impl ChordSequence {
    pub fn new(mut chords: Vec<Vec<Note>>) -> Result<Self> {
        if chords.is_empty() {
            return Err(Error::InvalidScore("chord sequence is empty".into()));
        }
        for chord in &mut chords {
            if chord.is_empty() {
                return Err(Error::InvalidScore("chord has no notes".into()));
            }
            chord.sort_by(|a, b| a.frequency().total_cmp(&b.frequency()));
        }
        Ok(Self { chords })
    }

    /// Parse chords from comma-separated note-name strings,
    /// e.g. `["Db3,Gb3,Ab3,Eb4,F4"]`.
    pub fn parse(texts: &[impl AsRef<str>]) -> Result<Self> {
        let mut chords = Vec::with_capacity(texts.len());
        for text in texts {
            let notes = text
                .as_ref()
                .split(',')
                .map(parse_note)
                .collect::<Result<Vec<_>>>()?;
            chords.push(notes);
        }
        Self::new(chords)
    }

    pub fn chords(&self) -> &[Vec<Note>] {
        &self.chords
    }

    pub fn len(&self) -> usize {
        self.chords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chords.is_empty()
    }
}

/// Chord sequence plus the total sonification duration.
#[derive(Debug, Clone)]
pub struct ScoreSpec {
    pub chord_sequence: ChordSequence,
    /// Total output duration in seconds.
    pub duration: f64,
}

impl ScoreSpec {
    pub fn new(chord_sequence: ChordSequence, duration: f64) -> Result<Self> {
        if !duration.is_finite() || duration <= 0.0 {
            return Err(Error::InvalidScore(format!(
                "duration must be finite and positive, got {duration}"
            )));
        }
        Ok(Self {
            chord_sequence,
            duration,
        })
    }
}

/// Index of the chord active at normalized time `t` in `[0, 1]`.
///
/// The timeline splits into equal segments, one per chord; the right
/// endpoint clamps to the last chord.
pub fn chord_at(score: &ScoreSpec, t_norm: f64) -> usize {
    let n = score.chord_sequence.len();
    let idx = (t_norm.clamp(0.0, 1.0) * n as f64).floor() as usize;
    idx.min(n - 1)
}

/// Assign each pitch value to a note bin of an `n`-note chord.
///
/// Bin edges sit at the `100*k/n` percentiles (k = 0..=n) of the values, so
/// each note receives an approximately equal share of sources. A value tied
/// with an interior edge falls in the lower bin, except the global maximum,
/// which joins the top bin.
pub fn assign_notes(pitch_values: &[f64], chord_len: usize) -> Result<Vec<usize>> {
    if pitch_values.is_empty() {
        return Err(Error::EmptyData("assign_notes input".into()));
    }
    if chord_len == 0 {
        return Err(Error::InvalidScore("chord has no notes".into()));
    }
    if chord_len == 1 {
        return Ok(vec![0; pitch_values.len()]);
    }
    let mut sorted = pitch_values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let max = *sorted.last().unwrap();
    let edges: Vec<f64> = (1..chord_len)
        .map(|k| percentile_sorted(&sorted, 100.0 * k as f64 / chord_len as f64))
        .collect();
    Ok(pitch_values
        .iter()
        .map(|&v| {
            if v == max {
                return chord_len - 1;
            }
            edges.iter().take_while(|&&e| e < v).count()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a2_is_110_hz_exactly() {
        assert_eq!(parse_note("A2").unwrap().frequency(), 110.0);
    }

    #[test]
    fn a4_is_440_hz() {
        assert_eq!(parse_note("A4").unwrap().frequency(), 440.0);
    }

    #[test]
    fn c4_matches_closed_form() {
        // 440 * 2^(-9/12)
        let f = parse_note("C4").unwrap().frequency();
        let expect = 440.0 * (-9.0f64 / 12.0).exp2();
        assert!((f - expect).abs() < 1e-9);
        assert!((f - 261.6256).abs() < 1e-3);
    }

    #[test]
    fn accidentals_and_enharmonics() {
        let db3 = parse_note("Db3").unwrap();
        let cs3 = parse_note("C#3").unwrap();
        assert_eq!(db3, cs3);
        assert_eq!(parse_note("Cb4").unwrap(), parse_note("B3").unwrap());
        assert_eq!(parse_note("B#3").unwrap(), parse_note("C4").unwrap());
    }

    #[test]
    fn malformed_names_rejected() {
        for bad in ["", "H4", "A", "A#", "Ax4", "C-2", "C10", "4A"] {
            assert!(parse_note(bad).is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn parse_format_roundtrip() {
        for pc in 0..12u8 {
            for octave in -1..=9 {
                let n = Note::new(pc, octave).unwrap();
                assert_eq!(parse_note(&n.name()).unwrap(), n);
            }
        }
    }

    #[test]
    fn octave_doubling_and_identity() {
        assert_eq!(shifted_frequency(110.0, 12.0), 220.0);
        assert_eq!(shifted_frequency(110.0, 0.0), 110.0);
    }

    #[test]
    fn three_octave_shift() {
        // 36 semitones above A4 is exactly three octaves.
        assert!((shifted_frequency(440.0, 36.0) - 3520.0).abs() < 1e-9);
    }

    #[test]
    fn single_note_chord_assigns_zero() {
        let idx = assign_notes(&[0.3, 0.9, 0.1], 1).unwrap();
        assert_eq!(idx, vec![0, 0, 0]);
    }

    #[test]
    fn six_values_three_notes() {
        let values: Vec<f64> = (1..=6).map(|x| x as f64).collect();
        let idx = assign_notes(&values, 3).unwrap();
        assert_eq!(idx, vec![0, 0, 1, 1, 2, 2]);
    }

    #[test]
    fn equal_occupancy_2500_over_5() {
        // 2500 distinct values, 5 notes: 500 each.
        let values: Vec<f64> = (0..2500).map(|i| (i as f64 * 0.7919).fract()).collect();
        let idx = assign_notes(&values, 5).unwrap();
        let mut occupancy = [0usize; 5];
        for i in idx {
            occupancy[i] += 1;
        }
        for (note, &n) in occupancy.iter().enumerate() {
            assert!(
                (499..=501).contains(&n),
                "note {note} has occupancy {n}, expected 500 +- 1"
            );
        }
    }

    #[test]
    fn binning_is_permutation_equivariant() {
        let values = [0.4, 0.9, 0.1, 0.6, 0.3, 0.75, 0.2];
        let idx = assign_notes(&values, 3).unwrap();
        let mut shuffled: Vec<(usize, f64)> = values.iter().copied().enumerate().collect();
        shuffled.reverse();
        let shuffled_values: Vec<f64> = shuffled.iter().map(|(_, v)| *v).collect();
        let shuffled_idx = assign_notes(&shuffled_values, 3).unwrap();
        for (k, (orig_pos, _)) in shuffled.iter().enumerate() {
            assert_eq!(shuffled_idx[k], idx[*orig_pos]);
        }
    }

    #[test]
    fn ties_go_to_lower_bin_except_max() {
        // Edge at the 50th percentile of [1,2,2,2] is 2; ties on 2 are the
        // global max here, so they join the top bin.
        let idx = assign_notes(&[1.0, 2.0, 2.0, 2.0], 2).unwrap();
        assert_eq!(idx, vec![0, 1, 1, 1]);
        // Interior tie that is not the max stays low.
        let idx = assign_notes(&[1.0, 2.0, 2.0, 3.0, 4.0, 5.0], 3).unwrap();
        assert_eq!(idx[1], idx[2]);
        assert!(idx[1] <= 1);
    }

    #[test]
    fn chord_at_segments() {
        let seq = ChordSequence::parse(&["C4", "E4", "G4", "C5"]).unwrap();
        let score = ScoreSpec::new(seq, 10.0).unwrap();
        assert_eq!(chord_at(&score, 0.30), 1);
        assert_eq!(chord_at(&score, 0.0), 0);
        assert_eq!(chord_at(&score, 1.0), 3);

        let single = ScoreSpec::new(ChordSequence::parse(&["A2,E3"]).unwrap(), 5.0).unwrap();
        for t in [0.0, 0.2, 0.99, 1.0] {
            assert_eq!(chord_at(&single, t), 0);
        }
    }

    #[test]
    fn chord_at_is_non_decreasing() {
        let seq = ChordSequence::parse(&["C4", "E4", "G4"]).unwrap();
        let score = ScoreSpec::new(seq, 1.0).unwrap();
        let mut last = 0;
        for k in 0..=100 {
            let idx = chord_at(&score, k as f64 / 100.0);
            assert!(idx >= last);
            last = idx;
        }
    }

    #[test]
    fn chords_sorted_ascending() {
        let seq = ChordSequence::parse(&["F4,Db3,Ab3,Gb3,Eb4"]).unwrap();
        let chord = &seq.chords()[0];
        let names: Vec<String> = chord.iter().map(|n| n.name()).collect();
        assert_eq!(names, vec!["C#3", "F#3", "G#3", "D#4", "F4"]);
        for w in chord.windows(2) {
            assert!(w[0].frequency() < w[1].frequency());
        }
    }

    #[test]
    fn invalid_scores_rejected() {
        let no_chords: &[&str] = &[];
        assert!(ChordSequence::parse(no_chords).is_err());
        assert!(ChordSequence::parse(&[""]).is_err());
        let seq = ChordSequence::parse(&["A4"]).unwrap();
        assert!(ScoreSpec::new(seq.clone(), 0.0).is_err());
        assert!(ScoreSpec::new(seq.clone(), -1.0).is_err());
        assert!(ScoreSpec::new(seq, f64::INFINITY).is_err());
    }
}
