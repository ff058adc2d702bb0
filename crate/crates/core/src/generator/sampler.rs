//! Playback of recorded samples with pitch shifting and looping.

use std::path::Path;

use crate::error::{Error, Result};
use crate::generator::Series;
use crate::score::{parse_note, Note};
use crate::wav;

/// How playback continues past the end of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LoopMode {
    /// Pad with silence.
    #[default]
    Off,
    /// Wrap to the start.
    Forward,
    /// Mirror back and forth; each leg replays the full buffer.
    PingPong,
}

impl LoopMode {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "off" => Ok(Self::Off),
            "forward" => Ok(Self::Forward),
            "pingpong" => Ok(Self::PingPong),
            other => Err(Error::InvalidGenerator(format!(
                "unknown loop mode `{other}` (choose from off, forward, pingpong)"
            ))),
        }
    }
}

/// A set of recorded mono buffers keyed by note.
#[derive(Debug, Clone)]
pub struct SampleBank {
    /// Sorted ascending by MIDI number.
    entries: Vec<(Note, Vec<f64>)>,
    sample_rate: f64,
    pub loop_mode: LoopMode,
}

impl SampleBank {
    pub fn new(
        mut samples: Vec<(Note, Vec<f64>)>,
        sample_rate: f64,
        loop_mode: LoopMode,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySampleBank);
        }
        if samples.iter().any(|(_, buf)| buf.is_empty()) {
            return Err(Error::InvalidGenerator("sample buffer is empty".into()));
        }
        samples.sort_by_key(|(note, _)| note.midi());
        Ok(Self {
            entries: samples,
            sample_rate,
            loop_mode,
        })
    }

    /// Load a bank from a directory of mono WAV files named by note
    /// ("A4.wav", "Db3.wav"). Buffers are resampled to `engine_rate`.
    pub fn from_dir(dir: impl AsRef<Path>, engine_rate: f64, loop_mode: LoopMode) -> Result<Self> {
        let mut samples = Vec::new();
        let mut dir_entries: Vec<_> = std::fs::read_dir(dir.as_ref())?
            .collect::<std::io::Result<Vec<_>>>()?;
        dir_entries.sort_by_key(|e| e.file_name());
        for entry in dir_entries {
            let path = entry.path();
            if path.extension().and_then(|s| s.to_str()) != Some("wav") {
                continue;
            }
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| Error::WavFormat(format!("bad file name {path:?}")))?;
            let note = parse_note(stem)?;
            let audio = wav::read_wav(&path)?;
            if audio.channels.len() != 1 {
                return Err(Error::WavFormat(format!(
                    "sample {path:?} must be mono, has {} channels",
                    audio.channels.len()
                )));
            }
            let mut buf = audio.channels.into_iter().next().unwrap();
            for x in &mut buf {
                *x = x.clamp(-1.0, 1.0);
            }
            let buf = resample_linear(&buf, audio.sample_rate as f64, engine_rate);
            samples.push((note, buf));
        }
        Self::new(samples, engine_rate, loop_mode)
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn notes(&self) -> impl Iterator<Item = &Note> {
        self.entries.iter().map(|(n, _)| n)
    }

    /// Bank entry nearest in semitones to `target_semitones` (a fractional
    /// MIDI number); ties go to the lower note.
    pub fn nearest(&self, target_semitones: f64) -> (&Note, &[f64]) {
        let mut best = &self.entries[0];
        let mut best_dist = (target_semitones - best.0.midi() as f64).abs();
        for entry in &self.entries[1..] {
            let dist = (target_semitones - entry.0.midi() as f64).abs();
            if dist < best_dist {
                best = entry;
                best_dist = dist;
            }
        }
        (&best.0, &best.1)
    }
}

fn resample_linear(buf: &[f64], from_rate: f64, to_rate: f64) -> Vec<f64> {
    if from_rate == to_rate || buf.len() < 2 {
        return buf.to_vec();
    }
    let ratio = from_rate / to_rate;
    let out_len = ((buf.len() as f64 / ratio).floor() as usize).max(1);
    (0..out_len)
        .map(|k| read_interp(buf, k as f64 * ratio))
        .collect()
}

/// Linear interpolation at a clamped fractional index.
fn read_interp(buf: &[f64], pos: f64) -> f64 {
    let last = buf.len() - 1;
    if pos <= 0.0 {
        return buf[0];
    }
    if pos >= last as f64 {
        return buf[last];
    }
    let i = pos.floor() as usize;
    let f = pos - i as f64;
    buf[i] * (1.0 - f) + buf[i + 1] * f
}

/// Map a running source position into the buffer under a loop mode.
///
/// Returns `None` for silence (past the end in `Off` mode).
fn looped_position(pos: f64, len: usize, mode: LoopMode) -> Option<f64> {
    let n = len as f64;
    match mode {
        LoopMode::Off => (pos <= n - 1.0).then_some(pos),
        LoopMode::Forward => Some(pos.rem_euclid(n)),
        LoopMode::PingPong => {
            // Period 2N; the reverse leg replays samples N-1 .. 0.
            let m = pos.rem_euclid(2.0 * n);
            if m < n {
                Some(m)
            } else {
                Some((2.0 * n - 1.0 - m).max(0.0))
            }
        }
    }
}

/// Resample `source` at a per-sample rate, honouring the loop mode.
///
/// `base_ratio` is the constant pitch ratio; `extra_semitones` adds a
/// time-varying offset (vibrato, evolving pitch shift).
pub(crate) fn playback(
    source: &[f64],
    base_ratio: f64,
    extra_semitones: &Series,
    loop_mode: LoopMode,
    out_len: usize,
) -> Vec<f64> {
    let mut pos = 0.0f64;
    let mut out = Vec::with_capacity(out_len);
    for k in 0..out_len {
        let value = match looped_position(pos, source.len(), loop_mode) {
            Some(p) => match loop_mode {
                // Forward wraps interpolate across the seam.
                LoopMode::Forward => {
                    let i = p.floor() as usize;
                    let f = p - i as f64;
                    let a = source[i];
                    let b = source[(i + 1) % source.len()];
                    a * (1.0 - f) + b * f
                }
                _ => read_interp(source, p),
            },
            None => 0.0,
        };
        out.push(value);
        pos += base_ratio * (extra_semitones.at(k) / 12.0).exp2();
    }
    out
}

/// Render a note from the bank: nearest-sample selection, linear-interpolated
/// resampling by the pitch ratio, loop-mode extension to `duration`.
pub fn sample_note(
    bank: &SampleBank,
    target: Note,
    semitone_shift: f64,
    duration: f64,
    sample_rate: f64,
) -> Result<Vec<f64>> {
    if bank.entries.is_empty() {
        return Err(Error::EmptySampleBank);
    }
    let target_semis = target.midi() as f64 + semitone_shift;
    let (note, buf) = bank.nearest(target_semis);
    // Bank buffers are stored at the bank rate; playing them back at
    // `sample_rate` scales the read step by bank_rate / sample_rate on top
    // of the pitch ratio target_freq / bank_freq.
    let step =
        ((target_semis - note.midi() as f64) / 12.0).exp2() * bank.sample_rate / sample_rate;
    let out_len = ((duration * sample_rate).round() as usize).max(1);
    Ok(playback(buf, step, &Series::Const(0.0), bank.loop_mode, out_len))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn note(name: &str) -> Note {
        parse_note(name).unwrap()
    }

    fn bank_of(buf: Vec<f64>, mode: LoopMode) -> SampleBank {
        SampleBank::new(vec![(note("A4"), buf)], 44_100.0, mode).unwrap()
    }

    #[test]
    fn identity_resample_reproduces_source() {
        let src: Vec<f64> = (0..200).map(|k| (k as f64 * 0.21).sin()).collect();
        let bank = bank_of(src.clone(), LoopMode::Off);
        let out = sample_note(&bank, note("A4"), 0.0, 100.0 / 44_100.0, 44_100.0).unwrap();
        assert_eq!(out.len(), 100);
        for (a, b) in out.iter().zip(&src) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn off_mode_pads_silence() {
        let bank = bank_of(vec![1.0; 10], LoopMode::Off);
        let out = sample_note(&bank, note("A4"), 0.0, 30.0 / 44_100.0, 44_100.0).unwrap();
        assert_eq!(out.len(), 30);
        assert!(out[..10].iter().all(|&x| x == 1.0));
        assert!(out[10..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn octave_up_doubles_fundamental() {
        // A recorded sine at bin 8 of a 1024-sample window; an octave shift
        // moves the FFT peak to bin 16.
        use rustfft::{num_complex::Complex, FftPlanner};
        let n = 1024;
        let src: Vec<f64> = (0..4096)
            .map(|k| (std::f64::consts::TAU * 8.0 * k as f64 / n as f64).sin())
            .collect();
        let bank = bank_of(src, LoopMode::Off);
        let out = sample_note(&bank, note("A5"), 0.0, n as f64 / 44_100.0, 44_100.0).unwrap();

        let mut spec: Vec<Complex<f64>> = out.iter().map(|&x| Complex::new(x, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut spec);
        let peak = (1..n / 2)
            .max_by(|&a, &b| spec[a].norm().total_cmp(&spec[b].norm()))
            .unwrap();
        assert!((15..=17).contains(&peak), "peak at bin {peak}");
    }

    #[test]
    fn pingpong_matches_index_mirroring_oracle() {
        let src: Vec<f64> = (0..100).map(|k| k as f64).collect();
        let bank = bank_of(src.clone(), LoopMode::PingPong);
        let out = sample_note(&bank, note("A4"), 0.0, 450.0 / 44_100.0, 44_100.0).unwrap();
        assert_eq!(out.len(), 450);
        // Oracle: forward, reverse, forward, reverse, half forward; the
        // reverse leg replays indices N-1 .. 0.
        for (k, &v) in out.iter().enumerate() {
            let m = k % 200;
            let idx = if m < 100 { m } else { 199 - m };
            assert_eq!(v, src[idx], "sample {k}");
        }
    }

    #[test]
    fn forward_loop_wraps() {
        let src = vec![0.0, 1.0, 2.0, 3.0];
        let bank = bank_of(src.clone(), LoopMode::Forward);
        let out = sample_note(&bank, note("A4"), 0.0, 10.0 / 44_100.0, 44_100.0).unwrap();
        for (k, &v) in out.iter().enumerate() {
            assert_eq!(v, src[k % 4]);
        }
    }

    #[test]
    fn nearest_ties_go_to_lower_note() {
        let bank = SampleBank::new(
            vec![(note("C4"), vec![0.1; 8]), (note("D4"), vec![0.2; 8])],
            44_100.0,
            LoopMode::Off,
        )
        .unwrap();
        // C#4 is one semitone from both; the lower note wins.
        let (n, _) = bank.nearest(note("C#4").midi() as f64);
        assert_eq!(n, &note("C4"));
        let (n, _) = bank.nearest(note("D4").midi() as f64 + 0.4);
        assert_eq!(n, &note("D4"));
    }

    #[test]
    fn empty_bank_rejected() {
        assert!(SampleBank::new(vec![], 44_100.0, LoopMode::Off).is_err());
        assert!(
            SampleBank::new(vec![(note("A4"), vec![])], 44_100.0, LoopMode::Off).is_err()
        );
    }
}
