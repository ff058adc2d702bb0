//! Per-source audio generation.
//!
//! Three back-ends produce the raw tone — an additive synthesiser, a sample
//! player and a spectral synthesiser — and share one modulation chain with a
//! fixed order: oscillators, pitch modulation, filter, volume LFO, envelope,
//! master volume.

pub mod envelope;
pub mod filter;
pub mod lfo;
pub mod oscillator;
pub mod sampler;
pub mod spectral;

pub use envelope::{envelope_value, EnvelopeSpec};
pub use filter::{apply_lowpass, cutoff_to_hz};
pub use lfo::{apply_volume_lfo, pitch_lfo_offsets, LfoOverrides, LfoSpec};
pub use oscillator::{osc_sample, waveform_value, OscillatorForm, OscillatorSpec, Phase};
pub use sampler::{sample_note, LoopMode, SampleBank};
pub use spectral::spectralise;

use crate::error::{Error, Result};
use crate::rng::SeedStream;
use crate::score::Note;

/// A control signal over the samples of one note.
///
/// Evolvable parameters are resampled onto blocks by the renderer; `at`
/// holds the block value constant within each block and clamps past the end.
#[derive(Debug, Clone, PartialEq)]
pub enum Series {
    Const(f64),
    Blocked { values: Vec<f64>, block: usize },
}

impl Series {
    pub fn at(&self, sample: usize) -> f64 {
        match self {
            Series::Const(v) => *v,
            Series::Blocked { values, block } => {
                let idx = (sample / (*block).max(1)).min(values.len() - 1);
                values[idx]
            }
        }
    }
}

/// Which back-end renders the raw tone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    Synthesiser,
    Sampler,
    Spectraliser,
}

impl GeneratorKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Synthesiser => "synthesiser",
            Self::Sampler => "sampler",
            Self::Spectraliser => "spectraliser",
        }
    }
}

/// Low-pass filter stage configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    /// Normalized default cutoff used when no data drives the parameter.
    pub cutoff: f64,
}

/// Full synthesis configuration for one generator.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub kind: GeneratorKind,
    pub oscillators: Vec<OscillatorSpec>,
    pub envelope: EnvelopeSpec,
    pub volume_lfo: LfoSpec,
    pub pitch_lfo: LfoSpec,
    pub filter: Option<FilterSpec>,
    /// Final gain in `[0, 1]`.
    pub master_volume: f64,
    /// Pitch selector in `[0, 1]` used when no data maps `pitch`.
    pub default_pitch: f64,
    /// Frequency band `(f_min, f_max)` for spectral synthesis, Hz.
    pub spectral_range: (f64, f64),
}

impl Default for GeneratorConfig {
    /// A single plain sine, no modulation.
    fn default() -> Self {
        Self {
            kind: GeneratorKind::Synthesiser,
            oscillators: vec![OscillatorSpec::new(
                OscillatorForm::Sine,
                1.0,
                0.0,
                Phase::Radians(0.0),
            )],
            envelope: EnvelopeSpec::default(),
            volume_lfo: LfoSpec::default(),
            pitch_lfo: LfoSpec::default(),
            filter: None,
            master_volume: 1.0,
            default_pitch: 1.0,
            spectral_range: (20.0, 16_000.0),
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kind == GeneratorKind::Synthesiser {
            if self.oscillators.is_empty() {
                return Err(Error::InvalidGenerator("no oscillators configured".into()));
            }
            if self.oscillators.iter().map(|o| o.level).sum::<f64>() <= 0.0 {
                return Err(Error::InvalidGenerator(
                    "oscillator levels sum to zero".into(),
                ));
            }
        }
        for osc in &self.oscillators {
            if !(0.0..=1.0).contains(&osc.level) {
                return Err(Error::InvalidGenerator(format!(
                    "oscillator level must lie in [0, 1], got {}",
                    osc.level
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.master_volume) {
            return Err(Error::InvalidGenerator(format!(
                "master volume must lie in [0, 1], got {}",
                self.master_volume
            )));
        }
        if !(0.0..=1.0).contains(&self.default_pitch) {
            return Err(Error::InvalidGenerator(format!(
                "default pitch must lie in [0, 1], got {}",
                self.default_pitch
            )));
        }
        let (lo, hi) = self.spectral_range;
        if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi) {
            return Err(Error::InvalidGenerator(format!(
                "spectral range must satisfy 0 < f_min < f_max, got {lo}..{hi}"
            )));
        }
        if let Some(f) = &self.filter {
            if !(0.0..=1.0).contains(&f.cutoff) {
                return Err(Error::InvalidGenerator(format!(
                    "filter cutoff must lie in [0, 1], got {}",
                    f.cutoff
                )));
            }
        }
        self.envelope.validate()?;
        self.volume_lfo.validate()?;
        self.pitch_lfo.validate()
    }
}

/// Per-note modulation inputs resolved by the renderer.
#[derive(Debug, Clone)]
pub struct Modulators {
    /// Seconds until the envelope releases.
    pub note_length: f64,
    /// Semitone offset over the note (static shift or evolution).
    pub pitch_shift: Series,
    /// Normalized cutoff; `None` falls back to the configured filter.
    pub cutoff: Option<Series>,
    pub volume_lfo: LfoOverrides,
    pub pitch_lfo: LfoOverrides,
}

impl Modulators {
    /// No data-driven modulation; envelope releases at `note_length`.
    pub fn sustained(note_length: f64) -> Self {
        Self {
            note_length,
            pitch_shift: Series::Const(0.0),
            cutoff: None,
            volume_lfo: LfoOverrides::none(),
            pitch_lfo: LfoOverrides::none(),
        }
    }
}

/// What the generator renders for a note.
pub enum NoteContent<'a> {
    /// Additive synthesis at the note frequency.
    Synth,
    /// Playback from a sample bank.
    Sample(&'a SampleBank),
    /// Spectral synthesis of the given source spectrum.
    Spectrum(&'a [f64]),
}

fn buffer_len(duration: f64, sample_rate: f64) -> usize {
    ((duration * sample_rate).round() as usize).max(1)
}

/// Shared tail of the modulation chain: filter, volume LFO, envelope,
/// master volume — in that order.
fn modulation_chain(
    buf: &mut [f64],
    cfg: &GeneratorConfig,
    mods: &Modulators,
    sample_rate: f64,
    rng: &mut SeedStream,
) {
    let cutoff = match (&mods.cutoff, &cfg.filter) {
        (Some(series), _) => Some(series.clone()),
        (None, Some(f)) => Some(Series::Const(f.cutoff)),
        (None, None) => None,
    };
    if let Some(series) = cutoff {
        apply_lowpass(buf, &series, sample_rate);
    }
    apply_volume_lfo(
        buf,
        &cfg.volume_lfo,
        &mods.volume_lfo,
        sample_rate,
        mods.note_length,
        rng,
    );
    for (k, x) in buf.iter_mut().enumerate() {
        let t = k as f64 / sample_rate;
        *x *= envelope_value(&cfg.envelope, t, mods.note_length) * cfg.master_volume;
    }
}

/// Additive synthesis of one note.
///
/// Oscillator outputs are level-weighted and normalized by the level sum;
/// pitch modulation (LFO plus evolving pitch shift) is applied through
/// per-oscillator phase accumulation, then the shared chain runs: filter,
/// volume LFO, envelope, master volume.
pub fn synthesize(
    cfg: &GeneratorConfig,
    freq: f64,
    duration: f64,
    sample_rate: f64,
    mods: &Modulators,
    rng: &mut SeedStream,
) -> Result<Vec<f64>> {
    if cfg.oscillators.is_empty() {
        return Err(Error::InvalidGenerator("no oscillators configured".into()));
    }
    let level_sum: f64 = cfg.oscillators.iter().map(|o| o.level).sum();
    if level_sum <= 0.0 {
        return Err(Error::InvalidGenerator(
            "oscillator levels sum to zero".into(),
        ));
    }
    let n = buffer_len(duration, sample_rate);

    // Fixed draw order keeps fixed seeds bit-stable: oscillator phases,
    // then the pitch LFO phase, then per-sample noise, then (in the chain)
    // the volume LFO phase.
    let mut cycles: Vec<f64> = cfg
        .oscillators
        .iter()
        .map(|o| o.phase.resolve_cycles(rng))
        .collect();
    let pitch_offsets = pitch_lfo_offsets(
        &cfg.pitch_lfo,
        &mods.pitch_lfo,
        n,
        sample_rate,
        mods.note_length,
        rng,
    );

    let mut buf = Vec::with_capacity(n);
    for (k, lfo_offset) in pitch_offsets.iter().enumerate() {
        let semitones = mods.pitch_shift.at(k) + lfo_offset;
        let ratio = (semitones / 12.0).exp2();
        let mut acc = 0.0;
        for (osc, cycle) in cfg.oscillators.iter().zip(cycles.iter_mut()) {
            acc += osc.level * waveform_value(osc.form, *cycle, rng);
            *cycle += osc.effective_frequency(freq) * ratio / sample_rate;
        }
        buf.push(acc / level_sum);
    }

    modulation_chain(&mut buf, cfg, mods, sample_rate, rng);
    Ok(buf)
}

/// Render one note through the configured back-end and modulation chain.
pub fn render_note(
    cfg: &GeneratorConfig,
    content: NoteContent,
    note: Note,
    duration: f64,
    sample_rate: f64,
    mods: &Modulators,
    rng: &mut SeedStream,
) -> Result<Vec<f64>> {
    match content {
        NoteContent::Synth => synthesize(cfg, note.frequency(), duration, sample_rate, mods, rng),
        NoteContent::Sample(bank) => {
            let n = buffer_len(duration, sample_rate);
            let pitch_offsets = pitch_lfo_offsets(
                &cfg.pitch_lfo,
                &mods.pitch_lfo,
                n,
                sample_rate,
                mods.note_length,
                rng,
            );
            let target = note.midi() as f64;
            let (bank_note, source) = bank.nearest(target);
            let base_step = bank.sample_rate() / sample_rate
                * ((target - bank_note.midi() as f64) / 12.0).exp2();
            // Combine the evolving pitch shift with vibrato into one
            // per-sample semitone series driving the read rate.
            let extra: Vec<f64> = (0..n)
                .map(|k| mods.pitch_shift.at(k) + pitch_offsets[k])
                .collect();
            let mut buf = sampler::playback(
                source,
                base_step,
                &Series::Blocked {
                    values: extra,
                    block: 1,
                },
                bank.loop_mode,
                n,
            );
            modulation_chain(&mut buf, cfg, mods, sample_rate, rng);
            Ok(buf)
        }
        NoteContent::Spectrum(spectrum) => {
            let (f_min, f_max) = cfg.spectral_range;
            let mut buf = spectralise(spectrum, f_min, f_max, duration, sample_rate, rng)?;
            modulation_chain(&mut buf, cfg, mods, sample_rate, rng);
            Ok(buf)
        }
    }
}
