//! Low-frequency oscillators for tremolo (volume) and vibrato (pitch).

use crate::generator::envelope::{envelope_value, EnvelopeSpec};
use crate::generator::oscillator::{waveform_value, OscillatorForm, Phase};
use crate::generator::Series;
use crate::rng::SeedStream;

/// LFO configuration shared by the volume and pitch modulators.
///
/// `amount` is the modulation depth: fractional attenuation for the volume
/// target, semitones for the pitch target. `freq_shift` transposes the LFO
/// rate in semitones, and the per-LFO envelope shapes the depth over the
/// note. `level` is a final depth multiplier.
#[derive(Debug, Clone, PartialEq)]
pub struct LfoSpec {
    pub use_lfo: bool,
    pub wave: OscillatorForm,
    pub amount: f64,
    pub freq: f64,
    pub freq_shift: f64,
    pub phase: Phase,
    pub envelope: EnvelopeSpec,
    pub level: f64,
}

impl Default for LfoSpec {
    /// Disabled LFO carrying the stock field values.
    fn default() -> Self {
        Self {
            use_lfo: false,
            wave: OscillatorForm::Sine,
            amount: 0.5,
            freq: 3.0,
            freq_shift: 0.0,
            phase: Phase::Random,
            envelope: EnvelopeSpec::adsr(0.0, 0.1, 1.0, 0.0),
            level: 1.0,
        }
    }
}

impl LfoSpec {
    pub fn validate(&self) -> crate::error::Result<()> {
        if self.amount < 0.0 {
            return Err(crate::error::Error::InvalidGenerator(
                "lfo amount must be >= 0".into(),
            ));
        }
        if self.use_lfo && self.freq <= 0.0 {
            return Err(crate::error::Error::InvalidGenerator(
                "lfo freq must be > 0 when in use".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.level) {
            return Err(crate::error::Error::InvalidGenerator(
                "lfo level must lie in [0, 1]".into(),
            ));
        }
        self.envelope.validate()
    }
}

/// Per-source overrides of LFO fields coming from data mappings.
///
/// Evolvable fields arrive as series; unmapped fields keep the preset value.
#[derive(Debug, Clone, Default)]
pub struct LfoOverrides {
    pub freq: Option<f64>,
    pub amount: Option<Series>,
    pub freq_shift: Option<Series>,
}

impl LfoOverrides {
    pub fn none() -> Self {
        Self::default()
    }
}

/// Walks the LFO waveform and depth sample by sample.
///
/// The waveform phase accumulates at `freq * 2^(freq_shift(t)/12)`, so an
/// evolving frequency shift bends the rate without phase jumps.
struct LfoWalker<'a> {
    lfo: &'a LfoSpec,
    overrides: &'a LfoOverrides,
    sample_rate: f64,
    note_length: f64,
    cycles: f64,
}

impl<'a> LfoWalker<'a> {
    fn new(
        lfo: &'a LfoSpec,
        overrides: &'a LfoOverrides,
        sample_rate: f64,
        note_length: f64,
        rng: &mut SeedStream,
    ) -> Self {
        Self {
            lfo,
            overrides,
            sample_rate,
            note_length,
            cycles: lfo.phase.resolve_cycles(rng),
        }
    }

    /// Waveform value `w` and depth `level * amount * env` at sample `k`.
    fn step(&mut self, k: usize, rng: &mut SeedStream) -> (f64, f64) {
        let t = k as f64 / self.sample_rate;
        let shift = self
            .overrides
            .freq_shift
            .as_ref()
            .map_or(self.lfo.freq_shift, |s| s.at(k));
        let amount = self
            .overrides
            .amount
            .as_ref()
            .map_or(self.lfo.amount, |s| s.at(k));
        let w = waveform_value(self.lfo.wave, self.cycles, rng);
        let env = envelope_value(&self.lfo.envelope, t, self.note_length);
        let freq = self.overrides.freq.unwrap_or(self.lfo.freq);
        self.cycles += freq * (shift / 12.0).exp2() / self.sample_rate;
        (w, self.lfo.level * amount * env)
    }
}

/// Apply a volume (tremolo) LFO in place.
///
/// Each sample is scaled by `1 - depth * (1 - w(t))/2`, which never exceeds
/// the input peak: `w = 1` leaves the signal untouched, `w = -1` attenuates
/// by the full depth.
pub fn apply_volume_lfo(
    buffer: &mut [f64],
    lfo: &LfoSpec,
    overrides: &LfoOverrides,
    sample_rate: f64,
    note_length: f64,
    rng: &mut SeedStream,
) {
    if !lfo.use_lfo {
        return;
    }
    let mut walker = LfoWalker::new(lfo, overrides, sample_rate, note_length, rng);
    for (k, x) in buffer.iter_mut().enumerate() {
        let (w, depth) = walker.step(k, rng);
        *x *= 1.0 - depth * (1.0 - w) / 2.0;
    }
}

/// Pitch (vibrato) LFO as a per-sample semitone offset `depth * w(t)`.
pub fn pitch_lfo_offsets(
    lfo: &LfoSpec,
    overrides: &LfoOverrides,
    samples: usize,
    sample_rate: f64,
    note_length: f64,
    rng: &mut SeedStream,
) -> Vec<f64> {
    if !lfo.use_lfo {
        return vec![0.0; samples];
    }
    let mut walker = LfoWalker::new(lfo, overrides, sample_rate, note_length, rng);
    (0..samples)
        .map(|k| {
            let (w, depth) = walker.step(k, rng);
            depth * w
        })
        .collect()
}
