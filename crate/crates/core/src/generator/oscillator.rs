//! Oscillator waveforms.
//!
//! Waveforms are evaluated naively (no band-limiting); aliasing above
//! Nyquist is accepted and documented as a known trade-off of the
//! closed-form definitions.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::rng::SeedStream;

/// The supported oscillator forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OscillatorForm {
    Saw,
    Square,
    Sine,
    Tri,
    Noise,
}

impl OscillatorForm {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "saw" => Ok(Self::Saw),
            "square" => Ok(Self::Square),
            "sine" => Ok(Self::Sine),
            "tri" => Ok(Self::Tri),
            "noise" => Ok(Self::Noise),
            other => Err(Error::InvalidGenerator(format!(
                "unknown oscillator form `{other}` (choose from saw, square, sine, tri, noise)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Saw => "saw",
            Self::Square => "square",
            Self::Sine => "sine",
            Self::Tri => "tri",
            Self::Noise => "noise",
        }
    }
}

/// Initial oscillator phase: fixed radians, or drawn from the seed stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phase {
    Radians(f64),
    Random,
}

impl Phase {
    /// Resolve to a phase offset in cycles, drawing from `rng` if random.
    pub fn resolve_cycles(self, rng: &mut SeedStream) -> f64 {
        match self {
            Phase::Radians(r) => r / TAU,
            Phase::Random => rng.phase() / TAU,
        }
    }
}

/// One oscillator of an additive stack.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorSpec {
    pub form: OscillatorForm,
    /// Intrinsic level in `[0, 1]`.
    pub level: f64,
    /// Tuning change as a percentage of the input frequency.
    pub detune: f64,
    pub phase: Phase,
}

impl OscillatorSpec {
    pub fn new(form: OscillatorForm, level: f64, detune: f64, phase: Phase) -> Self {
        Self {
            form,
            level,
            detune,
            phase,
        }
    }

    /// Frequency after detune: `f * (1 + detune/100)`.
    pub fn effective_frequency(&self, freq: f64) -> f64 {
        freq * (1.0 + self.detune / 100.0)
    }
}

/// Evaluate a waveform at a phase given in cycles.
///
/// sine = sin(2*pi*x); saw = 2*frac(x) - 1; square = sign(sine);
/// tri = 2*|saw| - 1; noise draws uniform [-1, 1] from the stream.
pub fn waveform_value(form: OscillatorForm, cycles: f64, rng: &mut SeedStream) -> f64 {
    match form {
        OscillatorForm::Sine => (TAU * cycles).sin(),
        OscillatorForm::Saw => 2.0 * cycles.rem_euclid(1.0) - 1.0,
        OscillatorForm::Square => {
            if (TAU * cycles).sin() >= 0.0 {
                1.0
            } else {
                -1.0
            }
        }
        OscillatorForm::Tri => 2.0 * (2.0 * cycles.rem_euclid(1.0) - 1.0).abs() - 1.0,
        OscillatorForm::Noise => rng.bipolar(),
    }
}

/// Sample one oscillator at time `t` for a base frequency `freq`.
pub fn osc_sample(spec: &OscillatorSpec, freq: f64, t: f64, rng: &mut SeedStream) -> f64 {
    let cycles = spec.effective_frequency(freq) * t + spec.phase_cycles_or_zero();
    waveform_value(spec.form, cycles, rng)
}

impl OscillatorSpec {
    fn phase_cycles_or_zero(&self) -> f64 {
        match self.phase {
            Phase::Radians(r) => r / TAU,
            Phase::Random => 0.0,
        }
    }
}
