//! Time-varying one-pole low-pass filter.

use crate::generator::Series;

/// Low end of the cutoff map in Hz.
pub const CUTOFF_MIN_HZ: f64 = 50.0;
/// High end of the cutoff map in Hz; a cutoff of 1.0 is treated as "open".
pub const CUTOFF_MAX_HZ: f64 = 16_000.0;

/// Map a normalized cutoff in `[0, 1]` onto 50 Hz .. 16 kHz, log-spaced.
pub fn cutoff_to_hz(cutoff_norm: f64) -> f64 {
    CUTOFF_MIN_HZ * (CUTOFF_MAX_HZ / CUTOFF_MIN_HZ).powf(cutoff_norm.clamp(0.0, 1.0))
}

/// Apply a one-pole (6 dB/oct) low-pass with per-sample cutoff.
///
/// The smoothing coefficient is recomputed every sample from the cutoff
/// series, so the cutoff may evolve freely. State starts at the first
/// sample, which keeps constant (DC) buffers exactly unchanged.
pub fn apply_lowpass(buffer: &mut [f64], cutoff_norm: &Series, sample_rate: f64) {
    if buffer.is_empty() {
        return;
    }
    let mut state = buffer[0];
    for (k, x) in buffer.iter_mut().enumerate() {
        let fc = cutoff_to_hz(cutoff_norm.at(k));
        let alpha = 1.0 - (-std::f64::consts::TAU * fc / sample_rate).exp();
        state += alpha * (*x - state);
        *x = state;
    }
}

/// Magnitude response of the per-sample recursion at a fixed cutoff.
///
/// For `y[n] = y[n-1] + a (x[n] - y[n-1])`:
/// `|H(w)| = a / sqrt(1 - 2(1-a) cos w + (1-a)^2)`.
pub fn one_pole_magnitude(cutoff_norm: f64, freq: f64, sample_rate: f64) -> f64 {
    let fc = cutoff_to_hz(cutoff_norm);
    let a = 1.0 - (-std::f64::consts::TAU * fc / sample_rate).exp();
    let w = std::f64::consts::TAU * freq / sample_rate;
    let b = 1.0 - a;
    a / (1.0 - 2.0 * b * w.cos() + b * b).sqrt()
}
