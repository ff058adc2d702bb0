//! Spectral synthesis: audify an input spectrum through an inverse FFT
//! with randomized phases.

use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};
use crate::rng::SeedStream;

/// Interpolate the input spectrum onto an FFT bin frequency.
///
/// The input array spans `[f_min, f_max]` on an even grid; bins outside the
/// band return zero.
fn interp_spectrum(spectrum: &[f64], f_min: f64, f_max: f64, freq: f64) -> f64 {
    if freq < f_min || freq > f_max {
        return 0.0;
    }
    let x = (freq - f_min) / (f_max - f_min) * (spectrum.len() - 1) as f64;
    let i = (x.floor() as usize).min(spectrum.len() - 2);
    let f = x - i as f64;
    spectrum[i] * (1.0 - f) + spectrum[i + 1] * f
}

/// Synthesize audio whose magnitude spectrum follows `spectrum` over
/// `[f_min, f_max]`.
///
/// The spectrum is linearly interpolated onto the FFT bins inside the band
/// and zeroed outside; phases are i.i.d. uniform in `[0, 2*pi)` from the
/// seed stream; the inverse real FFT is peak-normalized to 0.9. A fixed
/// seed gives a bit-identical buffer.
pub fn spectralise(
    spectrum: &[f64],
    f_min: f64,
    f_max: f64,
    duration: f64,
    sample_rate: f64,
    rng: &mut SeedStream,
) -> Result<Vec<f64>> {
    if spectrum.len() < 2 {
        return Err(Error::InvalidSpectrum(
            "spectrum needs at least 2 bins".into(),
        ));
    }
    if spectrum.iter().any(|&x| !x.is_finite() || x < 0.0) {
        return Err(Error::InvalidSpectrum(
            "spectrum values must be finite and non-negative".into(),
        ));
    }
    if spectrum.iter().all(|&x| x == 0.0) {
        return Err(Error::InvalidSpectrum("spectrum is all zero".into()));
    }
    if !(0.0 < f_min && f_min < f_max && f_max < sample_rate / 2.0) {
        return Err(Error::InvalidSpectrum(format!(
            "need 0 < f_min < f_max < sample_rate/2, got {f_min}..{f_max} at {sample_rate} Hz"
        )));
    }
    let n = ((duration * sample_rate).round() as usize).max(2);
    let bin_hz = sample_rate / n as f64;
    let half = n / 2;

    let mut bins: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); n];
    let mut in_band = 0usize;
    for k in 0..=half {
        let freq = k as f64 * bin_hz;
        let mag = interp_spectrum(spectrum, f_min, f_max, freq);
        if freq >= f_min && freq <= f_max {
            in_band += 1;
        }
        if mag == 0.0 {
            continue;
        }
        // DC and Nyquist must stay real for a real signal.
        let value = if k == 0 || (n.is_multiple_of(2) && k == half) {
            Complex::new(mag, 0.0)
        } else {
            Complex::from_polar(mag, rng.phase())
        };
        bins[k] = value;
        if k != 0 && k != n - k {
            bins[n - k] = value.conj();
        }
    }
    if in_band == 0 {
        return Err(Error::InvalidSpectrum(
            "no FFT bin falls inside the frequency range".into(),
        ));
    }

    FftPlanner::new().plan_fft_inverse(n).process(&mut bins);
    let mut out: Vec<f64> = bins.iter().map(|c| c.re).collect();
    let peak = out.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if peak == 0.0 {
        return Err(Error::InvalidSpectrum(
            "spectrum carries no in-band energy".into(),
        ));
    }
    let scale = 0.9 / peak;
    for x in &mut out {
        *x *= scale;
    }
    Ok(out)
}
