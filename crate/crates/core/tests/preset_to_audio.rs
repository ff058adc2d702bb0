//! From preset text to rendered sound: overrides must be audible.

use rustfft::{num_complex::Complex, FftPlanner};

use sonify_core::generator::{synthesize, Modulators};
use sonify_core::presets::{compile, load_preset, merge_overrides, parse_overrides};
use sonify_core::rng::SeedStream;

fn harmonic_amplitudes(signal: &[f64], fundamental_bin: usize, count: usize) -> Vec<f64> {
    let mut spec: Vec<Complex<f64>> = signal.iter().map(|&x| Complex::new(x, 0.0)).collect();
    FftPlanner::new()
        .plan_fft_forward(signal.len())
        .process(&mut spec);
    (1..=count).map(|h| spec[fundamental_bin * h].norm()).collect()
}

#[test]
fn square_override_shows_odd_harmonics_only() {
    // pitch_mapper is a single oscillator; overriding its form to square
    // must leave only odd harmonics, decaying as 1/n.
    let base = load_preset("pitch_mapper").unwrap();
    let overrides = parse_overrides("oscillators:\n  osc1:\n    form: 'square'\n").unwrap();
    let tree = merge_overrides(&base, &overrides).unwrap();
    let cfg = compile(&tree).unwrap();

    let mut rng = SeedStream::new(5);
    let buf = synthesize(&cfg, 220.0, 1.0, 44_100.0, &Modulators::sustained(2.0), &mut rng)
        .unwrap();
    let amps = harmonic_amplitudes(&buf, 220, 6);

    // Even harmonics vanish.
    assert!(amps[1] < 0.01 * amps[0], "h2/h1 = {}", amps[1] / amps[0]);
    assert!(amps[3] < 0.01 * amps[0], "h4/h1 = {}", amps[3] / amps[0]);
    // Odd harmonics follow the square's 1/n law, which separates it from
    // the original triangle's 1/n^2.
    let r3 = amps[2] / amps[0];
    assert!((r3 - 1.0 / 3.0).abs() < 0.05 / 3.0, "h3/h1 = {r3}");
    let r5 = amps[4] / amps[0];
    assert!((r5 - 1.0 / 5.0).abs() < 0.05 / 5.0, "h5/h1 = {r5}");
}

#[test]
fn triangle_preset_has_fast_decaying_harmonics() {
    let cfg = compile(&load_preset("pitch_mapper").unwrap()).unwrap();
    let mut rng = SeedStream::new(5);
    let buf = synthesize(&cfg, 220.0, 1.0, 44_100.0, &Modulators::sustained(2.0), &mut rng)
        .unwrap();
    let amps = harmonic_amplitudes(&buf, 220, 3);
    let r3 = amps[2] / amps[0];
    assert!((r3 - 1.0 / 9.0).abs() < 0.05 / 9.0, "h3/h1 = {r3}");
}

#[test]
fn windy_override_moves_the_cutoff() {
    // Opening the filter brightens the noise: more power above 2 kHz.
    let band_power = |cutoff_yaml: &str| -> f64 {
        let tree = merge_overrides(
            &load_preset("windy").unwrap(),
            &parse_overrides(cutoff_yaml).unwrap(),
        )
        .unwrap();
        let cfg = compile(&tree).unwrap();
        let mut rng = SeedStream::new(11);
        let buf = synthesize(&cfg, 220.0, 0.5, 44_100.0, &Modulators::sustained(1.0), &mut rng)
            .unwrap();
        let mut spec: Vec<Complex<f64>> = buf.iter().map(|&x| Complex::new(x, 0.0)).collect();
        FftPlanner::new()
            .plan_fft_forward(buf.len())
            .process(&mut spec);
        let bin_hz = 44_100.0 / buf.len() as f64;
        let lo = (2000.0 / bin_hz) as usize;
        (lo..buf.len() / 2).map(|k| spec[k].norm_sqr()).sum()
    };
    let dark = band_power("filter:\n  cutoff: 0.1\n");
    let bright = band_power("filter:\n  cutoff: 1.0\n");
    assert!(bright > 10.0 * dark, "bright {bright} vs dark {dark}");
}
