//! Property tests for the spec-level invariants.

use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use sonify_core::channels::{sh_gain, Direction};
use sonify_core::generator::{
    envelope_value, synthesize, EnvelopeSpec, GeneratorConfig, Modulators, OscillatorForm,
    OscillatorSpec, Phase,
};
use sonify_core::rng::SeedStream;
use sonify_core::score::{assign_notes, chord_at, ChordSequence, ScoreSpec};
use sonify_core::sources::{map_parameter, MapLimits};

fn data_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e4..1e4f64, 1..64)
}

proptest! {
    #[test]
    fn mapped_values_respect_parameter_limits(
        data in data_strategy(),
        lo in 0.0..49.0f64,
        width in 1.0..51.0f64,
        param_lo in -10.0..10.0f64,
        span in 0.0..20.0f64,
    ) {
        let limits = MapLimits::percentile(lo, (lo + width).min(100.0), param_lo, param_lo + span);
        let out = map_parameter(&data, &limits).unwrap();
        for y in out {
            prop_assert!(y >= param_lo - 1e-12 && y <= param_lo + span + 1e-12);
        }
    }

    #[test]
    fn mapping_is_monotone(data in data_strategy()) {
        let limits = MapLimits::percentile(10.0, 90.0, 0.0, 1.0);
        let out = map_parameter(&data, &limits).unwrap();
        let mut pairs: Vec<(f64, f64)> = data.into_iter().zip(out).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in pairs.windows(2) {
            prop_assert!(w[1].1 >= w[0].1 - 1e-15);
        }
    }

    #[test]
    fn sn3d_gain_bounded_up_to_third_order(
        az in 0.0..TAU,
        polar in 0.0..PI,
        acn in 0u32..16,
    ) {
        let g = sh_gain(acn, Direction::new(az, polar));
        prop_assert!(g.abs() <= 1.0 + 1e-12, "ACN {} gain {}", acn, g);
    }

    #[test]
    fn note_binning_is_permutation_equivariant(
        values in prop::collection::vec(0.0..1.0f64, 1..40),
        n in 1usize..5,
        rotation in 0usize..40,
    ) {
        let base = assign_notes(&values, n).unwrap();
        let shift = rotation % values.len();
        let rotated: Vec<f64> = values
            .iter()
            .cycle()
            .skip(shift)
            .take(values.len())
            .copied()
            .collect();
        let rotated_bins = assign_notes(&rotated, n).unwrap();
        for (k, bin) in rotated_bins.iter().enumerate() {
            prop_assert_eq!(*bin, base[(k + shift) % values.len()]);
        }
    }

    #[test]
    fn bin_occupancies_balanced_for_distinct_values(
        seed in 0u64..1000,
        len in 10usize..200,
        n in 1usize..6,
    ) {
        let mut rng = SeedStream::new(seed);
        let mut values: Vec<f64> = (0..len).map(|_| rng.unit()).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        values.dedup();
        let bins = assign_notes(&values, n).unwrap();
        let mut occupancy = vec![0usize; n];
        for b in bins {
            occupancy[b] += 1;
        }
        let lo = occupancy.iter().min().unwrap();
        let hi = occupancy.iter().max().unwrap();
        prop_assert!(hi - lo <= 1, "occupancies {:?}", occupancy);
    }

    #[test]
    fn envelope_stays_in_unit_interval(
        attack in 0.0..1.0f64,
        decay in 0.0..1.0f64,
        sustain in 0.0..1.0f64,
        release in 0.0..1.0f64,
        curve in 0.0..3.0f64,
        t in 0.0..4.0f64,
        note_length in 0.0..2.0f64,
    ) {
        let env = EnvelopeSpec {
            attack,
            decay,
            sustain,
            release,
            attack_curve: curve,
            decay_curve: curve / 2.0,
            release_curve: curve / 3.0,
        };
        let v = envelope_value(&env, t, note_length);
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn chord_index_non_decreasing(chords in 1usize..8, steps in 2usize..50) {
        let names: Vec<String> = (0..chords).map(|_| "A4".to_string()).collect();
        let score = ScoreSpec::new(ChordSequence::parse(&names).unwrap(), 1.0).unwrap();
        let mut last = 0;
        for k in 0..=steps {
            let idx = chord_at(&score, k as f64 / steps as f64);
            prop_assert!(idx >= last);
            prop_assert!(idx < chords);
            last = idx;
        }
    }

    #[test]
    fn synthesis_output_bounded_and_finite(
        seed in 0u64..500,
        freq in 30.0..2000.0f64,
        forms in prop::collection::vec(0usize..5, 1..4),
        master in 0.0..1.0f64,
    ) {
        let all = [
            OscillatorForm::Saw,
            OscillatorForm::Square,
            OscillatorForm::Sine,
            OscillatorForm::Tri,
            OscillatorForm::Noise,
        ];
        let cfg = GeneratorConfig {
            oscillators: forms
                .iter()
                .map(|&f| OscillatorSpec::new(all[f], 1.0, 0.0, Phase::Random))
                .collect(),
            master_volume: master,
            ..GeneratorConfig::default()
        };
        let mut rng = SeedStream::new(seed);
        let buf = synthesize(&cfg, freq, 0.05, 44_100.0, &Modulators::sustained(0.04), &mut rng)
            .unwrap();
        for x in buf {
            prop_assert!(x.is_finite());
            prop_assert!(x.abs() <= 1.0);
        }
    }
}
