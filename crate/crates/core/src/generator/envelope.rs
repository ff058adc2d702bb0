//! ADSR amplitude envelope with per-segment curvature.

use crate::error::{Error, Result};

/// Attack / decay / sustain / release envelope.
///
/// `attack_curve` (`Ac`), `decay_curve` (`Dc`) and `release_curve` (`Rc`)
/// bend each segment's unit ramp `u` as `u^(1+c)`; `c = 0` is linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeSpec {
    pub attack: f64,
    pub decay: f64,
    pub sustain: f64,
    pub release: f64,
    pub attack_curve: f64,
    pub decay_curve: f64,
    pub release_curve: f64,
}

impl Default for EnvelopeSpec {
    /// Neutral envelope: constant 1 for the whole note.
    fn default() -> Self {
        Self {
            attack: 0.0,
            decay: 0.0,
            sustain: 1.0,
            release: 0.0,
            attack_curve: 0.0,
            decay_curve: 0.0,
            release_curve: 0.0,
        }
    }
}

impl EnvelopeSpec {
    pub fn adsr(attack: f64, decay: f64, sustain: f64, release: f64) -> Self {
        Self {
            attack,
            decay,
            sustain,
            release,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.attack < 0.0 || self.decay < 0.0 || self.release < 0.0 {
            return Err(Error::InvalidGenerator(
                "envelope A/D/R must be >= 0 seconds".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.sustain) {
            return Err(Error::InvalidGenerator(format!(
                "envelope sustain must lie in [0, 1], got {}",
                self.sustain
            )));
        }
        for c in [self.attack_curve, self.decay_curve, self.release_curve] {
            if !c.is_finite() || c <= -1.0 {
                return Err(Error::InvalidGenerator(format!(
                    "envelope curvature must be finite and > -1, got {c}"
                )));
            }
        }
        Ok(())
    }

    /// Envelope level before any release is applied.
    fn held_value(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        if t < self.attack {
            let u = t / self.attack;
            return bend(u, self.attack_curve);
        }
        let t = t - self.attack;
        if t < self.decay {
            let u = t / self.decay;
            return 1.0 + (self.sustain - 1.0) * bend(u, self.decay_curve);
        }
        self.sustain
    }
}

/// Unit ramp bent by curvature: `u^(1+c)`.
fn bend(u: f64, c: f64) -> f64 {
    u.powf(1.0 + c)
}

/// Envelope level at time `t` for a note released at `note_length`.
///
/// Attack ramps 0 to 1 over `A`, decay 1 to `S` over `D`, sustain holds `S`
/// until `note_length`, release ramps to 0 over `R`. Notes released before
/// the sustain stage release from the level they had reached, keeping the
/// output continuous.
pub fn envelope_value(env: &EnvelopeSpec, t: f64, note_length: f64) -> f64 {
    if t < 0.0 {
        return 0.0;
    }
    if t < note_length {
        return env.held_value(t).clamp(0.0, 1.0);
    }
    if env.release <= 0.0 {
        return 0.0;
    }
    let u = (t - note_length) / env.release;
    if u >= 1.0 {
        return 0.0;
    }
    let start = env.held_value(note_length);
    (start * (1.0 - bend(u, env.release_curve))).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_endpoints() {
        let env = EnvelopeSpec::adsr(0.2, 0.3, 0.6, 0.1);
        assert_eq!(envelope_value(&env, 0.0, 2.0), 0.0);
        assert_eq!(envelope_value(&env, 0.2, 2.0), 1.0);
        assert_eq!(envelope_value(&env, 0.5, 2.0), 0.6);
        assert_eq!(envelope_value(&env, 1.5, 2.0), 0.6);
        assert_eq!(envelope_value(&env, 2.1, 2.0), 0.0);
    }

    #[test]
    fn neutral_envelope_is_constant_one() {
        let env = EnvelopeSpec::default();
        for t in [0.0, 0.01, 0.5, 0.999] {
            assert_eq!(envelope_value(&env, t, 1.0), 1.0);
        }
        // Instant release with R = 0.
        assert_eq!(envelope_value(&env, 1.0, 1.0), 0.0);
    }

    #[test]
    fn unit_sustain_decay_is_noop() {
        // The stock preset shape: D = 0.1 with S = 1 decays 1 -> 1.
        let env = EnvelopeSpec::adsr(0.0, 0.1, 1.0, 0.0);
        for t in [0.0, 0.05, 0.1, 0.7] {
            assert_eq!(envelope_value(&env, t, 1.0), 1.0);
        }
    }

    #[test]
    fn attack_curvature_closed_form() {
        let env = EnvelopeSpec {
            attack_curve: 1.0,
            ..EnvelopeSpec::adsr(0.4, 0.1, 0.5, 0.1)
        };
        // u^2 at u = 1/2.
        let v = envelope_value(&env, 0.2, 2.0);
        assert!((v - 0.25).abs() < 1e-12);
    }

    #[test]
    fn early_release_is_continuous() {
        // Released mid-attack: release starts from the reached level.
        let env = EnvelopeSpec::adsr(1.0, 0.1, 0.8, 0.5);
        let at_release = envelope_value(&env, 0.5 - 1e-9, 0.5);
        let just_after = envelope_value(&env, 0.5 + 1e-9, 0.5);
        assert!((at_release - just_after).abs() < 1e-6);
        assert!((just_after - 0.5).abs() < 1e-6);
    }

    #[test]
    fn output_stays_in_unit_interval() {
        let env = EnvelopeSpec {
            attack_curve: 2.5,
            decay_curve: 0.7,
            release_curve: 1.3,
            ..EnvelopeSpec::adsr(0.11, 0.22, 0.4, 0.33)
        };
        for k in 0..2000 {
            let t = k as f64 * 1e-3;
            let v = envelope_value(&env, t, 1.2);
            assert!((0.0..=1.0).contains(&v), "t={t} v={v}");
        }
    }

    #[test]
    fn validation_rejects_bad_specs() {
        let mut env = EnvelopeSpec::adsr(-0.1, 0.0, 1.0, 0.0);
        assert!(env.validate().is_err());
        env = EnvelopeSpec::adsr(0.0, 0.0, 1.5, 0.0);
        assert!(env.validate().is_err());
        env = EnvelopeSpec {
            attack_curve: -1.0,
            ..EnvelopeSpec::default()
        };
        assert!(env.validate().is_err());
        assert!(EnvelopeSpec::default().validate().is_ok());
    }
}
