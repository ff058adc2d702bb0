//! Spatialization through a bank of virtual microphones.
//!
//! Each output channel corresponds to one microphone with a 3D antenna
//! pattern: omnidirectional, cardioid, or a real spherical harmonic for
//! ambisonic output (ACN channel ordering, SN3D normalization, no
//! Condon-Shortley phase). Mixing sums `gain(mic, dir_i(t)) * signal_i(t)`
//! over sources in ascending index order, so results are schedule-independent.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// A direction on the unit sphere.
///
/// `polar` is measured from the zenith (0 = up, pi/2 = horizon); `azimuth`
/// increases counterclockwise from the front, so +pi/2 is left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub azimuth: f64,
    pub polar: f64,
}

impl Direction {
    /// Wraps azimuth into `[0, 2*pi)` and clamps polar into `[0, pi]`.
    pub fn new(azimuth: f64, polar: f64) -> Self {
        Self {
            azimuth: azimuth.rem_euclid(TAU),
            polar: polar.clamp(0.0, PI),
        }
    }

    pub fn from_degrees(azimuth_deg: f64, polar_deg: f64) -> Self {
        Self::new(azimuth_deg.to_radians(), polar_deg.to_radians())
    }

    /// A point on the horizon at the given azimuth.
    pub fn horizon(azimuth: f64) -> Self {
        Self::new(azimuth, PI / 2.0)
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let sp = self.polar.sin();
        [
            sp * self.azimuth.cos(),
            sp * self.azimuth.sin(),
            self.polar.cos(),
        ]
    }

    pub fn from_unit_vector(v: [f64; 3]) -> Self {
        let azimuth = v[1].atan2(v[0]);
        let polar = v[2].clamp(-1.0, 1.0).acos();
        Self::new(azimuth, polar)
    }
}

/// Spherical linear interpolation between two directions.
pub fn slerp(a: Direction, b: Direction, t: f64) -> Direction {
    let va = a.unit_vector();
    let vb = b.unit_vector();
    let dot = (va[0] * vb[0] + va[1] * vb[1] + va[2] * vb[2]).clamp(-1.0, 1.0);
    let omega = dot.acos();
    let sin_omega = omega.sin();
    if sin_omega < 1e-9 {
        // Coincident (or antipodal) endpoints: nothing to interpolate.
        return if t < 0.5 { a } else { b };
    }
    let w1 = ((1.0 - t) * omega).sin() / sin_omega;
    let w2 = (t * omega).sin() / sin_omega;
    Direction::from_unit_vector([
        w1 * va[0] + w2 * vb[0],
        w1 * va[1] + w2 * vb[1],
        w1 * va[2] + w2 * vb[2],
    ])
}

/// A source direction over the span of a buffer.
#[derive(Debug, Clone)]
pub enum DirectionTrack {
    Static(Direction),
    /// Waypoints at strictly increasing normalized times in `[0, 1]`;
    /// directions interpolate spherically between grid points and clamp to
    /// the end values outside the grid.
    Path {
        times: Vec<f64>,
        points: Vec<Direction>,
    },
}

impl DirectionTrack {
    pub fn path(times: Vec<f64>, points: Vec<Direction>) -> Result<Self> {
        if times.is_empty() || times.len() != points.len() {
            return Err(Error::BufferMismatch(format!(
                "direction path has {} times and {} points",
                times.len(),
                points.len()
            )));
        }
        for i in 1..times.len() {
            if times[i] <= times[i - 1] {
                return Err(Error::NonMonotonicTime(i - 1, i));
            }
        }
        Ok(Self::Path { times, points })
    }

    /// Direction at normalized time `t` in `[0, 1]`.
    pub fn at(&self, t: f64) -> Direction {
        match self {
            Self::Static(dir) => *dir,
            Self::Path { times, points } => {
                if t <= times[0] {
                    return points[0];
                }
                if t >= *times.last().unwrap() {
                    return *points.last().unwrap();
                }
                let hi = times.partition_point(|&x| x <= t);
                let lo = hi - 1;
                let frac = (t - times[lo]) / (times[hi] - times[lo]);
                slerp(points[lo], points[hi], frac)
            }
        }
    }

    pub fn is_static(&self) -> bool {
        matches!(self, Self::Static(_))
    }
}

/// Antenna pattern of one virtual microphone.
#[derive(Debug, Clone)]
pub enum MicPattern {
    Omni,
    Cardioid { axis: Direction },
    /// Real spherical harmonic, ambiX convention, by ACN index.
    SphericalHarmonic { acn: u32 },
}

/// One virtual microphone: pattern plus a fixed gain trim.
#[derive(Debug, Clone)]
pub struct Microphone {
    pub pattern: MicPattern,
    pub gain: f64,
    pub label: String,
}

impl Microphone {
    pub fn omni(label: &str, gain: f64) -> Self {
        Self {
            pattern: MicPattern::Omni,
            gain,
            label: label.to_string(),
        }
    }

    pub fn cardioid(label: &str, axis: Direction) -> Self {
        Self {
            pattern: MicPattern::Cardioid { axis },
            gain: 1.0,
            label: label.to_string(),
        }
    }

    pub fn spherical_harmonic(acn: u32) -> Self {
        Self {
            pattern: MicPattern::SphericalHarmonic { acn },
            gain: 1.0,
            label: format!("ACN{acn}"),
        }
    }
}

/// Associated Legendre polynomial `P_l^m(x)` without the Condon-Shortley
/// phase, by the standard three-term recurrence.
fn assoc_legendre(l: u32, m: u32, x: f64) -> f64 {
    debug_assert!(m <= l);
    let somx2 = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = 1.0;
    let mut odd = 1.0;
    for _ in 0..m {
        pmm *= odd * somx2;
        odd += 2.0;
    }
    if l == m {
        return pmm;
    }
    let mut pmmp1 = x * (2 * m + 1) as f64 * pmm;
    if l == m + 1 {
        return pmmp1;
    }
    let mut pll = 0.0;
    for ll in (m + 2)..=l {
        pll = ((2 * ll - 1) as f64 * x * pmmp1 - (ll + m - 1) as f64 * pmm) / (ll - m) as f64;
        pmm = pmmp1;
        pmmp1 = pll;
    }
    pll
}

/// Schmidt semi-normalization: `sqrt((2 - delta_m0) (l-m)!/(l+m)!)`.
fn sn3d_norm(l: u32, m: u32) -> f64 {
    let two = if m == 0 { 1.0 } else { 2.0 };
    let mut denom = 1.0;
    for k in (l - m + 1)..=(l + m) {
        denom *= k as f64;
    }
    (two / denom).sqrt()
}

/// ACN index -> (degree l, order m).
pub fn acn_to_degree_order(acn: u32) -> (u32, i64) {
    let mut l = (acn as f64).sqrt() as u32;
    while (l + 1) * (l + 1) <= acn {
        l += 1;
    }
    while l * l > acn {
        l -= 1;
    }
    let m = acn as i64 - (l * l + l) as i64;
    (l, m)
}

/// Real spherical harmonic at `dir` for the given ACN index (SN3D).
pub fn sh_gain(acn: u32, dir: Direction) -> f64 {
    let (l, m) = acn_to_degree_order(acn);
    let mu = m.unsigned_abs() as u32;
    let p = assoc_legendre(l, mu, dir.polar.cos());
    let azimuthal = match m.cmp(&0) {
        std::cmp::Ordering::Greater => (mu as f64 * dir.azimuth).cos(),
        std::cmp::Ordering::Less => (mu as f64 * dir.azimuth).sin(),
        std::cmp::Ordering::Equal => 1.0,
    };
    sn3d_norm(l, mu) * p * azimuthal
}

/// Antenna coefficient of `mic` for a source at `dir`.
///
/// Omni is 1; cardioid is `(1 + cos(gamma))/2` with `gamma` the angle to the
/// mic axis; spherical harmonics follow the ambiX convention. The mic's gain
/// trim scales the result.
pub fn antenna_gain(mic: &Microphone, dir: Direction) -> f64 {
    let pattern = match &mic.pattern {
        MicPattern::Omni => 1.0,
        MicPattern::Cardioid { axis } => {
            let a = axis.unit_vector();
            let d = dir.unit_vector();
            let cos_gamma = a[0] * d[0] + a[1] * d[1] + a[2] * d[2];
            0.5 * (1.0 + cos_gamma)
        }
        MicPattern::SphericalHarmonic { acn } => sh_gain(*acn, dir),
    };
    mic.gain * pattern
}

/// An ordered microphone bank defining an output system.
#[derive(Debug, Clone)]
pub struct MicrophoneBank {
    pub name: String,
    pub mics: Vec<Microphone>,
}

impl MicrophoneBank {
    pub fn channels(&self) -> usize {
        self.mics.len()
    }
}

/// Build a pre-configured audio system.
///
/// Known names: `mono`, `stereo`, `5.1`, `7.1`, and `ambiX<n>` for
/// ambisonic order `n >= 1` ((n+1)^2 channels in ACN order).
///
/// Speaker azimuths follow ITU-R BS.775 conventions: stereo +-45 deg,
/// 5.1 front +-30 deg with surrounds +-110 deg, 7.1 adding sides +-90 deg
/// and rears +-135 deg; the LFE feed is omni at gain 0.5.
pub fn make_bank(system: &str) -> Result<MicrophoneBank> {
    let lower = system.to_ascii_lowercase();
    let horizon = |deg: f64| Direction::from_degrees(deg, 90.0);
    let mics = match lower.as_str() {
        "mono" => vec![Microphone::omni("M", 1.0)],
        "stereo" => vec![
            Microphone::cardioid("L", horizon(45.0)),
            Microphone::cardioid("R", horizon(-45.0)),
        ],
        "5.1" => vec![
            Microphone::cardioid("L", horizon(30.0)),
            Microphone::cardioid("R", horizon(-30.0)),
            Microphone::cardioid("C", horizon(0.0)),
            Microphone::omni("LFE", 0.5),
            Microphone::cardioid("Ls", horizon(110.0)),
            Microphone::cardioid("Rs", horizon(-110.0)),
        ],
        "7.1" => vec![
            Microphone::cardioid("L", horizon(30.0)),
            Microphone::cardioid("R", horizon(-30.0)),
            Microphone::cardioid("C", horizon(0.0)),
            Microphone::omni("LFE", 0.5),
            Microphone::cardioid("Lss", horizon(90.0)),
            Microphone::cardioid("Rss", horizon(-90.0)),
            Microphone::cardioid("Lsr", horizon(135.0)),
            Microphone::cardioid("Rsr", horizon(-135.0)),
        ],
        _ => {
            let order: u32 = lower
                .strip_prefix("ambix")
                .and_then(|s| s.parse().ok())
                .filter(|&n| n >= 1)
                .ok_or_else(|| Error::UnknownSystem(system.to_string()))?;
            let count = (order + 1) * (order + 1);
            if count as usize > u16::MAX as usize {
                return Err(Error::UnknownSystem(format!(
                    "{system}: channel count exceeds the file format limit"
                )));
            }
            (0..count).map(Microphone::spherical_harmonic).collect()
        }
    };
    Ok(MicrophoneBank {
        name: system.to_string(),
        mics,
    })
}

/// Per-channel sample arrays of equal length.
#[derive(Debug, Clone)]
pub struct MultichannelBuffer {
    pub channels: Vec<Vec<f64>>,
    pub sample_rate: f64,
}

impl MultichannelBuffer {
    pub fn new(channels: Vec<Vec<f64>>, sample_rate: f64) -> Result<Self> {
        if let Some(first) = channels.first() {
            let len = first.len();
            for (i, ch) in channels.iter().enumerate() {
                if ch.len() != len {
                    return Err(Error::BufferMismatch(format!(
                        "channel {i} has {} frames, expected {len}",
                        ch.len()
                    )));
                }
                if ch.iter().any(|x| !x.is_finite()) {
                    return Err(Error::BufferMismatch(format!(
                        "channel {i} contains non-finite samples"
                    )));
                }
            }
        }
        Ok(Self {
            channels,
            sample_rate,
        })
    }

    pub fn silent(channels: usize, frames: usize, sample_rate: f64) -> Self {
        Self {
            channels: vec![vec![0.0; frames]; channels],
            sample_rate,
        }
    }

    pub fn frames(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }

    pub fn duration(&self) -> f64 {
        self.frames() as f64 / self.sample_rate
    }
}

/// Normalized time of sample `k` within an `n`-sample buffer.
///
/// This is the contract used to evaluate direction tracks during mixing:
/// `t = k / (n - 1)`, with a single-sample buffer pinned to 0.
pub fn sample_time(k: usize, n: usize) -> f64 {
    if n <= 1 {
        0.0
    } else {
        k as f64 / (n - 1) as f64
    }
}

/// Add one source into an existing mix at a frame offset.
///
/// `track` times are normalized over the *signal*, not the output buffer.
pub fn accumulate_source(
    out: &mut [Vec<f64>],
    bank: &MicrophoneBank,
    signal: &[f64],
    track: &DirectionTrack,
    offset: usize,
) {
    let n = signal.len();
    let frames = out.first().map_or(0, Vec::len);
    for (j, mic) in bank.mics.iter().enumerate() {
        match track {
            DirectionTrack::Static(dir) => {
                let g = antenna_gain(mic, *dir);
                for (k, &s) in signal.iter().enumerate() {
                    let frame = offset + k;
                    if frame >= frames {
                        break;
                    }
                    out[j][frame] += g * s;
                }
            }
            path => {
                for (k, &s) in signal.iter().enumerate() {
                    let frame = offset + k;
                    if frame >= frames {
                        break;
                    }
                    let g = antenna_gain(mic, path.at(sample_time(k, n)));
                    out[j][frame] += g * s;
                }
            }
        }
    }
}

/// Mix per-source signals into a multichannel buffer.
///
/// Channel `j` at sample `k` is the sum over sources, in ascending index
/// order, of `antenna_gain(mic_j, dir_i(t_k)) * signal_i(k)`; gains are
/// recomputed every sample for evolving directions.
pub fn mix(
    signals: &[Vec<f64>],
    tracks: &[DirectionTrack],
    bank: &MicrophoneBank,
    sample_rate: f64,
) -> Result<MultichannelBuffer> {
    if signals.len() != tracks.len() {
        return Err(Error::BufferMismatch(format!(
            "{} signals but {} direction tracks",
            signals.len(),
            tracks.len()
        )));
    }
    let frames = signals.first().map_or(0, Vec::len);
    for (i, s) in signals.iter().enumerate() {
        if s.len() != frames {
            return Err(Error::BufferMismatch(format!(
                "signal {i} has {} frames, expected {frames}",
                s.len()
            )));
        }
    }
    let mut out = vec![vec![0.0; frames]; bank.channels()];
    for (signal, track) in signals.iter().zip(tracks) {
        accumulate_source(&mut out, bank, signal, track, 0);
    }
    MultichannelBuffer::new(out, sample_rate)
}
