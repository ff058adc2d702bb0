//! Orchestration: sources + score + generator + channels into a finished
//! multichannel mix.
//!
//! Rendering is deterministic. Every source draws randomness from its own
//! stream derived from `(master_seed, source_index)`, note buffers are
//! rendered in parallel but accumulated in ascending source order, and the
//! final buffer is soft-clipped with the overflow count reported.

use rayon::prelude::*;

use crate::channels::{
    accumulate_source, Direction, DirectionTrack, MicrophoneBank, MultichannelBuffer,
};
use crate::error::{Error, Result};
use crate::generator::{
    GeneratorConfig, GeneratorKind, LfoOverrides, Modulators, NoteContent, SampleBank, Series,
};
use crate::generator::render_note;
use crate::rng::SeedStream;
use crate::score::{assign_notes, chord_at, Note, ScoreSpec};
use crate::sources::{EventSet, Evolution, ObjectSource, ParameterId};

/// Samples per block when resampling evolvable parameters.
pub const EVOLUTION_BLOCK: usize = 256;

/// Default sustain inserted between an event note's decay and release.
pub const DEFAULT_EVENT_SUSTAIN: f64 = 0.5;

/// Sample rates the engine renders at.
pub const SUPPORTED_SAMPLE_RATES: [f64; 3] = [44_100.0, 48_000.0, 96_000.0];

/// Events to render per parallel batch; batches accumulate in order.
const EVENT_BATCH: usize = 64;

/// The data being sonified.
#[derive(Debug, Clone)]
pub enum SourceSet {
    Events(EventSet),
    Object(ObjectSource),
}

impl SourceSet {
    pub fn len(&self) -> usize {
        match self {
            SourceSet::Events(e) => e.count(),
            SourceSet::Object(_) => 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Everything needed to render one sonification.
#[derive(Clone)]
pub struct RenderPlan {
    pub sources: SourceSet,
    pub score: ScoreSpec,
    pub generator: GeneratorConfig,
    pub sample_bank: Option<SampleBank>,
    pub bank: MicrophoneBank,
    pub sample_rate: f64,
    pub master_seed: u64,
    /// Sustain seconds appended to attack+decay for event notes.
    pub event_sustain: f64,
}

impl RenderPlan {
    pub fn new(
        sources: SourceSet,
        score: ScoreSpec,
        generator: GeneratorConfig,
        bank: MicrophoneBank,
    ) -> Self {
        Self {
            sources,
            score,
            generator,
            sample_bank: None,
            bank,
            sample_rate: 44_100.0,
            master_seed: 0,
            event_sustain: DEFAULT_EVENT_SUSTAIN,
        }
    }

    /// Check internal consistency before rendering.
    pub fn validate(&self) -> Result<()> {
        if self.sources.is_empty() {
            return Err(Error::InvalidPlan("no sources to sonify".into()));
        }
        if !SUPPORTED_SAMPLE_RATES.contains(&self.sample_rate) {
            return Err(Error::InvalidPlan(format!(
                "sample rate {} unsupported (choose 44100, 48000 or 96000)",
                self.sample_rate
            )));
        }
        self.generator.validate()?;
        match self.generator.kind {
            GeneratorKind::Sampler => {
                if self.sample_bank.is_none() {
                    return Err(Error::InvalidPlan(
                        "sampler generator needs a sample bank".into(),
                    ));
                }
            }
            GeneratorKind::Spectraliser => {
                let ok = match &self.sources {
                    SourceSet::Events(e) => (0..e.count()).all(|i| e.spectrum(i).is_some()),
                    SourceSet::Object(o) => o.spectrum().is_some(),
                };
                if !ok {
                    return Err(Error::InvalidPlan(
                        "spectraliser generator needs a spectrum per source".into(),
                    ));
                }
                let (_, f_max) = self.generator.spectral_range;
                if f_max >= self.sample_rate / 2.0 {
                    return Err(Error::InvalidPlan(format!(
                        "spectraliser range must stay below Nyquist ({} Hz)",
                        self.sample_rate / 2.0
                    )));
                }
            }
            GeneratorKind::Synthesiser => {}
        }
        if self.event_sustain < 0.0 {
            return Err(Error::InvalidPlan("event sustain must be >= 0".into()));
        }
        self.warn_inaudible_lfo_mappings();
        Ok(())
    }

    /// Mapped LFO parameters are inaudible while the preset keeps the LFO
    /// off; point that out instead of silently ignoring the data.
    fn warn_inaudible_lfo_mappings(&self) {
        let mapped = |p: ParameterId| match &self.sources {
            SourceSet::Events(e) => e.is_mapped(p),
            SourceSet::Object(o) => {
                o.evolution(p).is_some() || o.static_value(p).is_some()
            }
        };
        let volume_params = [
            ParameterId::VolumeLfoFreq,
            ParameterId::VolumeLfoFreqShift,
            ParameterId::VolumeLfoAmount,
        ];
        let pitch_params = [
            ParameterId::PitchLfoFreq,
            ParameterId::PitchLfoFreqShift,
            ParameterId::PitchLfoAmount,
        ];
        if !self.generator.volume_lfo.use_lfo && volume_params.iter().any(|&p| mapped(p)) {
            log::warn!("volume_lfo parameters are mapped but the preset leaves the LFO off");
        }
        if !self.generator.pitch_lfo.use_lfo && pitch_params.iter().any(|&p| mapped(p)) {
            log::warn!("pitch_lfo parameters are mapped but the preset leaves the LFO off");
        }
    }
}

/// One scheduled note, for the render report.
#[derive(Debug, Clone)]
pub struct NoteLogEntry {
    pub source: usize,
    pub note: String,
    pub start: f64,
    pub duration: f64,
}

/// A rendered sonification.
pub struct RenderResult {
    pub audio: MultichannelBuffer,
    /// Samples that exceeded +-1 before the final limiter.
    pub clip_count: usize,
    pub note_log: Vec<NoteLogEntry>,
}

/// Soft limiter: identity below |0.99|, tanh-shaped above, asymptote 1.
fn soft_clip(x: f64) -> f64 {
    const KNEE: f64 = 0.99;
    if x.abs() <= KNEE {
        x
    } else {
        let span = 1.0 - KNEE;
        x.signum() * (KNEE + span * ((x.abs() - KNEE) / span).tanh())
    }
}

fn frames_for(duration: f64, sample_rate: f64) -> usize {
    (duration * sample_rate).round() as usize
}

struct EventJob {
    index: usize,
    start_frame: usize,
    direction: Direction,
    volume: f64,
    note: Note,
    config: GeneratorConfig,
    modulators: Modulators,
    total: f64,
}

/// Resolve the per-event generator config: mapped envelope and LFO fields
/// replace the preset values for this event only.
fn event_config(base: &GeneratorConfig, events: &EventSet, i: usize) -> GeneratorConfig {
    let mut cfg = base.clone();
    let get = |p: ParameterId| events.mapped(p, i);
    if let Some(x) = get(ParameterId::EnvelopeAttack) {
        cfg.envelope.attack = x;
    }
    if let Some(x) = get(ParameterId::EnvelopeDecay) {
        cfg.envelope.decay = x;
    }
    if let Some(x) = get(ParameterId::EnvelopeSustain) {
        cfg.envelope.sustain = x;
    }
    if let Some(x) = get(ParameterId::EnvelopeRelease) {
        cfg.envelope.release = x;
    }
    if let Some(x) = get(ParameterId::VolumeLfoFreq) {
        cfg.volume_lfo.freq = x;
    }
    if let Some(x) = get(ParameterId::VolumeLfoFreqShift) {
        cfg.volume_lfo.freq_shift = x;
    }
    if let Some(x) = get(ParameterId::VolumeLfoAmount) {
        cfg.volume_lfo.amount = x;
    }
    if let Some(x) = get(ParameterId::PitchLfoFreq) {
        cfg.pitch_lfo.freq = x;
    }
    if let Some(x) = get(ParameterId::PitchLfoFreqShift) {
        cfg.pitch_lfo.freq_shift = x;
    }
    if let Some(x) = get(ParameterId::PitchLfoAmount) {
        cfg.pitch_lfo.amount = x;
    }
    cfg
}

fn render_events(plan: &RenderPlan, events: &EventSet, total_frames: usize) -> Result<RenderResult> {
    let sr = plan.sample_rate;
    let duration = plan.score.duration;
    let chords = plan.score.chord_sequence.chords();

    // Pitch values bin globally against the first chord; each event then
    // sounds the note of its active chord at the same bin index.
    let pitch_values: Vec<f64> = (0..events.count())
        .map(|i| {
            events
                .mapped(ParameterId::Pitch, i)
                .unwrap_or(plan.generator.default_pitch)
        })
        .collect();
    let bins = assign_notes(&pitch_values, chords[0].len())?;

    let mut jobs = Vec::with_capacity(events.count());
    for i in 0..events.count() {
        let t_event = events
            .value(ParameterId::Time, i)
            .unwrap_or(0.0)
            .clamp(0.0, 1.0);
        let chord = &chords[chord_at(&plan.score, t_event)];
        let note = chord[bins[i] % chord.len()];
        let config = event_config(&plan.generator, events, i);
        let note_length = config.envelope.attack + config.envelope.decay + plan.event_sustain;
        let total = note_length + config.envelope.release;
        let modulators = Modulators {
            note_length,
            pitch_shift: Series::Const(
                events.value(ParameterId::PitchShift, i).unwrap_or(0.0),
            ),
            cutoff: events.mapped(ParameterId::Cutoff, i).map(Series::Const),
            volume_lfo: LfoOverrides::none(),
            pitch_lfo: LfoOverrides::none(),
        };
        jobs.push(EventJob {
            index: i,
            start_frame: frames_for(t_event * duration, sr),
            direction: Direction::new(
                events.value(ParameterId::Azimuth, i).unwrap_or(0.0),
                events
                    .value(ParameterId::Polar, i)
                    .unwrap_or(std::f64::consts::FRAC_PI_2),
            ),
            volume: events.value(ParameterId::Volume, i).unwrap_or(1.0),
            note,
            config,
            modulators,
            total,
        });
    }

    let mut channels = vec![vec![0.0; total_frames]; plan.bank.channels()];
    let mut note_log = Vec::with_capacity(jobs.len());

    for batch in jobs.chunks(EVENT_BATCH) {
        let rendered: Vec<Result<Vec<f64>>> = batch
            .par_iter()
            .map(|job| {
                let mut rng = SeedStream::for_source(plan.master_seed, job.index as u64);
                let content = match plan.generator.kind {
                    GeneratorKind::Synthesiser => NoteContent::Synth,
                    GeneratorKind::Sampler => {
                        NoteContent::Sample(plan.sample_bank.as_ref().unwrap())
                    }
                    GeneratorKind::Spectraliser => {
                        NoteContent::Spectrum(events.spectrum(job.index).unwrap())
                    }
                };
                let mut buf = render_note(
                    &job.config,
                    content,
                    job.note,
                    job.total,
                    sr,
                    &job.modulators,
                    &mut rng,
                )?;
                if job.volume != 1.0 {
                    for x in &mut buf {
                        *x *= job.volume;
                    }
                }
                Ok(buf)
            })
            .collect();

        for (job, rendered) in batch.iter().zip(rendered) {
            let buf = rendered?;
            accumulate_source(
                &mut channels,
                &plan.bank,
                &buf,
                &DirectionTrack::Static(job.direction),
                job.start_frame,
            );
            note_log.push(NoteLogEntry {
                source: job.index,
                note: job.note.name(),
                start: job.start_frame as f64 / sr,
                duration: job.total,
            });
        }
    }

    finalize(channels, note_log, sr)
}

/// Sample an evolution (or static value) of `param` onto per-block values
/// spanning `[t0, t1]` of the sonification.
fn object_series(
    src: &ObjectSource,
    param: ParameterId,
    t0: f64,
    t1: f64,
    frames: usize,
) -> Option<Series> {
    if let Some(evo) = src.evolution(param) {
        let blocks = frames.div_ceil(EVOLUTION_BLOCK).max(1);
        let values = (0..blocks)
            .map(|b| {
                let mid = ((b * EVOLUTION_BLOCK) as f64 + EVOLUTION_BLOCK as f64 / 2.0)
                    .min(frames as f64);
                let t = t0 + (t1 - t0) * mid / frames as f64;
                evo.at(t)
            })
            .collect();
        return Some(Series::Blocked {
            values,
            block: EVOLUTION_BLOCK,
        });
    }
    src.static_value(param).map(Series::Const)
}

/// Direction track for an object over `[t0, t1]`, in signal-local time.
fn object_track(src: &ObjectSource, t0: f64, t1: f64) -> DirectionTrack {
    let az_evo = src.evolution(ParameterId::Azimuth);
    let polar_evo = src.evolution(ParameterId::Polar);
    let static_dir = || {
        Direction::new(
            src.value_at(ParameterId::Azimuth, t0).unwrap_or(0.0),
            src.value_at(ParameterId::Polar, t0)
                .unwrap_or(std::f64::consts::FRAC_PI_2),
        )
    };
    if az_evo.is_none() && polar_evo.is_none() {
        return DirectionTrack::Static(static_dir());
    }
    // Union of both evolution grids, restricted to the segment, plus the
    // segment endpoints, in signal-local normalized time.
    let mut knots: Vec<f64> = vec![0.0, 1.0];
    let mut extend = |evo: Option<&Evolution>| {
        if let Some(evo) = evo {
            for &t in evo.times() {
                if t > t0 && t < t1 {
                    knots.push((t - t0) / (t1 - t0));
                }
            }
        }
    };
    extend(az_evo);
    extend(polar_evo);
    knots.sort_by(|a, b| a.total_cmp(b));
    knots.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let points: Vec<Direction> = knots
        .iter()
        .map(|&local| {
            let t = t0 + (t1 - t0) * local;
            Direction::new(
                src.value_at(ParameterId::Azimuth, t).unwrap_or(0.0),
                src.value_at(ParameterId::Polar, t)
                    .unwrap_or(std::f64::consts::FRAC_PI_2),
            )
        })
        .collect();
    DirectionTrack::path(knots, points).expect("knots are sorted and deduplicated")
}

fn render_object(plan: &RenderPlan, src: &ObjectSource, total_frames: usize) -> Result<RenderResult> {
    let sr = plan.sample_rate;
    let duration = plan.score.duration;
    let chords = plan.score.chord_sequence.chords();
    let n_chords = chords.len();

    let mut cfg = plan.generator.clone();
    for (param, field) in [
        (ParameterId::EnvelopeAttack, 0),
        (ParameterId::EnvelopeDecay, 1),
        (ParameterId::EnvelopeSustain, 2),
        (ParameterId::EnvelopeRelease, 3),
    ] {
        if let Some(x) = src.static_value(param) {
            match field {
                0 => cfg.envelope.attack = x,
                1 => cfg.envelope.decay = x,
                2 => cfg.envelope.sustain = x,
                _ => cfg.envelope.release = x,
            }
        }
    }
    if let Some(x) = src.static_value(ParameterId::VolumeLfoFreq) {
        cfg.volume_lfo.freq = x;
    }
    if let Some(x) = src.static_value(ParameterId::PitchLfoFreq) {
        cfg.pitch_lfo.freq = x;
    }

    let mut channels = vec![vec![0.0; total_frames]; plan.bank.channels()];
    let mut note_log = Vec::new();
    let mut rng = SeedStream::for_source(plan.master_seed, 0);

    for (seg, chord) in chords.iter().enumerate() {
        let t0 = seg as f64 / n_chords as f64;
        let t1 = (seg + 1) as f64 / n_chords as f64;
        let start_frame = frames_for(t0 * duration, sr);
        let end_frame = frames_for(t1 * duration, sr).min(total_frames);
        let frames = end_frame.saturating_sub(start_frame);
        if frames == 0 {
            continue;
        }
        let seg_duration = frames as f64 / sr;
        // Release must finish inside the segment; very long releases fall
        // back to half the segment.
        let note_length =
            (seg_duration - cfg.envelope.release).max(seg_duration * 0.5);

        let series = |p: ParameterId| object_series(src, p, t0, t1, frames);
        let modulators = Modulators {
            note_length,
            pitch_shift: series(ParameterId::PitchShift).unwrap_or(Series::Const(0.0)),
            cutoff: series(ParameterId::Cutoff),
            volume_lfo: LfoOverrides {
                freq: None,
                amount: series(ParameterId::VolumeLfoAmount),
                freq_shift: series(ParameterId::VolumeLfoFreqShift),
            },
            pitch_lfo: LfoOverrides {
                freq: None,
                amount: series(ParameterId::PitchLfoAmount),
                freq_shift: series(ParameterId::PitchLfoFreqShift),
            },
        };

        // The object articulates every note of the active chord; the sum is
        // normalized by the chord size.
        let mut mixed = vec![0.0; frames];
        for note in chord {
            let content = match plan.generator.kind {
                GeneratorKind::Synthesiser => NoteContent::Synth,
                GeneratorKind::Sampler => NoteContent::Sample(plan.sample_bank.as_ref().unwrap()),
                GeneratorKind::Spectraliser => NoteContent::Spectrum(src.spectrum().unwrap()),
            };
            let buf = render_note(&cfg, content, *note, seg_duration, sr, &modulators, &mut rng)?;
            for (acc, x) in mixed.iter_mut().zip(&buf) {
                *acc += x / chord.len() as f64;
            }
            note_log.push(NoteLogEntry {
                source: 0,
                note: note.name(),
                start: start_frame as f64 / sr,
                duration: seg_duration,
            });
        }

        // Evolvable source volume scales the mixed segment.
        let volume = object_series(src, ParameterId::Volume, t0, t1, frames)
            .unwrap_or(Series::Const(1.0));
        for (k, x) in mixed.iter_mut().enumerate() {
            *x *= volume.at(k);
        }

        accumulate_source(
            &mut channels,
            &plan.bank,
            &mixed,
            &object_track(src, t0, t1),
            start_frame,
        );
    }

    finalize(channels, note_log, sr)
}

fn finalize(
    mut channels: Vec<Vec<f64>>,
    note_log: Vec<NoteLogEntry>,
    sample_rate: f64,
) -> Result<RenderResult> {
    let mut clip_count = 0usize;
    for ch in &mut channels {
        for x in ch.iter_mut() {
            if !x.is_finite() {
                return Err(Error::InvalidPlan(
                    "render produced a non-finite sample".into(),
                ));
            }
            if x.abs() > 1.0 {
                clip_count += 1;
            }
            *x = soft_clip(*x);
        }
    }
    Ok(RenderResult {
        audio: MultichannelBuffer::new(channels, sample_rate)?,
        clip_count,
        note_log,
    })
}

/// Render a plan into a multichannel buffer.
///
/// Events are scheduled at their mapped times, assigned notes through the
/// score, rendered by the generator and spatialized; an object plays
/// continuously with its evolvable parameters resampled per audio block.
/// The output has exactly `round(duration * sample_rate)` frames.
pub fn render(plan: &RenderPlan) -> Result<RenderResult> {
    plan.validate()?;
    let total_frames = frames_for(plan.score.duration, plan.sample_rate);
    match &plan.sources {
        SourceSet::Events(events) => render_events(plan, events, total_frames),
        SourceSet::Object(src) => render_object(plan, src, total_frames),
    }
}
