//! A data sonification engine.
//!
//! The crate maps numerical data onto expressive sound parameters and renders
//! the result as multichannel audio. The pipeline is split into independent
//! stages, each usable on its own:
//!
//! * [`sources`] — data-to-parameter mapping (events and evolving objects)
//! * [`score`] — musical constraints: notes, chords, timeline
//! * [`generator`] — per-source audio synthesis (oscillators, sampler,
//!   spectral synthesis) with envelope / LFO / filter modulation
//! * [`channels`] — virtual-microphone spatialization, including ambisonics
//! * [`render`] — orchestration of the above into a finished multichannel mix
//! * [`presets`] — named, validated generator configurations
//! * [`wav`] — RIFF/WAVE reading and writing
//!
//! Rendering is deterministic: a fixed master seed yields byte-identical
//! output regardless of thread count.

pub mod channels;
pub mod error;
pub mod generator;
pub mod presets;
pub mod render;
pub mod rng;
pub mod score;
pub mod sources;
pub mod wav;

pub use error::{Error, Result};
