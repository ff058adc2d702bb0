//! RIFF/WAVE reading and writing.
//!
//! The writer emits interleaved pcm16 (symmetric 32767 scaling,
//! round-half-away-from-zero) or IEEE float32 files; the reader accepts
//! 16/24-bit PCM and 32-bit float.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::channels::MultichannelBuffer;
use crate::error::{Error, Result};

/// On-disk sample encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WavEncoding {
    #[default]
    Pcm16,
    Float32,
}

impl WavEncoding {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "pcm16" => Ok(Self::Pcm16),
            "float32" => Ok(Self::Float32),
            other => Err(Error::WavFormat(format!(
                "unknown encoding `{other}` (choose pcm16 or float32)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Pcm16 => "pcm16",
            Self::Float32 => "float32",
        }
    }

    fn bytes_per_sample(self) -> usize {
        match self {
            Self::Pcm16 => 2,
            Self::Float32 => 4,
        }
    }
}

/// Round half away from zero, the symmetric pcm16 quantizer.
fn quantize_pcm16(x: f64) -> i16 {
    let scaled = x * 32767.0;
    let rounded = if scaled >= 0.0 {
        (scaled + 0.5).floor()
    } else {
        (scaled - 0.5).ceil()
    };
    rounded.clamp(-32768.0, 32767.0) as i16
}

/// Write a multichannel buffer as a RIFF/WAVE file.
///
/// Channels are interleaved in bank order. pcm16 uses fmt tag 1; float32
/// uses fmt tag 3 with a `fact` chunk, as the format requires for non-PCM
/// data.
pub fn write_wav(
    buffer: &MultichannelBuffer,
    path: impl AsRef<Path>,
    encoding: WavEncoding,
) -> Result<()> {
    let channels = buffer.channels.len();
    if channels == 0 || channels > u16::MAX as usize {
        return Err(Error::WavFormat(format!(
            "channel count {channels} not representable"
        )));
    }
    let frames = buffer.frames();
    let bytes_per_sample = encoding.bytes_per_sample();
    let block_align = channels * bytes_per_sample;
    let data_size = frames * block_align;
    if data_size > u32::MAX as usize {
        return Err(Error::WavFormat("audio too long for a RIFF file".into()));
    }

    let mut w = BufWriter::new(File::create(path)?);
    let (format_tag, fmt_size, fact_overhead) = match encoding {
        WavEncoding::Pcm16 => (1u16, 16u32, 0usize),
        // 18-byte fmt (with cbSize = 0) plus an 8 + 4 byte fact chunk.
        WavEncoding::Float32 => (3u16, 18u32, 12),
    };
    let riff_size = 4 + (8 + fmt_size as usize) + fact_overhead + 8 + data_size;

    w.write_all(b"RIFF")?;
    w.write_all(&(riff_size as u32).to_le_bytes())?;
    w.write_all(b"WAVE")?;

    w.write_all(b"fmt ")?;
    w.write_all(&fmt_size.to_le_bytes())?;
    w.write_all(&format_tag.to_le_bytes())?;
    w.write_all(&(channels as u16).to_le_bytes())?;
    w.write_all(&(buffer.sample_rate as u32).to_le_bytes())?;
    let byte_rate = buffer.sample_rate as u32 * block_align as u32;
    w.write_all(&byte_rate.to_le_bytes())?;
    w.write_all(&(block_align as u16).to_le_bytes())?;
    w.write_all(&((bytes_per_sample * 8) as u16).to_le_bytes())?;
    if encoding == WavEncoding::Float32 {
        w.write_all(&0u16.to_le_bytes())?; // cbSize
        w.write_all(b"fact")?;
        w.write_all(&4u32.to_le_bytes())?;
        w.write_all(&(frames as u32).to_le_bytes())?;
    }

    w.write_all(b"data")?;
    w.write_all(&(data_size as u32).to_le_bytes())?;
    match encoding {
        WavEncoding::Pcm16 => {
            for frame in 0..frames {
                for ch in &buffer.channels {
                    w.write_all(&quantize_pcm16(ch[frame]).to_le_bytes())?;
                }
            }
        }
        WavEncoding::Float32 => {
            for frame in 0..frames {
                for ch in &buffer.channels {
                    w.write_all(&(ch[frame] as f32).to_le_bytes())?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Read a RIFF/WAVE file into per-channel f64 buffers.
///
/// Accepts 16-bit and 24-bit PCM and 32-bit IEEE float; unknown chunks are
/// skipped.
pub fn read_wav(path: impl AsRef<Path>) -> Result<MultichannelBuffer> {
    let mut r = BufReader::new(File::open(path)?);
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    parse_wav(&bytes)
}

/// Parse WAV bytes (see [`read_wav`]).
pub fn parse_wav(bytes: &[u8]) -> Result<MultichannelBuffer> {
    let err = |msg: &str| Error::WavFormat(msg.to_string());
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(err("not a RIFF/WAVE file"));
    }
    let mut pos = 12;
    let mut fmt: Option<(u16, u16, u32, u16)> = None; // tag, channels, rate, bits
    let mut data: Option<&[u8]> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap()) as usize;
        let body_start = pos + 8;
        if body_start + size > bytes.len() {
            return Err(err("chunk overruns file"));
        }
        let body = &bytes[body_start..body_start + size];
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(err("fmt chunk too small"));
                }
                fmt = Some((
                    u16::from_le_bytes(body[0..2].try_into().unwrap()),
                    u16::from_le_bytes(body[2..4].try_into().unwrap()),
                    u32::from_le_bytes(body[4..8].try_into().unwrap()),
                    u16::from_le_bytes(body[14..16].try_into().unwrap()),
                ));
            }
            b"data" => data = Some(body),
            _ => {}
        }
        // Chunks are word-aligned; odd sizes carry a pad byte.
        pos = body_start + size + (size & 1);
    }
    let (tag, channels, rate, bits) = fmt.ok_or_else(|| err("missing fmt chunk"))?;
    let data = data.ok_or_else(|| err("missing data chunk"))?;
    if channels == 0 {
        return Err(err("zero channels"));
    }
    let channels = channels as usize;
    let bytes_per_sample = (bits / 8) as usize;
    if bytes_per_sample == 0 || data.len() % (channels * bytes_per_sample) != 0 {
        return Err(err("data chunk size does not divide into frames"));
    }
    let frames = data.len() / (channels * bytes_per_sample);

    let decode: fn(&[u8]) -> f64 = match (tag, bits) {
        (1, 16) => |b| i16::from_le_bytes([b[0], b[1]]) as f64 / 32767.0,
        (1, 24) => |b| {
            let raw = i32::from_le_bytes([0, b[0], b[1], b[2]]) >> 8;
            raw as f64 / 8_388_607.0
        },
        (3, 32) => |b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
        _ => {
            return Err(Error::WavFormat(format!(
                "unsupported format tag {tag} with {bits} bits"
            )))
        }
    };

    let mut out = vec![Vec::with_capacity(frames); channels];
    for frame in 0..frames {
        for (c, channel) in out.iter_mut().enumerate() {
            let start = (frame * channels + c) * bytes_per_sample;
            channel.push(decode(&data[start..start + bytes_per_sample]));
        }
    }
    MultichannelBuffer::new(out, rate as f64)
}
