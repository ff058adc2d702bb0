//! Job configuration: one YAML document describing the whole render.
//!
//! The format mirrors the preset files (nested maps, strict schema); every
//! error names the offending key path.

use std::path::{Path, PathBuf};

use serde_yaml::Value;

use sonify_core::sources::{LimitMode, MapLimits, Mapping, ParameterId};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceKind {
    Events,
    Object,
}

#[derive(Debug, Clone)]
pub struct SourceConfig {
    pub kind: SourceKind,
    /// Object sources: the column holding the (strictly increasing) time axis.
    pub time_column: Option<String>,
    pub mappings: Vec<Mapping>,
    /// Object sources: fixed parameter values.
    pub statics: Vec<(ParameterId, f64)>,
    /// Column audified through the spectral generator.
    pub spectrum_column: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ScoreConfig {
    pub chords: Vec<String>,
    pub duration: f64,
}

#[derive(Debug, Clone)]
pub struct GeneratorSection {
    pub kind: Option<String>,
    pub preset: String,
    pub overrides_yaml: Option<String>,
    pub sample_dir: Option<PathBuf>,
    pub loop_mode: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RenderSection {
    pub system: String,
    pub sample_rate: f64,
    pub seed: u64,
    pub encoding: String,
    pub out: Option<PathBuf>,
    pub event_sustain: Option<f64>,
}

/// Parsed and structurally validated job file.
#[derive(Debug, Clone)]
pub struct JobConfig {
    pub source: SourceConfig,
    pub score: ScoreConfig,
    pub generator: GeneratorSection,
    pub render: RenderSection,
}

fn bad(path: &str, reason: impl Into<String>) -> CliError {
    CliError::Config(format!("`{path}`: {}", reason.into()))
}

fn as_map<'a>(value: &'a Value, path: &str) -> CliResult<&'a serde_yaml::Mapping> {
    value
        .as_mapping()
        .ok_or_else(|| bad(path, "expected a map"))
}

fn keys_of<'a>(map: &'a serde_yaml::Mapping, path: &str) -> CliResult<Vec<(String, &'a Value)>> {
    map.iter()
        .map(|(k, v)| {
            k.as_str()
                .map(|s| (s.to_string(), v))
                .ok_or_else(|| bad(path, "keys must be strings"))
        })
        .collect()
}

fn as_f64(value: &Value, path: &str) -> CliResult<f64> {
    value
        .as_f64()
        .or_else(|| value.as_i64().map(|x| x as f64))
        .ok_or_else(|| bad(path, "expected a number"))
}

fn as_str<'a>(value: &'a Value, path: &str) -> CliResult<&'a str> {
    value.as_str().ok_or_else(|| bad(path, "expected a string"))
}

fn parse_mapping(param_name: &str, value: &Value, path: &str) -> CliResult<Mapping> {
    let param =
        ParameterId::parse(param_name).map_err(|e| bad(path, e.to_string()))?;

    // Shorthand: `pitch: colour` maps the full data range onto the
    // parameter's full default range.
    if let Some(column) = value.as_str() {
        let (param_lo, param_hi) = param.default_param_range().ok_or_else(|| {
            bad(
                path,
                format!(
                    "parameter `{param_name}` has no default range; spell out param_lo/param_hi"
                ),
            )
        })?;
        return Ok(Mapping::new(
            param,
            column,
            MapLimits::full_range(param_lo, param_hi),
        ));
    }

    let map = as_map(value, path)?;
    let mut column: Option<String> = None;
    let mut mode = LimitMode::Percentile;
    let mut lo: Option<f64> = None;
    let mut hi: Option<f64> = None;
    let mut param_lo: Option<f64> = None;
    let mut param_hi: Option<f64> = None;
    for (key, v) in keys_of(map, path)? {
        let key_path = format!("{path}.{key}");
        match key.as_str() {
            "column" => column = Some(as_str(v, &key_path)?.to_string()),
            "mode" => {
                mode = match as_str(v, &key_path)? {
                    "percentile" => LimitMode::Percentile,
                    "data_units" => LimitMode::DataUnits,
                    other => {
                        return Err(bad(
                            &key_path,
                            format!("unknown mode `{other}` (percentile or data_units)"),
                        ))
                    }
                }
            }
            "lo" => lo = Some(as_f64(v, &key_path)?),
            "hi" => hi = Some(as_f64(v, &key_path)?),
            "param_lo" => param_lo = Some(as_f64(v, &key_path)?),
            "param_hi" => param_hi = Some(as_f64(v, &key_path)?),
            _ => return Err(bad(&key_path, "unknown key")),
        }
    }
    let column = column.ok_or_else(|| bad(path, "missing `column`"))?;
    let (default_lo, default_hi) = match param.default_param_range() {
        Some(range) => range,
        None if param_lo.is_none() || param_hi.is_none() => {
            return Err(bad(
                path,
                format!("parameter `{param_name}` has no default range; set param_lo and param_hi"),
            ))
        }
        None => (0.0, 0.0),
    };
    let (mode_lo, mode_hi) = match mode {
        LimitMode::Percentile => (lo.unwrap_or(0.0), hi.unwrap_or(100.0)),
        LimitMode::DataUnits => {
            let lo = lo.ok_or_else(|| bad(path, "data_units mode needs `lo`"))?;
            let hi = hi.ok_or_else(|| bad(path, "data_units mode needs `hi`"))?;
            (lo, hi)
        }
    };
    Ok(Mapping::new(
        param,
        column,
        MapLimits {
            mode,
            lo: mode_lo,
            hi: mode_hi,
            param_lo: param_lo.unwrap_or(default_lo),
            param_hi: param_hi.unwrap_or(default_hi),
        },
    ))
}

fn parse_source(value: &Value) -> CliResult<SourceConfig> {
    let map = as_map(value, "source")?;
    let mut kind = SourceKind::Events;
    let mut time_column = None;
    let mut mappings = Vec::new();
    let mut statics = Vec::new();
    let mut spectrum_column = None;
    for (key, v) in keys_of(map, "source")? {
        let path = format!("source.{key}");
        match key.as_str() {
            "kind" => {
                kind = match as_str(v, &path)? {
                    "events" => SourceKind::Events,
                    "object" => SourceKind::Object,
                    other => {
                        return Err(bad(&path, format!("unknown kind `{other}` (events or object)")))
                    }
                }
            }
            "time_column" => time_column = Some(as_str(v, &path)?.to_string()),
            "spectrum_column" => spectrum_column = Some(as_str(v, &path)?.to_string()),
            "mappings" => {
                for (param_name, spec) in keys_of(as_map(v, &path)?, &path)? {
                    mappings.push(parse_mapping(
                        &param_name,
                        spec,
                        &format!("{path}.{param_name}"),
                    )?);
                }
            }
            "statics" => {
                for (param_name, spec) in keys_of(as_map(v, &path)?, &path)? {
                    let sub = format!("{path}.{param_name}");
                    let param =
                        ParameterId::parse(&param_name).map_err(|e| bad(&sub, e.to_string()))?;
                    statics.push((param, as_f64(spec, &sub)?));
                }
            }
            _ => return Err(bad(&path, "unknown key")),
        }
    }
    if kind == SourceKind::Object && time_column.is_none() {
        return Err(bad("source.time_column", "required for object sources"));
    }
    Ok(SourceConfig {
        kind,
        time_column,
        mappings,
        statics,
        spectrum_column,
    })
}

fn parse_score(value: &Value) -> CliResult<ScoreConfig> {
    let map = as_map(value, "score")?;
    let mut chords = Vec::new();
    let mut duration = None;
    for (key, v) in keys_of(map, "score")? {
        let path = format!("score.{key}");
        match key.as_str() {
            "chords" => {
                let seq = v
                    .as_sequence()
                    .ok_or_else(|| bad(&path, "expected a list of chord strings"))?;
                for (i, chord) in seq.iter().enumerate() {
                    chords.push(as_str(chord, &format!("{path}[{i}]"))?.to_string());
                }
            }
            "duration" => duration = Some(as_f64(v, &path)?),
            _ => return Err(bad(&path, "unknown key")),
        }
    }
    if chords.is_empty() {
        return Err(bad("score.chords", "at least one chord is required"));
    }
    let duration = duration.ok_or_else(|| bad("score.duration", "missing"))?;
    Ok(ScoreConfig { chords, duration })
}

fn parse_generator(value: &Value, config_dir: &Path) -> CliResult<GeneratorSection> {
    let map = as_map(value, "generator")?;
    let mut section = GeneratorSection {
        kind: None,
        preset: "default".to_string(),
        overrides_yaml: None,
        sample_dir: None,
        loop_mode: None,
    };
    for (key, v) in keys_of(map, "generator")? {
        let path = format!("generator.{key}");
        match key.as_str() {
            "kind" => section.kind = Some(as_str(v, &path)?.to_string()),
            "preset" => section.preset = as_str(v, &path)?.to_string(),
            "sample_dir" => {
                section.sample_dir = Some(resolve_path(as_str(v, &path)?, config_dir))
            }
            "loop" => section.loop_mode = Some(as_str(v, &path)?.to_string()),
            "overrides" => {
                section.overrides_yaml = Some(
                    serde_yaml::to_string(v).map_err(|e| bad(&path, e.to_string()))?,
                )
            }
            _ => return Err(bad(&path, "unknown key")),
        }
    }
    Ok(section)
}

fn parse_render(value: &Value, config_dir: &Path) -> CliResult<RenderSection> {
    let map = as_map(value, "render")?;
    let mut section = RenderSection {
        system: "stereo".to_string(),
        sample_rate: 44_100.0,
        seed: 0,
        encoding: "pcm16".to_string(),
        out: None,
        event_sustain: None,
    };
    for (key, v) in keys_of(map, "render")? {
        let path = format!("render.{key}");
        match key.as_str() {
            "system" => section.system = as_str(v, &path)?.to_string(),
            "sample_rate" => section.sample_rate = as_f64(v, &path)?,
            "seed" => {
                section.seed = v
                    .as_u64()
                    .ok_or_else(|| bad(&path, "expected a non-negative integer"))?
            }
            "encoding" => section.encoding = as_str(v, &path)?.to_string(),
            "out" => section.out = Some(resolve_path(as_str(v, &path)?, config_dir)),
            "event_sustain" => section.event_sustain = Some(as_f64(v, &path)?),
            _ => return Err(bad(&path, "unknown key")),
        }
    }
    Ok(section)
}

/// Relative paths in the config resolve against the config file's directory.
fn resolve_path(raw: &str, config_dir: &Path) -> PathBuf {
    let p = Path::new(raw);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        config_dir.join(p)
    }
}

/// Parse a job configuration file.
pub fn load_job(path: &Path) -> CliResult<JobConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let config_dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    parse_job(&text, &config_dir)
}

pub fn parse_job(text: &str, config_dir: &Path) -> CliResult<JobConfig> {
    let value: Value =
        serde_yaml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    let map = as_map(&value, "<root>")?;
    let mut source = None;
    let mut score = None;
    let mut generator = None;
    let mut render = None;
    for (key, v) in keys_of(map, "<root>")? {
        match key.as_str() {
            "source" => source = Some(parse_source(v)?),
            "score" => score = Some(parse_score(v)?),
            "generator" => generator = Some(parse_generator(v, config_dir)?),
            "render" => render = Some(parse_render(v, config_dir)?),
            other => return Err(bad(other, "unknown top-level key")),
        }
    }
    Ok(JobConfig {
        source: source.ok_or_else(|| bad("source", "missing section"))?,
        score: score.ok_or_else(|| bad("score", "missing section"))?,
        generator: generator.unwrap_or(GeneratorSection {
            kind: None,
            preset: "default".to_string(),
            overrides_yaml: None,
            sample_dir: None,
            loop_mode: None,
        }),
        render: render.unwrap_or(RenderSection {
            system: "stereo".to_string(),
            sample_rate: 44_100.0,
            seed: 0,
            encoding: "pcm16".to_string(),
            out: None,
            event_sustain: None,
        }),
    })
}
