//! Named generator configurations.
//!
//! Presets are nested YAML documents validated against a strict schema:
//! unknown keys are rejected with the offending path, values are
//! type-checked and range-checked, and boolean fields accept the YAML 1.1
//! spellings (`on`/`off`/`yes`/`no`) alongside `true`/`false`. Three presets
//! ship embedded in the binary: `default`, `pitch_mapper` and `windy`.

use std::path::Path;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::generator::{
    EnvelopeSpec, FilterSpec, GeneratorConfig, GeneratorKind, LfoSpec, LoopMode, OscillatorForm,
    OscillatorSpec, Phase,
};

const BUILTIN_DEFAULT: &str = include_str!("../presets/default.yaml");
const BUILTIN_PITCH_MAPPER: &str = include_str!("../presets/pitch_mapper.yaml");
const BUILTIN_WINDY: &str = include_str!("../presets/windy.yaml");

/// Names of the embedded presets.
pub const BUILTIN_NAMES: [&str; 3] = ["default", "pitch_mapper", "windy"];

/// A validated preset value.
#[derive(Debug, Clone, PartialEq)]
pub enum PresetValue {
    Bool(bool),
    Number(f64),
    Text(String),
    Map(IndexMap<String, PresetValue>),
}

impl PresetValue {
    pub fn number(&self) -> Option<f64> {
        match self {
            PresetValue::Number(x) => Some(*x),
            _ => None,
        }
    }

    pub fn text(&self) -> Option<&str> {
        match self {
            PresetValue::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_map(&self) -> Option<&IndexMap<String, PresetValue>> {
        match self {
            PresetValue::Map(m) => Some(m),
            _ => None,
        }
    }
}

/// A validated, normalized preset document.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetTree {
    root: IndexMap<String, PresetValue>,
}

fn preset_err(path: &str, reason: impl Into<String>) -> Error {
    Error::Preset {
        path: path.to_string(),
        reason: reason.into(),
    }
}

fn yaml_to_value(value: &serde_yaml::Value, path: &str) -> Result<PresetValue> {
    match value {
        serde_yaml::Value::Bool(b) => Ok(PresetValue::Bool(*b)),
        serde_yaml::Value::Number(n) => n
            .as_f64()
            .map(PresetValue::Number)
            .ok_or_else(|| preset_err(path, "number not representable")),
        serde_yaml::Value::String(s) => Ok(PresetValue::Text(s.clone())),
        serde_yaml::Value::Mapping(m) => {
            let mut out = IndexMap::new();
            for (k, v) in m {
                let key = k
                    .as_str()
                    .ok_or_else(|| preset_err(path, "map keys must be strings"))?
                    .to_string();
                let child_path = join(path, &key);
                out.insert(key, yaml_to_value(v, &child_path)?);
            }
            Ok(PresetValue::Map(out))
        }
        serde_yaml::Value::Null => Err(preset_err(path, "null values are not allowed")),
        serde_yaml::Value::Sequence(_) => Err(preset_err(path, "lists are not allowed here")),
        serde_yaml::Value::Tagged(_) => Err(preset_err(path, "tags are not allowed")),
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

// Typed field extraction; every helper normalizes the stored value.

fn coerce_bool(value: &PresetValue, path: &str) -> Result<bool> {
    match value {
        PresetValue::Bool(b) => Ok(*b),
        PresetValue::Text(s) => match s.as_str() {
            "on" | "yes" | "true" => Ok(true),
            "off" | "no" | "false" => Ok(false),
            other => Err(preset_err(path, format!("expected a boolean, got `{other}`"))),
        },
        _ => Err(preset_err(path, "expected a boolean")),
    }
}

fn expect_number(value: &PresetValue, path: &str) -> Result<f64> {
    value
        .number()
        .ok_or_else(|| preset_err(path, "expected a number"))
}

fn check_range(x: f64, lo: f64, hi: f64, path: &str) -> Result<f64> {
    if !x.is_finite() || x < lo || x > hi {
        return Err(preset_err(
            path,
            format!("value {x} outside allowed range {lo}..{hi}"),
        ));
    }
    Ok(x)
}

fn normalize_phase(value: &PresetValue, path: &str) -> Result<PresetValue> {
    match value {
        PresetValue::Number(x) if x.is_finite() => Ok(PresetValue::Number(*x)),
        PresetValue::Text(s) if s == "random" => Ok(PresetValue::Text("random".into())),
        _ => Err(preset_err(path, "expected radians or the token `random`")),
    }
}

fn normalize_form(value: &PresetValue, path: &str) -> Result<PresetValue> {
    let name = value
        .text()
        .ok_or_else(|| preset_err(path, "expected a waveform name"))?;
    OscillatorForm::parse(name).map_err(|e| preset_err(path, e.to_string()))?;
    Ok(PresetValue::Text(name.to_string()))
}

fn num_field(lo: f64, hi: f64) -> impl Fn(&PresetValue, &str) -> Result<PresetValue> {
    move |v, p| {
        let x = expect_number(v, p)?;
        check_range(x, lo, hi, p)?;
        Ok(PresetValue::Number(x))
    }
}

type FieldCheck<'a> = &'a dyn Fn(&PresetValue, &str) -> Result<PresetValue>;

/// Validate a flat block of typed fields, rejecting unknown keys.
fn validate_block(
    map: &IndexMap<String, PresetValue>,
    path: &str,
    fields: &[(&str, FieldCheck)],
) -> Result<IndexMap<String, PresetValue>> {
    let mut out = IndexMap::new();
    for (key, value) in map {
        let field_path = join(path, key);
        let checker = fields
            .iter()
            .find(|(name, _)| name == key)
            .map(|(_, f)| f)
            .ok_or_else(|| preset_err(&field_path, "unknown key"))?;
        out.insert(key.clone(), checker(value, &field_path)?);
    }
    Ok(out)
}

fn validate_envelope_block(
    map: &IndexMap<String, PresetValue>,
    path: &str,
) -> Result<IndexMap<String, PresetValue>> {
    let time = num_field(0.0, f64::INFINITY);
    let sustain = num_field(0.0, 1.0);
    let curve = |v: &PresetValue, p: &str| {
        let x = expect_number(v, p)?;
        if !x.is_finite() || x <= -1.0 {
            return Err(preset_err(p, format!("curvature must be > -1, got {x}")));
        }
        Ok(PresetValue::Number(x))
    };
    validate_block(
        map,
        path,
        &[
            ("A", &time),
            ("D", &time),
            ("S", &sustain),
            ("R", &time),
            ("Ac", &curve),
            ("Dc", &curve),
            ("Rc", &curve),
        ],
    )
}

fn validate_lfo_block(
    map: &IndexMap<String, PresetValue>,
    path: &str,
) -> Result<IndexMap<String, PresetValue>> {
    let boolean = |v: &PresetValue, p: &str| coerce_bool(v, p).map(PresetValue::Bool);
    let nonneg = num_field(0.0, f64::INFINITY);
    let unit = num_field(0.0, 1.0);
    let any = num_field(f64::NEG_INFINITY, f64::INFINITY);
    let time = num_field(0.0, f64::INFINITY);
    let curve = |v: &PresetValue, p: &str| {
        let x = expect_number(v, p)?;
        if !x.is_finite() || x <= -1.0 {
            return Err(preset_err(p, format!("curvature must be > -1, got {x}")));
        }
        Ok(PresetValue::Number(x))
    };
    let out = validate_block(
        map,
        path,
        &[
            ("use", &boolean),
            ("wave", &(normalize_form as fn(&PresetValue, &str) -> _)),
            ("amount", &nonneg),
            ("freq", &nonneg),
            ("freq_shift", &any),
            ("phase", &(normalize_phase as fn(&PresetValue, &str) -> _)),
            ("A", &time),
            ("D", &time),
            ("S", &unit),
            ("R", &time),
            ("Ac", &curve),
            ("Dc", &curve),
            ("Rc", &curve),
            ("level", &unit),
        ],
    )?;
    let in_use = out
        .get("use")
        .map(|v| matches!(v, PresetValue::Bool(true)))
        .unwrap_or(false);
    if in_use {
        let freq = out.get("freq").and_then(|v| v.number()).unwrap_or(3.0);
        if freq <= 0.0 {
            return Err(preset_err(
                &join(path, "freq"),
                "must be > 0 when the LFO is in use",
            ));
        }
    }
    Ok(out)
}

fn validate_oscillators(
    map: &IndexMap<String, PresetValue>,
    path: &str,
) -> Result<IndexMap<String, PresetValue>> {
    if map.is_empty() {
        return Err(preset_err(path, "needs at least one oscillator"));
    }
    let mut out = IndexMap::new();
    for (key, value) in map {
        let osc_path = join(path, key);
        let index_ok = key
            .strip_prefix("osc")
            .and_then(|s| s.parse::<u32>().ok())
            .is_some_and(|n| n >= 1);
        if !index_ok {
            return Err(preset_err(&osc_path, "oscillators are named osc1, osc2, ..."));
        }
        let block = value
            .as_map()
            .ok_or_else(|| preset_err(&osc_path, "expected a map"))?;
        let unit = num_field(0.0, 1.0);
        let any = num_field(f64::NEG_INFINITY, f64::INFINITY);
        let validated = validate_block(
            block,
            &osc_path,
            &[
                ("form", &(normalize_form as fn(&PresetValue, &str) -> _)),
                ("level", &unit),
                ("detune", &any),
                ("phase", &(normalize_phase as fn(&PresetValue, &str) -> _)),
            ],
        )?;
        if !validated.contains_key("form") {
            return Err(preset_err(&join(&osc_path, "form"), "missing waveform"));
        }
        out.insert(key.clone(), PresetValue::Map(validated));
    }
    Ok(out)
}

/// Validate and normalize a raw document against the preset schema.
fn validate_root(map: &IndexMap<String, PresetValue>) -> Result<IndexMap<String, PresetValue>> {
    let mut out = IndexMap::new();
    for (key, value) in map {
        let path = key.clone();
        let normalized = match key.as_str() {
            "name" | "description" => PresetValue::Text(
                value
                    .text()
                    .ok_or_else(|| preset_err(&path, "expected a string"))?
                    .to_string(),
            ),
            "kind" => {
                let k = value
                    .text()
                    .ok_or_else(|| preset_err(&path, "expected a generator kind"))?;
                match k {
                    "synthesiser" | "sampler" | "spectraliser" => {
                        PresetValue::Text(k.to_string())
                    }
                    other => {
                        return Err(preset_err(
                            &path,
                            format!("unknown generator kind `{other}`"),
                        ))
                    }
                }
            }
            "oscillators" => {
                let m = value
                    .as_map()
                    .ok_or_else(|| preset_err(&path, "expected a map of oscillators"))?;
                PresetValue::Map(validate_oscillators(m, &path)?)
            }
            "envelope" => {
                let m = value
                    .as_map()
                    .ok_or_else(|| preset_err(&path, "expected an envelope map"))?;
                PresetValue::Map(validate_envelope_block(m, &path)?)
            }
            "volume_lfo" | "pitch_lfo" => {
                let m = value
                    .as_map()
                    .ok_or_else(|| preset_err(&path, "expected an LFO map"))?;
                PresetValue::Map(validate_lfo_block(m, &path)?)
            }
            "filter" => {
                let m = value
                    .as_map()
                    .ok_or_else(|| preset_err(&path, "expected a filter map"))?;
                let boolean = |v: &PresetValue, p: &str| coerce_bool(v, p).map(PresetValue::Bool);
                let unit = num_field(0.0, 1.0);
                PresetValue::Map(validate_block(
                    m,
                    &path,
                    &[("use", &boolean), ("cutoff", &unit)],
                )?)
            }
            "volume" | "pitch" => {
                let x = expect_number(value, &path)?;
                PresetValue::Number(check_range(x, 0.0, 1.0, &path)?)
            }
            "spectraliser" => {
                let m = value
                    .as_map()
                    .ok_or_else(|| preset_err(&path, "expected a spectraliser map"))?;
                let pos = num_field(f64::MIN_POSITIVE, f64::INFINITY);
                let block = validate_block(
                    m,
                    &path,
                    &[("min_freq", &pos), ("max_freq", &pos)],
                )?;
                let lo = block.get("min_freq").and_then(|v| v.number());
                let hi = block.get("max_freq").and_then(|v| v.number());
                if let (Some(lo), Some(hi)) = (lo, hi) {
                    if lo >= hi {
                        return Err(preset_err(&path, "min_freq must be below max_freq"));
                    }
                }
                PresetValue::Map(block)
            }
            "sampler" => {
                let m = value
                    .as_map()
                    .ok_or_else(|| preset_err(&path, "expected a sampler map"))?;
                let loop_mode = |v: &PresetValue, p: &str| {
                    let s = v
                        .text()
                        .ok_or_else(|| preset_err(p, "expected a loop mode"))?;
                    LoopMode::parse(s).map_err(|e| preset_err(p, e.to_string()))?;
                    Ok(PresetValue::Text(s.to_string()))
                };
                PresetValue::Map(validate_block(m, &path, &[("loop", &loop_mode)])?)
            }
            _ => return Err(preset_err(&path, "unknown key")),
        };
        out.insert(key.clone(), normalized);
    }
    Ok(out)
}

impl PresetTree {
    /// Parse and validate a YAML preset document.
    pub fn parse(yaml: &str) -> Result<Self> {
        let value: serde_yaml::Value = serde_yaml::from_str(yaml).map_err(|e| {
            preset_err(
                &e.location()
                    .map(|l| format!("line {}, column {}", l.line(), l.column()))
                    .unwrap_or_default(),
                e.to_string(),
            )
        })?;
        let root = match yaml_to_value(&value, "")? {
            PresetValue::Map(m) => m,
            _ => return Err(preset_err("", "preset must be a map")),
        };
        Ok(Self {
            root: validate_root(&root)?,
        })
    }

    pub fn name(&self) -> &str {
        self.root
            .get("name")
            .and_then(|v| v.text())
            .unwrap_or_default()
    }

    pub fn description(&self) -> &str {
        self.root
            .get("description")
            .and_then(|v| v.text())
            .unwrap_or_default()
    }

    pub fn root(&self) -> &IndexMap<String, PresetValue> {
        &self.root
    }

    /// Look up a dotted path.
    pub fn get_path(&self, path: &str) -> Option<&PresetValue> {
        let mut current: Option<&PresetValue> = None;
        let mut map = &self.root;
        for part in path.split('.') {
            current = map.get(part);
            match current {
                Some(PresetValue::Map(m)) => map = m,
                Some(_) => {}
                None => return None,
            }
        }
        current
    }

    /// Serialize to canonical YAML (bool and number forms normalized).
    pub fn to_yaml(&self) -> String {
        fn emit(value: &PresetValue) -> serde_yaml::Value {
            match value {
                PresetValue::Bool(b) => serde_yaml::Value::Bool(*b),
                PresetValue::Number(x) => serde_yaml::Value::Number((*x).into()),
                PresetValue::Text(s) => serde_yaml::Value::String(s.clone()),
                PresetValue::Map(m) => {
                    let mut out = serde_yaml::Mapping::new();
                    for (k, v) in m {
                        out.insert(serde_yaml::Value::String(k.clone()), emit(v));
                    }
                    serde_yaml::Value::Mapping(out)
                }
            }
        }
        serde_yaml::to_string(&emit(&PresetValue::Map(self.root.clone())))
            .expect("preset trees always serialize")
    }
}

/// Load a preset: a builtin name (`default`, `pitch_mapper`, `windy`) or a
/// readable YAML file path.
pub fn load_preset(source: &str) -> Result<PresetTree> {
    match source {
        "default" => PresetTree::parse(BUILTIN_DEFAULT),
        "pitch_mapper" => PresetTree::parse(BUILTIN_PITCH_MAPPER),
        "windy" => PresetTree::parse(BUILTIN_WINDY),
        other => {
            let path = Path::new(other);
            if path.exists() {
                let text = std::fs::read_to_string(path)?;
                PresetTree::parse(&text)
            } else {
                Err(Error::UnknownPreset(other.to_string()))
            }
        }
    }
}

fn deep_merge(
    base: &IndexMap<String, PresetValue>,
    overrides: &IndexMap<String, PresetValue>,
) -> IndexMap<String, PresetValue> {
    let mut out = base.clone();
    for (key, value) in overrides {
        match (out.get(key), value) {
            (Some(PresetValue::Map(b)), PresetValue::Map(o)) => {
                out.insert(key.clone(), PresetValue::Map(deep_merge(b, o)));
            }
            _ => {
                out.insert(key.clone(), value.clone());
            }
        }
    }
    out
}

/// Deep-merge overrides into a preset; override leaves win and the result
/// is re-validated against the schema.
pub fn merge_overrides(
    base: &PresetTree,
    overrides: &IndexMap<String, PresetValue>,
) -> Result<PresetTree> {
    let merged = deep_merge(&base.root, overrides);
    Ok(PresetTree {
        root: validate_root(&merged)?,
    })
}

/// Parse a YAML fragment into an override map.
pub fn parse_overrides(yaml: &str) -> Result<IndexMap<String, PresetValue>> {
    let value: serde_yaml::Value =
        serde_yaml::from_str(yaml).map_err(|e| preset_err("", e.to_string()))?;
    match yaml_to_value(&value, "")? {
        PresetValue::Map(m) => Ok(m),
        _ => Err(preset_err("", "overrides must be a map")),
    }
}

/// Leaves of `target` that differ from (or are missing in) `base`.
pub fn diff(base: &PresetTree, target: &PresetTree) -> IndexMap<String, PresetValue> {
    fn walk(
        base: Option<&IndexMap<String, PresetValue>>,
        target: &IndexMap<String, PresetValue>,
    ) -> IndexMap<String, PresetValue> {
        let mut out = IndexMap::new();
        for (key, value) in target {
            let base_value = base.and_then(|m| m.get(key));
            match value {
                PresetValue::Map(tm) => {
                    let sub = walk(base_value.and_then(|v| v.as_map()), tm);
                    if !sub.is_empty() {
                        out.insert(key.clone(), PresetValue::Map(sub));
                    }
                }
                leaf => {
                    if base_value != Some(leaf) {
                        out.insert(key.clone(), leaf.clone());
                    }
                }
            }
        }
        out
    }
    walk(Some(&base.root), &target.root)
}

// compile helpers

fn block<'a>(
    root: &'a IndexMap<String, PresetValue>,
    key: &str,
) -> Option<&'a IndexMap<String, PresetValue>> {
    root.get(key).and_then(|v| v.as_map())
}

fn num_or(map: Option<&IndexMap<String, PresetValue>>, key: &str, fallback: f64) -> f64 {
    map.and_then(|m| m.get(key))
        .and_then(|v| v.number())
        .unwrap_or(fallback)
}

fn bool_or(map: Option<&IndexMap<String, PresetValue>>, key: &str, fallback: bool) -> bool {
    map.and_then(|m| m.get(key))
        .map(|v| matches!(v, PresetValue::Bool(true)))
        .unwrap_or(fallback)
}

fn phase_or(map: Option<&IndexMap<String, PresetValue>>, key: &str, fallback: Phase) -> Phase {
    match map.and_then(|m| m.get(key)) {
        Some(PresetValue::Number(x)) => Phase::Radians(*x),
        Some(PresetValue::Text(_)) => Phase::Random,
        _ => fallback,
    }
}

fn envelope_from(map: Option<&IndexMap<String, PresetValue>>, default: EnvelopeSpec) -> EnvelopeSpec {
    EnvelopeSpec {
        attack: num_or(map, "A", default.attack),
        decay: num_or(map, "D", default.decay),
        sustain: num_or(map, "S", default.sustain),
        release: num_or(map, "R", default.release),
        attack_curve: num_or(map, "Ac", default.attack_curve),
        decay_curve: num_or(map, "Dc", default.decay_curve),
        release_curve: num_or(map, "Rc", default.release_curve),
    }
}

fn lfo_from(map: Option<&IndexMap<String, PresetValue>>) -> LfoSpec {
    let stock = LfoSpec::default();
    LfoSpec {
        use_lfo: bool_or(map, "use", stock.use_lfo),
        wave: map
            .and_then(|m| m.get("wave"))
            .and_then(|v| v.text())
            .and_then(|s| OscillatorForm::parse(s).ok())
            .unwrap_or(stock.wave),
        amount: num_or(map, "amount", stock.amount),
        freq: num_or(map, "freq", stock.freq),
        freq_shift: num_or(map, "freq_shift", stock.freq_shift),
        phase: phase_or(map, "phase", stock.phase),
        envelope: envelope_from(map, stock.envelope),
        level: num_or(map, "level", stock.level),
    }
}

/// Compile a validated preset into a [`GeneratorConfig`], filling defaults
/// for everything the document leaves unset.
pub fn compile(tree: &PresetTree) -> Result<GeneratorConfig> {
    let root = &tree.root;
    let kind = match root.get("kind").and_then(|v| v.text()) {
        Some("sampler") => GeneratorKind::Sampler,
        Some("spectraliser") => GeneratorKind::Spectraliser,
        _ => GeneratorKind::Synthesiser,
    };

    let mut oscillators = Vec::new();
    if let Some(oscs) = block(root, "oscillators") {
        let mut ordered: Vec<(&String, &PresetValue)> = oscs.iter().collect();
        ordered.sort_by_key(|(name, _)| {
            name.strip_prefix("osc")
                .and_then(|s| s.parse::<u32>().ok())
                .unwrap_or(u32::MAX)
        });
        for (_, value) in ordered {
            let osc = value.as_map();
            let form = osc
                .and_then(|m| m.get("form"))
                .and_then(|v| v.text())
                .map(OscillatorForm::parse)
                .transpose()?
                .unwrap_or(OscillatorForm::Sine);
            oscillators.push(OscillatorSpec::new(
                form,
                num_or(osc, "level", 1.0),
                num_or(osc, "detune", 0.0),
                phase_or(osc, "phase", Phase::Radians(0.0)),
            ));
        }
    } else {
        oscillators.push(OscillatorSpec::new(
            OscillatorForm::Sine,
            1.0,
            0.0,
            Phase::Radians(0.0),
        ));
    }

    let filter = block(root, "filter").and_then(|m| {
        bool_or(Some(m), "use", true).then(|| FilterSpec {
            cutoff: num_or(Some(m), "cutoff", 1.0),
        })
    });

    let spectral = block(root, "spectraliser");
    let cfg = GeneratorConfig {
        kind,
        oscillators,
        envelope: envelope_from(block(root, "envelope"), EnvelopeSpec::default()),
        volume_lfo: lfo_from(block(root, "volume_lfo")),
        pitch_lfo: lfo_from(block(root, "pitch_lfo")),
        filter,
        master_volume: num_or(Some(root), "volume", 1.0),
        default_pitch: num_or(Some(root), "pitch", 1.0),
        spectral_range: (
            num_or(spectral, "min_freq", 20.0),
            num_or(spectral, "max_freq", 16_000.0),
        ),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// The loop mode named by the preset's sampler block, if any.
pub fn sampler_loop_mode(tree: &PresetTree) -> LoopMode {
    block(&tree.root, "sampler")
        .and_then(|m| m.get("loop"))
        .and_then(|v| v.text())
        .and_then(|s| LoopMode::parse(s).ok())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_preset_matches_printed_values() {
        let tree = load_preset("default").unwrap();
        assert_eq!(tree.name(), "default");
        let cfg = compile(&tree).unwrap();
        assert_eq!(cfg.kind, GeneratorKind::Synthesiser);
        assert_eq!(cfg.oscillators.len(), 3);
        assert_eq!(cfg.oscillators[0].form, OscillatorForm::Saw);
        assert_eq!(cfg.oscillators[0].level, 1.0);
        assert_eq!(cfg.oscillators[1].level, 0.5);
        assert_eq!(cfg.oscillators[1].detune, -2.0);
        assert_eq!(cfg.oscillators[2].detune, 2.0);
        assert_eq!(cfg.volume_lfo.freq, 3.0);
        assert_eq!(cfg.volume_lfo.amount, 0.5);
        assert!(!cfg.volume_lfo.use_lfo);
        assert_eq!(cfg.master_volume, 1.0);
        assert_eq!(cfg.default_pitch, 1.0);
    }

    #[test]
    fn pitch_mapper_is_a_plain_triangle() {
        let cfg = compile(&load_preset("pitch_mapper").unwrap()).unwrap();
        assert_eq!(cfg.oscillators.len(), 1);
        assert_eq!(cfg.oscillators[0].form, OscillatorForm::Tri);
        assert!(!cfg.volume_lfo.use_lfo);
        assert!(!cfg.pitch_lfo.use_lfo);
        assert!(cfg.filter.is_none());
    }

    #[test]
    fn windy_is_filtered_noise() {
        let cfg = compile(&load_preset("windy").unwrap()).unwrap();
        assert_eq!(cfg.oscillators[0].form, OscillatorForm::Noise);
        let filter = cfg.filter.expect("windy enables the filter");
        assert_eq!(filter.cutoff, 0.5);
    }

    #[test]
    fn unknown_keys_rejected_with_path() {
        let err = PresetTree::parse("oscillators:\n  osc1:\n    form: 'saw'\n    wobble: 3\n")
            .unwrap_err();
        match err {
            Error::Preset { path, .. } => assert_eq!(path, "oscillators.osc1.wobble"),
            other => panic!("unexpected error {other:?}"),
        }
        let err = PresetTree::parse("volume: 1.\nrevrb: on\n").unwrap_err();
        match err {
            Error::Preset { path, .. } => assert_eq!(path, "revrb"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn out_of_range_values_rejected() {
        assert!(PresetTree::parse("volume: 1.5\n").is_err());
        assert!(PresetTree::parse("oscillators:\n  osc1:\n    form: 'saw'\n    level: 2.0\n").is_err());
        assert!(PresetTree::parse("volume_lfo:\n  use: on\n  freq: 0\n").is_err());
        assert!(PresetTree::parse("oscillators:\n  osc1:\n    form: 'wurble'\n").is_err());
    }

    #[test]
    fn yaml_1_1_booleans_accepted() {
        let tree = PresetTree::parse("volume_lfo:\n  use: off\n").unwrap();
        let cfg = compile(&tree).unwrap();
        assert!(!cfg.volume_lfo.use_lfo);
        let tree = PresetTree::parse("filter:\n  use: on\n  cutoff: 0.3\n").unwrap();
        let cfg = compile(&tree).unwrap();
        assert_eq!(cfg.filter.unwrap().cutoff, 0.3);
    }

    #[test]
    fn empty_overrides_are_identity() {
        let base = load_preset("default").unwrap();
        let merged = merge_overrides(&base, &IndexMap::new()).unwrap();
        assert_eq!(base, merged);
    }

    #[test]
    fn single_leaf_override() {
        let base = load_preset("default").unwrap();
        let overrides = parse_overrides("volume: 0.5\n").unwrap();
        let merged = merge_overrides(&base, &overrides).unwrap();
        let d = diff(&base, &merged);
        assert_eq!(d.len(), 1);
        assert_eq!(d.get("volume"), Some(&PresetValue::Number(0.5)));
        assert_eq!(compile(&merged).unwrap().master_volume, 0.5);
    }

    #[test]
    fn invalid_override_path_rejected() {
        let base = load_preset("default").unwrap();
        let overrides = parse_overrides("oscillators:\n  osc1:\n    colour: 7\n").unwrap();
        assert!(merge_overrides(&base, &overrides).is_err());
    }

    #[test]
    fn all_builtins_load_and_compile() {
        for name in BUILTIN_NAMES {
            let tree = load_preset(name).unwrap();
            assert_eq!(tree.name(), name);
            assert!(!tree.description().is_empty());
            compile(&tree).unwrap();
        }
        assert!(load_preset("does_not_exist").is_err());
    }

    #[test]
    fn serialize_load_is_a_fixed_point() {
        for name in BUILTIN_NAMES {
            let tree = load_preset(name).unwrap();
            let text = tree.to_yaml();
            let reloaded = PresetTree::parse(&text).unwrap();
            assert_eq!(tree, reloaded, "{name} did not round-trip");
            assert_eq!(reloaded.to_yaml(), text);
        }
    }

    #[test]
    fn merge_of_diff_recovers_target() {
        let base = load_preset("default").unwrap();
        let target = merge_overrides(
            &base,
            &parse_overrides("volume: 0.7\noscillators:\n  osc2:\n    detune: -3.\n").unwrap(),
        )
        .unwrap();
        let merged = merge_overrides(&base, &diff(&base, &target)).unwrap();
        assert_eq!(merged, target);
    }

    #[test]
    fn compile_is_idempotent() {
        let tree = load_preset("default").unwrap();
        assert_eq!(compile(&tree).unwrap(), compile(&tree).unwrap());
    }

    #[test]
    fn get_path_walks_nested_maps() {
        let tree = load_preset("default").unwrap();
        assert_eq!(
            tree.get_path("oscillators.osc2.level"),
            Some(&PresetValue::Number(0.5))
        );
        assert!(tree.get_path("oscillators.osc9").is_none());
    }

    #[test]
    fn sampler_block_names_the_loop_mode() {
        let tree =
            PresetTree::parse("kind: sampler\nsampler:\n  loop: pingpong\n").unwrap();
        assert_eq!(sampler_loop_mode(&tree), LoopMode::PingPong);
        assert_eq!(compile(&tree).unwrap().kind, GeneratorKind::Sampler);
        // Defaults to off when absent.
        assert_eq!(sampler_loop_mode(&load_preset("default").unwrap()), LoopMode::Off);
        assert!(PresetTree::parse("sampler:\n  loop: bounce\n").is_err());
    }
}
