//! Sound sources and data-to-parameter mapping.
//!
//! Data enters the engine as a column-oriented [`Table`]. Each column can be
//! bound to a sound parameter through a [`Mapping`], which rescales the data
//! range (given as percentiles or in data units) onto an explicit parameter
//! range. Discrete rows become an [`EventSet`]; a whole series becomes a
//! single time-evolving [`ObjectSource`].

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A sound parameter that data can be mapped onto.
///
/// `mappable` parameters take one value per source; `evolvable` parameters
/// can additionally be driven by a time series on an object source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ParameterId {
    Polar,
    Azimuth,
    Volume,
    Pitch,
    Time,
    Cutoff,
    TimeEvo,
    Spectrum,
    PitchShift,
    EnvelopeAttack,
    EnvelopeDecay,
    EnvelopeSustain,
    EnvelopeRelease,
    VolumeLfoFreq,
    VolumeLfoFreqShift,
    VolumeLfoAmount,
    PitchLfoFreq,
    PitchLfoFreqShift,
    PitchLfoAmount,
}

impl ParameterId {
    /// All parameters, in table order.
    pub const ALL: [ParameterId; 19] = [
        ParameterId::Polar,
        ParameterId::Azimuth,
        ParameterId::Volume,
        ParameterId::Pitch,
        ParameterId::Time,
        ParameterId::Cutoff,
        ParameterId::TimeEvo,
        ParameterId::Spectrum,
        ParameterId::PitchShift,
        ParameterId::EnvelopeAttack,
        ParameterId::EnvelopeDecay,
        ParameterId::EnvelopeSustain,
        ParameterId::EnvelopeRelease,
        ParameterId::VolumeLfoFreq,
        ParameterId::VolumeLfoFreqShift,
        ParameterId::VolumeLfoAmount,
        ParameterId::PitchLfoFreq,
        ParameterId::PitchLfoFreqShift,
        ParameterId::PitchLfoAmount,
    ];

    /// Canonical name, as used in config files.
    pub fn name(self) -> &'static str {
        match self {
            ParameterId::Polar => "polar",
            ParameterId::Azimuth => "azimuth",
            ParameterId::Volume => "volume",
            ParameterId::Pitch => "pitch",
            ParameterId::Time => "time",
            ParameterId::Cutoff => "cutoff",
            ParameterId::TimeEvo => "time_evo",
            ParameterId::Spectrum => "spectrum",
            ParameterId::PitchShift => "pitch_shift",
            ParameterId::EnvelopeAttack => "volume_envelope/A",
            ParameterId::EnvelopeDecay => "volume_envelope/D",
            ParameterId::EnvelopeSustain => "volume_envelope/S",
            ParameterId::EnvelopeRelease => "volume_envelope/R",
            ParameterId::VolumeLfoFreq => "volume_lfo/freq",
            ParameterId::VolumeLfoFreqShift => "volume_lfo/freq_shift",
            ParameterId::VolumeLfoAmount => "volume_lfo/amount",
            ParameterId::PitchLfoFreq => "pitch_lfo/freq",
            ParameterId::PitchLfoFreqShift => "pitch_lfo/freq_shift",
            ParameterId::PitchLfoAmount => "pitch_lfo/amount",
        }
    }

    /// Parse a canonical parameter name.
    pub fn parse(name: &str) -> Result<Self> {
        ParameterId::ALL
            .iter()
            .copied()
            .find(|p| p.name() == name)
            .ok_or_else(|| Error::InvalidParameter {
                param: name.to_string(),
                reason: "is not a recognised source parameter".to_string(),
            })
    }

    /// Whether the parameter can be set once per source.
    pub fn mappable(self) -> bool {
        !matches!(self, ParameterId::TimeEvo)
    }

    /// Whether the parameter can be driven by a time series on an object.
    pub fn evolvable(self) -> bool {
        matches!(
            self,
            ParameterId::Polar
                | ParameterId::Azimuth
                | ParameterId::Volume
                | ParameterId::Cutoff
                | ParameterId::TimeEvo
                | ParameterId::PitchShift
                | ParameterId::VolumeLfoFreqShift
                | ParameterId::VolumeLfoAmount
                | ParameterId::PitchLfoFreqShift
                | ParameterId::PitchLfoAmount
        )
    }

    /// Legal value domain (inclusive). Unbounded parameters return infinities.
    pub fn domain(self) -> (f64, f64) {
        match self {
            ParameterId::Polar => (0.0, PI),
            ParameterId::Azimuth => (0.0, 2.0 * PI),
            ParameterId::Volume
            | ParameterId::Pitch
            | ParameterId::Time
            | ParameterId::Cutoff
            | ParameterId::TimeEvo
            | ParameterId::EnvelopeSustain => (0.0, 1.0),
            ParameterId::Spectrum => (0.0, f64::INFINITY),
            ParameterId::PitchShift
            | ParameterId::VolumeLfoFreqShift
            | ParameterId::PitchLfoFreqShift => (f64::NEG_INFINITY, f64::INFINITY),
            ParameterId::EnvelopeAttack
            | ParameterId::EnvelopeDecay
            | ParameterId::EnvelopeRelease
            | ParameterId::VolumeLfoFreq
            | ParameterId::VolumeLfoAmount
            | ParameterId::PitchLfoFreq
            | ParameterId::PitchLfoAmount => (0.0, f64::INFINITY),
        }
    }

    /// Default value for a parameter left unmapped on a source.
    ///
    /// `None` means the generator preset decides (envelope and LFO fields).
    pub fn default_value(self) -> Option<f64> {
        match self {
            ParameterId::Azimuth => Some(0.0),
            ParameterId::Polar => Some(PI / 2.0),
            ParameterId::Volume => Some(1.0),
            ParameterId::Pitch => Some(0.5),
            ParameterId::Time => Some(0.0),
            ParameterId::Cutoff => Some(1.0),
            ParameterId::PitchShift => Some(0.0),
            _ => None,
        }
    }

    /// Default mapping target range, where the domain is bounded.
    ///
    /// Unbounded parameters (pitch shift, LFO rates) have no sensible full
    /// range and require explicit limits.
    pub fn default_param_range(self) -> Option<(f64, f64)> {
        let (lo, hi) = self.domain();
        (lo.is_finite() && hi.is_finite()).then_some((lo, hi))
    }
}

/// How a data range is resolved before rescaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitMode {
    /// `lo`/`hi` are percentiles (0-100) of the mapped column.
    Percentile,
    /// `lo`/`hi` are literal data values.
    DataUnits,
}

/// Data-to-parameter rescaling limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapLimits {
    pub mode: LimitMode,
    pub lo: f64,
    pub hi: f64,
    pub param_lo: f64,
    pub param_hi: f64,
}

impl MapLimits {
    /// Full data range (percentiles 0-100) onto `[param_lo, param_hi]`.
    pub fn full_range(param_lo: f64, param_hi: f64) -> Self {
        Self {
            mode: LimitMode::Percentile,
            lo: 0.0,
            hi: 100.0,
            param_lo,
            param_hi,
        }
    }

    pub fn percentile(lo: f64, hi: f64, param_lo: f64, param_hi: f64) -> Self {
        Self {
            mode: LimitMode::Percentile,
            lo,
            hi,
            param_lo,
            param_hi,
        }
    }

    pub fn data_units(lo: f64, hi: f64, param_lo: f64, param_hi: f64) -> Self {
        Self {
            mode: LimitMode::DataUnits,
            lo,
            hi,
            param_lo,
            param_hi,
        }
    }

    /// Validate internal consistency (mode constraints, ordered ranges).
    pub fn validate(&self) -> Result<()> {
        if !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::InvalidLimits("limits must be finite".into()));
        }
        match self.mode {
            LimitMode::Percentile => {
                if !(0.0..=100.0).contains(&self.lo)
                    || !(0.0..=100.0).contains(&self.hi)
                    || self.lo >= self.hi
                {
                    return Err(Error::InvalidLimits(format!(
                        "percentile limits must satisfy 0 <= lo < hi <= 100, got {}..{}",
                        self.lo, self.hi
                    )));
                }
            }
            LimitMode::DataUnits => {
                if self.lo > self.hi {
                    return Err(Error::InvalidLimits(format!(
                        "data-unit limits must satisfy lo <= hi, got {}..{}",
                        self.lo, self.hi
                    )));
                }
            }
        }
        if !(self.param_lo.is_finite() && self.param_hi.is_finite())
            || self.param_lo > self.param_hi
        {
            return Err(Error::InvalidLimits(format!(
                "parameter range must be finite with param_lo <= param_hi, got {}..{}",
                self.param_lo, self.param_hi
            )));
        }
        Ok(())
    }

    /// Validate against the legal domain of `param`.
    pub fn validate_for(&self, param: ParameterId) -> Result<()> {
        self.validate()?;
        let (dlo, dhi) = param.domain();
        if self.param_lo < dlo || self.param_hi > dhi {
            return Err(Error::InvalidLimits(format!(
                "parameter range {}..{} outside legal domain {}..{} of `{}`",
                self.param_lo,
                self.param_hi,
                dlo,
                dhi,
                param.name()
            )));
        }
        Ok(())
    }
}

/// Linear-interpolated percentile with inclusive endpoints.
///
/// `p` in `[0, 100]`; matches the common `numpy.percentile` "linear" method.
pub fn percentile(data: &[f64], p: f64) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyData("percentile of empty array".into()));
    }
    let mut sorted = data.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    Ok(percentile_sorted(&sorted, p))
}

pub(crate) fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let rank = (p / 100.0).clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = rank.floor() as usize;
    let frac = rank - lo as f64;
    if lo + 1 >= n || frac == 0.0 {
        sorted[lo.min(n - 1)]
    } else {
        sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac
    }
}

/// Rescale a data array onto a parameter range.
///
/// The data range `[L, H]` is resolved from `limits` (percentiles of the
/// data, or literal values); each sample is clipped to `[L, H]` and mapped
/// affinely onto `[param_lo, param_hi]`. A degenerate range (`H == L`) maps
/// everything to `param_lo` and logs a warning.
pub fn map_parameter(data: &[f64], limits: &MapLimits) -> Result<Vec<f64>> {
    if data.is_empty() {
        return Err(Error::EmptyData("map_parameter input".into()));
    }
    limits.validate()?;
    let (lo, hi) = match limits.mode {
        LimitMode::Percentile => {
            let mut sorted = data.to_vec();
            sorted.sort_by(|a, b| a.total_cmp(b));
            (
                percentile_sorted(&sorted, limits.lo),
                percentile_sorted(&sorted, limits.hi),
            )
        }
        LimitMode::DataUnits => (limits.lo, limits.hi),
    };
    if hi == lo {
        log::warn!(
            "degenerate data range [{lo}, {hi}]; all values map to param_lo = {}",
            limits.param_lo
        );
        return Ok(vec![limits.param_lo; data.len()]);
    }
    let span = limits.param_hi - limits.param_lo;
    Ok(data
        .iter()
        .map(|&x| {
            let clipped = x.clamp(lo, hi);
            limits.param_lo + (clipped - lo) / (hi - lo) * span
        })
        .collect())
}

/// A column-oriented table of 64-bit reals with header names.
#[derive(Debug, Clone, Default)]
pub struct Table {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append a column; all columns must share one length.
    pub fn push_column(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        if let Some(first) = self.columns.first() {
            if values.len() != first.len() {
                return Err(Error::LengthMismatch {
                    column: name,
                    got: values.len(),
                    expected: first.len(),
                });
            }
        }
        self.names.push(name);
        self.columns.push(values);
        Ok(())
    }

    pub fn from_columns(cols: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let mut t = Self::new();
        for (name, values) in cols {
            t.push_column(name, values)?;
        }
        Ok(t)
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn column_names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }
}

/// One column-to-parameter binding.
#[derive(Debug, Clone)]
pub struct Mapping {
    pub param: ParameterId,
    pub column: String,
    pub limits: MapLimits,
}

impl Mapping {
    pub fn new(param: ParameterId, column: impl Into<String>, limits: MapLimits) -> Self {
        Self {
            param,
            column: column.into(),
            limits,
        }
    }
}

/// Discrete sound triggers: one event per table row.
#[derive(Debug, Clone)]
pub struct EventSet {
    count: usize,
    values: BTreeMap<ParameterId, Vec<f64>>,
    spectra: Option<Vec<Vec<f64>>>,
}

impl EventSet {
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn is_mapped(&self, param: ParameterId) -> bool {
        self.values.contains_key(&param)
    }

    /// Mapped value of `param` for event `index`, if the parameter was mapped.
    pub fn mapped(&self, param: ParameterId, index: usize) -> Option<f64> {
        self.values.get(&param).map(|v| v[index])
    }

    /// Mapped value, falling back to the documented source default.
    ///
    /// `None` means the parameter is unmapped and has no source-level
    /// default (generator preset decides).
    pub fn value(&self, param: ParameterId, index: usize) -> Option<f64> {
        self.mapped(param, index).or_else(|| param.default_value())
    }

    /// Full mapped column for `param`, if present.
    pub fn mapped_column(&self, param: ParameterId) -> Option<&[f64]> {
        self.values.get(&param).map(Vec::as_slice)
    }

    /// Attach one spectrum per event (spectral-synthesis input).
    pub fn with_spectra(mut self, spectra: Vec<Vec<f64>>) -> Result<Self> {
        if spectra.len() != self.count {
            return Err(Error::LengthMismatch {
                column: "spectra".into(),
                got: spectra.len(),
                expected: self.count,
            });
        }
        self.spectra = Some(spectra);
        Ok(self)
    }

    pub fn spectrum(&self, index: usize) -> Option<&[f64]> {
        self.spectra.as_ref().map(|s| s[index].as_slice())
    }
}

/// Build an [`EventSet`] from table columns and mappings.
///
/// Every mapping must target a distinct mappable parameter; `spectrum` is
/// attached as raw arrays via [`EventSet::with_spectra`], never rescaled.
pub fn build_event_set(table: &Table, mappings: &[Mapping]) -> Result<EventSet> {
    if table.rows() == 0 {
        return Err(Error::EmptyData("event table has no rows".into()));
    }
    let mut values = BTreeMap::new();
    for m in mappings {
        if !m.param.mappable() {
            return Err(Error::InvalidParameter {
                param: m.param.name().into(),
                reason: "is not mappable".into(),
            });
        }
        if m.param == ParameterId::Spectrum {
            return Err(Error::InvalidParameter {
                param: m.param.name().into(),
                reason: "is supplied as a raw spectrum array, not a value mapping".into(),
            });
        }
        m.limits.validate_for(m.param)?;
        let column = table.column(&m.column)?;
        if column.len() != table.rows() {
            return Err(Error::LengthMismatch {
                column: m.column.clone(),
                got: column.len(),
                expected: table.rows(),
            });
        }
        let mapped = map_parameter(column, &m.limits)?;
        if values.insert(m.param, mapped).is_some() {
            return Err(Error::DuplicateMapping(m.param.name().into()));
        }
    }
    Ok(EventSet {
        count: table.rows(),
        values,
        spectra: None,
    })
}

/// A sampled evolution over normalized time `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Evolution {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl Evolution {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::BufferMismatch(format!(
                "evolution grid has {} times and {} values",
                times.len(),
                values.len()
            )));
        }
        for i in 1..times.len() {
            if times[i] <= times[i - 1] {
                return Err(Error::NonMonotonicTime(i - 1, i));
            }
        }
        Ok(Self { times, values })
    }

    /// Linear interpolation, clamped to the end values outside the grid.
    pub fn at(&self, t: f64) -> f64 {
        let times = &self.times;
        let values = &self.values;
        if t <= times[0] {
            return values[0];
        }
        if t >= *times.last().unwrap() {
            return *values.last().unwrap();
        }
        // partition_point: first index with times[i] > t
        let hi = times.partition_point(|&x| x <= t);
        let lo = hi - 1;
        let frac = (t - times[lo]) / (times[hi] - times[lo]);
        values[lo] + frac * (values[hi] - values[lo])
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// A persistent source whose parameters evolve through the sonification.
#[derive(Debug, Clone, Default)]
pub struct ObjectSource {
    statics: BTreeMap<ParameterId, f64>,
    evolutions: BTreeMap<ParameterId, Evolution>,
    spectrum: Option<Vec<f64>>,
}

impl ObjectSource {
    /// Set a static (non-evolving) parameter value.
    pub fn set_static(&mut self, param: ParameterId, value: f64) -> Result<()> {
        if !param.mappable() {
            return Err(Error::InvalidParameter {
                param: param.name().into(),
                reason: "is not mappable".into(),
            });
        }
        let (lo, hi) = param.domain();
        if value < lo || value > hi {
            return Err(Error::InvalidParameter {
                param: param.name().into(),
                reason: format!("value {value} outside legal domain {lo}..{hi}"),
            });
        }
        self.statics.insert(param, value);
        Ok(())
    }

    pub fn set_spectrum(&mut self, spectrum: Vec<f64>) {
        self.spectrum = Some(spectrum);
    }

    pub fn spectrum(&self) -> Option<&[f64]> {
        self.spectrum.as_deref()
    }

    pub fn evolution(&self, param: ParameterId) -> Option<&Evolution> {
        self.evolutions.get(&param)
    }

    pub fn static_value(&self, param: ParameterId) -> Option<f64> {
        self.statics.get(&param).copied()
    }

    pub fn has_evolutions(&self) -> bool {
        !self.evolutions.is_empty()
    }

    /// Parameter value at normalized time `t`.
    ///
    /// Evolution if present, else the static value, else the documented
    /// source default. `None` means the generator preset decides.
    pub fn value_at(&self, param: ParameterId, t: f64) -> Option<f64> {
        if let Some(evo) = self.evolutions.get(&param) {
            return Some(evo.at(t));
        }
        self.static_value(param).or_else(|| param.default_value())
    }
}

/// Evaluate an evolvable parameter of an object at normalized time `t`.
pub fn evaluate_evolution(src: &ObjectSource, param: ParameterId, t: f64) -> Option<f64> {
    src.value_at(param, t)
}

/// Build an [`ObjectSource`] from a data series indexed by a time column.
///
/// The time column is rescaled to `[0, 1]` and becomes the shared evolution
/// grid (the `time_evo` parameter); every mapped column is rescaled per its
/// limits and stored as an evolution on that grid.
pub fn build_object_source(
    table: &Table,
    time_column: &str,
    mappings: &[Mapping],
) -> Result<ObjectSource> {
    let time = table.column(time_column)?;
    if time.len() < 2 {
        return Err(Error::EmptyData(format!(
            "time column `{time_column}` needs at least two rows"
        )));
    }
    for i in 1..time.len() {
        if time[i] <= time[i - 1] {
            return Err(Error::NonMonotonicTime(i - 1, i));
        }
    }
    let t0 = time[0];
    let span = time[time.len() - 1] - t0;
    let grid: Vec<f64> = time.iter().map(|&t| (t - t0) / span).collect();

    let mut src = ObjectSource::default();
    for m in mappings {
        if !m.param.evolvable() {
            return Err(Error::InvalidParameter {
                param: m.param.name().into(),
                reason: "is not evolvable and cannot take a data series".into(),
            });
        }
        if m.param == ParameterId::TimeEvo {
            return Err(Error::InvalidParameter {
                param: m.param.name().into(),
                reason: "is defined by the time column itself".into(),
            });
        }
        m.limits.validate_for(m.param)?;
        let column = table.column(&m.column)?;
        if column.len() != time.len() {
            return Err(Error::LengthMismatch {
                column: m.column.clone(),
                got: column.len(),
                expected: time.len(),
            });
        }
        let mapped = map_parameter(column, &m.limits)?;
        if src
            .evolutions
            .insert(m.param, Evolution::new(grid.clone(), mapped)?)
            .is_some()
        {
            return Err(Error::DuplicateMapping(m.param.name().into()));
        }
    }
    Ok(src)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(cols: &[(&str, &[f64])]) -> Table {
        Table::from_columns(
            cols.iter()
                .map(|(n, v)| (n.to_string(), v.to_vec()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn table_one_flags_match_row_for_row() {
        // (name, mappable, evolvable)
        let rows = [
            ("polar", true, true),
            ("azimuth", true, true),
            ("volume", true, true),
            ("pitch", true, false),
            ("time", true, false),
            ("cutoff", true, true),
            ("time_evo", false, true),
            ("spectrum", true, false),
            ("pitch_shift", true, true),
            ("volume_envelope/A", true, false),
            ("volume_envelope/D", true, false),
            ("volume_envelope/S", true, false),
            ("volume_envelope/R", true, false),
            ("volume_lfo/freq", true, false),
            ("volume_lfo/freq_shift", true, true),
            ("volume_lfo/amount", true, true),
            ("pitch_lfo/freq", true, false),
            ("pitch_lfo/freq_shift", true, true),
            ("pitch_lfo/amount", true, true),
        ];
        assert_eq!(rows.len(), 19);
        assert_eq!(ParameterId::ALL.len(), 19);
        for (i, (name, map, evolve)) in rows.iter().enumerate() {
            let p = ParameterId::ALL[i];
            assert_eq!(p.name(), *name, "row {i}");
            assert_eq!(p.mappable(), *map, "mappable flag for {name}");
            assert_eq!(p.evolvable(), *evolve, "evolvable flag for {name}");
            assert_eq!(ParameterId::parse(name).unwrap(), p);
        }
    }

    #[test]
    fn full_range_map_is_affine() {
        let out = map_parameter(&[0.0, 5.0, 10.0], &MapLimits::full_range(0.0, 1.0)).unwrap();
        assert_eq!(out, vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn data_units_clip_above_hi() {
        let out = map_parameter(&[0.0, 5.0, 10.0], &MapLimits::data_units(0.0, 5.0, 0.0, 1.0))
            .unwrap();
        assert_eq!(out, vec![0.0, 1.0, 1.0]);
    }

    #[test]
    fn percentile_window_matches_oracle() {
        // Independent oracle: percentile by sorting + direct rank interpolation,
        // then clip + rescale, coded without map_parameter.
        let data: Vec<f64> = (1..=10).map(|x| x as f64).collect();
        let limits = MapLimits::percentile(10.0, 90.0, 0.0, 100.0);
        let out = map_parameter(&data, &limits).unwrap();

        let oracle_pct = |p: f64| -> f64 {
            let mut s = data.clone();
            s.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let rank = p / 100.0 * (s.len() - 1) as f64;
            let i = rank.floor() as usize;
            let f = rank - i as f64;
            if i + 1 < s.len() {
                s[i] + f * (s[i + 1] - s[i])
            } else {
                s[i]
            }
        };
        let (lo, hi) = (oracle_pct(10.0), oracle_pct(90.0));
        for (x, y) in data.iter().zip(&out) {
            let c = x.max(lo).min(hi);
            let expect = (c - lo) / (hi - lo) * 100.0;
            assert!((y - expect).abs() < 1e-12, "x={x} got {y} want {expect}");
        }
    }

    #[test]
    fn degenerate_range_maps_to_param_lo() {
        let out = map_parameter(&[3.0, 3.0, 3.0], &MapLimits::full_range(0.2, 0.9)).unwrap();
        assert_eq!(out, vec![0.2, 0.2, 0.2]);
    }

    #[test]
    fn empty_data_rejected() {
        assert!(map_parameter(&[], &MapLimits::full_range(0.0, 1.0)).is_err());
    }

    #[test]
    fn mapped_values_stay_in_param_range() {
        let data = [-7.0, 0.0, 2.5, 100.0, 3.1];
        for limits in [
            MapLimits::percentile(20.0, 80.0, 0.1, 0.4),
            MapLimits::data_units(0.0, 3.0, 0.1, 0.4),
        ] {
            let out = map_parameter(&data, &limits).unwrap();
            for y in out {
                assert!((0.1..=0.4).contains(&y));
            }
        }
    }

    #[test]
    fn event_set_counts_rows() {
        let rows = 2500;
        let brightness: Vec<f64> = (0..rows).map(|i| (i as f64).sin() * 10.0).collect();
        let color: Vec<f64> = (0..rows).map(|i| (i as f64 * 0.7).cos()).collect();
        let t = table(&[("brightness", &brightness), ("color", &color)]);
        let events = build_event_set(
            &t,
            &[
                Mapping::new(ParameterId::Time, "brightness", MapLimits::full_range(0.0, 1.0)),
                Mapping::new(ParameterId::Pitch, "color", MapLimits::full_range(0.0, 1.0)),
            ],
        )
        .unwrap();
        assert_eq!(events.count(), 2500);
    }

    #[test]
    fn single_event_defaults() {
        let t = table(&[("x", &[1.0])]);
        let events = build_event_set(&t, &[]).unwrap();
        assert_eq!(events.count(), 1);
        assert_eq!(events.value(ParameterId::Volume, 0), Some(1.0));
        assert_eq!(events.value(ParameterId::Pitch, 0), Some(0.5));
        assert_eq!(events.value(ParameterId::Time, 0), Some(0.0));
        assert_eq!(events.value(ParameterId::Azimuth, 0), Some(0.0));
        assert_eq!(events.value(ParameterId::Polar, 0), Some(PI / 2.0));
        assert_eq!(events.value(ParameterId::Cutoff, 0), Some(1.0));
        assert_eq!(events.value(ParameterId::PitchShift, 0), Some(0.0));
        assert_eq!(events.value(ParameterId::VolumeLfoFreq, 0), None);
    }

    #[test]
    fn per_event_pitch_shift_matches_mapping_oracle() {
        let shift_data = [0.0, 3.0, 6.0, 12.0];
        let time_data = [0.0, 1.0, 2.0, 3.0];
        let t = table(&[("s", &shift_data), ("t", &time_data)]);
        let events = build_event_set(
            &t,
            &[
                Mapping::new(
                    ParameterId::PitchShift,
                    "s",
                    MapLimits::data_units(0.0, 12.0, 0.0, 24.0),
                ),
                Mapping::new(ParameterId::Time, "t", MapLimits::full_range(0.0, 1.0)),
            ],
        )
        .unwrap();
        for (i, &x) in shift_data.iter().enumerate() {
            let expect = x / 12.0 * 24.0;
            let got = events.value(ParameterId::PitchShift, i).unwrap();
            assert!((got - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn non_mappable_rejected() {
        let t = table(&[("x", &[1.0, 2.0])]);
        let err = build_event_set(
            &t,
            &[Mapping::new(
                ParameterId::TimeEvo,
                "x",
                MapLimits::full_range(0.0, 1.0),
            )],
        );
        assert!(err.is_err());
    }

    #[test]
    fn duplicate_mapping_rejected() {
        let t = table(&[("x", &[1.0, 2.0]), ("y", &[0.0, 1.0])]);
        let err = build_event_set(
            &t,
            &[
                Mapping::new(ParameterId::Pitch, "x", MapLimits::full_range(0.0, 1.0)),
                Mapping::new(ParameterId::Pitch, "y", MapLimits::full_range(0.0, 1.0)),
            ],
        );
        assert!(matches!(err, Err(Error::DuplicateMapping(_))));
    }

    #[test]
    fn object_source_two_evolutions() {
        let t = table(&[
            ("age", &[0.0, 1.0, 2.0, 4.0]),
            ("metallicity", &[0.0, 0.5, 1.5, 2.0]),
            ("sfr", &[1.0, 4.0, 2.0, 0.5]),
        ]);
        let src = build_object_source(
            &t,
            "age",
            &[
                Mapping::new(ParameterId::Cutoff, "metallicity", MapLimits::full_range(0.0, 1.0)),
                Mapping::new(
                    ParameterId::PitchShift,
                    "sfr",
                    MapLimits::full_range(0.0, 12.0),
                ),
            ],
        )
        .unwrap();
        assert!(src.evolution(ParameterId::Cutoff).is_some());
        assert!(src.evolution(ParameterId::PitchShift).is_some());
        let grid = src.evolution(ParameterId::Cutoff).unwrap().times();
        assert_eq!(grid, &[0.0, 0.25, 0.5, 1.0]);
    }

    #[test]
    fn constant_series_evolution_is_constant() {
        let t = table(&[("t", &[0.0, 1.0, 2.0]), ("v", &[5.0, 5.0, 5.0])]);
        let src = build_object_source(
            &t,
            "t",
            &[Mapping::new(ParameterId::Volume, "v", MapLimits::full_range(0.0, 1.0))],
        )
        .unwrap();
        for t in [0.0, 0.31, 0.77, 1.0] {
            // Degenerate data range: everything maps to param_lo.
            assert_eq!(src.value_at(ParameterId::Volume, t), Some(0.0));
        }
    }

    #[test]
    fn evolution_midpoint_and_clamping() {
        let evo = Evolution::new(vec![0.0, 1.0], vec![0.0, 10.0]).unwrap();
        assert_eq!(evo.at(0.5), 5.0);
        assert_eq!(evo.at(-1.0), 0.0);
        assert_eq!(evo.at(2.0), 10.0);
    }

    #[test]
    fn irregular_grid_matches_hand_interpolation() {
        let times = vec![0.0, 0.05, 0.2, 0.45, 0.6, 0.85, 1.0];
        let values = vec![1.0, 3.0, -2.0, 0.5, 0.5, 4.0, -1.0];
        let evo = Evolution::new(times.clone(), values.clone()).unwrap();
        for i in 0..times.len() - 1 {
            let mid = (times[i] + times[i + 1]) / 2.0;
            let expect = (values[i] + values[i + 1]) / 2.0;
            assert!((evo.at(mid) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn random_grid_matches_interp_oracle() {
        use crate::rng::SeedStream;
        let mut rng = SeedStream::new(99);
        let mut times: Vec<f64> = (0..20).map(|_| rng.unit()).collect();
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        times.dedup();
        let values: Vec<f64> = times.iter().map(|_| rng.bipolar() * 10.0).collect();
        let evo = Evolution::new(times.clone(), values.clone()).unwrap();

        // Brute-force oracle: scan the full grid for the bracketing segment.
        let oracle = |t: f64| -> f64 {
            if t <= times[0] {
                return values[0];
            }
            if t >= times[times.len() - 1] {
                return values[values.len() - 1];
            }
            for i in 0..times.len() - 1 {
                if t >= times[i] && t <= times[i + 1] {
                    let f = (t - times[i]) / (times[i + 1] - times[i]);
                    return values[i] * (1.0 - f) + values[i + 1] * f;
                }
            }
            unreachable!()
        };
        for k in 0..100 {
            let t = k as f64 / 99.0 * 1.2 - 0.1;
            assert!((evo.at(t) - oracle(t)).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn non_monotonic_time_rejected() {
        let t = table(&[("t", &[0.0, 2.0, 1.0]), ("v", &[1.0, 2.0, 3.0])]);
        let err = build_object_source(
            &t,
            "t",
            &[Mapping::new(ParameterId::Volume, "v", MapLimits::full_range(0.0, 1.0))],
        );
        assert!(matches!(err, Err(Error::NonMonotonicTime(1, 2))));
    }

    #[test]
    fn non_evolvable_series_rejected() {
        let t = table(&[("t", &[0.0, 1.0]), ("v", &[1.0, 2.0])]);
        let err = build_object_source(
            &t,
            "t",
            &[Mapping::new(ParameterId::Pitch, "v", MapLimits::full_range(0.0, 1.0))],
        );
        assert!(err.is_err());
    }

    #[test]
    fn map_is_monotone_non_decreasing() {
        use crate::rng::SeedStream;
        let mut rng = SeedStream::new(5);
        let mut data: Vec<f64> = (0..64).map(|_| rng.bipolar() * 50.0).collect();
        let limits = MapLimits::percentile(5.0, 95.0, -2.0, 3.0);
        let out = map_parameter(&data, &limits).unwrap();
        data.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let sorted_out = map_parameter(&data, &limits).unwrap();
        for w in sorted_out.windows(2) {
            assert!(w[1] >= w[0]);
        }
        // Same multiset of outputs either way.
        let mut a = out.clone();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (x, y) in a.iter().zip(&sorted_out) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
