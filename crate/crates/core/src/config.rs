//! JSON configuration files.
//!
//! A file may omit anything; defaults describe an ideal 8-bit converter with
//! ±1 V references at 20 MS/s. `stage_defaults` applies to every stage and
//! `stages` (one object per stage) overrides individual fields. Resolving a
//! file yields a [`Resolved`] whose [`Resolved::to_file`] form lists every
//! field explicitly and reloads to the same converter bit for bit.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::adc::AdcConfig;
use crate::error::{AdcError, Result};
use crate::stage::{db_to_linear, References, StageParams};
use crate::stimuli;

pub const DEFAULT_N_BITS: u32 = 8;
pub const DEFAULT_SAMPLE_RATE: f64 = 20e6;
pub const DEFAULT_N_FFT: usize = 1024;
pub const DEFAULT_CYCLES: usize = 101;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap_ratio: Option<f64>,
    /// Op-amp DC gain in dB; `null` means ideal.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "nullable")]
    pub dc_gain_db: Option<Option<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparator_offset_v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rail_low_v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rail_high_v: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FftFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_fft: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycles: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude_v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_rad: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearityFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution_v: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_bits: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vrefp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vrefn: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_rate_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_sigma_v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rng_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage_defaults: Option<StageFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stages: Option<Vec<StageFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fft: Option<FftFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linearity: Option<LinearityFile>,
}

/// Spectrum test settings after defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FftSettings {
    pub n_fft: usize,
    pub cycles: usize,
    pub amplitude_v: f64,
    pub phase_rad: f64,
}

/// A fully defaulted and validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub adc: AdcConfig,
    /// Per-stage gain as written, kept so the file form round-trips exactly.
    pub stage_gain_db: Vec<Option<f64>>,
    pub fft: FftSettings,
    pub resolution_v: f64,
}

impl Resolved {
    pub fn ideal() -> Self {
        ConfigFile::default().resolve().expect("defaults are valid")
    }

    /// Explicit file form with every field populated.
    pub fn to_file(&self) -> ConfigFile {
        let a = &self.adc;
        let stages = a
            .stages
            .iter()
            .zip(&self.stage_gain_db)
            .map(|(s, g)| StageFile {
                cap_ratio: Some(s.cap_ratio),
                dc_gain_db: Some(*g),
                comparator_offset_v: Some(s.comparator_offset),
                rail_low_v: Some(s.rail_low),
                rail_high_v: Some(s.rail_high),
            })
            .collect();
        ConfigFile {
            n_bits: Some(a.n_bits),
            vrefp: Some(a.refs.vrefp),
            vrefn: Some(a.refs.vrefn),
            vth: Some(a.refs.vth),
            sample_rate_hz: Some(a.sample_rate),
            noise_sigma_v: Some(a.noise_sigma),
            rng_seed: Some(a.rng_seed),
            stage_defaults: None,
            stages: Some(stages),
            fft: Some(FftFile {
                n_fft: Some(self.fft.n_fft),
                cycles: Some(self.fft.cycles),
                amplitude_v: Some(self.fft.amplitude_v),
                phase_rad: Some(self.fft.phase_rad),
            }),
            linearity: Some(LinearityFile { resolution_v: Some(self.resolution_v) }),
        }
    }
}

fn field_err(field: &str, reason: impl Into<String>) -> AdcError {
    AdcError::Config { field: field.into(), reason: reason.into() }
}

impl StageFile {
    fn overlay(&self, base: &StageFile) -> StageFile {
        StageFile {
            cap_ratio: self.cap_ratio.or(base.cap_ratio),
            dc_gain_db: self.dc_gain_db.or(base.dc_gain_db),
            comparator_offset_v: self.comparator_offset_v.or(base.comparator_offset_v),
            rail_low_v: self.rail_low_v.or(base.rail_low_v),
            rail_high_v: self.rail_high_v.or(base.rail_high_v),
        }
    }

    fn to_params(&self) -> Result<(StageParams, Option<f64>)> {
        let d = StageParams::default();
        let gain_db = self.dc_gain_db.flatten();
        if let Some(g) = gain_db {
            if !g.is_finite() {
                return Err(field_err("dc_gain_db", format!("must be finite, got {g}")));
            }
        }
        let params = StageParams {
            cap_ratio: self.cap_ratio.unwrap_or(d.cap_ratio),
            dc_gain: gain_db.map(db_to_linear),
            comparator_offset: self.comparator_offset_v.unwrap_or(d.comparator_offset),
            rail_low: self.rail_low_v.unwrap_or(d.rail_low),
            rail_high: self.rail_high_v.unwrap_or(d.rail_high),
        };
        Ok((params, gain_db))
    }
}

impl ConfigFile {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(parse_err)?;
        if is_summary(&value) {
            Self::from_value(value)
        } else {
            // Re-parse from text so schema errors carry line numbers.
            serde_json::from_str(text).map_err(parse_err)
        }
    }

    /// Accepts either a configuration object or a run summary carrying one
    /// under `"config"`.
    pub fn from_value(value: Value) -> Result<Self> {
        let value = match value {
            Value::Object(mut m) if is_summary_map(&m) => m.remove("config").expect("checked"),
            v => v,
        };
        serde_json::from_value(value).map_err(parse_err)
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let n_bits = self.n_bits.unwrap_or(DEFAULT_N_BITS);
        if !(1..=crate::adc::MAX_BITS).contains(&n_bits) {
            return Err(field_err("n_bits", format!("must be in 1..={}, got {n_bits}", crate::adc::MAX_BITS)));
        }
        let vrefp = self.vrefp.unwrap_or(1.0);
        let vrefn = self.vrefn.unwrap_or(-1.0);
        let refs = References {
            vrefp,
            vrefn,
            vth: self.vth.unwrap_or((vrefp + vrefn) / 2.0),
        };
        refs.validate()?;

        let defaults = self.stage_defaults.clone().unwrap_or_default();
        let stage_files: Vec<StageFile> = match &self.stages {
            Some(list) => {
                if list.len() != n_bits as usize {
                    return Err(field_err(
                        "stages",
                        format!("expected {n_bits} entries (one per stage), got {}", list.len()),
                    ));
                }
                list.iter().map(|s| s.overlay(&defaults)).collect()
            }
            None => vec![defaults; n_bits as usize],
        };
        let mut stages = Vec::with_capacity(stage_files.len());
        let mut stage_gain_db = Vec::with_capacity(stage_files.len());
        for (i, sf) in stage_files.iter().enumerate() {
            let (p, g) = sf.to_params().map_err(|e| prefix_stage(i, e))?;
            stages.push(p);
            stage_gain_db.push(g);
        }

        let adc = AdcConfig {
            n_bits,
            refs,
            sample_rate: self.sample_rate_hz.unwrap_or(DEFAULT_SAMPLE_RATE),
            stages,
            noise_sigma: self.noise_sigma_v.unwrap_or(0.0),
            rng_seed: self.rng_seed.unwrap_or(0),
        };
        adc.validate()?;

        let fft_file = self.fft.clone().unwrap_or_default();
        let fft = FftSettings {
            n_fft: fft_file.n_fft.unwrap_or(DEFAULT_N_FFT),
            cycles: fft_file.cycles.unwrap_or(DEFAULT_CYCLES),
            amplitude_v: fft_file.amplitude_v.unwrap_or_else(|| stimuli::full_scale_amplitude(&refs)),
            phase_rad: fft_file.phase_rad.unwrap_or(0.0),
        };
        if fft.n_fft < 8 || !fft.n_fft.is_power_of_two() {
            return Err(field_err("fft.n_fft", format!("must be a power of two >= 8, got {}", fft.n_fft)));
        }
        if !(fft.amplitude_v.is_finite() && fft.amplitude_v >= 0.0) {
            return Err(field_err("fft.amplitude_v", format!("must be >= 0, got {}", fft.amplitude_v)));
        }
        if !fft.phase_rad.is_finite() {
            return Err(field_err("fft.phase_rad", "must be finite"));
        }

        let resolution_v = self
            .linearity
            .as_ref()
            .and_then(|l| l.resolution_v)
            .unwrap_or_else(|| adc.lsb() / 64.0);
        if !(resolution_v > 0.0 && resolution_v <= adc.lsb() / 16.0) {
            return Err(field_err(
                "linearity.resolution_v",
                format!("must be in (0, LSB/16 = {}], got {resolution_v}", adc.lsb() / 16.0),
            ));
        }

        Ok(Resolved { adc, stage_gain_db, fft, resolution_v })
    }
}

/// Parses JSON text, reporting syntax errors with their line and column.
pub fn parse_document(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(parse_err)
}

/// True for a run summary, which carries its configuration under `"config"`.
pub fn is_summary(v: &Value) -> bool {
    v.as_object().is_some_and(is_summary_map)
}

fn is_summary_map(m: &serde_json::Map<String, Value>) -> bool {
    m.contains_key("tool") && m.contains_key("config")
}

fn prefix_stage(i: usize, e: AdcError) -> AdcError {
    match e {
        AdcError::Config { field, reason } => AdcError::Config { field: format!("stages[{i}].{field}"), reason },
        other => other,
    }
}

fn parse_err(e: serde_json::Error) -> AdcError {
    let field = if e.line() > 0 {
        format!("line {} column {}", e.line(), e.column())
    } else {
        "config".to_string()
    };
    AdcError::Config { field, reason: e.to_string() }
}

/// Parses and resolves a configuration document.
pub fn load_config_str(text: &str) -> Result<Resolved> {
    ConfigFile::from_json_str(text)?.resolve()
}

/// Applies a dotted-path `key=value` override to a raw configuration value.
/// The value is parsed as JSON, falling back to a plain string. Numeric path
/// segments index `stages`; a missing list is created with one empty entry
/// per stage.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| field_err("--set", format!("expected key=value, got {assignment:?}")))?;
    let path = path.trim();
    if path.is_empty() {
        return Err(field_err("--set", "empty key"));
    }
    let value: Value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.to_string()));
    let n_bits = doc.get("n_bits").and_then(Value::as_u64).unwrap_or(u64::from(DEFAULT_N_BITS)) as usize;

    if !doc.is_object() {
        *doc = Value::Object(Default::default());
    }
    let segments: Vec<&str> = path.split('.').collect();
    let mut cur = doc;
    for (depth, seg) in segments.iter().enumerate() {
        let last = depth + 1 == segments.len();
        if let Ok(idx) = seg.parse::<usize>() {
            if cur.is_null() {
                *cur = Value::Array(vec![Value::Object(Default::default()); n_bits.max(idx + 1)]);
            }
            let arr = cur
                .as_array_mut()
                .ok_or_else(|| field_err(path, format!("segment {seg:?} indexes a non-list")))?;
            if idx >= arr.len() {
                return Err(field_err(path, format!("index {idx} out of range (len {})", arr.len())));
            }
            cur = &mut arr[idx];
        } else {
            if cur.is_null() {
                *cur = Value::Object(Default::default());
            }
            let obj = cur
                .as_object_mut()
                .ok_or_else(|| field_err(path, format!("segment {seg:?} indexes a non-object")))?;
            cur = obj.entry(seg.to_string()).or_insert(Value::Null);
        }
        if last {
            *cur = value;
            return Ok(());
        }
    }
    unreachable!("path has at least one segment")
}

mod nullable {
    //! Distinguishes an absent key (`None`) from an explicit `null` (`Some(None)`).
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Option<f64>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(inner) => inner.serialize(s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Option<f64>>, D::Error> {
        Ok(Some(Option::<f64>::deserialize(d)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_defaults() {
        let r = load_config_str(r#"{"n_bits": 8}"#).unwrap();
        assert_eq!(r.adc, AdcConfig::ideal(8));
        assert_eq!(r.fft.n_fft, 1024);
        assert_eq!(r.fft.cycles, 101);
        assert_eq!(r.fft.amplitude_v, 1.0 - 1.0 / 4096.0);
        assert_eq!(r.resolution_v, 2.0 / 256.0 / 64.0);
        assert_eq!(load_config_str("{}").unwrap(), r);
    }

    #[test]
    fn stage_defaults_gain() {
        let r = load_config_str(r#"{"stage_defaults": {"dc_gain_db": 55}}"#).unwrap();
        assert_eq!(r.adc.stages.len(), 8);
        for s in &r.adc.stages {
            assert!((s.dc_gain.unwrap() - 562.34).abs() < 0.01);
        }
    }

    #[test]
    fn per_stage_overrides() {
        let text = r#"{"n_bits": 3, "stage_defaults": {"dc_gain_db": 60},
                       "stages": [{"comparator_offset_v": 0.01}, {"dc_gain_db": null}, {}]}"#;
        let r = load_config_str(text).unwrap();
        assert_eq!(r.adc.stages[0].comparator_offset, 0.01);
        assert!(r.adc.stages[0].dc_gain.is_some());
        assert_eq!(r.adc.stages[1].dc_gain, None);
        assert_eq!(r.stage_gain_db, vec![Some(60.0), None, Some(60.0)]);
    }

    #[test]
    fn errors_name_fields() {
        let field = |t: &str| match load_config_str(t) {
            Err(AdcError::Config { field, .. }) => field,
            other => panic!("expected config error, got {other:?}"),
        };
        assert_eq!(field(r#"{"n_bits": 0}"#), "n_bits");
        assert_eq!(field(r#"{"vrefp": -2}"#), "vrefn");
        assert_eq!(field(r#"{"stages": [{}]}"#), "stages");
        assert_eq!(field(r#"{"stage_defaults": {"cap_ratio": -1}}"#), "stages[0].cap_ratio");
        assert_eq!(field(r#"{"fft": {"n_fft": 1000}}"#), "fft.n_fft");
        assert_eq!(field(r#"{"sample_rate_hz": 0}"#), "sample_rate_hz");
        assert!(field("{\n  \"n_bits\": 8,\n  oops\n}").starts_with("line 3"));
        assert!(field(r#"{"nbits": 8}"#).starts_with("line 1"));
    }

    #[test]
    fn file_form_round_trips() {
        let text = r#"{"n_bits": 6, "noise_sigma_v": 0.001, "rng_seed": 7,
                       "stage_defaults": {"dc_gain_db": 55.3, "cap_ratio": 1.01}}"#;
        let r = load_config_str(text).unwrap();
        let json = serde_json::to_string(&r.to_file()).unwrap();
        let again = load_config_str(&json).unwrap();
        assert_eq!(again, r);
        let summary = serde_json::json!({"tool": "adcsim", "config": r.to_file()});
        assert_eq!(ConfigFile::from_value(summary).unwrap().resolve().unwrap(), r);
    }

    #[test]
    fn overrides() {
        let mut doc = serde_json::json!({"n_bits": 4});
        apply_override(&mut doc, "stage_defaults.dc_gain_db=40").unwrap();
        apply_override(&mut doc, "stages.0.comparator_offset_v=0.125").unwrap();
        apply_override(&mut doc, "rng_seed=11").unwrap();
        let r = ConfigFile::from_value(doc.clone()).unwrap().resolve().unwrap();
        assert_eq!(r.adc.stages.len(), 4);
        assert_eq!(r.adc.stages[0].comparator_offset, 0.125);
        assert_eq!(r.adc.stages[3].comparator_offset, 0.0);
        assert!(r.adc.stages[3].dc_gain.is_some());
        assert_eq!(r.adc.rng_seed, 11);
        assert!(apply_override(&mut doc, "novalue").is_err());
        assert!(apply_override(&mut doc, "stages.9.cap_ratio=1").is_err());
        assert!(apply_override(&mut doc, "n_bits.x=1").is_err());
    }
}
