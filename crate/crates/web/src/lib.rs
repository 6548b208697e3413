//! WebAssembly bindings for the browser demo. Each operation takes a
//! configuration as JSON text and returns its result as JSON text.

use adcsim_core::experiment::{run_linearity, run_spectrum};
use adcsim_core::stimuli::ramp;
use adcsim_core::{load_config_str, Adc, LinearityReport, Metric, Resolved};
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

pub const MAX_CURVE_POINTS: usize = 1 << 16;

#[derive(Debug, Serialize)]
pub struct TransferCurve {
    pub vin: Vec<f64>,
    pub code: Vec<u32>,
    pub max_code: u32,
}

#[derive(Debug, Serialize)]
pub struct SpectrumView {
    pub sample_rate_hz: f64,
    pub tone_hz: f64,
    pub n_fft: usize,
    pub signal_bin: usize,
    pub magnitudes_db: Vec<f64>,
    pub sndr_db: Metric,
    pub enob_bits: Metric,
    pub sfdr_db: Metric,
}

fn config(text: &str) -> Result<Resolved, String> {
    load_config_str(text).map_err(|e| e.to_string())
}

fn to_json(v: &impl Serialize) -> String {
    serde_json::to_string(v).expect("results serialize")
}

/// Starting point for editing: top-level settings only, so per-stage values
/// come from `stage_defaults` and the resolution follows `n_bits`.
pub fn default_config_json() -> String {
    let cfg = Resolved::ideal();
    let doc = json!({
        "n_bits": cfg.adc.n_bits,
        "vrefp": cfg.adc.refs.vrefp,
        "vrefn": cfg.adc.refs.vrefn,
        "sample_rate_hz": cfg.adc.sample_rate,
        "noise_sigma_v": cfg.adc.noise_sigma,
        "rng_seed": cfg.adc.rng_seed,
        "stage_defaults": { "dc_gain_db": null, "comparator_offset_v": 0.0 },
        "fft": { "n_fft": cfg.fft.n_fft, "cycles": cfg.fft.cycles },
    });
    serde_json::to_string_pretty(&doc).expect("config serializes")
}

/// Codes for a ramp spanning the reference range plus 5% on each side.
pub fn transfer_curve_json(config_json: &str, points: usize) -> Result<String, String> {
    let cfg = config(config_json)?;
    if !(2..=MAX_CURVE_POINTS).contains(&points) {
        return Err(format!("points must be in 2..={MAX_CURVE_POINTS}, got {points}"));
    }
    let refs = &cfg.adc.refs;
    let margin = 0.05 * refs.span();
    let wave = ramp(points, refs.vrefn - margin, refs.vrefp + margin, cfg.adc.sample_rate).map_err(|e| e.to_string())?;
    let mut adc = Adc::new(cfg.adc.clone()).map_err(|e| e.to_string())?;
    let code = adc.codes(&wave.samples).map_err(|e| e.to_string())?;
    Ok(to_json(&TransferCurve { vin: wave.samples, code, max_code: cfg.adc.max_code() }))
}

pub fn linearity_json(config_json: &str) -> Result<String, String> {
    let report: LinearityReport = run_linearity(&config(config_json)?).map_err(|e| e.to_string())?;
    Ok(to_json(&report))
}

pub fn spectrum_json(config_json: &str) -> Result<String, String> {
    let cfg = config(config_json)?;
    let run = run_spectrum(&cfg).map_err(|e| e.to_string())?;
    let r = run.report;
    Ok(to_json(&SpectrumView {
        sample_rate_hz: cfg.adc.sample_rate,
        tone_hz: run.tone_hz,
        n_fft: r.n_fft,
        signal_bin: r.signal_bin,
        magnitudes_db: r.magnitudes_db,
        sndr_db: r.sndr_db,
        enob_bits: r.enob_bits,
        sfdr_db: r.sfdr_db,
    }))
}

#[wasm_bindgen(js_name = defaultConfig)]
pub fn default_config() -> String {
    default_config_json()
}

#[wasm_bindgen(js_name = transferCurve)]
pub fn transfer_curve(config_json: &str, points: usize) -> Result<String, JsValue> {
    transfer_curve_json(config_json, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn linearity(config_json: &str) -> Result<String, JsValue> {
    linearity_json(config_json).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn spectrum(config_json: &str) -> Result<String, JsValue> {
    spectrum_json(config_json).map_err(|e| JsValue::from_str(&e))
}
