//! The two characterization runs: static linearity from a fine DC sweep and
//! dynamic performance from a coherent full-scale tone.

use serde::{Deserialize, Serialize};

use crate::adc::Adc;
use crate::config::Resolved;
use crate::error::{AdcError, Result};
use crate::metrics::{analyze_spectrum, characterize_linearity, LinearityReport, SpectrumReport};
use crate::stimuli::{mid_reference, CoherentTone};

pub fn run_linearity(cfg: &Resolved) -> Result<LinearityReport> {
    characterize_linearity(&cfg.adc, cfg.resolution_v)
}

/// Codes of one coherent record plus their spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRun {
    pub tone_hz: f64,
    pub codes: Vec<u32>,
    pub report: SpectrumReport,
}

/// Converts one record of a coherent tone centred on the mid reference,
/// removes the code mean and measures the spectrum with a full-scale sine
/// of `2^(N-1)` codes as the 0 dBFS reference.
pub fn run_spectrum(cfg: &Resolved) -> Result<SpectrumRun> {
    let tone = CoherentTone {
        n_fft: cfg.fft.n_fft,
        cycles: cfg.fft.cycles,
        amplitude: cfg.fft.amplitude_v,
        offset: mid_reference(&cfg.adc.refs),
        phase: cfg.fft.phase_rad,
    };
    tone.validate()?;
    if tone.amplitude == 0.0 {
        return Err(AdcError::DegenerateSignal("stimulus amplitude is zero".into()));
    }
    let wave = tone.waveform(tone.n_fft, cfg.adc.sample_rate)?;
    let codes = Adc::new(cfg.adc.clone())?.codes(&wave.samples)?;
    let mean = codes.iter().map(|&c| f64::from(c)).sum::<f64>() / codes.len() as f64;
    let centred: Vec<f64> = codes.iter().map(|&c| f64::from(c) - mean).collect();
    let full_scale = f64::from(1u32 << (cfg.adc.n_bits - 1));
    let report = analyze_spectrum(&centred, full_scale, tone.cycles)?;
    Ok(SpectrumRun { tone_hz: tone.frequency(cfg.adc.sample_rate), codes, report })
}
