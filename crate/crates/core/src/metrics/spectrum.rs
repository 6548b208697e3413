use serde::{Deserialize, Serialize};

use super::Metric;
use crate::error::{AdcError, Result};
use crate::fft::fft_real;

/// Bin powers below this (relative to a full-scale tone) are treated as zero.
pub const POWER_FLOOR: f64 = 1e-30;
pub const DB_FLOOR: f64 = -300.0;

/// One-sided power spectrum normalized so a full-scale sine in a single bin
/// has power 1 (0 dBFS).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub n_fft: usize,
    /// `n_fft / 2 + 1` bins, DC first.
    pub power: Vec<f64>,
}

impl Spectrum {
    /// Wraps precomputed one-sided bin powers (length `n_fft / 2 + 1`).
    pub fn from_power(power: Vec<f64>) -> Result<Self> {
        if power.len() < 2 {
            return Err(AdcError::InvalidInput("spectrum needs at least DC and one bin".into()));
        }
        if power.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(AdcError::InvalidInput("bin powers must be finite and non-negative".into()));
        }
        Ok(Spectrum { n_fft: 2 * (power.len() - 1), power })
    }

    pub fn n_bins(&self) -> usize {
        self.power.len()
    }

    pub fn magnitudes_dbfs(&self) -> Vec<f64> {
        self.power
            .iter()
            .map(|&p| if p < POWER_FLOOR { DB_FLOOR } else { 10.0 * p.log10() })
            .collect()
    }

    fn floored(&self, k: usize) -> f64 {
        let p = self.power[k];
        if p < POWER_FLOOR {
            0.0
        } else {
            p
        }
    }

    fn check_signal_bin(&self, signal_bin: usize) -> Result<f64> {
        if signal_bin == 0 || signal_bin >= self.n_bins() {
            return Err(AdcError::InvalidInput(format!(
                "signal bin must be in 1..={}, got {signal_bin}",
                self.n_bins() - 1
            )));
        }
        let p = self.floored(signal_bin);
        if p == 0.0 {
            return Err(AdcError::DegenerateSignal(format!("no power in signal bin {signal_bin}")));
        }
        Ok(p)
    }
}

/// Rectangular-window spectrum of `samples`, scaled so a sine of amplitude
/// `full_scale` reads 0 dBFS.
pub fn fft_magnitude(samples: &[f64], full_scale: f64) -> Result<Spectrum> {
    let n = samples.len();
    if n < 8 || !n.is_power_of_two() {
        return Err(AdcError::InvalidInput(format!("spectrum length must be a power of two >= 8, got {n}")));
    }
    if !(full_scale.is_finite() && full_scale > 0.0) {
        return Err(AdcError::InvalidInput(format!("full scale must be > 0, got {full_scale}")));
    }
    let bins = fft_real(samples)?;
    // Mean-square of each one-sided bin over the mean-square of a full-scale sine.
    let norm = (n as f64).powi(2) * full_scale * full_scale / 2.0;
    let power = (0..=n / 2)
        .map(|k| {
            let fold = if k == 0 || k == n / 2 { 1.0 } else { 2.0 };
            fold * bins[k].norm_sqr() / norm
        })
        .collect();
    Ok(Spectrum { n_fft: n, power })
}

/// Signal power in `signal_bin` over the power of every other non-DC bin.
pub fn sndr(spectrum: &Spectrum, signal_bin: usize) -> Result<Metric> {
    let signal = spectrum.check_signal_bin(signal_bin)?;
    let rest: f64 = (1..spectrum.n_bins())
        .filter(|&k| k != signal_bin)
        .map(|k| spectrum.floored(k))
        .sum();
    Ok(if rest == 0.0 {
        Metric::Unbounded
    } else {
        Metric::Finite(10.0 * (signal / rest).log10())
    })
}

/// Signal power over the largest non-signal, non-DC bin.
pub fn sfdr(spectrum: &Spectrum, signal_bin: usize) -> Result<Metric> {
    let signal = spectrum.check_signal_bin(signal_bin)?;
    let spur = (1..spectrum.n_bins())
        .filter(|&k| k != signal_bin)
        .map(|k| spectrum.floored(k))
        .fold(0.0, f64::max);
    Ok(if spur == 0.0 {
        Metric::Unbounded
    } else {
        Metric::Finite(10.0 * (signal / spur).log10())
    })
}

pub fn enob(sndr_db: f64) -> f64 {
    (sndr_db - 1.76) / 6.02
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub n_fft: usize,
    pub magnitudes_db: Vec<f64>,
    pub signal_bin: usize,
    pub sndr_db: Metric,
    pub enob_bits: Metric,
    pub sfdr_db: Metric,
}

pub fn analyze_spectrum(samples: &[f64], full_scale: f64, signal_bin: usize) -> Result<SpectrumReport> {
    let spectrum = fft_magnitude(samples, full_scale)?;
    let sndr_db = sndr(&spectrum, signal_bin)?;
    Ok(SpectrumReport {
        n_fft: spectrum.n_fft,
        magnitudes_db: spectrum.magnitudes_dbfs(),
        signal_bin,
        sndr_db,
        enob_bits: sndr_db.map(enob),
        sfdr_db: sfdr(&spectrum, signal_bin)?,
    })
}
