use serde::{Deserialize, Serialize};

use crate::adc::{Adc, AdcConfig};
use crate::error::{AdcError, Result};

/// Code transition voltages found by a fine input sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transitions {
    /// `voltages[k - 1]` is T(k), the input at which the output first reaches
    /// code `k`, for k = 1..=2^N-1.
    pub voltages: Vec<f64>,
    /// Codes never produced during the sweep.
    pub missing_codes: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearityReport {
    pub n_bits: u32,
    pub lsb: f64,
    pub resolution: f64,
    /// T(k) for k = 1..=2^N-1.
    pub transitions: Vec<f64>,
    /// Width error of codes 1..=2^N-2, in LSB.
    pub dnl: Vec<f64>,
    /// Endpoint-corrected transition error for k = 1..=2^N-1, in LSB.
    pub inl: Vec<f64>,
    pub worst_dnl: f64,
    pub worst_inl: f64,
    pub missing_codes: Vec<u32>,
}

pub fn default_resolution(config: &AdcConfig) -> f64 {
    config.lsb() / 64.0
}

/// Sweeps the input from `vrefn` to `vrefp` in `resolution` steps and places
/// each transition at the midpoint of the first crossing into code `k` or
/// above. A missing code shares the transition of the next realized code.
pub fn find_transitions(config: &AdcConfig, resolution: f64) -> Result<Transitions> {
    let lsb = config.lsb();
    if !(resolution > 0.0 && resolution <= lsb / 16.0) {
        return Err(AdcError::InvalidInput(format!(
            "resolution must be in (0, LSB/16 = {}], got {resolution}",
            lsb / 16.0
        )));
    }
    let (lo, hi) = (config.refs.vrefn, config.refs.vrefp);
    let steps = ((hi - lo) / resolution).floor() as usize;
    let mut inputs: Vec<f64> = (0..=steps).map(|j| lo + j as f64 * resolution).collect();
    if *inputs.last().expect("at least one point") < hi {
        inputs.push(hi);
    }

    let n_codes = config.max_code() as usize + 1;
    let mut adc = Adc::new(config.clone())?;
    let mut seen = vec![false; n_codes];
    let mut voltages = Vec::with_capacity(n_codes - 1);
    let mut prev = None;
    for &v in &inputs {
        let code = adc.convert(v)?.code as usize;
        seen[code] = true;
        while voltages.len() < code {
            voltages.push(match prev {
                Some(p) => (p + v) / 2.0,
                None => v - resolution / 2.0,
            });
        }
        prev = Some(v);
    }
    let top = *inputs.last().expect("at least one point");
    while voltages.len() < n_codes - 1 {
        voltages.push(top + resolution / 2.0);
    }

    let produced: Vec<usize> = (0..n_codes).filter(|&c| seen[c]).collect();
    if produced.len() == 1 {
        return Err(AdcError::DegenerateConverter { code: produced[0] as u32 });
    }
    let missing_codes = (0..n_codes as u32).filter(|&c| !seen[c as usize]).collect();
    Ok(Transitions { voltages, missing_codes })
}

/// `dnl[k] = (T(k+1) - T(k)) / lsb - 1`.
pub fn dnl(transitions: &[f64], lsb: f64) -> Result<Vec<f64>> {
    if !(lsb.is_finite() && lsb != 0.0) {
        return Err(AdcError::InvalidInput(format!("lsb must be finite and nonzero, got {lsb}")));
    }
    if transitions.len() < 3 {
        return Err(AdcError::InvalidInput(format!(
            "DNL needs at least 3 transitions, got {}",
            transitions.len()
        )));
    }
    Ok(transitions.windows(2).map(|w| (w[1] - w[0]) / lsb - 1.0).collect())
}

/// Deviation from the line through the first and last transitions, in units
/// of that line's step. Both endpoints are zero.
pub fn inl(transitions: &[f64]) -> Result<Vec<f64>> {
    let n = transitions.len();
    if n < 2 {
        return Err(AdcError::InvalidInput(format!("INL needs at least 2 transitions, got {n}")));
    }
    let (first, last) = (transitions[0], transitions[n - 1]);
    if first == last {
        return Err(AdcError::DegenerateRange(format!("first and last transitions coincide at {first}")));
    }
    let fitted_lsb = (last - first) / (n - 1) as f64;
    let mut out: Vec<f64> = transitions
        .iter()
        .enumerate()
        .map(|(k, &t)| (t - (first + k as f64 * fitted_lsb)) / fitted_lsb)
        .collect();
    out[0] = 0.0;
    out[n - 1] = 0.0;
    Ok(out)
}

/// Entry of largest magnitude, sign kept. On a magnitude tie the negative
/// entry wins, so a missing code (-1) is reported over its +1 neighbor.
pub fn worst(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, |best, v| {
        if v.abs() > best.abs() || (v.abs() == best.abs() && v < best) {
            v
        } else {
            best
        }
    })
}

pub fn characterize_linearity(config: &AdcConfig, resolution: f64) -> Result<LinearityReport> {
    config.validate()?;
    let lsb = config.lsb();
    let Transitions { voltages, missing_codes } = find_transitions(config, resolution)?;
    let dnl = dnl(&voltages, lsb)?;
    let inl = inl(&voltages)?;
    Ok(LinearityReport {
        n_bits: config.n_bits,
        lsb,
        resolution,
        worst_dnl: worst(&dnl),
        worst_inl: worst(&inl),
        transitions: voltages,
        dnl,
        inl,
        missing_codes,
    })
}
