//! Single-stage behavior of a 1-bit switched-capacitor pipeline stage.
//!
//! During the sampling phase the stage comparator resolves one bit against
//! the mid-reference threshold. During the multiplying phase the feedback
//! capacitor closes around the op-amp and the sampling capacitor is switched
//! to the reference selected by that bit, producing the residue handed to the
//! next stage.

use serde::{Deserialize, Serialize};

use crate::error::{finite, AdcError, Result};

/// Reference voltages shared by every stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct References {
    pub vrefp: f64,
    pub vrefn: f64,
    /// Comparator threshold. Midway between the references unless overridden.
    pub vth: f64,
}

impl References {
    /// Builds references with the threshold placed midway between them.
    pub fn new(vrefp: f64, vrefn: f64) -> Result<Self> {
        Self::with_threshold(vrefp, vrefn, (vrefp + vrefn) / 2.0)
    }

    pub fn with_threshold(vrefp: f64, vrefn: f64, vth: f64) -> Result<Self> {
        let refs = References { vrefp, vrefn, vth };
        refs.validate()?;
        Ok(refs)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("vrefp", self.vrefp), ("vrefn", self.vrefn), ("vth", self.vth)] {
            if !v.is_finite() {
                return Err(AdcError::Config {
                    field: name.into(),
                    reason: format!("must be finite, got {v}"),
                });
            }
        }
        if self.vrefn >= self.vrefp {
            return Err(AdcError::Config {
                field: "vrefn".into(),
                reason: format!("must be below vrefp ({} >= {})", self.vrefn, self.vrefp),
            });
        }
        Ok(())
    }

    pub fn span(&self) -> f64 {
        self.vrefp - self.vrefn
    }

    /// Voltage of one code step for an `n_bits` converter.
    pub fn lsb(&self, n_bits: u32) -> f64 {
        self.span() / f64::from(1u32 << n_bits)
    }
}

impl Default for References {
    fn default() -> Self {
        References { vrefp: 1.0, vrefn: -1.0, vth: 0.0 }
    }
}

/// Imperfections of one stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageParams {
    /// Sampling over feedback capacitance, C1/C2.
    pub cap_ratio: f64,
    /// Open-loop op-amp DC gain in V/V. `None` is an ideal amplifier.
    pub dc_gain: Option<f64>,
    pub comparator_offset: f64,
    pub rail_low: f64,
    pub rail_high: f64,
}

impl Default for StageParams {
    fn default() -> Self {
        StageParams {
            cap_ratio: 1.0,
            dc_gain: None,
            comparator_offset: 0.0,
            rail_low: -5.0,
            rail_high: 5.0,
        }
    }
}

impl StageParams {
    pub fn ideal() -> Self {
        Self::default()
    }

    /// Sets a finite op-amp gain given in dB.
    pub fn with_gain_db(mut self, gain_db: f64) -> Self {
        self.dc_gain = Some(db_to_linear(gain_db));
        self
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.comparator_offset = offset;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, reason: String| AdcError::Config { field: field.into(), reason };
        if !(self.cap_ratio.is_finite() && self.cap_ratio > 0.0) {
            return Err(bad("cap_ratio", format!("must be > 0, got {}", self.cap_ratio)));
        }
        if let Some(a) = self.dc_gain {
            if !(a.is_finite() && a > 0.0) {
                return Err(bad("dc_gain", format!("must be > 0, got {a}")));
            }
        }
        if !self.comparator_offset.is_finite() {
            return Err(bad("comparator_offset", "must be finite".into()));
        }
        if !(self.rail_low.is_finite() && self.rail_high.is_finite()) {
            return Err(bad("rail_low", "rails must be finite".into()));
        }
        if self.rail_low >= self.rail_high {
            return Err(bad(
                "rail_low",
                format!("must be below rail_high ({} >= {})", self.rail_low, self.rail_high),
            ));
        }
        Ok(())
    }
}

/// Converts a voltage gain in dB to V/V.
pub fn db_to_linear(gain_db: f64) -> f64 {
    10f64.powf(gain_db / 20.0)
}

/// Comparator decision: 1 when `vin` is at or above the offset threshold.
pub fn compare(vin: f64, refs: &References, offset: f64) -> Result<u8> {
    finite("vin", vin)?;
    Ok(u8::from(vin >= refs.vth + offset))
}

/// Multiplying-phase output of a stage.
///
/// `(1 + r)·vin − r·vref` scaled by the closed-loop gain error
/// `1 / (1 + (1 + r)/A)` when the op-amp gain `A` is finite, then clamped to
/// the output rails.
pub fn residue(vin: f64, bit: u8, params: &StageParams, refs: &References) -> Result<f64> {
    finite("vin", vin)?;
    let r = params.cap_ratio;
    let vref = if bit != 0 { refs.vrefp } else { refs.vrefn };
    let ideal = (1.0 + r) * vin - r * vref;
    let out = match params.dc_gain {
        Some(a) => ideal / (1.0 + (1.0 + r) / a),
        None => ideal,
    };
    Ok(out.clamp(params.rail_low, params.rail_high))
}

/// Weights an MSB-first bit sequence into a code.
pub fn assemble_code(bits: &[u8]) -> Result<u32> {
    if bits.is_empty() || bits.len() > 24 {
        return Err(AdcError::InvalidInput(format!(
            "bit sequence length must be in 1..=24, got {}",
            bits.len()
        )));
    }
    Ok(bits
        .iter()
        .fold(0u32, |code, &b| (code << 1) | u32::from(b != 0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn refs() -> References {
        References::default()
    }

    #[test]
    fn compare_decisions() {
        assert_eq!(compare(0.5, &refs(), 0.0).unwrap(), 1);
        assert_eq!(compare(-0.3, &refs(), 0.0).unwrap(), 0);
        assert_eq!(compare(0.0, &refs(), 0.0).unwrap(), 1);
        assert_eq!(compare(0.0, &refs(), 0.01).unwrap(), 0);
        assert!(compare(f64::NAN, &refs(), 0.0).is_err());
        assert!(compare(f64::INFINITY, &refs(), 0.0).is_err());
    }

    #[test]
    fn residue_ideal_cases() {
        let p = StageParams::ideal();
        assert_eq!(residue(0.5, 1, &p, &refs()).unwrap(), 0.0);
        assert_eq!(residue(-0.25, 0, &p, &refs()).unwrap(), 0.5);
        // 2*4 + 1 saturates at the upper rail.
        assert_eq!(residue(4.0, 0, &p, &refs()).unwrap(), 5.0);
        assert_eq!(residue(-4.0, 1, &p, &refs()).unwrap(), -5.0);
        assert!(residue(f64::NAN, 1, &p, &refs()).is_err());
    }

    /// Solves the multiplying-phase charge balance at the op-amp input node
    /// directly as a 2x2 linear system in (Vx, Vout).
    fn charge_conservation(vin: f64, vref: f64, c1: f64, c2: f64, gain: f64) -> f64 {
        // C1(Vx - Vref) + C2(Vx - Vout) = -(C1 + C2) Vin
        // Vx + Vout / A = 0
        let (a11, a12, b1) = (c1 + c2, -c2, -(c1 + c2) * vin + c1 * vref);
        let (a21, a22, b2) = (1.0, 1.0 / gain, 0.0);
        let det = a11 * a22 - a12 * a21;
        (a11 * b2 - a21 * b1) / det
    }

    #[test]
    fn finite_gain_matches_charge_conservation() {
        let a = 562.34;
        let p = StageParams { dc_gain: Some(a), ..StageParams::ideal() };
        let got = residue(0.75, 1, &p, &refs()).unwrap();
        let oracle = charge_conservation(0.75, 1.0, 1e-12, 1e-12, a);
        assert_relative_eq!(got, oracle, max_relative = 1e-12);
        // Frozen from the oracle above: 0.5 / (1 + 2/562.34).
        assert_relative_eq!(got, 0.498_228_018_570_365_4, max_relative = 1e-12);

        for &(vin, bit, r, gain) in &[
            (0.3, 0u8, 0.9, 100.0),
            (-0.6, 0, 1.1, 1e4),
            (0.8, 1, 1.05, 3162.0),
        ] {
            let p = StageParams { cap_ratio: r, dc_gain: Some(gain), ..StageParams::ideal() };
            let vref = if bit == 1 { 1.0 } else { -1.0 };
            let c2 = 2.5e-13;
            assert_relative_eq!(
                residue(vin, bit, &p, &refs()).unwrap(),
                charge_conservation(vin, vref, r * c2, c2, gain),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn fifty_five_db_is_562() {
        assert_relative_eq!(db_to_linear(55.0), 562.34, max_relative = 1e-5);
        let p = StageParams::ideal().with_gain_db(55.0);
        assert_relative_eq!(p.dc_gain.unwrap(), 562.341_325_190_349, max_relative = 1e-12);
    }

    #[test]
    fn assemble_examples() {
        assert_eq!(assemble_code(&[1, 0, 0, 0, 0, 0, 0, 0]).unwrap(), 128);
        assert_eq!(assemble_code(&[1; 8]).unwrap(), 255);
        assert_eq!(assemble_code(&[0, 0, 0, 0, 0, 0, 1, 1]).unwrap(), 3);
        assert!(assemble_code(&[]).is_err());
        assert!(assemble_code(&[0; 25]).is_err());
    }

    #[test]
    fn param_validation() {
        assert!(References::new(-1.0, 1.0).is_err());
        assert_eq!(References::new(2.0, 0.0).unwrap().vth, 1.0);
        let bad = StageParams { cap_ratio: 0.0, ..StageParams::ideal() };
        assert!(matches!(bad.validate(), Err(AdcError::Config { field, .. }) if field == "cap_ratio"));
        let bad = StageParams { dc_gain: Some(-3.0), ..StageParams::ideal() };
        assert!(bad.validate().is_err());
        let bad = StageParams { rail_low: 5.0, ..StageParams::ideal() };
        assert!(bad.validate().is_err());
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn eq1_eq2_sum(vin in -2.0f64..2.0) {
                let p = StageParams::ideal();
                let r = References::default();
                let sum = residue(vin, 1, &p, &r).unwrap() + residue(vin, 0, &p, &r).unwrap();
                prop_assert!((sum - (4.0 * vin - (r.vrefp + r.vrefn))).abs() <= 1e-15 * (1.0 + vin.abs()));
            }

            #[test]
            fn compare_is_monotone(a in -3.0f64..3.0, b in -3.0f64..3.0, off in -0.1f64..0.1) {
                let r = References::default();
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                prop_assert!(compare(lo, &r, off).unwrap() <= compare(hi, &r, off).unwrap());
            }

            #[test]
            fn ideal_residue_contained(vin in -1.0f64..=1.0) {
                let p = StageParams::ideal();
                let r = References::default();
                let bit = compare(vin, &r, 0.0).unwrap();
                let out = residue(vin, bit, &p, &r).unwrap();
                prop_assert!((r.vrefn..=r.vrefp).contains(&out));
            }
        }
    }
}
