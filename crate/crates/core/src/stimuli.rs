//! Deterministic analog test signals.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{AdcError, Result};
use crate::stage::References;

/// A sampled analog stimulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Waveform {
    pub sample_rate: f64,
    pub samples: Vec<f64>,
}

impl Waveform {
    pub fn new(sample_rate: f64, samples: Vec<f64>) -> Result<Self> {
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(AdcError::InvalidInput(format!("sample rate must be > 0, got {sample_rate}")));
        }
        if let Some(k) = samples.iter().position(|v| !v.is_finite()) {
            return Err(AdcError::InvalidInput(format!("sample {k} is not finite")));
        }
        Ok(Waveform { sample_rate, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// `n` evenly spaced points from `v0` to `v1`, both endpoints included.
pub fn ramp(n: usize, v0: f64, v1: f64, sample_rate: f64) -> Result<Waveform> {
    if n < 2 {
        return Err(AdcError::InvalidInput(format!("ramp needs at least 2 points, got {n}")));
    }
    let last = (n - 1) as f64;
    let samples = (0..n)
        .map(|k| if k == n - 1 { v1 } else { v0 + k as f64 * (v1 - v0) / last })
        .collect();
    Waveform::new(sample_rate, samples)
}

pub fn dc(n: usize, v: f64, sample_rate: f64) -> Result<Waveform> {
    if n == 0 {
        return Err(AdcError::InvalidInput("dc waveform needs at least 1 sample".into()));
    }
    Waveform::new(sample_rate, vec![v; n])
}

/// A tone with an integer number of cycles in an FFT record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentTone {
    pub n_fft: usize,
    pub cycles: usize,
    pub amplitude: f64,
    pub offset: f64,
    pub phase: f64,
}

impl CoherentTone {
    /// Checks the record length and the coprimality of `cycles` and `n_fft`.
    pub fn validate(&self) -> Result<()> {
        if self.n_fft < 2 || !self.n_fft.is_power_of_two() {
            return Err(AdcError::InvalidInput(format!(
                "n_fft must be a power of two >= 2, got {}",
                self.n_fft
            )));
        }
        if self.cycles == 0 || 2 * self.cycles >= self.n_fft || gcd(self.cycles, self.n_fft) != 1 {
            return Err(AdcError::Coherence { cycles: self.cycles, n_fft: self.n_fft });
        }
        if !(self.amplitude.is_finite() && self.offset.is_finite() && self.phase.is_finite()) {
            return Err(AdcError::InvalidInput("tone parameters must be finite".into()));
        }
        Ok(())
    }

    pub fn frequency(&self, sample_rate: f64) -> f64 {
        self.cycles as f64 * sample_rate / self.n_fft as f64
    }

    /// Sample `k`. The phase index is reduced modulo `n_fft` first so the
    /// sequence repeats exactly every record.
    pub fn sample(&self, k: usize) -> f64 {
        let idx = (self.cycles as u128 * k as u128 % self.n_fft as u128) as f64;
        self.offset + self.amplitude * (2.0 * PI * idx / self.n_fft as f64 + self.phase).sin()
    }

    pub fn waveform(&self, len: usize, sample_rate: f64) -> Result<Waveform> {
        self.validate()?;
        Waveform::new(sample_rate, (0..len).map(|k| self.sample(k)).collect())
    }
}

/// One FFT record of a coherent sine.
pub fn sine_coherent(
    n_fft: usize,
    cycles: usize,
    amplitude: f64,
    offset: f64,
    sample_rate: f64,
    phase: f64,
) -> Result<Waveform> {
    CoherentTone { n_fft, cycles, amplitude, offset, phase }.waveform(n_fft, sample_rate)
}

/// Default full-scale amplitude: half the reference span backed off by 2^-12
/// so the peak stays below the top transition.
pub fn full_scale_amplitude(refs: &References) -> f64 {
    refs.span() / 2.0 * (1.0 - 2f64.powi(-12))
}

pub fn mid_reference(refs: &References) -> f64 {
    (refs.vrefp + refs.vrefn) / 2.0
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn ramp_examples() {
        assert_eq!(ramp(3, -1.0, 1.0, 1.0).unwrap().samples, vec![-1.0, 0.0, 1.0]);
        assert_eq!(ramp(2, 0.0, 1.0, 1.0).unwrap().samples, vec![0.0, 1.0]);
        assert_eq!(ramp(5, 0.0, 1.0, 1.0).unwrap().samples, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(ramp(1, 0.0, 1.0, 1.0).is_err());
        assert!(ramp(4, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn dc_examples() {
        assert_eq!(dc(4, 0.5, 1.0).unwrap().samples, vec![0.5; 4]);
        assert_eq!(dc(1, -1.0, 1.0).unwrap().samples, vec![-1.0]);
        assert_eq!(dc(2, 0.0, 1.0).unwrap().samples, vec![0.0, 0.0]);
        assert!(dc(0, 0.0, 1.0).is_err());
    }

    #[test]
    fn sine_table() {
        let w = sine_coherent(8, 1, 1.0, 0.0, 8.0, 0.0).unwrap();
        let expect = [0.0, FRAC_1_SQRT_2, 1.0, FRAC_1_SQRT_2, 0.0, -FRAC_1_SQRT_2, -1.0, -FRAC_1_SQRT_2];
        for (got, want) in w.samples.iter().zip(expect) {
            assert!((got - want).abs() < 1e-15, "{got} vs {want}");
        }
    }

    #[test]
    fn tone_frequency() {
        let t = CoherentTone { n_fft: 1024, cycles: 101, amplitude: 1.0, offset: 0.0, phase: 0.0 };
        assert_eq!(t.frequency(20e6), 1_972_656.25);
    }

    #[test]
    fn zero_amplitude_is_offset() {
        let w = sine_coherent(64, 5, 0.0, 0.3, 1.0, 0.4).unwrap();
        assert!(w.samples.iter().all(|&v| v == 0.3));
    }

    #[test]
    fn coherence_errors() {
        let err = sine_coherent(1024, 100, 1.0, 0.0, 1.0, 0.0).unwrap_err();
        assert_eq!(err, AdcError::Coherence { cycles: 100, n_fft: 1024 });
        assert!(matches!(sine_coherent(1024, 0, 1.0, 0.0, 1.0, 0.0), Err(AdcError::Coherence { .. })));
        assert!(matches!(sine_coherent(1024, 513, 1.0, 0.0, 1.0, 0.0), Err(AdcError::Coherence { .. })));
        assert!(matches!(sine_coherent(1000, 101, 1.0, 0.0, 1.0, 0.0), Err(AdcError::InvalidInput(_))));
    }

    #[test]
    fn full_scale_default() {
        let a = full_scale_amplitude(&References::default());
        assert_eq!(a, 1.0 - 1.0 / 4096.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn tone_repeats_every_record(
                log_n in 3u32..12,
                c in 0usize..2048,
                amp in 0.0f64..2.0,
                phase in -3.2f64..3.2,
            ) {
                let n = 1usize << log_n;
                let cycles = 2 * (c % (n / 4)) + 1;
                let tone = CoherentTone { n_fft: n, cycles, amplitude: amp, offset: 0.1, phase };
                let w = tone.waveform(2 * n, 1.0).unwrap();
                prop_assert_eq!(&w.samples[..n], &w.samples[n..]);
            }

            #[test]
            fn ramp_is_affine(n in 3usize..2000, v0 in -2.0f64..2.0, v1 in -2.0f64..2.0) {
                let w = ramp(n, v0, v1, 1.0).unwrap();
                let step = (v1 - v0) / (n - 1) as f64;
                let tol = 4.0 * f64::EPSILON * (v0.abs().max(v1.abs()) + step.abs());
                for d in w.samples.windows(3) {
                    prop_assert!((d[2] - 2.0 * d[1] + d[0]).abs() <= tol);
                }
                prop_assert_eq!(w.samples[0], v0);
                prop_assert_eq!(w.samples[n - 1], v1);
            }
        }
    }
}
