//! Iterative radix-2 decimation-in-time FFT.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{AdcError, Result};

/// Precomputed twiddles and bit-reversal permutation for one length.
#[derive(Debug, Clone)]
pub struct Radix2Plan {
    len: usize,
    twiddles: Vec<Complex64>,
    reversed: Vec<usize>,
}

impl Radix2Plan {
    pub fn new(len: usize) -> Result<Self> {
        if len == 0 || !len.is_power_of_two() {
            return Err(AdcError::InvalidInput(format!("FFT length must be a power of two, got {len}")));
        }
        let bits = len.trailing_zeros();
        let reversed = (0..len)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        // Each twiddle is evaluated directly; a rotation recurrence drifts.
        let twiddles = (0..len / 2)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / len as f64))
            .collect();
        Ok(Radix2Plan { len, twiddles, reversed })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Forward transform in place, unnormalized: `X[k] = Σ x[n]·e^{-2πikn/N}`.
    pub fn process(&self, buf: &mut [Complex64]) -> Result<()> {
        if buf.len() != self.len {
            return Err(AdcError::InvalidInput(format!(
                "buffer length {} does not match plan length {}",
                buf.len(),
                self.len
            )));
        }
        for (i, &j) in self.reversed.iter().enumerate() {
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < self.len {
            let stride = self.len / (2 * half);
            for block in buf.chunks_exact_mut(2 * half) {
                let (lo, hi) = block.split_at_mut(half);
                for (k, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                    let t = self.twiddles[k * stride] * *b;
                    *b = *a - t;
                    *a += t;
                }
            }
            half *= 2;
        }
        Ok(())
    }
}

pub fn fft(input: &[Complex64]) -> Result<Vec<Complex64>> {
    let plan = Radix2Plan::new(input.len())?;
    let mut buf = input.to_vec();
    plan.process(&mut buf)?;
    Ok(buf)
}

pub fn fft_real(input: &[f64]) -> Result<Vec<Complex64>> {
    let plan = Radix2Plan::new(input.len())?;
    let mut buf: Vec<Complex64> = input.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    plan.process(&mut buf)?;
    Ok(buf)
}
