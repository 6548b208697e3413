//! Clocked pipeline engine.
//!
//! Each master clock cycle has two phases. In phase 1 every stage samples the
//! residue its predecessor held over from the previous multiplying phase (stage
//! 1 samples the new input) and its comparator resolves a bit. In phase 2 every
//! stage multiplies and holds its residue until the next stage samples it. A
//! sample entering at cycle `t` therefore leaves stage N at the end of cycle
//! `t + N - 1` and is emitted at the start of cycle `t + N`.

use serde::{Deserialize, Serialize};

use crate::adc::{AdcConfig, ConversionRecord, NoiseSource};
use crate::error::{finite, AdcError, Result};
use crate::stage::{assemble_code, compare, residue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Phi1Sampling,
    Phi2Multiplying,
}

/// A sample travelling down the pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InFlight {
    /// Cycle at which stage 1 sampled it.
    pub sample_index: u64,
    pub bits: Vec<u8>,
    /// Voltage currently sampled by the stage holding this sample.
    pub input: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineState {
    pub cycle: u64,
    pub phase: Phase,
    /// Residue held at each stage output after its multiplying phase.
    pub held_residues: Vec<Option<f64>>,
    pub in_flight: Vec<Option<InFlight>>,
    /// Sample resolved by the last stage, waiting for the next clock edge.
    pub completed: Option<InFlight>,
}

impl PipelineState {
    pub fn new(n_stages: usize) -> Self {
        PipelineState {
            cycle: 0,
            phase: Phase::Phi1Sampling,
            held_residues: vec![None; n_stages],
            in_flight: vec![None; n_stages],
            completed: None,
        }
    }

    pub fn n_stages(&self) -> usize {
        self.in_flight.len()
    }

    /// True when no sample is inside the pipeline.
    pub fn is_empty(&self) -> bool {
        self.completed.is_none() && self.in_flight.iter().all(Option::is_none)
    }

    fn check(&self, config: &AdcConfig) -> Result<()> {
        let n = config.n_bits as usize;
        if self.in_flight.len() != n || self.held_residues.len() != n || config.stages.len() != n {
            return Err(AdcError::InvalidState(format!(
                "state has {} stages, config has {}",
                self.in_flight.len(),
                n
            )));
        }
        Ok(())
    }

    /// Phase 1: emit the finished sample, shift held residues into the next
    /// stages, ingest `new_sample` into stage 1 and resolve every comparator.
    pub fn sampling_phase(
        &mut self,
        new_sample: Option<f64>,
        config: &AdcConfig,
    ) -> Result<Option<ConversionRecord>> {
        self.check(config)?;
        if self.phase != Phase::Phi1Sampling {
            return Err(AdcError::InvalidState("sampling phase requested during phase 2".into()));
        }
        if let Some(v) = new_sample {
            finite("vin", v)?;
        }

        let emitted = match self.completed.take() {
            Some(done) => Some(ConversionRecord {
                code: assemble_code(&done.bits)?,
                sample_index: done.sample_index,
                bits: done.bits,
                emit_cycle: self.cycle,
            }),
            None => None,
        };

        let n = self.n_stages();
        for i in (1..n).rev() {
            let moved = self.in_flight[i - 1].take();
            let held = self.held_residues[i - 1].take();
            self.in_flight[i] = match (moved, held) {
                (Some(mut s), Some(v)) => {
                    s.input = v;
                    Some(s)
                }
                (None, None) => None,
                _ => return Err(AdcError::InvalidState(format!("stage {i} lost its residue"))),
            };
        }
        self.in_flight[0] = new_sample.map(|v| InFlight {
            sample_index: self.cycle,
            bits: Vec::with_capacity(n),
            input: v,
        });

        for (slot, stage) in self.in_flight.iter_mut().zip(&config.stages) {
            if let Some(s) = slot {
                s.bits.push(compare(s.input, &config.refs, stage.comparator_offset)?);
            }
        }
        self.phase = Phase::Phi2Multiplying;
        Ok(emitted)
    }

    /// Phase 2: every occupied stage computes and holds its residue. The last
    /// stage completes its sample instead.
    pub fn multiplying_phase(&mut self, config: &AdcConfig) -> Result<()> {
        self.check(config)?;
        if self.phase != Phase::Phi2Multiplying {
            return Err(AdcError::InvalidState("multiplying phase requested during phase 1".into()));
        }
        let last = self.n_stages() - 1;
        for i in 0..=last {
            let Some(s) = &self.in_flight[i] else { continue };
            let bit = *s.bits.last().expect("comparator resolved in phase 1");
            if i == last {
                self.completed = self.in_flight[i].take();
            } else {
                self.held_residues[i] = Some(residue(s.input, bit, &config.stages[i], &config.refs)?);
            }
        }
        self.phase = Phase::Phi1Sampling;
        self.cycle += 1;
        Ok(())
    }

    /// One full clock cycle.
    pub fn step(
        &mut self,
        new_sample: Option<f64>,
        config: &AdcConfig,
    ) -> Result<Option<ConversionRecord>> {
        let emitted = self.sampling_phase(new_sample, config)?;
        self.multiplying_phase(config)?;
        Ok(emitted)
    }
}

/// Value-style single step.
pub fn pipeline_step(
    mut state: PipelineState,
    new_sample: Option<f64>,
    config: &AdcConfig,
) -> Result<(PipelineState, Option<ConversionRecord>)> {
    let rec = state.step(new_sample, config)?;
    Ok((state, rec))
}

/// Streaming converter: pipeline state plus the noise drawn at stage-1
/// sampling, in the same order as [`crate::adc::Adc`].
#[derive(Debug, Clone)]
pub struct Pipeline {
    config: AdcConfig,
    noise: NoiseSource,
    state: PipelineState,
}

impl Pipeline {
    pub fn new(config: AdcConfig) -> Result<Self> {
        config.validate()?;
        let noise = NoiseSource::for_config(&config)?;
        let state = PipelineState::new(config.n_bits as usize);
        Ok(Pipeline { config, noise, state })
    }

    pub fn state(&self) -> &PipelineState {
        &self.state
    }

    pub fn clock(&mut self, new_sample: Option<f64>) -> Result<Option<ConversionRecord>> {
        let sampled = match new_sample {
            Some(v) => Some(finite("vin", v)? + self.noise.draw()),
            None => None,
        };
        self.state.step(sampled, &self.config)
    }

    /// Clocks with no input until every in-flight sample has been emitted.
    pub fn flush(&mut self) -> Result<Vec<ConversionRecord>> {
        let mut out = Vec::new();
        while !self.state.is_empty() {
            out.extend(self.clock(None)?);
        }
        Ok(out)
    }

    /// Feeds one sample per cycle, then drains.
    pub fn run(&mut self, samples: &[f64]) -> Result<Vec<ConversionRecord>> {
        let mut out = Vec::with_capacity(samples.len());
        for &v in samples {
            out.extend(self.clock(Some(v))?);
        }
        out.extend(self.flush()?);
        Ok(out)
    }
}
