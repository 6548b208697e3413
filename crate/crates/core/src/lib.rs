//! Behavioral model of an N-stage, 1-bit-per-stage switched-capacitor
//! pipeline ADC, with the metrology needed to characterize it: code
//! transitions, DNL/INL, and coherent-tone SNDR/ENOB/SFDR.

pub mod adc;
pub mod config;
pub mod error;
pub mod experiment;
pub mod fft;
pub mod metrics;
pub mod pipeline;
pub mod stage;
pub mod stimuli;

pub use adc::{convert_sample, Adc, AdcConfig, ConversionRecord};
pub use config::{load_config_str, ConfigFile, Resolved};
pub use error::{AdcError, Result};
pub use metrics::{LinearityReport, Metric, SpectrumReport};
pub use pipeline::{pipeline_step, Phase, Pipeline, PipelineState};
pub use stage::{assemble_code, compare, residue, References, StageParams};
pub use stimuli::Waveform;
