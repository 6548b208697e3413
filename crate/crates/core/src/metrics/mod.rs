//! Converter characterization: static linearity from code transitions and
//! dynamic performance from a coherent-tone spectrum.

mod linearity;
mod spectrum;

pub use linearity::{
    characterize_linearity, default_resolution, dnl, find_transitions, inl, worst, LinearityReport,
    Transitions,
};
pub use spectrum::{
    analyze_spectrum, enob, fft_magnitude, sfdr, sndr, Spectrum, SpectrumReport, DB_FLOOR,
    POWER_FLOOR,
};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A ratio that is either a finite number or unbounded (nothing in the
/// denominator). Serializes as a number or the string `"unbounded"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    Finite(f64),
    Unbounded,
}

impl Metric {
    pub fn value(self) -> Option<f64> {
        match self {
            Metric::Finite(v) => Some(v),
            Metric::Unbounded => None,
        }
    }

    pub fn map(self, f: impl FnOnce(f64) -> f64) -> Metric {
        match self {
            Metric::Finite(v) => Metric::Finite(f(v)),
            Metric::Unbounded => Metric::Unbounded,
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Metric::Finite(v) => write!(f, "{v}"),
            Metric::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for Metric {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Metric::Finite(v) => s.serialize_f64(*v),
            Metric::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for Metric {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(Metric::Finite(v)),
            Repr::Str(s) if s == "unbounded" => Ok(Metric::Unbounded),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("expected number or \"unbounded\", got {s:?}"))),
        }
    }
}
