//! CSV data files and the merged `summary.json`.

use std::fs;
use std::path::{Path, PathBuf};

use adcsim_core::experiment::SpectrumRun;
use adcsim_core::{ConversionRecord, LinearityReport, Metric};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;

pub const SUMMARY: &str = "summary.json";

#[derive(Debug, Serialize)]
pub struct LinearitySummary {
    pub lsb_v: f64,
    pub resolution_v: f64,
    pub worst_dnl: f64,
    pub worst_inl: f64,
    pub missing_codes: Vec<u32>,
}

impl From<&LinearityReport> for LinearitySummary {
    fn from(r: &LinearityReport) -> Self {
        LinearitySummary {
            lsb_v: r.lsb,
            resolution_v: r.resolution,
            worst_dnl: r.worst_dnl,
            worst_inl: r.worst_inl,
            missing_codes: r.missing_codes.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SpectrumSummary {
    pub n_fft: usize,
    pub signal_bin: usize,
    pub tone_hz: f64,
    pub sndr_db: Metric,
    pub sndr_db_rounded: Metric,
    pub enob_bits: Metric,
    pub sfdr_db: Metric,
    pub sfdr_db_rounded: Metric,
}

fn round2(m: Metric) -> Metric {
    m.map(|v| (v * 100.0).round() / 100.0)
}

impl From<&SpectrumRun> for SpectrumSummary {
    fn from(run: &SpectrumRun) -> Self {
        let r = &run.report;
        SpectrumSummary {
            n_fft: r.n_fft,
            signal_bin: r.signal_bin,
            tone_hz: run.tone_hz,
            sndr_db: r.sndr_db,
            sndr_db_rounded: round2(r.sndr_db),
            enob_bits: r.enob_bits,
            sfdr_db: r.sfdr_db,
            sfdr_db_rounded: round2(r.sfdr_db),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ConvertSummary {
    pub n_samples: usize,
    pub latency_cycles: u32,
}

/// Fails unless `path` is free or overwriting was requested.
pub fn check_writable(path: &Path, force: bool) -> Result<(), CliError> {
    if path.exists() && !force {
        return Err(CliError::Exists(path.to_path_buf()));
    }
    Ok(())
}

fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io { path: path.to_path_buf(), source: e.into() };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(CliError::io(path))
}

pub fn write_linearity_csv(path: &Path, report: &LinearityReport) -> Result<(), CliError> {
    let rows = report.transitions.iter().enumerate().map(|(i, t)| {
        vec![
            (i + 1).to_string(),
            t.to_string(),
            report.dnl.get(i).map(f64::to_string).unwrap_or_default(),
            report.inl[i].to_string(),
        ]
    });
    write_csv(path, &["code", "transition_v", "dnl_lsb", "inl_lsb"], rows)
}

pub fn write_spectrum_csv(path: &Path, run: &SpectrumRun, sample_rate: f64) -> Result<(), CliError> {
    let n = run.report.n_fft as f64;
    let rows = run.report.magnitudes_db.iter().enumerate().map(|(k, m)| {
        vec![k.to_string(), (k as f64 * sample_rate / n).to_string(), m.to_string()]
    });
    write_csv(path, &["bin", "freq_hz", "mag_dbfs"], rows)
}

pub fn write_codes_csv(path: &Path, records: &[ConversionRecord]) -> Result<(), CliError> {
    let rows = records.iter().map(|r| {
        vec![
            r.sample_index.to_string(),
            r.code.to_string(),
            r.emit_cycle.to_string(),
            r.bit_string(),
        ]
    });
    write_csv(path, &["sample_index", "code", "emit_cycle", "bits"], rows)
}

/// Summary document for one output directory. Sections from earlier runs are
/// kept when they were produced from the same resolved configuration.
pub struct Summary {
    path: PathBuf,
    doc: Map<String, Value>,
}

impl Summary {
    pub fn open(dir: &Path, config: &Value, rng_seed: u64, force: bool) -> Result<Self, CliError> {
        let path = dir.join(SUMMARY);
        let mut doc = Map::new();
        if path.exists() {
            let text = fs::read_to_string(&path).map_err(CliError::io(&path))?;
            match serde_json::from_str::<Map<String, Value>>(&text) {
                Ok(prev) if prev.get("config") == Some(config) => doc = prev,
                _ if force => {}
                _ => return Err(CliError::Exists(path)),
            }
        }
        doc.insert("tool".into(), Value::from(crate::TOOL));
        doc.insert("version".into(), Value::from(crate::VERSION));
        doc.insert("rng_seed".into(), Value::from(rng_seed));
        doc.insert("config".into(), config.clone());
        Ok(Summary { path, doc })
    }

    pub fn set(&mut self, section: &str, value: impl Serialize) {
        self.doc.insert(section.into(), serde_json::to_value(value).expect("summary sections serialize"));
    }

    pub fn write(&self) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(&self.doc).expect("summary serializes");
        text.push('\n');
        fs::write(&self.path, text).map_err(CliError::io(&self.path))
    }
}
