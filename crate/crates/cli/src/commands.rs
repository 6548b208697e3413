use std::fs;
use std::path::{Path, PathBuf};

use adcsim_core::config::{apply_override, is_summary, parse_document, ConfigFile};
use adcsim_core::experiment;
use adcsim_core::pipeline::Pipeline;
use adcsim_core::Resolved;

use crate::args::{Cli, Command};
use crate::error::CliError;
use crate::output::{self, ConvertSummary, LinearitySummary, SpectrumSummary, Summary};

/// Everything one run needs, after argument parsing.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub command: Command,
    pub config_path: PathBuf,
    pub output_dir: PathBuf,
    pub overrides: Vec<String>,
    pub force: bool,
    pub input: Option<PathBuf>,
}

impl From<&Cli> for RunManifest {
    fn from(cli: &Cli) -> Self {
        RunManifest {
            command: cli.command,
            config_path: cli.config.clone(),
            output_dir: cli.out.clone(),
            overrides: cli.overrides.clone(),
            force: cli.force,
            input: cli.input.clone(),
        }
    }
}

/// Reads, overrides, defaults and validates a configuration file.
pub fn load_config(path: &Path, overrides: &[String]) -> Result<Resolved, CliError> {
    let config_err = |source| CliError::Config { path: path.to_path_buf(), source };
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    let file = if overrides.is_empty() {
        ConfigFile::from_json_str(&text).map_err(config_err)?
    } else {
        let mut doc = parse_document(&text).map_err(config_err)?;
        // Overrides address the configuration even when given a summary.
        let target = if is_summary(&doc) { &mut doc["config"] } else { &mut doc };
        for o in overrides {
            apply_override(target, o).map_err(config_err)?;
        }
        ConfigFile::from_value(doc).map_err(config_err)?
    };
    file.resolve().map_err(config_err)
}

/// Runs one experiment and writes its outputs.
pub fn execute(manifest: &RunManifest) -> Result<(), CliError> {
    let cfg = load_config(&manifest.config_path, &manifest.overrides)?;
    let dir = &manifest.output_dir;
    fs::create_dir_all(dir).map_err(CliError::io(dir))?;

    let config_value = serde_json::to_value(cfg.to_file()).expect("config serializes");
    let mut summary = Summary::open(dir, &config_value, cfg.adc.rng_seed, manifest.force)?;

    match manifest.command {
        Command::Linearity => {
            let path = dir.join("linearity.csv");
            output::check_writable(&path, manifest.force)?;
            let report = experiment::run_linearity(&cfg)?;
            output::write_linearity_csv(&path, &report)?;
            summary.set("linearity", LinearitySummary::from(&report));
        }
        Command::Spectrum => {
            let path = dir.join("spectrum.csv");
            output::check_writable(&path, manifest.force)?;
            let run = experiment::run_spectrum(&cfg)?;
            output::write_spectrum_csv(&path, &run, cfg.adc.sample_rate)?;
            summary.set("spectrum", SpectrumSummary::from(&run));
        }
        Command::Convert => {
            let input = manifest
                .input
                .as_ref()
                .ok_or_else(|| CliError::Usage("convert requires --input <csv>".into()))?;
            let path = dir.join("codes.csv");
            output::check_writable(&path, manifest.force)?;
            let samples = read_input(input)?;
            let records = Pipeline::new(cfg.adc.clone())?.run(&samples)?;
            output::write_codes_csv(&path, &records)?;
            summary.set(
                "convert",
                ConvertSummary { n_samples: records.len(), latency_cycles: cfg.adc.n_bits },
            );
        }
    }
    summary.write()
}

/// Reads a one-column `vin_v` CSV. Rows are numbered from 1 after the header.
pub fn read_input(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let row_err = |row, reason: String| CliError::InputRow { path: path.to_path_buf(), row, reason };
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| row_err(0, e.to_string()))?;
    if headers.len() != 1 || &headers[0] != "vin_v" {
        return Err(row_err(0, format!("expected header `vin_v`, got {:?}", headers.iter().collect::<Vec<_>>())));
    }
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| row_err(row, e.to_string()))?;
        let field = rec.get(0).unwrap_or("");
        let v: f64 = field
            .parse()
            .map_err(|_| row_err(row, format!("cannot parse {field:?} as a voltage")))?;
        if !v.is_finite() {
            return Err(row_err(row, format!("voltage must be finite, got {field}")));
        }
        out.push(v);
    }
    Ok(out)
}

/// Splits `key=v1,v2,...` into one override per value.
fn sweep_points(spec: &str) -> Result<(String, Vec<String>), CliError> {
    let (key, values) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("--sweep expects KEY=V1,V2,..., got {spec:?}")))?;
    let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
    if values.is_empty() {
        return Err(CliError::Usage("--sweep needs at least one value".into()));
    }
    Ok((key.trim().to_string(), values))
}

/// Entry point: a single run, or one run per sweep value executed
/// concurrently into separate subdirectories.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let base = RunManifest::from(cli);
    let Some(spec) = &cli.sweep else {
        return execute(&base);
    };
    let (key, values) = sweep_points(spec)?;
    let manifests: Vec<RunManifest> = values
        .iter()
        .map(|v| {
            let mut m = base.clone();
            m.output_dir = base.output_dir.join(format!("{key}={v}"));
            m.overrides.push(format!("{key}={v}"));
            m
        })
        .collect();
    let results: Vec<Result<(), CliError>> = std::thread::scope(|s| {
        let handles: Vec<_> = manifests.iter().map(|m| s.spawn(move || execute(m))).collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    results.into_iter().collect()
}
