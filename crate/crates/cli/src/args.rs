use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Convert a CSV of input voltages through the clocked pipeline.
    Convert,
    /// DC sweep: code transitions, DNL and INL.
    Linearity,
    /// Coherent-tone FFT: SNDR, ENOB and SFDR.
    Spectrum,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Convert => "convert",
            Command::Linearity => "linearity",
            Command::Spectrum => "spectrum",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "adcsim", version, about = "Pipeline ADC behavioral simulator")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,

    /// JSON configuration file (a previous summary.json is also accepted).
    #[arg(long)]
    pub config: PathBuf,

    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,

    /// Overwrite existing output files.
    #[arg(long)]
    pub force: bool,

    /// Override a configuration key, e.g. `stage_defaults.dc_gain_db=55`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,

    /// Input voltages for `convert`: CSV with a `vin_v` header.
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Run once per value, e.g. `stage_defaults.dc_gain_db=40,55,70`, each
    /// into `<out>/<key>=<value>/`.
    #[arg(long, value_name = "KEY=V1,V2,...")]
    pub sweep: Option<String>,
}
