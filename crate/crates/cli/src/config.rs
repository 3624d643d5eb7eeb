//! JSON run configuration.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spinlab_core::diagram::SweepSpec;
use spinlab_core::landscape::{PhiSection, DEFAULT_RESOLUTION};
use spinlab_core::{ModelParams, Spin};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Landscape,
    Diagram,
    Convergence,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Spectrum => "spectrum",
            Command::Landscape => "landscape",
            Command::Diagram => "diagram",
            Command::Convergence => "convergence",
        })
    }
}

fn default_resolution() -> usize {
    DEFAULT_RESOLUTION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumBlock {
    pub spins: Vec<Spin>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandscapeBlock {
    pub samples: usize,
    pub phi_section: PhiSection,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

/// Sweep window; the fixed couplings come from the model block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramBlock {
    pub j_min: f64,
    pub j_max: f64,
    pub j_steps: usize,
    pub jc_min: f64,
    pub jc_max: f64,
    pub jc_steps: usize,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceBlock {
    pub spins: Vec<Spin>,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "OutputConfig::default_path")]
    pub path: PathBuf,
    #[serde(default = "OutputConfig::default_format")]
    pub format: Format,
}

impl OutputConfig {
    fn default_path() -> PathBuf {
        PathBuf::from("out")
    }

    fn default_format() -> Format {
        Format::Csv
    }
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            path: Self::default_path(),
            format: Self::default_format(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub landscape: Option<LandscapeBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagram: Option<DiagramBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceBlock>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// The single command block present.
    pub fn command(&self) -> Result<Command, CliError> {
        let present: Vec<Command> = [
            (self.spectrum.is_some(), Command::Spectrum),
            (self.landscape.is_some(), Command::Landscape),
            (self.diagram.is_some(), Command::Diagram),
            (self.convergence.is_some(), Command::Convergence),
        ]
        .into_iter()
        .filter_map(|(p, c)| p.then_some(c))
        .collect();
        match present.as_slice() {
            [one] => Ok(*one),
            [] => Err(CliError::Config("config has no command block".into())),
            many => Err(CliError::Config(format!(
                "config has {} command blocks, expected exactly one",
                many.len()
            ))),
        }
    }

    /// Model and command block, without the output location.
    pub fn echo(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = v.as_object_mut() {
            map.remove("output");
        }
        v
    }

    pub fn sweep_spec(&self) -> Option<SweepSpec> {
        let d = self.diagram.as_ref()?;
        Some(SweepSpec {
            j_min: d.j_min,
            j_max: d.j_max,
            j_steps: d.j_steps,
            jc_min: d.jc_min,
            jc_max: d.jc_max,
            jc_steps: d.jc_steps,
            omega: self.model.omega,
            omega_t: self.model.omega_t,
            delta: self.model.delta,
            delta_t: self.model.delta_t,
            resolution: d.resolution,
        })
    }
}
