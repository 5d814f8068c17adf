//! JSON documents written by `fit` and `gof`.

use std::path::PathBuf;

use cft_rayleigh::estimate::{EstimationConfig, FitResult};
use cft_rayleigh::gof::{GofConfig, GofReport};
use cft_rayleigh::{ModelKind, ModelParams, QuadratureSpec};
use serde::{Deserialize, Serialize};

use crate::io::{DataSource, Format};
use crate::CliError;

pub const TOOL: &str = "cftray";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA: u32 = 1;

/// The recording a report was computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDescriptor {
    pub path: PathBuf,
    pub format: Format,
    pub decimate: usize,
    pub max_pulses: Option<usize>,
    /// Amplitudes kept after decimation.
    pub samples: usize,
    /// Root-mean-square amplitude `P`.
    pub power: f64,
}

impl InputDescriptor {
    pub fn new(source: &DataSource, samples: usize, power: f64) -> Self {
        Self {
            path: source.path.clone(),
            format: source.format,
            decimate: source.decimate,
            max_pulses: source.max_pulses,
            samples,
            power,
        }
    }

    pub fn source(&self) -> DataSource {
        DataSource {
            path: self.path.clone(),
            format: self.format,
            decimate: self.decimate,
            max_pulses: self.max_pulses,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub estimation: EstimationConfig,
    pub gof: GofConfig,
    pub quadrature: QuadratureSpec,
}

/// Result of one model: either a fit with its goodness of fit, or the error
/// that stopped it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBlock {
    pub model: ModelKind,
    pub fit: Option<FitResult>,
    pub gof: Option<GofReport>,
    pub error: Option<String>,
}

impl ModelBlock {
    pub fn params(&self) -> Option<ModelParams> {
        self.fit.as_ref().map(|f| f.params)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub tool: String,
    pub version: String,
    pub schema: u32,
    pub input: InputDescriptor,
    pub config: ConfigEcho,
    pub seed: Option<u64>,
    pub models: Vec<ModelBlock>,
}

impl FitReport {
    pub fn model(&self, kind: ModelKind) -> Option<&ModelBlock> {
        self.models.iter().find(|b| b.model == kind)
    }
}

/// Goodness of fit of one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofEntry {
    pub model: ModelKind,
    pub params: ModelParams,
    pub gof: Option<GofReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofOutput {
    pub tool: String,
    pub version: String,
    pub schema: u32,
    pub input: InputDescriptor,
    pub gof_config: GofConfig,
    pub quadrature: QuadratureSpec,
    pub results: Vec<GofEntry>,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Numeric(format!("cannot encode report: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<T: for<'de> Deserialize<'de>>(label: &str, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(format!("{label}: {e}")))
}
