//! Clutter recordings on disk: parsing, decimation and writing.
//!
//! Three canonical layouts are understood:
//!
//! * `amplitude-csv`: one nonnegative decimal per line, `#` starts a comment;
//! * `iq-csv`: `I,Q` per line;
//! * `iq-f32le`: headerless interleaved `f32` little-endian `(I, Q)` pairs.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    AmplitudeCsv,
    IqCsv,
    IqF32le,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::AmplitudeCsv => "amplitude-csv",
            Format::IqCsv => "iq-csv",
            Format::IqF32le => "iq-f32le",
        }
    }

    pub fn is_iq(self) -> bool {
        !matches!(self, Format::AmplitudeCsv)
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "amplitude-csv" => Ok(Format::AmplitudeCsv),
            "iq-csv" => Ok(Format::IqCsv),
            "iq-f32le" => Ok(Format::IqF32le),
            other => Err(format!(
                "unknown format `{other}` (expected amplitude-csv, iq-csv or iq-f32le)"
            )),
        }
    }
}

/// Where and how to read a recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSource {
    pub path: PathBuf,
    pub format: Format,
    /// Keep pulses `0, N, 2N, …`.
    pub decimate: usize,
    /// Cap on the number of pulses kept after decimation.
    pub max_pulses: Option<usize>,
}

impl DataSource {
    pub fn new(path: impl Into<PathBuf>, format: Format) -> Self {
        Self {
            path: path.into(),
            format,
            decimate: 1,
            max_pulses: None,
        }
    }

    /// Reads the recording and returns the kept amplitudes.
    pub fn load(&self) -> Result<Vec<f64>, CliError> {
        if self.decimate == 0 {
            return Err(CliError::Usage("--decimate must be at least 1".into()));
        }
        let bytes = fs::read(&self.path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", self.path.display())))?;
        let all = match self.format {
            Format::AmplitudeCsv => parse_amplitude_csv(&self.path, &bytes)?,
            Format::IqCsv => parse_iq_csv(&self.path, &bytes)?,
            Format::IqF32le => parse_iq_f32le(&self.path, &bytes)?,
        };
        Ok(decimate(all, self.decimate, self.max_pulses))
    }
}

/// Keeps indices `0, n, 2n, …`, at most `max` of them.
pub fn decimate(values: Vec<f64>, n: usize, max: Option<usize>) -> Vec<f64> {
    let cap = max.unwrap_or(usize::MAX);
    if n == 1 {
        let mut values = values;
        values.truncate(cap);
        return values;
    }
    values.into_iter().step_by(n).take(cap).collect()
}

fn text<'a>(path: &Path, bytes: &'a [u8]) -> Result<&'a str, CliError> {
    std::str::from_utf8(bytes).map_err(|e| {
        CliError::Parse(format!(
            "{}: byte {}: input is not valid UTF-8",
            path.display(),
            e.valid_up_to()
        ))
    })
}

/// Data lines with their 1-based line numbers; blank and `#` lines are skipped.
fn data_lines(s: &str) -> impl Iterator<Item = (usize, &str)> {
    s.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
}

fn parse_field(path: &Path, line: usize, field: &str) -> Result<f64, CliError> {
    let v: f64 = field.trim().parse().map_err(|_| {
        CliError::Parse(format!(
            "{}:{line}: `{}` is not a number",
            path.display(),
            field.trim()
        ))
    })?;
    if !v.is_finite() {
        return Err(CliError::Parse(format!(
            "{}:{line}: value `{}` is not finite",
            path.display(),
            field.trim()
        )));
    }
    Ok(v)
}

pub fn parse_amplitude_csv(path: &Path, bytes: &[u8]) -> Result<Vec<f64>, CliError> {
    data_lines(text(path, bytes)?)
        .map(|(n, line)| {
            let v = parse_field(path, n, line)?;
            if v < 0.0 {
                return Err(CliError::Parse(format!(
                    "{}:{n}: amplitude {v} is negative",
                    path.display()
                )));
            }
            Ok(v)
        })
        .collect()
}

pub fn parse_iq_csv(path: &Path, bytes: &[u8]) -> Result<Vec<f64>, CliError> {
    data_lines(text(path, bytes)?)
        .map(|(n, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 2 {
                return Err(CliError::Parse(format!(
                    "{}:{n}: expected `I,Q`, found {} field(s)",
                    path.display(),
                    fields.len()
                )));
            }
            let i = parse_field(path, n, fields[0])?;
            let q = parse_field(path, n, fields[1])?;
            Ok(i.hypot(q))
        })
        .collect()
}

pub fn parse_iq_f32le(path: &Path, bytes: &[u8]) -> Result<Vec<f64>, CliError> {
    let rem = bytes.len() % 8;
    if rem != 0 {
        return Err(CliError::Parse(format!(
            "{}: byte {}: trailing {rem} byte(s) do not form an (I, Q) f32 pair",
            path.display(),
            bytes.len() - rem
        )));
    }
    bytes
        .chunks_exact(8)
        .enumerate()
        .map(|(k, pair)| {
            let i = f32::from_le_bytes(pair[..4].try_into().unwrap());
            let q = f32::from_le_bytes(pair[4..].try_into().unwrap());
            for (offset, v) in [(8 * k, i), (8 * k + 4, q)] {
                if !v.is_finite() {
                    return Err(CliError::Parse(format!(
                        "{}: byte {offset}: value {v} is not finite",
                        path.display()
                    )));
                }
            }
            Ok(f64::from(i).hypot(f64::from(q)))
        })
        .collect()
}

/// Amplitudes, one per line, in shortest round-trip decimal form.
pub fn write_amplitude_csv<W: Write>(mut w: W, values: &[f64]) -> std::io::Result<()> {
    for v in values {
        writeln!(w, "{v}")?;
    }
    w.flush()
}

pub fn write_iq_csv<W: Write>(mut w: W, i_comp: &[f64], q_comp: &[f64]) -> std::io::Result<()> {
    for (i, q) in i_comp.iter().zip(q_comp) {
        writeln!(w, "{i},{q}")?;
    }
    w.flush()
}

/// Interleaved `f32` little-endian pairs; components are rounded to `f32`.
pub fn write_iq_f32le<W: Write>(mut w: W, i_comp: &[f64], q_comp: &[f64]) -> std::io::Result<()> {
    let mut buf = Vec::with_capacity(8 * i_comp.len());
    for (&i, &q) in i_comp.iter().zip(q_comp) {
        buf.extend_from_slice(&(i as f32).to_le_bytes());
        buf.extend_from_slice(&(q as f32).to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()
}
