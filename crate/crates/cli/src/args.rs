//! Command-line grammar.

use std::path::PathBuf;

use cft_rayleigh::{ModelKind, Truncation};
use clap::{Args, Parser, Subcommand};

use crate::io::{DataSource, Format};

#[derive(Debug, Parser)]
#[command(name = "cftray", version, about = "Fit, simulate and test CFT-Rayleigh clutter amplitudes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit models to a recording and test each fit.
    Fit(FitArgs),
    /// Draw synthetic clutter.
    Simulate(SimulateArgs),
    /// Tabulate pdf and ccdf of one model.
    Eval(EvalArgs),
    /// Test given parameters against a recording without refitting.
    Gof(GofArgs),
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Recording to read.
    pub input: Option<PathBuf>,
    /// amplitude-csv, iq-csv or iq-f32le.
    #[arg(long)]
    pub format: Option<Format>,
    /// Keep one pulse in N, starting with the first.
    #[arg(long)]
    pub decimate: Option<usize>,
    /// Keep at most this many pulses after decimation.
    #[arg(long)]
    pub max_pulses: Option<usize>,
}

impl SourceArgs {
    /// The source described by the flags, with unset fields taken from `base`.
    pub fn resolve(&self, base: Option<&DataSource>) -> Option<DataSource> {
        let path = self.input.clone().or_else(|| base.map(|b| b.path.clone()))?;
        let from_base = base.filter(|_| self.input.is_none());
        Some(DataSource {
            path,
            format: self
                .format
                .or(from_base.map(|b| b.format))
                .unwrap_or(Format::AmplitudeCsv),
            decimate: self
                .decimate
                .or(from_base.map(|b| b.decimate))
                .unwrap_or(1),
            max_pulses: self.max_pulses.or(from_base.and_then(|b| b.max_pulses)),
        })
    }
}

#[derive(Debug, Args)]
pub struct QuadratureArgs {
    /// Absolute quadrature tolerance.
    #[arg(long)]
    pub tol_abs: Option<f64>,
    /// Relative quadrature tolerance.
    #[arg(long)]
    pub tol_rel: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Characteristic exponent in (0, 2].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Scale.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Truncation; omit or pass `inf` for the untempered law.
    #[arg(long)]
    pub eta: Option<Truncation>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Comma-separated subset of rayleigh, ht-rayleigh, cft-rayleigh.
    #[arg(long, value_delimiter = ',')]
    pub models: Option<Vec<ModelKind>>,
    /// Gauss–Hermite half-order of the matching objective.
    #[arg(long)]
    pub k_nodes: Option<usize>,
    /// False-alarm probability of the threshold-error test.
    #[arg(long)]
    pub pfa: Option<f64>,
    #[command(flatten)]
    pub quadrature: QuadratureArgs,
    /// Recorded in the report; fitting itself is deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report path; standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write an (r, empirical ccdf, model ccdf…) table here.
    #[arg(long)]
    pub ccdf_out: Option<PathBuf>,
    /// Number of log-spaced abscissae in the ccdf table.
    #[arg(long, default_value_t = 100)]
    pub ccdf_points: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Number of pulses.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "amplitude-csv")]
    pub format: Format,
    /// Output path; standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Explicit comma-separated abscissae.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["r_min", "r_max", "points", "log_spaced"])]
    pub r_list: Option<Vec<f64>>,
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    /// Space the grid logarithmically instead of linearly.
    #[arg(long)]
    pub log_spaced: bool,
    #[command(flatten)]
    pub quadrature: QuadratureArgs,
    /// Table path; standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GofArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Take parameters, configuration and (by default) the input from a fit report.
    #[arg(long, conflicts_with_all = ["alpha", "gamma", "eta"])]
    pub report: Option<PathBuf>,
    /// With --report, restrict to these models.
    #[arg(long, value_delimiter = ',', requires = "report")]
    pub models: Option<Vec<ModelKind>>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub pfa: Option<f64>,
    #[command(flatten)]
    pub quadrature: QuadratureArgs,
    /// Output path; standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
