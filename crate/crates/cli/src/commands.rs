//! The four commands, split into pure computations (used by the tests) and
//! thin wrappers that handle flags and files.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use cft_rayleigh::amplitude::{ccdf, pdf};
use cft_rayleigh::estimate::{fit_cft_rayleigh, fit_ht_rayleigh, fit_rayleigh_with, EstimationConfig};
use cft_rayleigh::gof::{empirical_ccdf_sorted, gof_report, GofConfig};
use cft_rayleigh::sampler::{par_sample_amplitudes, par_sample_complex, TextureSampler};
use cft_rayleigh::{AmplitudeSeries, Error, ModelKind, ModelParams, QuadratureSpec, Truncation};
use rayon::prelude::*;

use crate::args::{Cli, Command, EvalArgs, FitArgs, GofArgs, ModelArgs, QuadratureArgs, SimulateArgs};
use crate::io::{self, DataSource, Format};
use crate::report::{
    from_json, to_json, ConfigEcho, FitReport, GofEntry, GofOutput, InputDescriptor, ModelBlock,
    SCHEMA, TOOL, VERSION,
};
use crate::CliError;

/// Fewest amplitudes `fit` accepts.
pub const MIN_SAMPLES: usize = 100;
/// Below this many amplitudes `fit` warns that estimates are unreliable.
pub const ADVISED_SAMPLES: usize = 10_000;

pub const ALL_MODELS: [ModelKind; 3] = [ModelKind::Rayleigh, ModelKind::HtRayleigh, ModelKind::CftRayleigh];

pub fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Fit(a) => run_fit(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Eval(a) => run_eval(a),
        Command::Gof(a) => run_gof(a),
    }
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::Usage(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Usage(format!("stdout: {e}")))
        }
    }
}

fn quadrature(a: &QuadratureArgs, base: QuadratureSpec) -> Result<QuadratureSpec, CliError> {
    let q = QuadratureSpec {
        abs_tol: a.tol_abs.unwrap_or(base.abs_tol),
        rel_tol: a.tol_rel.unwrap_or(base.rel_tol),
        ..base
    };
    q.validate()?;
    Ok(q)
}

fn model_params(a: &ModelArgs) -> Result<ModelParams, CliError> {
    let (Some(alpha), Some(gamma)) = (a.alpha, a.gamma) else {
        return Err(CliError::Usage("--alpha and --gamma are required".into()));
    };
    Ok(ModelParams::new(alpha, gamma, a.eta.unwrap_or(Truncation::Infinite))?)
}

fn dedup(models: &[ModelKind]) -> Vec<ModelKind> {
    let mut out = Vec::new();
    for &m in models {
        if !out.contains(&m) {
            out.push(m);
        }
    }
    out
}

fn load_series(source: &DataSource) -> Result<AmplitudeSeries, CliError> {
    let values = source.load()?;
    AmplitudeSeries::new(values)
        .map_err(|e| CliError::Parse(format!("{}: {e}", source.path.display())))
}

// ---------------------------------------------------------------- fit

/// Fits and tests each model; failures are recorded in their blocks.
pub fn fit_models(
    a: &AmplitudeSeries,
    models: &[ModelKind],
    cfg: &ConfigEcho,
) -> Vec<ModelBlock> {
    dedup(models)
        .into_iter()
        .map(|model| {
            let fit = match model {
                ModelKind::Rayleigh => fit_rayleigh_with(a, cfg.estimation.k_nodes),
                ModelKind::HtRayleigh => fit_ht_rayleigh(a, &cfg.estimation),
                ModelKind::CftRayleigh => fit_cft_rayleigh(a, &cfg.estimation),
            };
            match fit {
                Err(e) => ModelBlock {
                    model,
                    fit: None,
                    gof: None,
                    error: Some(e.to_string()),
                },
                Ok(fit) => {
                    let gof = gof_report(a, &fit.params, &cfg.gof, &cfg.quadrature);
                    let (gof, error) = match gof {
                        Ok(g) => (Some(g), None),
                        Err(e) => (None, Some(format!("goodness of fit: {e}"))),
                    };
                    ModelBlock {
                        model,
                        fit: Some(fit),
                        gof,
                        error,
                    }
                }
            }
        })
        .collect()
}

/// Full `fit` computation on an already loaded sample.
pub fn fit_report(
    source: &DataSource,
    a: &AmplitudeSeries,
    models: &[ModelKind],
    config: ConfigEcho,
    seed: Option<u64>,
) -> FitReport {
    let models = fit_models(a, models, &config);
    FitReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        schema: SCHEMA,
        input: InputDescriptor::new(source, a.len(), a.power()),
        config,
        seed,
        models,
    }
}

/// `points` log-spaced abscissae from the smallest positive sample to the largest.
pub fn ccdf_abscissae(sorted: &[f64], points: usize) -> Vec<f64> {
    let Some(&lo) = sorted.iter().find(|&&x| x > 0.0) else {
        return Vec::new();
    };
    let hi = *sorted.last().unwrap();
    if points <= 1 || lo == hi {
        return vec![lo];
    }
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| {
            if i + 1 == points {
                hi
            } else {
                (l0 + (l1 - l0) * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect()
}

fn fmt_value(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:e}"),
        None => "nan".into(),
    }
}

/// CSV of `r`, the empirical ccdf and the ccdf of every fitted model.
pub fn ccdf_table(a: &AmplitudeSeries, report: &FitReport, points: usize) -> String {
    let sorted = a.sorted();
    let fitted: Vec<(ModelKind, ModelParams)> = report
        .models
        .iter()
        .filter_map(|b| b.params().map(|p| (b.model, p)))
        .collect();
    let q = report.config.quadrature;
    let mut out = String::from("r,empirical");
    for (kind, _) in &fitted {
        write!(out, ",{kind}").unwrap();
    }
    out.push('\n');
    let rows: Vec<String> = ccdf_abscissae(&sorted, points)
        .par_iter()
        .map(|&r| {
            let mut row = format!("{r:e},{:e}", empirical_ccdf_sorted(&sorted, r));
            for (_, m) in &fitted {
                row.push(',');
                row.push_str(&fmt_value(ccdf(r, m, &q).ok().map(|d| d.value)));
            }
            row.push('\n');
            row
        })
        .collect();
    out.extend(rows);
    out
}

fn run_fit(args: FitArgs) -> Result<i32, CliError> {
    let source = args
        .source
        .resolve(None)
        .ok_or_else(|| CliError::Usage("fit needs an input file".into()))?;
    let estimation = EstimationConfig {
        k_nodes: args.k_nodes.unwrap_or(EstimationConfig::default().k_nodes),
        ..EstimationConfig::default()
    };
    estimation.validate()?;
    let gof = GofConfig {
        pfa: args.pfa.unwrap_or(GofConfig::default().pfa),
        ..GofConfig::default()
    };
    gof.validate()?;
    let config = ConfigEcho {
        estimation,
        gof,
        quadrature: quadrature(&args.quadrature, QuadratureSpec::default())?,
    };
    let a = load_series(&source)?;
    if a.len() < MIN_SAMPLES {
        return Err(CliError::Usage(format!(
            "{}: {} amplitudes read; at least {MIN_SAMPLES} are needed",
            source.path.display(),
            a.len()
        )));
    }
    if a.len() < ADVISED_SAMPLES {
        eprintln!(
            "warning: only {} amplitudes; estimates are unreliable below {ADVISED_SAMPLES}",
            a.len()
        );
    }
    let models = args.models.unwrap_or_else(|| ALL_MODELS.to_vec());
    let report = fit_report(&source, &a, &models, config, args.seed);
    let mut failed = false;
    for block in &report.models {
        let warnings = block
            .fit
            .iter()
            .flat_map(|f| &f.warnings)
            .chain(block.gof.iter().flat_map(|g| &g.warnings));
        for w in warnings {
            eprintln!("warning [{}]: {w}", block.model);
        }
        if let Some(e) = &block.error {
            eprintln!("error [{}]: {e}", block.model);
            failed = true;
        }
    }
    write_output(args.out.as_deref(), to_json(&report)?.as_bytes())?;
    if let Some(path) = &args.ccdf_out {
        write_output(Some(path), ccdf_table(&a, &report, args.ccdf_points).as_bytes())?;
    }
    Ok(if failed { 1 } else { 0 })
}

// ----------------------------------------------------------- simulate

/// Encoded synthetic clutter; identical arguments give identical bytes.
pub fn simulate_bytes(m: &ModelParams, n: usize, seed: u64, format: Format) -> Result<Vec<u8>, CliError> {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let mut buf = Vec::new();
    let io_err = |e: std::io::Error| CliError::Numeric(e.to_string());
    match format {
        Format::AmplitudeCsv => {
            io::write_amplitude_csv(&mut buf, &par_sample_amplitudes(m, n, seed)?).map_err(io_err)?
        }
        Format::IqCsv => {
            let c = par_sample_complex(m, n, seed)?;
            io::write_iq_csv(&mut buf, c.i_comp(), c.q_comp()).map_err(io_err)?
        }
        Format::IqF32le => {
            let c = par_sample_complex(m, n, seed)?;
            io::write_iq_f32le(&mut buf, c.i_comp(), c.q_comp()).map_err(io_err)?
        }
    }
    Ok(buf)
}

fn run_simulate(args: SimulateArgs) -> Result<i32, CliError> {
    let m = model_params(&args.model)?;
    if args.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    if let Some(w) = TextureSampler::new(&m).warning() {
        eprintln!("warning: {w}");
    }
    let bytes = simulate_bytes(&m, args.n, args.seed, args.format)?;
    write_output(args.out.as_deref(), &bytes)?;
    Ok(0)
}

// --------------------------------------------------------------- eval

/// One abscissa of an `eval` table; failed evaluations are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub r: f64,
    pub pdf: Option<f64>,
    pub ccdf: Option<f64>,
    pub status: &'static str,
}

fn status_of(e: &Error) -> &'static str {
    match e {
        Error::NonConvergence { .. } => "nonconvergence",
        _ => "error",
    }
}

pub fn eval_rows(m: &ModelParams, rs: &[f64], q: &QuadratureSpec) -> Vec<EvalRow> {
    rs.par_iter()
        .map(|&r| {
            let f = pdf(r, m, q);
            let c = ccdf(r, m, q);
            let status = match (&f, &c) {
                (Ok(_), Ok(_)) => "ok",
                (Err(e), _) | (_, Err(e)) => status_of(e),
            };
            EvalRow {
                r,
                pdf: f.ok().map(|d| d.value),
                ccdf: c.ok().map(|d| d.value),
                status,
            }
        })
        .collect()
}

pub fn format_eval(rows: &[EvalRow]) -> String {
    let mut out = String::from("r,pdf,ccdf,status\n");
    for row in rows {
        writeln!(
            out,
            "{:e},{},{},{}",
            row.r,
            fmt_value(row.pdf),
            fmt_value(row.ccdf),
            row.status
        )
        .unwrap();
    }
    out
}

/// Abscissae from `--r-list` or from a linear/log range.
pub fn eval_grid(args: &EvalArgs) -> Result<Vec<f64>, CliError> {
    let grid = if let Some(list) = &args.r_list {
        list.clone()
    } else {
        let (Some(lo), Some(hi)) = (args.r_min, args.r_max) else {
            return Err(CliError::Usage("give --r-list or both --r-min and --r-max".into()));
        };
        if args.points == 0 || !(hi >= lo) || (args.points > 1 && hi == lo) {
            return Err(CliError::Usage("need --points ≥ 1 and --r-max > --r-min".into()));
        }
        if args.log_spaced && !(lo > 0.0) {
            return Err(CliError::Usage("--log-spaced needs --r-min > 0".into()));
        }
        let n = args.points;
        (0..n)
            .map(|i| {
                let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                if i + 1 == n && n > 1 {
                    hi
                } else if args.log_spaced {
                    (lo.ln() + t * (hi.ln() - lo.ln())).exp()
                } else {
                    lo + t * (hi - lo)
                }
            })
            .collect()
    };
    if grid.is_empty() {
        return Err(CliError::Usage("empty abscissa grid".into()));
    }
    if let Some(bad) = grid.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
        return Err(CliError::Usage(format!("abscissa {bad} must be finite and nonnegative")));
    }
    Ok(grid)
}

fn run_eval(args: EvalArgs) -> Result<i32, CliError> {
    let m = model_params(&args.model)?;
    let q = quadrature(&args.quadrature, QuadratureSpec::default())?;
    let grid = eval_grid(&args)?;
    let rows = eval_rows(&m, &grid, &q);
    let failed = rows.iter().filter(|r| r.status != "ok").count();
    if failed > 0 {
        eprintln!("warning: {failed} of {} abscissae failed to evaluate", rows.len());
    }
    write_output(args.out.as_deref(), format_eval(&rows).as_bytes())?;
    Ok(0)
}

// ---------------------------------------------------------------- gof

pub fn gof_entries(
    a: &AmplitudeSeries,
    targets: &[(ModelKind, ModelParams)],
    cfg: &GofConfig,
    q: &QuadratureSpec,
) -> Vec<GofEntry> {
    targets
        .iter()
        .map(|&(model, params)| match gof_report(a, &params, cfg, q) {
            Ok(g) => GofEntry {
                model,
                params,
                gof: Some(g),
                error: None,
            },
            Err(e) => GofEntry {
                model,
                params,
                gof: None,
                error: Some(e.to_string()),
            },
        })
        .collect()
}

fn run_gof(args: GofArgs) -> Result<i32, CliError> {
    let (base, targets, mut cfg, base_q) = match &args.report {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let report: FitReport = from_json(&path.display().to_string(), &text)?;
            let wanted = args.models.clone().unwrap_or_else(|| ALL_MODELS.to_vec());
            let targets: Vec<_> = report
                .models
                .iter()
                .filter(|b| wanted.contains(&b.model))
                .filter_map(|b| b.params().map(|p| (b.model, p)))
                .collect();
            if targets.is_empty() {
                return Err(CliError::Usage(format!(
                    "{}: no fitted model to test",
                    path.display()
                )));
            }
            let base = report.input.source();
            (Some(base), targets, report.config.gof, report.config.quadrature)
        }
        None => {
            let m = model_params(&args.model)?;
            (None, vec![(m.kind(), m)], GofConfig::default(), QuadratureSpec::default())
        }
    };
    if let Some(pfa) = args.pfa {
        cfg.pfa = pfa;
    }
    cfg.validate()?;
    let q = quadrature(&args.quadrature, base_q)?;
    let source = args
        .source
        .resolve(base.as_ref())
        .ok_or_else(|| CliError::Usage("gof needs an input file".into()))?;
    let a = load_series(&source)?;
    let results = gof_entries(&a, &targets, &cfg, &q);
    let mut failed = false;
    for entry in &results {
        for w in entry.gof.iter().flat_map(|g| &g.warnings) {
            eprintln!("warning [{}]: {w}", entry.model);
        }
        if let Some(e) = &entry.error {
            eprintln!("error [{}]: {e}", entry.model);
            failed = true;
        }
    }
    let output = GofOutput {
        tool: TOOL.into(),
        version: VERSION.into(),
        schema: SCHEMA,
        input: InputDescriptor::new(&source, a.len(), a.power()),
        gof_config: cfg,
        quadrature: q,
        results,
    };
    write_output(args.out.as_deref(), to_json(&output)?.as_bytes())?;
    Ok(if failed { 1 } else { 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use cft_rayleigh::amplitude::{rayleigh_ccdf, rayleigh_pdf};

    #[test]
    fn ccdf_abscissae_span_positive_samples() {
        let r = ccdf_abscissae(&[0.0, 0.5, 2.0, 8.0], 5);
        assert_eq!(r.len(), 5);
        assert_eq!(r[0], 0.5);
        assert_eq!(r[4], 8.0);
        assert!((r[2] - 2.0).abs() < 1e-12);
        assert!(ccdf_abscissae(&[0.0, 0.0], 5).is_empty());
    }

    #[test]
    fn eval_rows_at_rayleigh_and_origin() {
        let m = ModelParams::rayleigh(1.5).unwrap();
        let q = QuadratureSpec::default();
        let rows = eval_rows(&m, &[0.0, 1.0, 3.0], &q);
        assert_eq!(rows[0].pdf, Some(0.0));
        assert_eq!(rows[0].ccdf, Some(1.0));
        assert_eq!(rows[1].ccdf, Some(rayleigh_ccdf(1.0, 1.5)));
        assert_eq!(rows[2].pdf, Some(rayleigh_pdf(3.0, 1.5)));
        assert!(rows.iter().all(|r| r.status == "ok"));
        let text = format_eval(&rows);
        assert!(text.starts_with("r,pdf,ccdf,status\n0e0,0e0,1e0,ok\n"), "{text}");
    }

    #[test]
    fn eval_marks_failures_in_table() {
        let m = ModelParams::cft_rayleigh(0.6, 1.0, 1e6).unwrap();
        let q = QuadratureSpec::new(1e-10, 1e-8, 2, 1e-16).unwrap();
        let rows = eval_rows(&m, &[50.0], &q);
        assert_eq!(rows[0].status, "nonconvergence");
        assert!(format_eval(&rows).contains(",nan,"));
    }

    #[test]
    fn simulate_rejects_zero_count() {
        let m = ModelParams::rayleigh(1.0).unwrap();
        let err = simulate_bytes(&m, 0, 1, Format::AmplitudeCsv).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
