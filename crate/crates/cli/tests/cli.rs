//! End-to-end runs of the `cftray` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cftray::report::{FitReport, GofOutput};
use cft_rayleigh::ModelKind;
use tempfile::TempDir;

fn cftray(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cftray"))
        .args(args)
        .output()
        .expect("failed to launch cftray")
}

fn ok(args: &[&str]) -> Output {
    let out = cftray(args);
    assert!(
        out.status.success(),
        "cftray {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn file(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn simulate_is_bit_reproducible() {
    let dir = TempDir::new().unwrap();
    for format in ["amplitude-csv", "iq-csv", "iq-f32le"] {
        let (a, b) = (file(&dir, "a"), file(&dir, "b"));
        for p in [&a, &b] {
            ok(&[
                "simulate", "--alpha", "1.5", "--gamma", "1", "--eta", "3", "--n", "10", "--seed",
                "42", "--format", format, "--out", path_str(p),
            ]);
        }
        let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
        assert!(!a.is_empty());
        assert_eq!(a, b, "{format}");
    }
    let stdout = ok(&["simulate", "--alpha", "1.5", "--gamma", "1", "--n", "10", "--seed", "42"]).stdout;
    assert_eq!(String::from_utf8(stdout).unwrap().lines().count(), 10);
}

#[test]
fn simulate_rejects_zero_pulses() {
    let out = cftray(&["simulate", "--alpha", "1.5", "--gamma", "1", "--n", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(cftray(&["simulate", "--alpha", "1.5"]).status.code(), Some(2));
    assert_eq!(cftray(&["frobnicate"]).status.code(), Some(2));
    let out = cftray(&["simulate", "--alpha", "2.5", "--gamma", "1", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn low_acceptance_is_a_warning() {
    let out = ok(&["simulate", "--alpha", "1.9", "--gamma", "1", "--eta", "0.1", "--n", "5"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn malformed_inputs_name_their_location() {
    let dir = TempDir::new().unwrap();
    let cases: [(&str, &[u8], &str, &str); 4] = [
        ("a.csv", b"1.0\n2.0\nabc\n", "amplitude-csv", "a.csv:3"),
        ("b.csv", b"1.0\n-2.0\n", "amplitude-csv", "b.csv:2"),
        ("c.csv", b"1,2\n3\n", "iq-csv", "c.csv:2"),
        ("d.bin", &[0u8; 13], "iq-f32le", "byte 8"),
    ];
    for (name, bytes, format, needle) in cases {
        let p = file(&dir, name);
        std::fs::write(&p, bytes).unwrap();
        let out = cftray(&["fit", path_str(&p), "--format", format]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{name}: {err}");
    }
}

#[test]
fn fit_needs_a_hundred_amplitudes() {
    let dir = TempDir::new().unwrap();
    let p = file(&dir, "few.csv");
    let text: String = (1..100).map(|i| format!("{}\n", i as f64 * 0.01)).collect();
    std::fs::write(&p, text).unwrap();
    assert_eq!(cftray(&["fit", path_str(&p)]).status.code(), Some(2));
}

#[test]
fn iq_f32le_decodes_to_moduli() {
    let dir = TempDir::new().unwrap();
    let p = file(&dir, "iq.bin");
    let pairs: Vec<(f32, f32)> = (0..200)
        .map(|k| ((k as f32 * 0.37).sin() * 2.0, (k as f32 * 0.11).cos() - 0.5))
        .collect();
    let mut bytes = Vec::new();
    for (i, q) in &pairs {
        bytes.extend_from_slice(&i.to_le_bytes());
        bytes.extend_from_slice(&q.to_le_bytes());
    }
    std::fs::write(&p, &bytes).unwrap();
    let expected: Vec<f64> = pairs.iter().map(|&(i, q)| f64::from(i).hypot(f64::from(q))).collect();
    let decoded = cftray::io::parse_iq_f32le(&p, &std::fs::read(&p).unwrap()).unwrap();
    assert_eq!(decoded, expected);

    let out = ok(&["gof", path_str(&p), "--format", "iq-f32le", "--alpha", "2", "--gamma", "1"]);
    let g: GofOutput = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(g.input.samples, 200);
    let series = cft_rayleigh::AmplitudeSeries::new(expected).unwrap();
    assert_eq!(g.input.power, series.power());
}

#[test]
fn decimation_keeps_every_fifth_pulse() {
    let dir = TempDir::new().unwrap();
    let p = file(&dir, "long.csv");
    let values: Vec<f64> = (0..250_000).map(|i| 1.0 + (i % 7) as f64 + i as f64 * 1e-6).collect();
    let text: String = values.iter().map(|v| format!("{v}\n")).collect();
    std::fs::write(&p, text).unwrap();
    let out = ok(&[
        "gof", path_str(&p), "--decimate", "5", "--max-pulses", "49170", "--alpha", "2", "--gamma",
        "4",
    ]);
    let g: GofOutput = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(g.input.samples, 49170);
    let kept: Vec<f64> = values.iter().step_by(5).take(49170).copied().collect();
    assert_eq!(kept.last(), Some(&values[5 * 49169]));
    assert_eq!(g.input.power, cft_rayleigh::AmplitudeSeries::new(kept).unwrap().power());
}

#[test]
fn eval_matches_rayleigh_closed_form() {
    let out = ok(&["eval", "--alpha", "2", "--gamma", "1.7", "--r-min", "0", "--r-max", "13", "--points", "27"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,pdf,ccdf,status"));
    let mut n = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let r: f64 = f[0].parse().unwrap();
        let pdf: f64 = f[1].parse().unwrap();
        let ccdf: f64 = f[2].parse().unwrap();
        let g = 1.7;
        assert!((pdf - r / (2.0 * g) * (-r * r / (4.0 * g)).exp()).abs() < 1e-8);
        assert!((ccdf - (-r * r / (4.0 * g)).exp()).abs() < 1e-8);
        assert_eq!(f[3], "ok");
        n += 1;
    }
    assert_eq!(n, 27);
}

#[test]
fn eval_at_origin() {
    let out = ok(&["eval", "--alpha", "1.3", "--gamma", "0.8", "--eta", "5", "--r-list", "0"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1].parse::<f64>().unwrap(), 0.0);
    assert_eq!(row[2].parse::<f64>().unwrap(), 1.0);
}

/// Simulates CFT-Rayleigh clutter, fits it and returns (data, report) paths.
fn fitted(dir: &TempDir, n: &str, seed: &str) -> (PathBuf, PathBuf) {
    let data = file(dir, "sim.csv");
    let report = file(dir, "report.json");
    ok(&[
        "simulate", "--alpha", "1.9", "--gamma", "1", "--eta", "1", "--n", n, "--seed", seed,
        "--out", path_str(&data),
    ]);
    ok(&[
        "fit", path_str(&data), "--seed", seed, "--out", path_str(&report), "--ccdf-out",
        path_str(&file(dir, "ccdf.csv")),
    ]);
    (data, report)
}

#[test]
fn fit_report_round_trips_and_self_fit_passes() {
    let dir = TempDir::new().unwrap();
    let (_, report) = fitted(&dir, "49170", "7");
    let text = std::fs::read_to_string(&report).unwrap();
    let decoded: FitReport = serde_json::from_str(&text).unwrap();
    let again = serde_json::to_string_pretty(&decoded).unwrap() + "\n";
    assert_eq!(again, text);
    assert_eq!(serde_json::from_str::<FitReport>(&again).unwrap(), decoded);

    assert_eq!(decoded.input.samples, 49170);
    assert_eq!(decoded.seed, Some(7));
    assert_eq!(decoded.models.len(), 3);
    let cft = decoded.model(ModelKind::CftRayleigh).unwrap();
    let gof = cft.gof.as_ref().unwrap();
    assert!(gof.pass_ks && gof.pass_te, "{gof:?}");

    let table = std::fs::read_to_string(file(&dir, "ccdf.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("r,empirical,rayleigh,ht-rayleigh,cft-rayleigh"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 100);
    assert_eq!(rows[0][1], 1.0);
    assert!(rows.windows(2).all(|w| w[0][0] < w[1][0] && w[0][4] >= w[1][4]));
}

#[test]
fn fit_is_byte_reproducible() {
    let (d1, d2) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let (_, r1) = fitted(&d1, "3000", "11");
    let (_, r2) = fitted(&d2, "3000", "11");
    let strip = |p: &Path| {
        let mut r: FitReport = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        r.input.path = PathBuf::new();
        serde_json::to_string(&r).unwrap()
    };
    assert_eq!(strip(&r1), strip(&r2));
}

#[test]
fn gof_from_report_is_idempotent() {
    let dir = TempDir::new().unwrap();
    let (_, report) = fitted(&dir, "20000", "3");
    let fit: FitReport = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let out = ok(&["gof", "--report", path_str(&report)]);
    let g: GofOutput = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(g.results.len(), 3);
    for entry in &g.results {
        let block = fit.model(entry.model).unwrap();
        let (a, b) = (entry.gof.as_ref().unwrap(), block.gof.as_ref().unwrap());
        assert_eq!(entry.params, block.params().unwrap());
        assert!((a.ks_stat - b.ks_stat).abs() <= 1e-12);
        assert!((a.te_stat - b.te_stat).abs() <= 1e-12);
        assert_eq!((a.pass_ks, a.pass_te), (b.pass_ks, b.pass_te));
    }
    let only = ok(&["gof", "--report", path_str(&report), "--models", "rayleigh"]);
    let g: GofOutput = serde_json::from_slice(&only.stdout).unwrap();
    assert_eq!(g.results.len(), 1);
}

#[test]
fn wrong_rayleigh_scale_costs_six_db() {
    let dir = TempDir::new().unwrap();
    let data = file(&dir, "ray.csv");
    ok(&["simulate", "--alpha", "2", "--gamma", "1", "--n", "200000", "--seed", "5", "--out", path_str(&data)]);
    let te = |gamma: &str| {
        let out = ok(&["gof", path_str(&data), "--alpha", "2", "--gamma", gamma]);
        let g: GofOutput = serde_json::from_slice(&out.stdout).unwrap();
        g.results[0].gof.as_ref().unwrap().te_stat
    };
    assert!(te("1") < 0.2);
    let wrong = te("4");
    assert!((wrong - 20.0 * 2f64.log10()).abs() < 0.2, "{wrong}");
}
