//! Characteristic-function estimation of `(α, η, γ)` from amplitude samples.
//!
//! The empirical characteristic function of an isotropic complex series is
//! `φ̂(s) = (1/L) Σ J₀(s rᵢ)`. Its normalized log ratio
//! `û(s) = ln φ̂(s) / ln φ̂(s_ref)` does not depend on `γ`, so `(α, η)` are
//! found by matching `û` to the model ratio at Gauss–Hermite nodes `s_k / P`,
//! and `γ` follows from `φ̂(s_ref)` afterwards.
//!
//! The search runs in power-normalized units `η̃ = η / P²`, which makes the
//! fit exactly equivariant under rescaling of the data.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charfn::{ModelKind, ModelParams, Truncation};
use crate::error::{Error, Result, Warning};
use crate::hermite::gauss_hermite_nodes;
use crate::series::AmplitudeSeries;
use crate::special::bessel_j0;

/// Smallest admissible `|1 − (η s_ref² + 1)^{α/2}|`.
const MIN_REFERENCE: f64 = 1e-14;

/// Points per axis of each refinement grid.
const REFINE_POINTS: usize = 21;

/// `(1/L) Σ J₀(s rᵢ)`.
pub fn empirical_cf(a: &AmplitudeSeries, s: f64) -> f64 {
    let sum: f64 = a.values().iter().map(|r| bessel_j0(s * r)).sum();
    sum / a.len() as f64
}

/// `1 − (x + 1)^{a}` written as `−expm1(a·ln1p(x))`.
#[inline]
fn one_minus_pow1p(x: f64, a: f64) -> f64 {
    -(a * x.ln_1p()).exp_m1()
}

/// Model normalized characteristic function
/// `[1 − (ηs² + 1)^{α/2}] / [1 − (ηs_ref² + 1)^{α/2}]`, which does not
/// depend on `γ`. At `α = 2` it is `s²/s_ref²`; for `η = ∞` it is
/// `(s/s_ref)^α`.
pub fn theoretical_ncf(s: f64, alpha: f64, eta: Truncation, s_ref: f64) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "s",
            value: s,
            reason: "must be positive and finite",
        });
    }
    if !(s_ref > 0.0 && s_ref.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "s_ref",
            value: s_ref,
            reason: "must be positive and finite",
        });
    }
    // Validates alpha and eta.
    ModelParams::new(alpha, 1.0, eta)?;
    if alpha == 2.0 {
        return Ok(s * s / (s_ref * s_ref));
    }
    let Some(eta) = eta.finite() else {
        return Ok((s / s_ref).powf(alpha));
    };
    let a = 0.5 * alpha;
    let den = one_minus_pow1p(eta * s_ref * s_ref, a);
    if den.abs() < MIN_REFERENCE {
        return Err(Error::DegenerateReference { denominator: den });
    }
    Ok(one_minus_pow1p(eta * s * s, a) / den)
}

/// `ln φ̂(s) / ln φ̂(s_ref)`.
pub fn empirical_ncf(a: &AmplitudeSeries, s: f64, s_ref: f64) -> Result<f64> {
    let num = empirical_cf(a, s);
    if !(num > 0.0) {
        return Err(Error::LogDomain {
            frequency: s,
            value: num,
        });
    }
    let den = empirical_cf(a, s_ref);
    if !(den > 0.0 && den < 1.0) {
        return Err(Error::LogDomain {
            frequency: s_ref,
            value: den,
        });
    }
    Ok(num.ln() / den.ln())
}

/// Search configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimationConfig {
    /// Gauss–Hermite half-order `K`.
    pub k_nodes: usize,
    /// Coarse `α` grid, ascending, within `(0, 2]`.
    pub alpha_grid: Vec<f64>,
    /// Coarse grid for `η / P²`, ascending, positive.
    pub eta_grid: Vec<f64>,
    /// Number of local refinement rounds after the coarse search.
    pub refine_rounds: usize,
    /// Span factor applied to each successive refinement grid.
    pub refine_shrink: f64,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        Self {
            k_nodes: 10,
            alpha_grid: (1..=40).map(|i| i as f64 * 0.05).collect(),
            eta_grid: (0..41).map(|i| 10f64.powf(-3.0 + 0.15 * i as f64)).collect(),
            refine_rounds: 2,
            refine_shrink: 0.1,
        }
    }
}

impl EstimationConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, value, reason| Err(Error::InvalidParameter { name, value, reason });
        if self.k_nodes == 0 {
            return bad("k_nodes", 0.0, "must be at least 1");
        }
        if self.alpha_grid.is_empty() || self.eta_grid.is_empty() {
            return Err(Error::InvalidInput("search grids must be nonempty".into()));
        }
        for &a in &self.alpha_grid {
            if !(a > 0.0 && a <= 2.0) {
                return bad("alpha_grid", a, "entries must lie in (0, 2]");
            }
        }
        for &e in &self.eta_grid {
            if !(e > 0.0 && e.is_finite()) {
                return bad("eta_grid", e, "entries must be positive and finite");
            }
        }
        if !is_ascending(&self.alpha_grid) || !is_ascending(&self.eta_grid) {
            return Err(Error::InvalidInput("search grids must be strictly ascending".into()));
        }
        if !(self.refine_shrink > 0.0 && self.refine_shrink.is_finite()) {
            return bad("refine_shrink", self.refine_shrink, "must be positive");
        }
        Ok(())
    }
}

fn is_ascending(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

/// One incumbent of the search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    /// 0 for the coarse grid, then 1, 2, … for refinements.
    pub round: usize,
    pub alpha: f64,
    /// `η` in data units; `None` for the heavy-tailed (`η = ∞`) fit.
    pub eta: Option<f64>,
    pub objective: f64,
}

/// Fitted parameters with the search history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model_kind: ModelKind,
    pub params: ModelParams,
    pub objective: f64,
    pub trace: Vec<TraceEntry>,
    #[serde(default)]
    pub warnings: Vec<Warning>,
}

/// Weighted least-squares mismatch between empirical and model NCFs for one
/// data set, with `s_ref = 1/P` and nodes `s_k / P`.
#[derive(Debug, Clone)]
pub struct NcfObjective {
    power: f64,
    nodes_sq: Vec<f64>,
    log_nodes: Vec<f64>,
    weights: Vec<f64>,
    targets: Vec<f64>,
    log_cf_ref: f64,
}

impl NcfObjective {
    /// Applies the effective-zone policy: nodes with `φ̂ ≤ 0` are dropped
    /// with their weights, and more than half dropping is an error.
    pub fn new(a: &AmplitudeSeries, k_nodes: usize) -> Result<Self> {
        if k_nodes == 0 {
            return Err(Error::InvalidParameter {
                name: "k_nodes",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        let p = a.power();
        let s_ref = 1.0 / p;
        let cf_ref = empirical_cf(a, s_ref);
        if !(cf_ref > 0.0 && cf_ref < 1.0) {
            return Err(Error::LogDomain {
                frequency: s_ref,
                value: cf_ref,
            });
        }
        let log_cf_ref = cf_ref.ln();
        let (nodes, weights) = gauss_hermite_nodes(k_nodes);
        let mut out = Self {
            power: p,
            nodes_sq: Vec::with_capacity(k_nodes),
            log_nodes: Vec::with_capacity(k_nodes),
            weights: Vec::with_capacity(k_nodes),
            targets: Vec::with_capacity(k_nodes),
            log_cf_ref,
        };
        for (s, w) in nodes.into_iter().zip(weights) {
            let cf = empirical_cf(a, s / p);
            if cf > 0.0 {
                out.nodes_sq.push(s * s);
                out.log_nodes.push(s.ln());
                out.weights.push(w);
                out.targets.push(cf.ln() / log_cf_ref);
            }
        }
        if out.nodes_sq.is_empty() {
            return Err(Error::AllNodesInvalid("every node has a nonpositive empirical CF"));
        }
        if 2 * out.nodes_sq.len() < k_nodes {
            return Err(Error::AllNodesInvalid(
                "more than half the nodes have a nonpositive empirical CF",
            ));
        }
        Ok(out)
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    /// Nodes kept inside the effective zone.
    pub fn active_nodes(&self) -> usize {
        self.nodes_sq.len()
    }

    /// `ln φ̂(1/P)`.
    pub fn log_cf_ref(&self) -> f64 {
        self.log_cf_ref
    }

    fn score(&self, model: impl Fn(usize) -> f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.targets)
            .enumerate()
            .map(|(k, (w, t))| {
                let d = t - model(k);
                w * d * d
            })
            .sum()
    }

    /// Objective at `α` and normalized truncation `η̃ = η/P²`.
    pub fn tempered(&self, alpha: f64, eta_norm: f64) -> f64 {
        if alpha == 2.0 {
            return self.score(|k| self.nodes_sq[k]);
        }
        let a = 0.5 * alpha;
        let den = one_minus_pow1p(eta_norm, a);
        if !(den.abs() >= MIN_REFERENCE) {
            return f64::INFINITY;
        }
        self.score(|k| one_minus_pow1p(eta_norm * self.nodes_sq[k], a) / den)
    }

    /// Objective of the untempered model, `u(s) = (s P)^α`.
    pub fn heavy_tailed(&self, alpha: f64) -> f64 {
        self.score(|k| (alpha * self.log_nodes[k]).exp())
    }

    /// Objective at parameters in data units.
    pub fn at(&self, alpha: f64, eta: Truncation) -> f64 {
        match eta.finite() {
            Some(e) => self.tempered(alpha, e / (self.power * self.power)),
            None if alpha == 2.0 => self.tempered(alpha, 1.0),
            None => self.heavy_tailed(alpha),
        }
    }
}

/// Index of the smallest score; ties go to the earliest candidate, and
/// candidates are generated in ascending `(α, η)` order.
fn argmin(scores: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &s) in scores.iter().enumerate() {
        if s.is_nan() {
            continue;
        }
        if best.map_or(true, |b| s < scores[b]) {
            best = Some(i);
        }
    }
    best.filter(|&b| scores[b].is_finite())
}

/// Mean spacing of a grid (1 for a single point).
fn cell(v: &[f64]) -> f64 {
    if v.len() < 2 {
        1.0
    } else {
        (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64
    }
}

/// `REFINE_POINTS` points spanning `center ± half`, clamped to `[lo, hi]`,
/// ascending and deduplicated.
fn local_axis(center: f64, half: f64, lo: f64, hi: f64) -> Vec<f64> {
    let mid = (REFINE_POINTS / 2) as f64;
    let step = half / mid;
    let mut out: Vec<f64> = (0..REFINE_POINTS)
        .map(|i| {
            if i == REFINE_POINTS / 2 {
                center
            } else {
                (center + (i as f64 - mid) * step).clamp(lo, hi)
            }
        })
        .collect();
    out.dedup();
    out
}

fn boundary_warnings(cfg: &EstimationConfig, alpha: f64, eta_norm: Option<f64>) -> Vec<Warning> {
    let mut w = Vec::new();
    let a_lo = cfg.alpha_grid[0];
    if alpha <= a_lo && a_lo < 2.0 {
        w.push(Warning::AlphaAtGridBoundary { alpha });
    }
    if let Some(e) = eta_norm {
        let (lo, hi) = (cfg.eta_grid[0], cfg.eta_grid[cfg.eta_grid.len() - 1]);
        if alpha < 2.0 && (e <= lo || e >= hi) {
            w.push(Warning::EtaAtGridBoundary { eta: e });
        }
    }
    w
}

fn positive_gamma(g: f64) -> Result<f64> {
    if g > 0.0 && g.is_finite() {
        Ok(g)
    } else {
        Err(Error::AllNodesInvalid("scale estimate is not positive and finite"))
    }
}

/// Full CFT-Rayleigh fit: coarse `(α, η)` grid, shrinking local refinements,
/// then `γ̂ = η̂^{α̂/2} ln φ̂(s_ref) / [1 − (η̂ s_ref² + 1)^{α̂/2}]`.
pub fn fit_cft_rayleigh(a: &AmplitudeSeries, cfg: &EstimationConfig) -> Result<FitResult> {
    cfg.validate()?;
    let obj = NcfObjective::new(a, cfg.k_nodes)?;
    let p2 = obj.power * obj.power;
    let evaluate = |cands: &[(f64, f64)]| -> Vec<f64> {
        cands
            .par_iter()
            .map(|&(al, e)| obj.tempered(al, e))
            .collect()
    };

    let coarse: Vec<(f64, f64)> = cfg
        .alpha_grid
        .iter()
        .flat_map(|&al| cfg.eta_grid.iter().map(move |&e| (al, e)))
        .collect();
    let scores = evaluate(&coarse);
    let i = argmin(&scores).ok_or(Error::AllNodesInvalid("no finite objective on the grid"))?;
    let (mut alpha, mut eta_n) = coarse[i];
    let mut best = scores[i];
    let mut trace = vec![TraceEntry {
        round: 0,
        alpha,
        eta: Some(eta_n * p2),
        objective: best,
    }];

    let (a_lo, a_hi) = (cfg.alpha_grid[0], cfg.alpha_grid[cfg.alpha_grid.len() - 1]);
    let (e_lo, e_hi) = (cfg.eta_grid[0].ln(), cfg.eta_grid[cfg.eta_grid.len() - 1].ln());
    let (mut a_half, mut e_half) = (cell(&cfg.alpha_grid), (e_hi - e_lo) / (cfg.eta_grid.len().max(2) - 1) as f64);
    for round in 1..=cfg.refine_rounds {
        let alphas = local_axis(alpha, a_half, a_lo, a_hi);
        let etas: Vec<f64> = local_axis(eta_n.ln(), e_half, e_lo, e_hi)
            .into_iter()
            .map(|le| if le == eta_n.ln() { eta_n } else { le.exp() })
            .collect();
        let cands: Vec<(f64, f64)> = alphas
            .iter()
            .flat_map(|&al| etas.iter().map(move |&e| (al, e)))
            .collect();
        let scores = evaluate(&cands);
        if let Some(j) = argmin(&scores) {
            if scores[j] < best {
                (alpha, eta_n) = cands[j];
                best = scores[j];
            }
        }
        trace.push(TraceEntry {
            round,
            alpha,
            eta: Some(eta_n * p2),
            objective: best,
        });
        a_half *= cfg.refine_shrink;
        e_half *= cfg.refine_shrink;
    }

    let eta = eta_n * p2;
    let gamma = if alpha == 2.0 {
        -obj.log_cf_ref * p2
    } else {
        let ah = 0.5 * alpha;
        eta.powf(ah) * obj.log_cf_ref / one_minus_pow1p(eta_n, ah)
    };
    let params = ModelParams::cft_rayleigh(alpha, positive_gamma(gamma)?, eta)?;
    Ok(FitResult {
        model_kind: ModelKind::CftRayleigh,
        params,
        objective: best,
        trace,
        warnings: boundary_warnings(cfg, alpha, Some(eta_n)),
    })
}

/// Heavy-tailed Rayleigh (`η = ∞`) fit: one-dimensional search over `α`
/// and `γ̂ = −ln φ̂(s_ref) / s_ref^α`.
pub fn fit_ht_rayleigh(a: &AmplitudeSeries, cfg: &EstimationConfig) -> Result<FitResult> {
    cfg.validate()?;
    let obj = NcfObjective::new(a, cfg.k_nodes)?;
    let evaluate =
        |cands: &[f64]| -> Vec<f64> { cands.par_iter().map(|&al| obj.heavy_tailed(al)).collect() };

    let scores = evaluate(&cfg.alpha_grid);
    let i = argmin(&scores).ok_or(Error::AllNodesInvalid("no finite objective on the grid"))?;
    let mut alpha = cfg.alpha_grid[i];
    let mut best = scores[i];
    let mut trace = vec![TraceEntry {
        round: 0,
        alpha,
        eta: None,
        objective: best,
    }];
    let (a_lo, a_hi) = (cfg.alpha_grid[0], cfg.alpha_grid[cfg.alpha_grid.len() - 1]);
    let mut a_half = cell(&cfg.alpha_grid);
    for round in 1..=cfg.refine_rounds {
        let cands = local_axis(alpha, a_half, a_lo, a_hi);
        let scores = evaluate(&cands);
        if let Some(j) = argmin(&scores) {
            if scores[j] < best {
                alpha = cands[j];
                best = scores[j];
            }
        }
        trace.push(TraceEntry {
            round,
            alpha,
            eta: None,
            objective: best,
        });
        a_half *= cfg.refine_shrink;
    }

    let gamma = -obj.log_cf_ref * obj.power.powf(alpha);
    let params = ModelParams::ht_rayleigh(alpha, positive_gamma(gamma)?)?;
    Ok(FitResult {
        model_kind: ModelKind::HtRayleigh,
        params,
        objective: best,
        trace,
        warnings: boundary_warnings(cfg, alpha, None),
    })
}

/// Rayleigh moment fit `γ̂ = P²/4`; the objective is reported at `α = 2`
/// with the default node count.
pub fn fit_rayleigh(a: &AmplitudeSeries) -> Result<FitResult> {
    fit_rayleigh_with(a, EstimationConfig::default().k_nodes)
}

/// [`fit_rayleigh`] with an explicit node count for the reported objective.
pub fn fit_rayleigh_with(a: &AmplitudeSeries, k_nodes: usize) -> Result<FitResult> {
    let p = a.power();
    let params = ModelParams::rayleigh(0.25 * p * p)?;
    let objective = NcfObjective::new(a, k_nodes)?.tempered(2.0, 1.0);
    Ok(FitResult {
        model_kind: ModelKind::Rayleigh,
        params,
        objective,
        trace: vec![TraceEntry {
            round: 0,
            alpha: 2.0,
            eta: None,
            objective,
        }],
        warnings: Vec::new(),
    })
}
