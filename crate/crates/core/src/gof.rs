//! Goodness of fit: empirical tail probabilities, the Kolmogorov–Smirnov
//! distance and the threshold error in dB.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitude::{ccdf, quantile};
use crate::charfn::ModelParams;
use crate::error::{Error, Result, Warning};
use crate::quadrature::QuadratureSpec;
use crate::series::AmplitudeSeries;

/// Expected exceedance count below which the empirical threshold is flagged.
const MIN_EXCEEDANCES: f64 = 10.0;

/// `#{rᵢ > r} / L`.
pub fn empirical_ccdf(a: &AmplitudeSeries, r: f64) -> f64 {
    let above = a.values().iter().filter(|&&x| x > r).count();
    above as f64 / a.len() as f64
}

/// [`empirical_ccdf`] on ascending samples, by bisection.
pub fn empirical_ccdf_sorted(sorted: &[f64], r: f64) -> f64 {
    let at_or_below = sorted.partition_point(|&x| x <= r);
    (sorted.len() - at_or_below) as f64 / sorted.len() as f64
}

/// Kolmogorov–Smirnov distance between ascending samples and a CDF:
/// `maxᵢ max(i/L − F(r₍ᵢ₎), F(r₍ᵢ₎) − (i−1)/L)`.
///
/// The CDF is evaluated at every order statistic in parallel; the result does
/// not depend on the thread count.
pub fn ks_statistic_sorted<F>(sorted: &[f64], cdf: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if sorted.is_empty() {
        return Err(Error::InvalidInput("KS statistic of an empty sample".into()));
    }
    let l = sorted.len() as f64;
    let gaps: Vec<f64> = sorted
        .par_iter()
        .enumerate()
        .map(|(i, &r)| {
            let f = cdf(r)?;
            let hi = (i + 1) as f64 / l;
            let lo = i as f64 / l;
            Ok((hi - f).abs().max((f - lo).abs()))
        })
        .collect::<Result<_>>()?;
    Ok(gaps.into_iter().fold(0.0, f64::max))
}

/// KS distance between the samples and the model CDF `1 − ccdf`.
pub fn ks_statistic(a: &AmplitudeSeries, m: &ModelParams, q: &QuadratureSpec) -> Result<f64> {
    ks_statistic_sorted(&a.sorted(), |r| Ok(1.0 - ccdf(r, m, q)?.value))
}

/// Type-7 quantile of ascending samples at probability `p ∈ [0, 1]`.
pub fn empirical_quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Threshold error `|20 log₁₀(r_model / r_emp)|` in dB at false-alarm
/// probability `pfa`, where both thresholds are exceeded with probability
/// `pfa`. Also returns a warning when fewer than ten exceedances are
/// expected.
pub fn te_statistic(
    a: &AmplitudeSeries,
    m: &ModelParams,
    pfa: f64,
    q: &QuadratureSpec,
) -> Result<(f64, Option<Warning>)> {
    check_pfa(pfa)?;
    let r_model = quantile(pfa, m, q)?;
    let (te, warning) = te_from_threshold(&a.sorted(), r_model, pfa)?;
    Ok((te, warning))
}

fn check_pfa(pfa: f64) -> Result<()> {
    if pfa > 0.0 && pfa < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "pfa",
            value: pfa,
            reason: "must lie in (0, 1)",
        })
    }
}

/// Threshold error of a model threshold against ascending samples.
pub fn te_from_threshold(sorted: &[f64], r_model: f64, pfa: f64) -> Result<(f64, Option<Warning>)> {
    check_pfa(pfa)?;
    if sorted.is_empty() {
        return Err(Error::InvalidInput("threshold error of an empty sample".into()));
    }
    let r_emp = empirical_quantile_sorted(sorted, 1.0 - pfa);
    if !(r_emp > 0.0) {
        return Err(Error::InvalidInput(
            "empirical threshold is zero; threshold error is undefined".into(),
        ));
    }
    let expected = sorted.len() as f64 * pfa;
    let warning = (expected < MIN_EXCEEDANCES).then_some(Warning::InsufficientTail {
        expected_exceedances: expected,
    });
    Ok(((20.0 * (r_model / r_emp).log10()).abs(), warning))
}

/// Significance conventions of the tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GofConfig {
    /// False-alarm probability of the threshold-error test.
    pub pfa: f64,
    /// Threshold-error pass limit in dB.
    pub te_critical: f64,
    /// Asymptotic KS coefficient; the critical value is `c/√L`.
    pub ks_coefficient: f64,
}

impl Default for GofConfig {
    fn default() -> Self {
        Self {
            pfa: 1e-2,
            te_critical: 1.0,
            ks_coefficient: 1.36,
        }
    }
}

impl GofConfig {
    pub fn validate(&self) -> Result<()> {
        check_pfa(self.pfa)?;
        if !(self.te_critical >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "te_critical",
                value: self.te_critical,
                reason: "must be nonnegative",
            });
        }
        if !(self.ks_coefficient > 0.0) {
            return Err(Error::InvalidParameter {
                name: "ks_coefficient",
                value: self.ks_coefficient,
                reason: "must be positive",
            });
        }
        Ok(())
    }
}

/// KS and threshold-error results for one model against one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub ks_stat: f64,
    pub ks_critical: f64,
    pub te_stat: f64,
    pub te_critical: f64,
    pub pfa: f64,
    pub pass_ks: bool,
    pub pass_te: bool,
    #[serde(default)]
    pub warnings: Vec<Warning>,
}

pub fn gof_report(
    a: &AmplitudeSeries,
    m: &ModelParams,
    cfg: &GofConfig,
    q: &QuadratureSpec,
) -> Result<GofReport> {
    cfg.validate()?;
    let sorted = a.sorted();
    let ks_stat = ks_statistic_sorted(&sorted, |r| Ok(1.0 - ccdf(r, m, q)?.value))?;
    let r_model = quantile(cfg.pfa, m, q)?;
    let (te_stat, warning) = te_from_threshold(&sorted, r_model, cfg.pfa)?;
    let ks_critical = cfg.ks_coefficient / (a.len() as f64).sqrt();
    Ok(GofReport {
        ks_stat,
        ks_critical,
        te_stat,
        te_critical: cfg.te_critical,
        pfa: cfg.pfa,
        pass_ks: ks_stat <= ks_critical,
        pass_te: te_stat <= cfg.te_critical,
        warnings: warning.into_iter().collect(),
    })
}
