//! Amplitude density, tail probability and quantiles of the CFT-Rayleigh law
//! and its Rayleigh / HT-Rayleigh special cases.
//!
//! ```text
//! f(r) = r ∫₀^∞ s·exp Ψ(s)·J₀(rs) ds
//! F̄(r) = 1 − r ∫₀^∞ exp Ψ(s)·J₁(rs) ds
//! ```
//!
//! The tail form follows from the density by `∫₀^r τ J₀(τs) dτ = (r/s) J₁(rs)`.
//! All integrals run in units of the amplitude scale `1/s_e`, where `Ψ(s_e) = −1`,
//! so tolerances mean the same thing whatever the clutter power.

use crate::charfn::{exponent_level, ModelParams, Truncation};
use crate::error::{Error, Result};
use crate::quadrature::{hankel_integral, EvaluatedDensity, Kernel, QuadratureSpec};

/// Rayleigh density `(r/2γ) exp(−r²/4γ)`, the `α = 2` member.
pub fn rayleigh_pdf(r: f64, gamma: f64) -> f64 {
    r / (2.0 * gamma) * (-r * r / (4.0 * gamma)).exp()
}

pub fn rayleigh_ccdf(r: f64, gamma: f64) -> f64 {
    (-r * r / (4.0 * gamma)).exp()
}

pub fn rayleigh_quantile(p: f64, gamma: f64) -> f64 {
    (-4.0 * gamma * p.ln()).sqrt()
}

/// Amplitude scale `1/s_e` of the model.
pub fn amplitude_scale(m: &ModelParams) -> f64 {
    1.0 / exponent_level(m, 1.0)
}

/// `E[R²] = 4 E[V] = 2αγη^{1−α/2}`; `4γ` for the Rayleigh law.
pub fn mean_square(m: &ModelParams) -> Result<f64> {
    m.texture_mean().map(|v| 4.0 * v).ok_or(Error::InvalidParameter {
        name: "eta",
        value: f64::INFINITY,
        reason: "the untempered texture has infinite mean; E[R^2] diverges",
    })
}

fn check_r(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "r",
            value: r,
            reason: "amplitude must be finite and nonnegative",
        })
    }
}

/// Model expressed in units of its own amplitude scale, and that scale.
fn normalized(m: &ModelParams) -> Result<(ModelParams, f64)> {
    let scale = amplitude_scale(m);
    Ok((m.rescaled(1.0 / scale)?, scale))
}

fn clamp_to(
    raw: f64,
    lo: f64,
    hi: f64,
    mut est: EvaluatedDensity,
    q: &QuadratureSpec,
    r: f64,
) -> Result<EvaluatedDensity> {
    let clamped = raw.clamp(lo, hi);
    let excess = (raw - clamped).abs();
    if excess > 10.0 * q.abs_tol {
        return Err(Error::NonConvergence {
            r,
            lobes: est.lobes_used,
            detail: "quadrature noise pushed the value outside its range",
        });
    }
    est.value = clamped;
    est.est_error += excess;
    Ok(est)
}

/// Density by quadrature for every parameter point, including `α = 2`.
pub fn pdf_quadrature(r: f64, m: &ModelParams, q: &QuadratureSpec) -> Result<EvaluatedDensity> {
    check_r(r)?;
    q.validate()?;
    if r == 0.0 {
        return Ok(EvaluatedDensity::exact(0.0));
    }
    let (unit, scale) = normalized(m)?;
    let x = r / scale;
    let h = hankel_integral(x, &unit, Kernel::Density, q.abs_tol / x, q.rel_tol, q)?;
    let raw = x * h.value / scale;
    let est = EvaluatedDensity {
        value: raw,
        est_error: x * h.error / scale,
        lobes_used: h.lobes,
    };
    clamp_to(raw, 0.0, f64::INFINITY, est, q, r)
}

/// Tail probability by quadrature for every parameter point, including `α = 2`.
pub fn ccdf_quadrature(r: f64, m: &ModelParams, q: &QuadratureSpec) -> Result<EvaluatedDensity> {
    check_r(r)?;
    q.validate()?;
    if r == 0.0 {
        return Ok(EvaluatedDensity::exact(1.0));
    }
    let (unit, scale) = normalized(m)?;
    let x = r / scale;
    let h = hankel_integral(x, &unit, Kernel::Tail, q.abs_tol / x, q.rel_tol, q)?;
    let raw = 1.0 - x * h.value;
    let est = EvaluatedDensity {
        value: raw,
        est_error: x * h.error,
        lobes_used: h.lobes,
    };
    clamp_to(raw, 0.0, 1.0, est, q, r)
}

/// Large-amplitude expansion of the HT-Rayleigh law,
///
/// ```text
/// F̄(r) ~ Σ_{k≥1} (−1)^{k+1} (γ^k/k!) 2^{αk} Γ(1 + αk/2) / Γ(1 − αk/2) · r^{−αk}
/// ```
///
/// with the density taken termwise. Returns the sum and the last term's size,
/// or `None` if the terms start growing before they reach the tolerance.
fn ht_tail_series(r: f64, alpha: f64, gamma: f64, kernel: Kernel, q: &QuadratureSpec) -> Option<(f64, f64)> {
    let log_x = gamma.ln() + alpha * (2.0 / r).ln();
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    for k in 1..=100 {
        let kf = k as f64;
        let h = 0.5 * alpha * kf;
        let inv = libm::tgamma(1.0 - h);
        if !inv.is_finite() {
            // 1/Γ vanishes at the poles
            continue;
        }
        let mag = (kf * log_x + libm::lgamma(1.0 + h) - libm::lgamma(kf + 1.0)).exp() / inv;
        let mut term = if k % 2 == 1 { mag } else { -mag };
        if kernel == Kernel::Density {
            term *= alpha * kf / r;
        }
        if term.abs() > prev {
            return None;
        }
        sum += term;
        prev = term.abs();
        if term.abs() < 0.1 * q.abs_tol.max(q.rel_tol * sum.abs()) {
            return Some((sum, term.abs()));
        }
    }
    None
}

/// Falls back to the large-amplitude expansion when quadrature runs out of
/// lobes on the untempered law.
fn with_tail_series(
    r: f64,
    m: &ModelParams,
    q: &QuadratureSpec,
    kernel: Kernel,
    quad: Result<EvaluatedDensity>,
) -> Result<EvaluatedDensity> {
    match quad {
        Err(e @ Error::NonConvergence { .. }) if m.eta().is_infinite() => {
            match ht_tail_series(r, m.alpha(), m.gamma(), kernel, q) {
                Some((value, err)) if value >= 0.0 => Ok(EvaluatedDensity {
                    value,
                    est_error: err,
                    lobes_used: 0,
                }),
                _ => Err(e),
            }
        }
        other => other,
    }
}

/// Amplitude density at `r`. The Rayleigh member is evaluated in closed form;
/// far tails of the HT-Rayleigh law use their large-amplitude expansion.
pub fn pdf(r: f64, m: &ModelParams, q: &QuadratureSpec) -> Result<EvaluatedDensity> {
    check_r(r)?;
    if m.is_rayleigh() {
        return Ok(EvaluatedDensity::exact(rayleigh_pdf(r, m.gamma())));
    }
    with_tail_series(r, m, q, Kernel::Density, pdf_quadrature(r, m, q))
}

/// Tail probability `P(R > r)`. The Rayleigh member is evaluated in closed
/// form; far tails of the HT-Rayleigh law use their large-amplitude expansion.
pub fn ccdf(r: f64, m: &ModelParams, q: &QuadratureSpec) -> Result<EvaluatedDensity> {
    check_r(r)?;
    if m.is_rayleigh() {
        return Ok(EvaluatedDensity::exact(rayleigh_ccdf(r, m.gamma())));
    }
    with_tail_series(r, m, q, Kernel::Tail, ccdf_quadrature(r, m, q))
}

pub fn ht_rayleigh_pdf(
    r: f64,
    alpha: f64,
    gamma: f64,
    q: &QuadratureSpec,
) -> Result<EvaluatedDensity> {
    pdf(r, &ModelParams::new(alpha, gamma, Truncation::Infinite)?, q)
}

pub fn ht_rayleigh_ccdf(
    r: f64,
    alpha: f64,
    gamma: f64,
    q: &QuadratureSpec,
) -> Result<EvaluatedDensity> {
    ccdf(r, &ModelParams::new(alpha, gamma, Truncation::Infinite)?, q)
}

const MAX_DOUBLINGS: usize = 200;

/// Amplitude `r` with `P(R > r) = p`.
///
/// Brackets geometrically from the Rayleigh-scale guess `2·scale·√(−ln p)`
/// and bisects (in log-amplitude) until `|F̄(r) − p| ≤ 10·rel_tol·p`.
pub fn quantile(p: f64, m: &ModelParams, q: &QuadratureSpec) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "tail probability must lie in (0, 1)",
        });
    }
    if m.is_rayleigh() {
        return Ok(rayleigh_quantile(p, m.gamma()));
    }
    // the tail target is relative to p, so the absolute tolerance follows it
    let tight = QuadratureSpec {
        abs_tol: q.abs_tol.min(0.1 * q.rel_tol * p),
        ..*q
    };
    let target = 10.0 * q.rel_tol * p;
    let tail = |r: f64| ccdf(r, m, &tight).map(|e| e.value);

    let guess = 2.0 * amplitude_scale(m) * (-p.ln()).sqrt();
    let (mut lo, mut hi);
    let at_guess = tail(guess)?;
    if (at_guess - p).abs() <= target {
        return Ok(guess);
    }
    if at_guess > p {
        lo = guess;
        hi = 2.0 * guess;
        let mut n = 0;
        loop {
            // a probe past the lobe budget may still overshoot a reachable
            // quantile, so back off towards lo before giving up
            let mut at_hi = tail(hi);
            let mut retries = 0;
            while let Err(Error::NonConvergence { .. }) = at_hi {
                if retries == 8 {
                    break;
                }
                hi = (lo * hi).sqrt();
                at_hi = tail(hi);
                retries += 1;
            }
            if at_hi? <= p {
                break;
            }
            lo = hi;
            hi *= 2.0;
            n += 1;
            if n >= MAX_DOUBLINGS {
                return Err(Error::NonConvergence {
                    r: hi,
                    lobes: 0,
                    detail: "quantile bracket expansion exceeded 200 doublings",
                });
            }
        }
    } else {
        hi = guess;
        lo = 0.5 * guess;
        let mut n = 0;
        while tail(lo)? <= p {
            hi = lo;
            lo *= 0.5;
            n += 1;
            if n >= MAX_DOUBLINGS {
                return Err(Error::NonConvergence {
                    r: lo,
                    lobes: 0,
                    detail: "quantile bracket contraction exceeded 200 halvings",
                });
            }
        }
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        let v = tail(mid)?;
        if (v - p).abs() <= target || (hi - lo) <= 4.0 * f64::EPSILON * hi {
            return Ok(mid);
        }
        if v > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}
