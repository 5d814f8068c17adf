//! Characteristic functions and Laplace transforms of the stable, tempered
//! stable and compound-Gaussian tempered-stable laws.
//!
//! Sign conventions follow the clutter literature: a stable variable has
//! `φ(ξ) = exp[−γ|ξ|^α (1 + jβ sign(ξ) ω(ξ, α))]` and the positive tempered
//! texture is pinned by its Laplace transform
//! `E[e^{−s'V}] = exp[γ η^{−α/2} (1 − (η s' + 1)^{α/2})]`.
//!
//! The texture is sometimes written `TS_{α/2}(cos(πα/4)γ, −1, η)`; the
//! `cos(πα/4)` factor is exactly cancelled by the `1/cos(πα'/2)` in the
//! tempered CF at exponent `α' = α/2`, which is why only `γ` appears in the
//! Laplace transform used here.

use std::f64::consts::{FRAC_2_PI, PI};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of a zero-location α-stable law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableParams {
    alpha: f64,
    gamma: f64,
    beta: f64,
}

impl StableParams {
    pub fn new(alpha: f64, gamma: f64, beta: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_gamma(gamma)?;
        check_beta(beta)?;
        Ok(Self { alpha, gamma, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `β = −1` with `α < 1`: the law lives on the positive half-line.
    pub fn is_positive(&self) -> bool {
        self.beta == -1.0 && self.alpha < 1.0
    }
}

/// Truncation (tempering) parameter `η`, with the untempered limit kept as an
/// explicit case so that `∞` never flows through arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    Finite(f64),
    Infinite,
}

impl Truncation {
    pub fn finite(self) -> Option<f64> {
        match self {
            Truncation::Finite(eta) => Some(eta),
            Truncation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Truncation::Infinite)
    }

    fn validate(self) -> Result<Self> {
        if let Truncation::Finite(eta) = self {
            if !(eta > 0.0 && eta.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "eta",
                    value: eta,
                    reason: "must be positive and finite (use Truncation::Infinite for the limit)",
                });
            }
        }
        Ok(self)
    }
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Truncation::Finite(eta) => write!(f, "{eta}"),
            Truncation::Infinite => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Truncation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "Inf" | "INF" => Ok(Truncation::Infinite),
            other => {
                let eta: f64 = other
                    .parse()
                    .map_err(|_| format!("`{other}` is neither a number nor `inf`"))?;
                Truncation::Finite(eta).validate().map_err(|e| e.to_string())
            }
        }
    }
}

// JSON has no infinity, so the limit case is written as the string "inf".
impl Serialize for Truncation {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Truncation::Finite(eta) => ser.serialize_f64(*eta),
            Truncation::Infinite => ser.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Truncation {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::Number(eta) => Truncation::Finite(eta)
                .validate()
                .map_err(serde::de::Error::custom),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Parameters of a tempered α-stable law `TS_α(γ, β, η)` with equal
/// tempering on both half-lines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperedStableParams {
    alpha: f64,
    gamma: f64,
    beta: f64,
    eta: Truncation,
}

impl TemperedStableParams {
    pub fn new(alpha: f64, gamma: f64, beta: f64, eta: Truncation) -> Result<Self> {
        check_alpha(alpha)?;
        check_gamma(gamma)?;
        check_beta(beta)?;
        let eta = eta.validate()?;
        Ok(Self {
            alpha,
            gamma,
            beta,
            eta,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn eta(&self) -> Truncation {
        self.eta
    }

    pub fn is_symmetric(&self) -> bool {
        self.beta == 0.0
    }

    /// The untempered stable law obtained as `η → ∞`.
    pub fn untempered(&self) -> StableParams {
        StableParams {
            alpha: self.alpha,
            gamma: self.gamma,
            beta: self.beta,
        }
    }
}

/// Which member of the family a parameter triple denotes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "rayleigh")]
    Rayleigh,
    #[serde(rename = "ht-rayleigh")]
    HtRayleigh,
    #[serde(rename = "cft-rayleigh")]
    CftRayleigh,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Rayleigh => "rayleigh",
            ModelKind::HtRayleigh => "ht-rayleigh",
            ModelKind::CftRayleigh => "cft-rayleigh",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rayleigh" => Ok(ModelKind::Rayleigh),
            "ht-rayleigh" | "htrayleigh" | "ht" => Ok(ModelKind::HtRayleigh),
            "cft-rayleigh" | "cftrayleigh" | "cft" => Ok(ModelKind::CftRayleigh),
            other => Err(format!("unknown model `{other}`")),
        }
    }
}

/// The CFT-Rayleigh triple `(α, γ, η)` of the isotropic complex clutter model.
///
/// `α = 2` is the Rayleigh law for every `η`; `η = ∞` with `α < 2` is the
/// heavy-tailed (HT) Rayleigh law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModelParams")]
pub struct ModelParams {
    alpha: f64,
    gamma: f64,
    eta: Truncation,
}

#[derive(Deserialize)]
struct RawModelParams {
    alpha: f64,
    gamma: f64,
    eta: Truncation,
}

impl TryFrom<RawModelParams> for ModelParams {
    type Error = Error;

    fn try_from(raw: RawModelParams) -> Result<Self> {
        ModelParams::new(raw.alpha, raw.gamma, raw.eta)
    }
}

impl ModelParams {
    pub fn new(alpha: f64, gamma: f64, eta: Truncation) -> Result<Self> {
        check_alpha(alpha)?;
        check_gamma(gamma)?;
        let eta = eta.validate()?;
        Ok(Self { alpha, gamma, eta })
    }

    pub fn cft_rayleigh(alpha: f64, gamma: f64, eta: f64) -> Result<Self> {
        Self::new(alpha, gamma, Truncation::Finite(eta))
    }

    pub fn ht_rayleigh(alpha: f64, gamma: f64) -> Result<Self> {
        Self::new(alpha, gamma, Truncation::Infinite)
    }

    pub fn rayleigh(gamma: f64) -> Result<Self> {
        Self::new(2.0, gamma, Truncation::Infinite)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn eta(&self) -> Truncation {
        self.eta
    }

    pub fn is_rayleigh(&self) -> bool {
        self.alpha == 2.0
    }

    pub fn is_ht_rayleigh(&self) -> bool {
        !self.is_rayleigh() && self.eta.is_infinite()
    }

    pub fn kind(&self) -> ModelKind {
        if self.is_rayleigh() {
            ModelKind::Rayleigh
        } else if self.eta.is_infinite() {
            ModelKind::HtRayleigh
        } else {
            ModelKind::CftRayleigh
        }
    }

    /// Same model with the scale replaced.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.alpha, gamma, self.eta)
    }

    /// Parameters of the amplitude law of `c·R` when `R` follows `self`.
    /// The family is closed under scaling: `γ → c^α γ`, `η → c² η`.
    pub fn rescaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "scale",
                value: c,
                reason: "must be positive and finite",
            });
        }
        let eta = match self.eta {
            Truncation::Finite(eta) => Truncation::Finite(eta * c * c),
            Truncation::Infinite => Truncation::Infinite,
        };
        Self::new(self.alpha, self.gamma * c.powf(self.alpha), eta)
    }

    /// The texture law `TS_{α/2}(cos(πα/4)γ, −1, η)` in tempered-stable form.
    /// Only defined for `α < 2`, where the texture is non-degenerate.
    pub fn texture_law(&self) -> Result<TemperedStableParams> {
        if self.is_rayleigh() {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: self.alpha,
                reason: "the Rayleigh texture is a point mass",
            });
        }
        let half = 0.5 * self.alpha;
        TemperedStableParams::new(half, (0.25 * PI * self.alpha).cos() * self.gamma, -1.0, self.eta)
    }

    /// `E[V]`, or `None` when the untempered texture has no mean.
    pub fn texture_mean(&self) -> Option<f64> {
        let half = 0.5 * self.alpha;
        match (self.is_rayleigh(), self.eta) {
            (true, _) => Some(self.gamma),
            (false, Truncation::Finite(eta)) => Some(self.gamma * half * eta.powf(1.0 - half)),
            (false, Truncation::Infinite) => None,
        }
    }
}

impl fmt::Display for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "alpha={} gamma={} eta={}", self.alpha, self.gamma, self.eta)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "must lie in (0, 2]",
        })
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "gamma",
            value: gamma,
            reason: "must be positive and finite",
        })
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if (-1.0..=1.0).contains(&beta) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            reason: "must lie in [-1, 1]",
        })
    }
}

/// Characteristic function of the zero-location α-stable law.
pub fn alpha_stable_cf(xi: f64, p: &StableParams) -> Complex64 {
    if xi == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let omega = if p.alpha == 2.0 {
        // tan(π) is zero analytically but not in floating point
        0.0
    } else if p.alpha == 1.0 {
        FRAC_2_PI * xi.abs().ln()
    } else {
        (0.5 * PI * p.alpha).tan()
    };
    let mag = p.gamma * xi.abs().powf(p.alpha);
    let exponent = Complex64::new(-mag, -mag * p.beta * xi.signum() * omega);
    exponent.exp()
}

/// Characteristic function of `TS_α(γ, β, η)` in its arctangent form.
///
/// At `α = 1` the form is a `0/0` limit. The symmetric case converges to
/// `(γ/η)(2/π)[½ ln(1 + x²) − x·arctan x]` with `x = η|ξ|`. The skewed case
/// diverges in this parameterization and is rejected.
pub fn tempered_stable_cf(xi: f64, p: &TemperedStableParams) -> Result<Complex64> {
    let eta = p.eta.finite().ok_or(Error::InvalidParameter {
        name: "eta",
        value: f64::INFINITY,
        reason: "the untempered limit is alpha_stable_cf",
    })?;
    if p.alpha == 1.0 && p.beta != 0.0 {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: p.beta,
            reason: "skewed tempered law has no finite limit at alpha = 1",
        });
    }
    if xi == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let x = eta * xi.abs();
    let theta = p.alpha * x.atan();
    let exponent = if p.alpha == 1.0 {
        let re = p.gamma / eta * FRAC_2_PI * (0.5 * (x * x).ln_1p() - x * x.atan());
        Complex64::new(re, 0.0)
    } else {
        let lead = p.gamma / (eta.powf(p.alpha) * (0.5 * PI * p.alpha).cos());
        // ρ cos θ − 1 without cancellation for small x
        let rho_m1 = (0.5 * p.alpha * (x * x).ln_1p()).exp_m1();
        let s = (0.5 * theta).sin();
        let rho_cos_m1 = rho_m1 * theta.cos() - 2.0 * s * s;
        let rho_sin = (rho_m1 + 1.0) * theta.sin();
        Complex64::new(
            -lead * rho_cos_m1,
            -lead * xi.signum() * p.beta * rho_sin,
        )
    };
    Ok(exponent.exp())
}

/// Log-Laplace transform of the texture, `ln E[e^{−s'V}]`.
///
/// Every other radial quantity goes through this function so that the
/// identity `texture_laplace(s²) = exp(Ψ(s))` holds bit for bit.
pub fn texture_log_laplace(sprime: f64, m: &ModelParams) -> f64 {
    if m.is_rayleigh() {
        return -m.gamma * sprime;
    }
    let half = 0.5 * m.alpha;
    match m.eta {
        Truncation::Finite(eta) => {
            // γ η^{−α/2} [1 − (η s' + 1)^{α/2}]
            -m.gamma * eta.powf(-half) * (half * (eta * sprime).ln_1p()).exp_m1()
        }
        Truncation::Infinite => -m.gamma * sprime.powf(half),
    }
}

/// Laplace transform of the texture density, `E[e^{−s'V}]`.
pub fn texture_laplace(sprime: f64, m: &ModelParams) -> f64 {
    texture_log_laplace(sprime, m).exp()
}

/// Radial log-CF `Ψ(s)` of the isotropic complex model; `φ_X(ξ) = exp Ψ(‖ξ‖)`.
pub fn isotropic_exponent(s: f64, m: &ModelParams) -> f64 {
    texture_log_laplace(s * s, m)
}

/// Bivariate characteristic function of the isotropic CG-PTαS model.
pub fn cg_ptas_cf(xi1: f64, xi2: f64, m: &ModelParams) -> f64 {
    isotropic_exponent(xi1.hypot(xi2), m).exp()
}

/// Frequency at which `Ψ(s) = −depth`, i.e. where the radial CF has fallen
/// to `e^{−depth}`. Closed form, used to size quadrature panels.
pub(crate) fn exponent_level(m: &ModelParams, depth: f64) -> f64 {
    let level = depth / m.gamma;
    if m.is_rayleigh() {
        return level.sqrt();
    }
    let half = 0.5 * m.alpha;
    match m.eta {
        Truncation::Finite(eta) => {
            // (η s² + 1)^{α/2} = 1 + level·η^{α/2}
            let inner = (level * eta.powf(half)).ln_1p() / half;
            (inner.exp_m1() / eta).sqrt()
        }
        Truncation::Infinite => level.powf(1.0 / m.alpha),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cft(alpha: f64, gamma: f64, eta: f64) -> ModelParams {
        ModelParams::cft_rayleigh(alpha, gamma, eta).unwrap()
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(StableParams::new(0.0, 1.0, 0.0).is_err());
        assert!(StableParams::new(2.1, 1.0, 0.0).is_err());
        assert!(StableParams::new(1.0, 0.0, 0.0).is_err());
        assert!(StableParams::new(1.0, 1.0, -1.5).is_err());
        assert!(TemperedStableParams::new(1.0, 1.0, 0.0, Truncation::Finite(0.0)).is_err());
        assert!(TemperedStableParams::new(1.0, 1.0, 0.0, Truncation::Finite(f64::INFINITY)).is_err());
        assert!(ModelParams::cft_rayleigh(1.5, 1.0, -2.0).is_err());
        assert!(ModelParams::cft_rayleigh(f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn positive_subclass_flag() {
        assert!(StableParams::new(0.5, 1.0, -1.0).unwrap().is_positive());
        assert!(!StableParams::new(1.5, 1.0, -1.0).unwrap().is_positive());
        assert!(!StableParams::new(0.5, 1.0, 0.0).unwrap().is_positive());
    }

    #[test]
    fn stable_cf_at_origin_and_gaussian() {
        let p = StableParams::new(0.7, 2.0, 0.4).unwrap();
        assert_eq!(alpha_stable_cf(0.0, &p), Complex64::new(1.0, 0.0));
        let g = StableParams::new(2.0, 1.0, 0.8).unwrap();
        for xi in [-2.0, -0.3, 0.5, 1.7] {
            let v = alpha_stable_cf(xi, &g);
            assert_eq!(v.im, 0.0);
            assert!((v.re - (-xi * xi).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn stable_cf_positive_half() {
        // Value confirmed independently by quadrature of the Lévy-measure
        // integral −∫(1 − e^{−jξy}) f(dy) with A₊ = 0 (β = −1).
        let p = StableParams::new(0.5, 1.0, -1.0).unwrap();
        let v = alpha_stable_cf(1.0, &p);
        assert!((v.re - 0.198_766_110_346_412_94).abs() < 1e-14);
        assert!((v.im - 0.309_559_875_653_112_2).abs() < 1e-14);
    }

    #[test]
    fn stable_cf_alpha_one_log_branch() {
        let p = StableParams::new(1.0, 1.0, 0.5).unwrap();
        let xi: f64 = 2.0;
        let v = alpha_stable_cf(xi, &p);
        let expected_phase = -xi * 0.5 * FRAC_2_PI * xi.ln();
        assert!((v.norm() - (-xi).exp()).abs() < 1e-15);
        assert!((v.arg() - expected_phase).abs() < 1e-14);
    }

    #[test]
    fn tempered_cf_rejects_infinite_eta() {
        let p = TemperedStableParams::new(1.5, 1.0, 0.0, Truncation::Infinite).unwrap();
        assert!(tempered_stable_cf(1.0, &p).is_err());
        let q = TemperedStableParams::new(1.0, 1.0, 0.3, Truncation::Finite(1.0)).unwrap();
        assert!(tempered_stable_cf(1.0, &q).is_err());
    }

    #[test]
    fn tempered_cf_origin_and_symmetry() {
        let p = TemperedStableParams::new(1.3, 0.7, 0.0, Truncation::Finite(2.0)).unwrap();
        assert_eq!(tempered_stable_cf(0.0, &p).unwrap(), Complex64::new(1.0, 0.0));
        for xi in [0.1, 1.0, 5.0] {
            let a = tempered_stable_cf(xi, &p).unwrap();
            let b = tempered_stable_cf(-xi, &p).unwrap();
            assert_eq!(a.im, 0.0);
            assert_eq!(a, b);
            assert!(a.re > 0.0 && a.re <= 1.0);
        }
    }

    #[test]
    fn tempered_cf_untempered_limit() {
        let p = TemperedStableParams::new(1.5, 1.0, 0.0, Truncation::Finite(1e8)).unwrap();
        let t = tempered_stable_cf(1.0, &p).unwrap();
        let s = alpha_stable_cf(1.0, &p.untempered());
        assert!(((t - s).norm() / s.norm()) < 1e-5);
    }

    #[test]
    fn tempered_cf_alpha_one_limit() {
        // exp{(2/π)[½ ln 2 − π/4]}, checked against 50-digit arithmetic
        let p = TemperedStableParams::new(1.0, 1.0, 0.0, Truncation::Finite(1.0)).unwrap();
        let v = tempered_stable_cf(1.0, &p).unwrap();
        assert!((v.re - 0.756_264_270_413_128_4).abs() < 1e-14);
        // continuity across the α = 1 branch
        for a in [1.0 - 1e-7, 1.0 + 1e-7] {
            let q = TemperedStableParams::new(a, 1.0, 0.0, Truncation::Finite(1.0)).unwrap();
            let w = tempered_stable_cf(1.0, &q).unwrap();
            assert!((w.re - v.re).abs() < 1e-6);
        }
    }

    #[test]
    fn isotropic_exponent_basics() {
        let m = cft(1.4, 0.8, 3.0);
        assert_eq!(isotropic_exponent(0.0, &m), 0.0);
        // α = 2: η cancels exactly
        for eta in [0.01, 1.0, 1e6] {
            let r = cft(2.0, 1.5, eta);
            assert_eq!(isotropic_exponent(1.7, &r), -1.5 * (1.7 * 1.7));
        }
        let ht = ModelParams::ht_rayleigh(1.2, 2.0).unwrap();
        assert!((isotropic_exponent(3.0, &ht) + 2.0 * 3.0f64.powf(1.2)).abs() < 1e-13);
    }

    #[test]
    fn isotropic_exponent_high_precision_value() {
        // 50-digit reference for α = 1.9, γ = 1, η = 5, s = 2
        let m = cft(1.9, 1.0, 5.0);
        let reference = -3.692_430_743_335_672_4;
        assert!((isotropic_exponent(2.0, &m) - reference).abs() < 4.0 * f64::EPSILON * 3.7);
    }

    #[test]
    fn cf_radial_reduction() {
        let m = cft(1.6, 1.1, 0.4);
        assert_eq!(cg_ptas_cf(0.0, 0.0, &m), 1.0);
        assert_eq!(cg_ptas_cf(0.3, 0.9, &m), cg_ptas_cf(0.9, 0.3, &m));
        assert_eq!(cg_ptas_cf(3.0, 4.0, &m), isotropic_exponent(5.0, &m).exp());
    }

    #[test]
    fn laplace_identity_and_mean() {
        let m = cft(1.3, 0.9, 2.5);
        assert_eq!(texture_laplace(0.0, &m), 1.0);
        for s in [0.1, 0.5, 2.0, 7.0] {
            assert_eq!(texture_laplace(s * s, &m), isotropic_exponent(s, &m).exp());
        }
        let h = 1e-6;
        let slope = (texture_laplace(h, &m) - 1.0) / h;
        let central = (texture_log_laplace(h, &m) - texture_log_laplace(-h, &m)) / (2.0 * h);
        let mean = m.texture_mean().unwrap();
        assert!((central + mean).abs() < 1e-8, "{central} vs {mean}");
        assert!((slope + mean).abs() < 1e-5);
    }

    #[test]
    fn exponent_level_inverts_psi() {
        for m in [
            cft(1.9, 1.0, 0.1),
            cft(0.8, 0.5, 100.0),
            ModelParams::ht_rayleigh(1.1, 2.0).unwrap(),
            ModelParams::rayleigh(3.0).unwrap(),
        ] {
            for depth in [1.0, 36.8] {
                let s = exponent_level(&m, depth);
                assert!((isotropic_exponent(s, &m) + depth).abs() < 1e-9 * depth);
            }
        }
    }

    #[test]
    fn truncation_text_round_trip() {
        assert_eq!("inf".parse::<Truncation>().unwrap(), Truncation::Infinite);
        assert_eq!("2.5".parse::<Truncation>().unwrap(), Truncation::Finite(2.5));
        assert!("-1".parse::<Truncation>().is_err());
        assert!("abc".parse::<Truncation>().is_err());
    }

    #[test]
    fn texture_law_scale() {
        let m = cft(1.0, 2.0, 1.0);
        let t = m.texture_law().unwrap();
        assert_eq!(t.alpha(), 0.5);
        assert_eq!(t.beta(), -1.0);
        assert!((t.gamma() - 2.0 * (PI / 4.0).cos()).abs() < 1e-15);
        assert!(ModelParams::rayleigh(1.0).unwrap().texture_law().is_err());
    }
}
