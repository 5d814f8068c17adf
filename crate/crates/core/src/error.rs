use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Oscillatory quadrature ran out of budget before meeting its tolerance.
    #[error("quadrature did not converge at r = {r} after {lobes} lobes: {detail}")]
    NonConvergence {
        r: f64,
        lobes: usize,
        detail: &'static str,
    },

    #[error("degenerate NCF reference: denominator {denominator:e} too small")]
    DegenerateReference { denominator: f64 },

    /// The empirical characteristic function was not positive where a logarithm was needed.
    #[error("empirical CF {value} at s = {frequency} is outside the logarithm's domain")]
    LogDomain { frequency: f64, value: f64 },

    #[error("no Gauss-Hermite node lies inside the effective zone: {0}")]
    AllNodesInvalid(&'static str),
}

/// Non-fatal conditions attached to results.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Warning {
    /// Single-proposal tilting acceptance is below 1e-3; the sampler splits the
    /// texture into `pieces` infinitely divisible parts to stay efficient.
    LowAcceptance { rate: f64, pieces: usize },
    /// Fewer than ten samples are expected beyond the TE threshold.
    InsufficientTail { expected_exceedances: f64 },
    /// The fitted truncation sits on an end of the configured search range.
    EtaAtGridBoundary { eta: f64 },
    /// The fitted exponent sits on an end of the configured search range.
    AlphaAtGridBoundary { alpha: f64 },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::LowAcceptance { rate, pieces } => write!(
                f,
                "tilting acceptance rate {rate:.3e} is low; texture drawn as {pieces} divisible pieces"
            ),
            Warning::InsufficientTail {
                expected_exceedances,
            } => write!(
                f,
                "only {expected_exceedances:.1} samples expected above the TE threshold; empirical quantile is unstable"
            ),
            Warning::EtaAtGridBoundary { eta } => {
                write!(f, "fitted eta = {eta:.4e} lies on the search-range boundary")
            }
            Warning::AlphaAtGridBoundary { alpha } => {
                write!(f, "fitted alpha = {alpha} lies on the search-range boundary")
            }
        }
    }
}
