//! Compound-Gaussian radar clutter with positive tempered α-stable texture.
//!
//! The complex return is `X_I + jX_Q = √V (Z_I + jZ_Q)` with Gaussian speckle
//! `Z_I, Z_Q ~ N(0, 2)` and a tempered positive-stable texture `V`. Its
//! amplitude `R = |X|` follows the CFT-Rayleigh law, which contains the
//! Rayleigh (`α = 2`) and heavy-tailed Rayleigh (`η = ∞`) laws as special
//! cases.
//!
//! - [`charfn`]: characteristic functions and the texture Laplace transform
//! - [`amplitude`]: density, tail probability, quantiles and moments
//! - [`sampler`]: exact texture, complex clutter and amplitude draws
//! - [`estimate`]: characteristic-function parameter estimation
//! - [`gof`]: Kolmogorov–Smirnov and threshold-error statistics


// Negated float comparisons are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod amplitude;
pub mod charfn;
pub mod error;
pub mod estimate;
pub mod gof;
pub mod hermite;
pub mod quadrature;
pub mod sampler;
pub mod series;
pub mod special;

pub use charfn::{ModelKind, ModelParams, StableParams, TemperedStableParams, Truncation};
pub use error::{Error, Result, Warning};
pub use quadrature::{EvaluatedDensity, QuadratureSpec};
pub use sampler::RngState;
pub use series::{AmplitudeSeries, ComplexSeries};
