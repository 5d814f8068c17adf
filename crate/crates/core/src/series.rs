//! Sample containers shared by the sampler, the estimator and the tests.

use crate::error::{Error, Result};

/// Nonnegative amplitude samples `r₁..r_L` with their cached power
/// `P = (mean rᵢ²)^{1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSeries {
    values: Vec<f64>,
    power: f64,
}

impl AmplitudeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "an amplitude series needs at least 2 samples, got {}",
                values.len()
            )));
        }
        if let Some((i, &v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidInput(format!(
                "amplitude #{i} is {v}, expected a finite nonnegative value"
            )));
        }
        let power = power_of(&values);
        if !(power > 0.0) || !power.is_finite() {
            return Err(Error::InvalidInput(format!(
                "amplitude series has power {power}; all-zero or overflowing input is rejected"
            )));
        }
        Ok(Self { values, power })
    }

    /// Amplitudes `|I + jQ|` of a complex series.
    pub fn from_complex(c: &ComplexSeries) -> Result<Self> {
        Self::new(c.amplitudes())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    /// Samples in ascending order.
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Every sample multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * c).collect())
    }
}

/// Root mean square, accumulated with a running scale to avoid overflow.
fn power_of(values: &[f64]) -> f64 {
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(*v));
    if scale == 0.0 {
        return 0.0;
    }
    let sum: f64 = values.iter().map(|v| (v / scale) * (v / scale)).sum();
    scale * (sum / values.len() as f64).sqrt()
}

/// In-phase and quadrature components of complex clutter samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSeries {
    i_comp: Vec<f64>,
    q_comp: Vec<f64>,
}

impl ComplexSeries {
    pub fn new(i_comp: Vec<f64>, q_comp: Vec<f64>) -> Result<Self> {
        if i_comp.len() != q_comp.len() {
            return Err(Error::InvalidInput(format!(
                "I and Q lengths differ: {} vs {}",
                i_comp.len(),
                q_comp.len()
            )));
        }
        if i_comp.is_empty() {
            return Err(Error::InvalidInput("complex series is empty".into()));
        }
        Ok(Self { i_comp, q_comp })
    }

    pub fn i_comp(&self) -> &[f64] {
        &self.i_comp
    }

    pub fn q_comp(&self) -> &[f64] {
        &self.q_comp
    }

    pub fn len(&self) -> usize {
        self.i_comp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.i_comp.is_empty()
    }

    pub fn amplitudes(&self) -> Vec<f64> {
        self.i_comp
            .iter()
            .zip(&self.q_comp)
            .map(|(i, q)| i.hypot(*q))
            .collect()
    }
}
