//! Bessel functions of the first kind and their zeros.

use std::f64::consts::PI;

#[inline]
pub fn bessel_j0(x: f64) -> f64 {
    libm::j0(x)
}

#[inline]
pub fn bessel_j1(x: f64) -> f64 {
    libm::j1(x)
}

/// McMahon's expansion for the `k`-th positive zero of `J_ν`.
fn mcmahon(nu: f64, k: usize) -> f64 {
    let beta = (k as f64 + 0.5 * nu - 0.25) * PI;
    let mu = 4.0 * nu * nu;
    let e = 8.0 * beta;
    beta - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e.powi(3))
}

/// `k`-th positive zero of `J₀` (`k ≥ 1`).
pub fn bessel_j0_zero(k: usize) -> f64 {
    assert!(k >= 1, "zeros are numbered from 1");
    let mut x = mcmahon(0.0, k);
    for _ in 0..4 {
        let step = bessel_j0(x) / bessel_j1(x);
        x += step;
        if step.abs() <= 4.0 * f64::EPSILON * x {
            break;
        }
    }
    x
}

/// `k`-th positive zero of `J₁` (`k ≥ 1`, the zero at the origin excluded).
pub fn bessel_j1_zero(k: usize) -> f64 {
    assert!(k >= 1, "zeros are numbered from 1");
    let mut x = mcmahon(1.0, k);
    for _ in 0..4 {
        let j1 = bessel_j1(x);
        let step = j1 / (bessel_j0(x) - j1 / x);
        x -= step;
        if step.abs() <= 4.0 * f64::EPSILON * x {
            break;
        }
    }
    x
}
