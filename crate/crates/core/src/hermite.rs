//! Gauss–Hermite rules for the weight `e^{−x²}`.

use nalgebra::{DMatrix, SymmetricEigen};

/// Orthonormal Hermite values `p₀(x)..p_{n}(x)` folded into
/// `(p_n(x), p_{n−1}(x), Σ_{k<n} p_k(x)²)`.
fn orthonormal(n: usize, x: f64) -> (f64, f64, f64) {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25);
    let mut christoffel = 0.0;
    for k in 0..n {
        christoffel += cur * cur;
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev, christoffel)
}

/// The `k` positive roots of the order-`2k` Hermite polynomial with their
/// Gauss–Hermite weights, in ascending order.
///
/// Nodes come from the eigenvalues of the symmetric Jacobi matrix and are
/// polished by Newton steps on the orthonormal recurrence; weights are the
/// reciprocal Christoffel sums at the polished nodes.
///
/// # Panics
///
/// Panics if `k == 0`.
pub fn gauss_hermite_nodes(k: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(k >= 1, "half-order must be at least 1");
    let n = 2 * k;
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i.abs_diff(j) == 1 {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let mut eig: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);

    let nf = n as f64;
    let mut nodes = Vec::with_capacity(k);
    let mut weights = Vec::with_capacity(k);
    for &guess in &eig[k..] {
        let mut x = guess;
        for _ in 0..3 {
            let (p, q, _) = orthonormal(n, x);
            let step = p / ((2.0 * nf).sqrt() * q);
            x -= step;
            if step.abs() <= f64::EPSILON * x.abs() {
                break;
            }
        }
        let (_, _, christoffel) = orthonormal(n, x);
        nodes.push(x);
        weights.push(1.0 / christoffel);
    }
    (nodes, weights)
}
