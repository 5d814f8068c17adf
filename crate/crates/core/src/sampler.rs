//! Exact draws of the tempered positive-stable texture, complex clutter and
//! amplitudes.
//!
//! Positive-stable variates use Kanter's representation, calibrated so that
//! `E[exp(−s S)] = exp(−scale·s^a)`. Tempering is exponential-tilting
//! rejection: a stable proposal `S` is kept with probability `exp(−S/η)`.
//! Because the texture law is infinitely divisible, it is drawn as the sum of
//! `n` independent pieces with scale `γ/n`, which keeps the per-piece
//! acceptance `exp(−γη^{−a}/n)` above `e^{−1}` however hard the parameters.

use std::f64::consts::PI;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, Open01, StandardNormal};
use rayon::prelude::*;

use crate::charfn::ModelParams;
use crate::error::{Error, Result, Warning};
use crate::series::{AmplitudeSeries, ComplexSeries};

/// Analytic single-proposal acceptance below which a warning is raised.
pub const LOW_ACCEPTANCE: f64 = 1e-3;

/// Draws per independently seeded stream in the parallel generators.
pub const CHUNK_LEN: usize = 1 << 14;

/// Deterministic generator, seedable from a 64-bit integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngState(ChaCha8Rng);

impl RngState {
    pub fn seed_from_u64(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Independent stream `index` under `seed`.
    pub fn for_stream(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self(rng)
    }
}

impl RngCore for RngState {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

fn sin_pi(x: f64) -> f64 {
    if x <= 0.5 {
        (PI * x).sin()
    } else {
        (PI * (1.0 - x)).sin()
    }
}

#[inline]
fn kanter<R: Rng + ?Sized>(a: f64, log_scale_over_a: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    let e: f64 = rng.sample(Exp1);
    let b = 1.0 - a;
    let log_a =
        (a * sin_pi(a * u).ln() + b * sin_pi(b * u).ln() - sin_pi(u).ln()) / b;
    (log_scale_over_a + (b / a) * (log_a - e.ln())).exp()
}

/// Positive stable variate with Laplace transform `exp(−scale·s^alpha_half)`.
pub fn sample_positive_stable<R: Rng + ?Sized>(
    alpha_half: f64,
    scale: f64,
    rng: &mut R,
) -> Result<f64> {
    if !(alpha_half > 0.0 && alpha_half < 1.0) {
        return Err(Error::InvalidParameter {
            name: "alpha_half",
            value: alpha_half,
            reason: "must lie in (0, 1)",
        });
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "scale",
            value: scale,
            reason: "must be positive and finite",
        });
    }
    Ok(kanter(alpha_half, scale.ln() / alpha_half, rng))
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Mode {
    Constant(f64),
    Stable {
        a: f64,
        log_scale_over_a: f64,
    },
    Tempered {
        a: f64,
        inv_eta: f64,
        pieces: usize,
        piece_log_scale_over_a: f64,
        full_log_scale_over_a: f64,
    },
}

/// Texture generator for one parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct TextureSampler {
    mode: Mode,
    acceptance: f64,
}

impl TextureSampler {
    pub fn new(m: &ModelParams) -> Self {
        let (alpha, gamma) = (m.alpha(), m.gamma());
        if m.is_rayleigh() {
            return Self {
                mode: Mode::Constant(gamma),
                acceptance: 1.0,
            };
        }
        let a = 0.5 * alpha;
        match m.eta().finite() {
            None => Self {
                mode: Mode::Stable {
                    a,
                    log_scale_over_a: gamma.ln() / a,
                },
                acceptance: 1.0,
            },
            Some(eta) => {
                let c = gamma * eta.powf(-a);
                let pieces = c.ceil().clamp(1.0, u32::MAX as f64) as usize;
                Self {
                    mode: Mode::Tempered {
                        a,
                        inv_eta: 1.0 / eta,
                        pieces,
                        piece_log_scale_over_a: (gamma / pieces as f64).ln() / a,
                        full_log_scale_over_a: gamma.ln() / a,
                    },
                    acceptance: (-c).exp(),
                }
            }
        }
    }

    /// Probability that one full-scale stable proposal survives tilting,
    /// `exp(−γη^{−α/2})`; 1 when there is no tempering.
    pub fn acceptance_rate(&self) -> f64 {
        self.acceptance
    }

    /// Number of divisible pieces summed per texture draw.
    pub fn pieces(&self) -> usize {
        match self.mode {
            Mode::Tempered { pieces, .. } => pieces,
            _ => 1,
        }
    }

    pub fn warning(&self) -> Option<Warning> {
        (self.acceptance < LOW_ACCEPTANCE).then(|| Warning::LowAcceptance {
            rate: self.acceptance,
            pieces: self.pieces(),
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.mode {
            Mode::Constant(v) => v,
            Mode::Stable {
                a,
                log_scale_over_a,
            } => kanter(a, log_scale_over_a, rng),
            Mode::Tempered {
                a,
                inv_eta,
                pieces,
                piece_log_scale_over_a,
                ..
            } => (0..pieces)
                .map(|_| loop {
                    let s = kanter(a, piece_log_scale_over_a, rng);
                    let u: f64 = rng.random();
                    if u < (-s * inv_eta).exp() {
                        break s;
                    }
                })
                .sum(),
        }
    }

    /// One unsplit tilting trial at full scale `γ`: the stable proposal and
    /// whether it was accepted.
    pub fn propose<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, bool) {
        match self.mode {
            Mode::Constant(v) => (v, true),
            Mode::Stable {
                a,
                log_scale_over_a,
            } => (kanter(a, log_scale_over_a, rng), true),
            Mode::Tempered {
                a,
                inv_eta,
                full_log_scale_over_a,
                ..
            } => {
                let s = kanter(a, full_log_scale_over_a, rng);
                let u: f64 = rng.random();
                (s, u < (-s * inv_eta).exp())
            }
        }
    }
}

/// One texture draw `V` whose Laplace transform is the model's.
pub fn sample_texture<R: Rng + ?Sized>(m: &ModelParams, rng: &mut R) -> f64 {
    TextureSampler::new(m).sample(rng)
}

#[inline]
fn speckle<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let zi: f64 = rng.sample(StandardNormal);
    let zq: f64 = rng.sample(StandardNormal);
    (std::f64::consts::SQRT_2 * zi, std::f64::consts::SQRT_2 * zq)
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("sample count must be at least 1".into()));
    }
    Ok(())
}

fn complex_into<R: Rng + ?Sized>(
    t: &TextureSampler,
    n: usize,
    rng: &mut R,
    i_comp: &mut Vec<f64>,
    q_comp: &mut Vec<f64>,
) {
    for _ in 0..n {
        let sv = t.sample(rng).sqrt();
        let (zi, zq) = speckle(rng);
        i_comp.push(sv * zi);
        q_comp.push(sv * zq);
    }
}

fn amplitudes_into<R: Rng + ?Sized>(t: &TextureSampler, n: usize, rng: &mut R, out: &mut Vec<f64>) {
    for _ in 0..n {
        let sv = t.sample(rng).sqrt();
        let (zi, zq) = speckle(rng);
        out.push(sv * zi.hypot(zq));
    }
}

/// `n` complex clutter samples `√V (Z_I + jZ_Q)`, one texture per sample.
pub fn sample_complex<R: Rng + ?Sized>(
    m: &ModelParams,
    n: usize,
    rng: &mut R,
) -> Result<ComplexSeries> {
    check_count(n)?;
    let t = TextureSampler::new(m);
    let (mut i_comp, mut q_comp) = (Vec::with_capacity(n), Vec::with_capacity(n));
    complex_into(&t, n, rng, &mut i_comp, &mut q_comp);
    ComplexSeries::new(i_comp, q_comp)
}

/// `n ≥ 1` amplitude draws `√V·|Z_I + jZ_Q|`.
pub fn sample_amplitudes<R: Rng + ?Sized>(
    m: &ModelParams,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_count(n)?;
    let t = TextureSampler::new(m);
    let mut out = Vec::with_capacity(n);
    amplitudes_into(&t, n, rng, &mut out);
    Ok(out)
}

/// Amplitude draws packaged as a series (`n ≥ 2`).
pub fn sample_amplitude<R: Rng + ?Sized>(
    m: &ModelParams,
    n: usize,
    rng: &mut R,
) -> Result<AmplitudeSeries> {
    AmplitudeSeries::new(sample_amplitudes(m, n, rng)?)
}

fn chunks(n: usize) -> impl IndexedParallelIterator<Item = (u64, usize)> {
    let count = n.div_ceil(CHUNK_LEN);
    (0..count)
        .into_par_iter()
        .map(move |k| (k as u64, CHUNK_LEN.min(n - k * CHUNK_LEN)))
}

/// Parallel amplitude draws. Chunk `k` of [`CHUNK_LEN`] samples uses stream
/// `k` of `seed`, so the output does not depend on the thread count.
pub fn par_sample_amplitudes(m: &ModelParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    check_count(n)?;
    let t = TextureSampler::new(m);
    let parts: Vec<Vec<f64>> = chunks(n)
        .map(|(k, len)| {
            let mut rng = RngState::for_stream(seed, k);
            let mut out = Vec::with_capacity(len);
            amplitudes_into(&t, len, &mut rng, &mut out);
            out
        })
        .collect();
    Ok(parts.concat())
}

/// Parallel complex draws with the same chunked stream layout as
/// [`par_sample_amplitudes`].
pub fn par_sample_complex(m: &ModelParams, n: usize, seed: u64) -> Result<ComplexSeries> {
    check_count(n)?;
    let t = TextureSampler::new(m);
    let parts: Vec<(Vec<f64>, Vec<f64>)> = chunks(n)
        .map(|(k, len)| {
            let mut rng = RngState::for_stream(seed, k);
            let (mut i_comp, mut q_comp) = (Vec::with_capacity(len), Vec::with_capacity(len));
            complex_into(&t, len, &mut rng, &mut i_comp, &mut q_comp);
            (i_comp, q_comp)
        })
        .collect();
    let (i_parts, q_parts): (Vec<_>, Vec<_>) = parts.into_iter().unzip();
    ComplexSeries::new(i_parts.concat(), q_parts.concat())
}

/// Parallel texture draws with the chunked stream layout.
pub fn par_sample_textures(m: &ModelParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    check_count(n)?;
    let t = TextureSampler::new(m);
    let parts: Vec<Vec<f64>> = chunks(n)
        .map(|(k, len)| {
            let mut rng = RngState::for_stream(seed, k);
            (0..len).map(|_| t.sample(&mut rng)).collect()
        })
        .collect();
    Ok(parts.concat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitude::mean_square;
    use crate::charfn::{cg_ptas_cf, texture_laplace};

    const N: usize = 1_000_000;

    /// Mean and standard error of `f` over `xs`.
    fn mean_se(xs: impl Iterator<Item = f64>) -> (f64, f64) {
        let (mut n, mut s, mut s2) = (0.0, 0.0, 0.0);
        for x in xs {
            n += 1.0;
            s += x;
            s2 += x * x;
        }
        let mean = s / n;
        let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    fn within(got: (f64, f64), want: f64, k: f64) -> bool {
        (got.0 - want).abs() <= k * got.1.max(1e-300)
    }

    #[test]
    fn positive_stable_laplace() {
        let mut rng = RngState::seed_from_u64(11);
        for (a, scale) in [(0.5, 1.0), (0.25, 2.0), (0.95, 0.7)] {
            let v: Vec<f64> = (0..N)
                .map(|_| sample_positive_stable(a, scale, &mut rng).unwrap())
                .collect();
            assert!(v.iter().all(|x| *x > 0.0));
            for s in [0.5, 1.0, 2.0] {
                let est = mean_se(v.iter().map(|x| (-s * x).exp()));
                let want = (-scale * f64::powf(s, a)).exp();
                assert!(within(est, want, 4.0), "a={a} s={s}: {est:?} vs {want}");
            }
        }
    }

    #[test]
    fn positive_stable_rejects_bad_index() {
        let mut rng = RngState::seed_from_u64(0);
        assert!(sample_positive_stable(1.0, 1.0, &mut rng).is_err());
        assert!(sample_positive_stable(0.5, 0.0, &mut rng).is_err());
    }

    #[test]
    fn levy_median() {
        // Laplace exp(−√s) is the Lévy law with c = 1/2; median 1/(4·erfc⁻¹(½)²).
        let mut rng = RngState::seed_from_u64(5);
        let mut v: Vec<f64> = (0..N)
            .map(|_| sample_positive_stable(0.5, 1.0, &mut rng).unwrap())
            .collect();
        v.sort_by(f64::total_cmp);
        let median = 0.5 * (v[N / 2 - 1] + v[N / 2]);
        let want = 1.099_054_669_158_866_2;
        // Density at the median is about 0.17, so the median's standard error
        // is 1/(2·0.17·√N) ≈ 3e-3.
        assert!((median - want).abs() < 0.012, "{median}");
    }

    #[test]
    fn tempered_texture_laplace_mean_and_acceptance() {
        let mut rng = RngState::seed_from_u64(2024);
        let cases = [(1.9, 1.0, 1.0), (1.2, 0.5, 10.0), (0.8, 2.0, 0.1), (1.6, 1.0, 100.0)];
        for (alpha, gamma, eta) in cases {
            let m = ModelParams::cft_rayleigh(alpha, gamma, eta).unwrap();
            let t = TextureSampler::new(&m);
            let v: Vec<f64> = (0..N).map(|_| t.sample(&mut rng)).collect();
            for s in [0.5, 1.0, 2.0] {
                let est = mean_se(v.iter().map(|x| (-s * x).exp()));
                let want = texture_laplace(s, &m);
                assert!(within(est, want, 4.0), "{m:?} s={s}: {est:?} vs {want}");
            }
            let est = mean_se(v.iter().copied());
            let want = m.texture_mean().unwrap();
            assert!(within(est, want, 4.0), "{m:?} mean: {est:?} vs {want}");

            let trials = 100_000;
            let acc = mean_se((0..trials).map(|_| f64::from(u8::from(t.propose(&mut rng).1))));
            let p = t.acceptance_rate();
            let se = (p * (1.0 - p) / trials as f64).sqrt();
            assert!((acc.0 - p).abs() <= 3.0 * se, "{m:?} acceptance {} vs {p}", acc.0);
        }
    }

    #[test]
    fn splitting_and_warning() {
        let easy = TextureSampler::new(&ModelParams::cft_rayleigh(1.9, 1.0, 1.0).unwrap());
        assert_eq!(easy.pieces(), 1);
        assert!(easy.warning().is_none());
        let hard = TextureSampler::new(&ModelParams::cft_rayleigh(1.9, 1.0, 0.1).unwrap());
        assert_eq!(hard.pieces(), 9);
        assert!(matches!(
            hard.warning(),
            Some(Warning::LowAcceptance { pieces: 9, .. })
        ));
        let moderate = TextureSampler::new(&ModelParams::cft_rayleigh(1.2, 1.0, 0.1).unwrap());
        assert_eq!(moderate.pieces(), 4);
        assert!(moderate.warning().is_none());
        let ht = TextureSampler::new(&ModelParams::ht_rayleigh(1.5, 1.0).unwrap());
        assert_eq!(ht.acceptance_rate(), 1.0);
    }

    #[test]
    fn rayleigh_texture_is_constant() {
        let mut rng = RngState::seed_from_u64(1);
        let m = ModelParams::rayleigh(2.5).unwrap();
        assert_eq!(sample_texture(&m, &mut rng), 2.5);
    }

    #[test]
    fn complex_moments_and_cf() {
        let m = ModelParams::cft_rayleigh(1.6, 1.0, 2.0).unwrap();
        let c = par_sample_complex(&m, N, 77).unwrap();
        let (xi, xq) = (c.i_comp(), c.q_comp());
        assert!(within(mean_se(xi.iter().copied()), 0.0, 4.0));
        assert!(within(mean_se(xq.iter().copied()), 0.0, 4.0));
        let power = mean_se(xi.iter().zip(xq).map(|(i, q)| i * i + q * q));
        assert!(within(power, mean_square(&m).unwrap(), 4.0), "{power:?}");
        let cf = mean_se(xi.iter().zip(xq).map(|(i, q)| (0.3 * i + 0.4 * q).cos()));
        assert!(within(cf, cg_ptas_cf(0.3, 0.4, &m), 4.0), "{cf:?}");
    }

    #[test]
    fn phase_is_uniform() {
        let m = ModelParams::cft_rayleigh(1.2, 1.0, 5.0).unwrap();
        let c = par_sample_complex(&m, N, 3).unwrap();
        let mut bins = [0usize; 16];
        for (i, q) in c.i_comp().iter().zip(c.q_comp()) {
            let phi = q.atan2(*i).rem_euclid(2.0 * PI);
            bins[((phi / (2.0 * PI) * 16.0) as usize).min(15)] += 1;
        }
        let expect = N as f64 / 16.0;
        let chi2: f64 = bins
            .iter()
            .map(|&b| (b as f64 - expect).powi(2) / expect)
            .sum();
        // Upper 1% point of chi-square with 15 degrees of freedom.
        assert!(chi2 < 30.577_9, "{chi2}");
    }

    #[test]
    fn amplitudes_follow_rayleigh_at_alpha_two() {
        let gamma = 1.7;
        let m = ModelParams::rayleigh(gamma).unwrap();
        let mut v = par_sample_amplitudes(&m, N, 9).unwrap();
        v.sort_by(f64::total_cmp);
        // 99% DKW band.
        let band = ((2.0_f64 / 0.01).ln() / (2.0 * N as f64)).sqrt();
        for k in 1..20 {
            let r = v[k * N / 20];
            let emp = v.partition_point(|x| *x <= r) as f64 / N as f64;
            let model = 1.0 - (-r * r / (4.0 * gamma)).exp();
            assert!((emp - model).abs() < band, "r={r}: {emp} vs {model}");
        }
    }

    #[test]
    fn determinism_and_thread_independence() {
        let m = ModelParams::cft_rayleigh(1.9, 1.0, 0.1).unwrap();
        let a = par_sample_amplitudes(&m, 40_000, 42).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap()
            .install(|| par_sample_amplitudes(&m, 40_000, 42).unwrap());
        assert_eq!(a, b);
        let mut r1 = RngState::seed_from_u64(8);
        let mut r2 = RngState::seed_from_u64(8);
        assert_eq!(
            sample_amplitudes(&m, 100, &mut r1).unwrap(),
            sample_amplitudes(&m, 100, &mut r2).unwrap()
        );
        assert_ne!(a, par_sample_amplitudes(&m, 40_000, 43).unwrap());
    }

    #[test]
    fn counts_are_validated() {
        let m = ModelParams::rayleigh(1.0).unwrap();
        let mut rng = RngState::seed_from_u64(0);
        assert!(sample_amplitudes(&m, 0, &mut rng).is_err());
        assert!(sample_complex(&m, 0, &mut rng).is_err());
        assert_eq!(sample_amplitudes(&m, 1, &mut rng).unwrap().len(), 1);
        assert!(sample_amplitude(&m, 1, &mut rng).is_err());
        assert!(par_sample_amplitudes(&m, 0, 1).is_err());
    }
}
