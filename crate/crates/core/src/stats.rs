//! Seeded, sharded Monte-Carlo sampling with a reproducible reduction
//! order, plus the small statistics used by the verification protocols.
//!
//! Determinism contract: for a fixed (seed, sample count, shard count) the
//! returned sample vector is bit-identical regardless of how many threads
//! rayon actually uses. Each shard owns a ChaCha stream derived from
//! (seed, shard index) and accumulates sequentially; shard outputs are
//! concatenated in shard order.

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// RNG for one logical shard of an experiment. `stream` values must be
/// distinct across shards and across independent sub-experiments sharing a
/// master seed.
pub fn shard_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draw `samples` values of `f` sharded over `shards` rng streams.
/// `f` receives the shard rng and the global sample index.
pub fn sharded_samples<T, F>(seed: u64, samples: usize, shards: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    let shards = shards.max(1);
    let chunk = samples.div_ceil(shards);
    let mut parts: Vec<Vec<T>> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let lo = s * chunk;
            let hi = ((s + 1) * chunk).min(samples);
            let mut rng = shard_rng(seed, s as u64);
            (lo..hi).map(|i| f(&mut rng, i)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(samples);
    for p in parts.iter_mut() {
        out.append(p);
    }
    out
}

#[derive(Clone, Copy, Debug)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

pub fn mean_se(xs: &[f64]) -> MeanSe {
    let n = xs.len();
    assert!(n > 1, "need at least two samples");
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0);
    MeanSe {
        mean,
        se: (var / n as f64).sqrt(),
        n,
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ComplexMeanSe {
    pub mean: C64,
    /// Scalar standard error: sqrt((Var(Re) + Var(Im)) / n).
    pub se: f64,
    pub n: usize,
}

pub fn mean_se_complex(xs: &[C64]) -> ComplexMeanSe {
    let n = xs.len();
    assert!(n > 1, "need at least two samples");
    let mean = xs.iter().sum::<C64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).norm_sqr()).sum::<f64>() / (n as f64 - 1.0);
    ComplexMeanSe {
        mean,
        se: (var / n as f64).sqrt(),
        n,
    }
}

/// Mean and standard error of exp(log_i) with the exponents max-shifted
/// before exponentiation so intermediate values cannot overflow.
pub fn mean_se_exp_of(logs: &[C64]) -> ComplexMeanSe {
    let shift = logs
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let ws: Vec<C64> = logs.iter().map(|z| (z - shift).exp()).collect();
    let m = mean_se_complex(&ws);
    let scale = shift.exp();
    ComplexMeanSe {
        mean: m.mean * scale,
        se: m.se * scale,
        n: m.n,
    }
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + libm::erf(x / std::f64::consts::SQRT_2))
}

/// One-sample Kolmogorov-Smirnov statistic against a reference CDF.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    d
}

/// Asymptotic KS acceptance threshold at significance `alpha` for a
/// one-sample test with n points: c(alpha)/sqrt(n).
pub fn ks_threshold(n: usize, alpha: f64) -> f64 {
    (-0.5 * (alpha / 2.0).ln()).sqrt() / (n as f64).sqrt()
}

/// Threshold for the two-sample statistic.
pub fn ks_two_sample_threshold(n: usize, m: usize, alpha: f64) -> f64 {
    (-0.5 * (alpha / 2.0).ln()).sqrt() * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Least-squares slope of y against x.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        num += (xi - mx) * (yi - my);
        den += (xi - mx) * (xi - mx);
    }
    num / den
}
