//! Deterministic sample generators shared by tests, checks and the CLI.

use crate::complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` points uniformly distributed (by area) in the disc `|z| <= radius`.
pub fn disc_samples(n: usize, radius: f64, seed: u64) -> Vec<Complex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            let a = rng.gen_range(0.0..std::f64::consts::TAU);
            Complex::from_polar(r, a)
        })
        .collect()
}

/// `n` points uniformly distributed in the annulus `inner <= |z| <= outer`.
pub fn annulus_samples(n: usize, inner: f64, outer: f64, seed: u64) -> Vec<Complex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r2 = rng.gen_range(inner * inner..=outer * outer);
            let a = rng.gen_range(0.0..std::f64::consts::TAU);
            Complex::from_polar(r2.sqrt(), a)
        })
        .collect()
}

/// Uniform reals in `[lo, hi)`.
pub fn uniform_samples(n: usize, lo: f64, hi: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Regular `n x n` grid over `[-half, half]^2`, keeping only points with `|z| <= radius`.
pub fn square_grid(n: usize, half: f64, radius: f64) -> Vec<Complex> {
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let u = if n == 1 { 0.0 } else { -half + 2.0 * half * i as f64 / (n - 1) as f64 };
            let v = if n == 1 { 0.0 } else { -half + 2.0 * half * j as f64 / (n - 1) as f64 };
            let z = Complex::new(u, v);
            if z.norm() <= radius {
                out.push(z);
            }
        }
    }
    out
}
