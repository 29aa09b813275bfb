//! Random variate generators.
//!
//! Inversion for the one-parameter continuous laws, the polar method for
//! normals, Marsaglia–Tsang for gamma variates, inversion/PTRS for Poisson,
//! and the Bartlett decomposition for Wishart matrices.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::linalg::{Cholesky, SymMatrix};
use crate::special::ln_factorial;

/// Independent ChaCha8 substreams derived from one 64-bit seed.
///
/// Draw `i` of every Monte Carlo routine uses substream `i`, so estimates do
/// not depend on how the work is split and two estimators run with the same
/// seed share common random numbers.
#[derive(Clone)]
pub struct Substreams {
    base: ChaCha8Rng,
}

impl Substreams {
    pub fn new(seed: u64) -> Self {
        Self {
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(index);
        rng
    }
}

/// Uniform on the open interval (0, 1).
pub fn uniform(rng: &mut dyn RngCore) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal by the Marsaglia polar method.
pub fn standard_normal(rng: &mut dyn RngCore) -> f64 {
    loop {
        let u = 2.0 * uniform(rng) - 1.0;
        let v = 2.0 * uniform(rng) - 1.0;
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            return u * (-2.0 * s.ln() / s).sqrt();
        }
    }
}

/// Exponential with unit rate.
pub fn standard_exponential(rng: &mut dyn RngCore) -> f64 {
    -uniform(rng).ln()
}

/// Gamma(shape, 1) by Marsaglia–Tsang; shapes below one are boosted by
/// `G(a) = G(a+1)·U^{1/a}`.
pub fn gamma(shape: f64, rng: &mut dyn RngCore) -> f64 {
    if shape < 1.0 {
        let g = gamma(shape + 1.0, rng);
        return g * uniform(rng).powf(1.0 / shape);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let (x, v) = loop {
            let x = standard_normal(rng);
            let v = 1.0 + c * x;
            if v > 0.0 {
                break (x, v * v * v);
            }
        };
        let u = uniform(rng);
        let x2 = x * x;
        // squeeze
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// Chi-squared with `dof` degrees of freedom.
pub fn chi_squared(dof: f64, rng: &mut dyn RngCore) -> f64 {
    2.0 * gamma(0.5 * dof, rng)
}

/// Poisson by sequential inversion for small means and Hörmann's PTRS
/// transformed rejection otherwise.
pub fn poisson(lambda: f64, rng: &mut dyn RngCore) -> f64 {
    if lambda <= 30.0 {
        let mut k = 0.0;
        let mut p = (-lambda).exp();
        let mut cdf = p;
        let u = uniform(rng);
        while u > cdf {
            k += 1.0;
            p *= lambda / k;
            cdf += p;
            if p == 0.0 && cdf < u {
                // rounding left the cdf short of u; the remaining mass is negligible
                break;
            }
        }
        return k;
    }
    let slam = lambda.sqrt();
    let loglam = lambda.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = uniform(rng) - 0.5;
        let v = uniform(rng);
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + lambda + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        if v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln() <= -lambda + k * loglam - ln_factorial(k) {
            return k;
        }
    }
}

/// `μ + L z` with `z` standard normal.
pub fn multivariate_normal(mean: &[f64], chol: &Cholesky, rng: &mut dyn RngCore) -> Vec<f64> {
    let z: Vec<f64> = (0..mean.len()).map(|_| standard_normal(rng)).collect();
    chol.mul_lower(&z).iter().zip(mean).map(|(a, m)| a + m).collect()
}

/// Dirichlet via normalized gamma variates.
pub fn dirichlet(alpha: &[f64], rng: &mut dyn RngCore) -> Vec<f64> {
    loop {
        let g: Vec<f64> = alpha.iter().map(|&a| gamma(a, rng)).collect();
        let s: f64 = g.iter().sum();
        let x: Vec<f64> = g.iter().map(|v| v / s).collect();
        // tiny shapes can underflow a coordinate to exactly zero
        if x.iter().all(|&c| c > 0.0 && c < 1.0) {
            return x;
        }
    }
}

/// Inverse Gaussian by the Michael–Schucany–Haas transformation.
pub fn inverse_gaussian(mu: f64, shape: f64, rng: &mut dyn RngCore) -> f64 {
    let nu = standard_normal(rng);
    let y = nu * nu;
    let x = mu + mu * mu * y / (2.0 * shape) - mu / (2.0 * shape) * (4.0 * mu * shape * y + mu * mu * y * y).sqrt();
    if uniform(rng) <= mu / (mu + x) {
        x
    } else {
        mu * mu / x
    }
}

/// Wishart(n, S) by the Bartlett decomposition `X = (L A)(L A)ᵀ`.
pub fn wishart(dof: f64, scale_chol: &Cholesky, rng: &mut dyn RngCore) -> SymMatrix {
    let d = scale_chol.dim();
    let mut a = vec![0.0; d * d];
    for i in 0..d {
        a[i * d + i] = chi_squared(dof - i as f64, rng).sqrt();
        for j in 0..i {
            a[i * d + j] = standard_normal(rng);
        }
    }
    // B = L A, lower triangular
    let mut b = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            b[i * d + j] = (j..=i).map(|k| scale_chol.get(i, k) * a[k * d + j]).sum();
        }
    }
    let mut x = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            x[i * d + j] = (0..d).map(|k| b[i * d + k] * b[j * d + k]).sum();
        }
    }
    SymMatrix::from_rows(d, x).expect("Bartlett product is symmetric")
}
