//! Brute-force ground truth for the closed forms.
//!
//! One-dimensional continuous supports are integrated by adaptive
//! Gauss–Kronrod quadrature, discrete supports are summed until a provable
//! tail bound is met, and everything else falls back to seeded Monte Carlo.
//! Draw `i` of every Monte Carlo estimate comes from substream `i` of the
//! configured seed, so results depend on `(seed, mc_samples)` only.

mod quadrature;
pub mod sampling;

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::family::{ExponentialFamily, Support};
use crate::linalg::SymMatrix;
use crate::param::{Block, Param, Sample};
use crate::special::log_add_exp;
use quadrature::{integrate_line, sum_lattice, Line};
use sampling::{uniform, Substreams};

pub const DEFAULT_SEED: u64 = 0x5e_ed0f_d1ce;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Draws per Monte Carlo estimate, at least 1000.
    pub mc_samples: usize,
    pub seed: u64,
    /// Bound on the neglected mass of a lattice sum, at most `1e-12`.
    pub tail_mass_cutoff: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-11,
            max_subdivisions: 4000,
            mc_samples: 100_000,
            seed: DEFAULT_SEED,
            tail_mass_cutoff: 1e-14,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.max_subdivisions == 0 {
            return bad("max_subdivisions must be positive");
        }
        if self.mc_samples < 1000 {
            return bad("mc_samples must be at least 1000");
        }
        if !(self.tail_mass_cutoff > 0.0 && self.tail_mass_cutoff <= 1e-12) {
            return bad("tail_mass_cutoff must lie in (0, 1e-12]");
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.mc_samples = n;
        self
    }
}

/// A numerical estimate with its error bound (quadrature, summation) or
/// standard error (Monte Carlo).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// How an expectation over a family's support is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Quadrature,
    Summation,
    MonteCarlo,
}

/// A density that can be evaluated and sampled.
pub trait Density {
    fn log_density(&self, x: &Sample) -> Result<f64>;
    fn sample(&self, rng: &mut dyn RngCore) -> Result<Sample>;
}

/// One member `p(·; λ)` of a family.
pub struct FamilyDensity<'a> {
    pub family: &'a dyn ExponentialFamily,
    pub source: &'a Param,
}

impl Density for FamilyDensity<'_> {
    fn log_density(&self, x: &Sample) -> Result<f64> {
        self.family.log_density(self.source, x)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Result<Sample> {
        self.family.sample(self.source, rng)
    }
}

/// Supports that are one-dimensional after dropping redundant coordinates.
#[derive(Debug, Clone, Copy)]
enum Embedding {
    Scalar(Line),
    Vector1,
    Matrix1,
    Simplex2,
}

impl Embedding {
    fn of(support: Support) -> Option<Self> {
        Some(match support {
            Support::Real => Embedding::Scalar(Line::Real),
            Support::Positive | Support::NonNegative => Embedding::Scalar(Line::Positive),
            Support::UnitInterval => Embedding::Scalar(Line::Unit),
            Support::Euclidean(1) => Embedding::Vector1,
            Support::SpdCone(1) => Embedding::Matrix1,
            Support::Simplex(2) => Embedding::Simplex2,
            _ => return None,
        })
    }

    fn line(self) -> Line {
        match self {
            Embedding::Scalar(l) => l,
            Embedding::Vector1 => Line::Real,
            Embedding::Matrix1 => Line::Positive,
            Embedding::Simplex2 => Line::Unit,
        }
    }

    fn embed(self, x: f64) -> Sample {
        match self {
            Embedding::Scalar(_) => Block::Scalar(x),
            Embedding::Vector1 => Block::Vector(alloc::vec![x]),
            Embedding::Matrix1 => Block::Matrix(SymMatrix::diagonal(&[x])),
            Embedding::Simplex2 => Block::Vector(alloc::vec![x, 1.0 - x]),
        }
    }
}

/// The route used for a family: quadrature when the support is effectively
/// one-dimensional, summation when it is discrete, Monte Carlo otherwise.
pub fn route(fam: &dyn ExponentialFamily) -> Route {
    let s = fam.descriptor().support;
    if s.is_discrete() {
        Route::Summation
    } else if Embedding::of(s).is_some() {
        Route::Quadrature
    } else {
        Route::MonteCarlo
    }
}

/// Out-of-support points contribute nothing to an integral.
fn or_vanish(r: Result<(f64, f64)>) -> Result<(f64, f64)> {
    match r {
        Err(Error::OutOfSupport(_)) => Ok((f64::NEG_INFINITY, 0.0)),
        other => other,
    }
}

/// `∫ exp(lw(x)) g(x) dμ(x)` over the support of `fam` by quadrature or
/// summation; `Unsupported` when neither applies.
pub fn deterministic_integral(
    fam: &dyn ExponentialFamily,
    term: &dyn Fn(&Sample) -> Result<(f64, f64)>,
    cfg: &OracleConfig,
) -> Result<Estimate> {
    cfg.validate()?;
    let support = fam.descriptor().support;
    match support {
        Support::Binary => {
            let mut value = 0.0;
            for x in [0.0, 1.0] {
                let (lw, g) = term(&Block::Scalar(x))?;
                value += lw.exp() * g;
            }
            Ok(Estimate { value, error: 0.0 })
        }
        Support::Naturals => sum_lattice(
            &|x| or_vanish(term(&Block::Scalar(x))),
            cfg.tail_mass_cutoff,
            100_000_000,
        ),
        _ => {
            let emb = Embedding::of(support)
                .ok_or_else(|| Error::Unsupported(format!("no quadrature for the {} support", fam.id())))?;
            let (e, shift) = integrate_line(
                emb.line(),
                &|x| or_vanish(term(&emb.embed(x))),
                cfg.abs_tol,
                cfg.rel_tol,
                cfg.max_subdivisions,
            )?;
            let scale = shift.exp();
            Ok(Estimate {
                value: e.value * scale,
                error: e.error * scale,
            })
        }
    }
}

/// Mean and standard error of `f` over `n` draws, draw `i` using substream `i`.
pub fn monte_carlo_mean(n: usize, seed: u64, f: &mut dyn FnMut(&mut ChaCha8Rng) -> Result<f64>) -> Result<Estimate> {
    if n < 2 {
        return Err(Error::InvalidConfig("at least two Monte Carlo draws are needed".into()));
    }
    let streams = Substreams::new(seed);
    // Welford
    let (mut mean, mut m2) = (0.0, 0.0);
    for i in 0..n {
        let v = f(&mut streams.stream(i as u64))?;
        if !v.is_finite() {
            return Err(Error::NonConvergent(format!("Monte Carlo draw {i} produced {v}")));
        }
        let delta = v - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (v - mean);
    }
    let var = m2 / (n - 1) as f64;
    Ok(Estimate {
        value: mean,
        error: (var / n as f64).sqrt(),
    })
}

/// `∫ p(x;λ₁)^α p(x;λ₂)^β dμ(x)`.
///
/// Monte Carlo supports use importance sampling from `½p₁ + ½p₂`, whose
/// weights are bounded by 2 whenever `α + β = 1`.
pub fn integral_i(
    fam: &dyn ExponentialFamily,
    l1: &Param,
    l2: &Param,
    alpha: f64,
    beta: f64,
    cfg: &OracleConfig,
) -> Result<Estimate> {
    fam.validate_source(l1)?;
    fam.validate_source(l2)?;
    let log_integrand = |x: &Sample| -> Result<f64> {
        let a = if alpha == 0.0 {
            0.0
        } else {
            alpha * fam.log_density(l1, x)?
        };
        let b = if beta == 0.0 {
            0.0
        } else {
            beta * fam.log_density(l2, x)?
        };
        Ok(a + b)
    };
    match route(fam) {
        Route::MonteCarlo => {
            cfg.validate()?;
            monte_carlo_mean(cfg.mc_samples, cfg.seed, &mut |rng| {
                let pick_first = uniform(rng) < 0.5;
                let x = fam.sample(if pick_first { l1 } else { l2 }, rng)?;
                let q = log_add_exp(fam.log_density(l1, &x)?, fam.log_density(l2, &x)?) - core::f64::consts::LN_2;
                Ok((log_integrand(&x)? - q).exp())
            })
        }
        _ => deterministic_integral(fam, &|x| Ok((log_integrand(x)?, 1.0)), cfg),
    }
}

/// `E_{p(·;λ)}[g(x)]`, by quadrature/summation or Monte Carlo.
pub fn expectation(
    fam: &dyn ExponentialFamily,
    source: &Param,
    g: &dyn Fn(&Sample) -> Result<f64>,
    cfg: &OracleConfig,
) -> Result<Estimate> {
    fam.validate_source(source)?;
    match route(fam) {
        Route::MonteCarlo => {
            cfg.validate()?;
            monte_carlo_mean(cfg.mc_samples, cfg.seed, &mut |rng| g(&fam.sample(source, rng)?))
        }
        _ => deterministic_integral(fam, &|x| Ok((fam.log_density(source, x)?, g(x)?)), cfg),
    }
}

/// Total mass of `p(·;λ)`.
pub fn normalization(fam: &dyn ExponentialFamily, source: &Param, cfg: &OracleConfig) -> Result<Estimate> {
    expectation(fam, source, &|_| Ok(1.0), cfg)
}

/// `D_KL[p₁ : p₂] = ∫ p₁ log(p₁/p₂)`, for one-dimensional or discrete supports.
pub fn kld_quadrature(fam: &dyn ExponentialFamily, l1: &Param, l2: &Param, cfg: &OracleConfig) -> Result<Estimate> {
    fam.validate_source(l1)?;
    fam.validate_source(l2)?;
    if route(fam) == Route::MonteCarlo {
        return Err(Error::Unsupported(format!(
            "quadrature KL needs a one-dimensional or discrete support; use Monte Carlo for {}",
            fam.id()
        )));
    }
    deterministic_integral(
        fam,
        &|x| {
            let a = fam.log_density(l1, x)?;
            Ok((a, a - fam.log_density(l2, x)?))
        },
        cfg,
    )
}

/// Monte Carlo estimate of the extended KL divergence from draws of `p₁`.
///
/// Each term `log(p₁/p₂) + p₂/p₁ − 1` is nonnegative and has expectation
/// `D_KL[p₁ : p₂]`.
pub fn kld_monte_carlo(fam: &dyn ExponentialFamily, l1: &Param, l2: &Param, cfg: &OracleConfig) -> Result<Estimate> {
    cfg.validate()?;
    fam.validate_source(l1)?;
    fam.validate_source(l2)?;
    monte_carlo_mean(cfg.mc_samples, cfg.seed, &mut |rng| {
        let x = fam.sample(l1, rng)?;
        let d = fam.log_density(l1, &x)? - fam.log_density(l2, &x)?;
        Ok(d + (-d).exp_m1())
    })
}

/// `−(1/m) Σ log p(xᵢ)` with `xᵢ ~ p`.
pub fn entropy_monte_carlo(density: &dyn Density, cfg: &OracleConfig) -> Result<Estimate> {
    cfg.validate()?;
    monte_carlo_mean(cfg.mc_samples, cfg.seed, &mut |rng| {
        Ok(-density.log_density(&density.sample(rng)?)?)
    })
}

/// Shannon entropy by quadrature/summation (or Monte Carlo where needed).
pub fn entropy(fam: &dyn ExponentialFamily, source: &Param, cfg: &OracleConfig) -> Result<Estimate> {
    expectation(fam, source, &|x| Ok(-fam.log_density(source, x)?), cfg)
}

/// Componentwise mean of `t(x)` and its standard errors over `cfg.mc_samples` draws.
pub fn sufficient_stat_monte_carlo(
    fam: &dyn ExponentialFamily,
    source: &Param,
    cfg: &OracleConfig,
) -> Result<Vec<Estimate>> {
    cfg.validate()?;
    let xs = sample(fam, source, cfg.mc_samples, cfg.seed)?;
    let stats = xs
        .iter()
        .map(|x| fam.sufficient_stat(x).map(|t| t.components()))
        .collect::<Result<Vec<_>>>()?;
    let n = stats.len() as f64;
    let dim = stats[0].len();
    Ok((0..dim)
        .map(|j| {
            let mean = stats.iter().map(|s| s[j]).sum::<f64>() / n;
            let var = stats.iter().map(|s| (s[j] - mean) * (s[j] - mean)).sum::<f64>() / (n - 1.0);
            Estimate {
                value: mean,
                error: (var / n).sqrt(),
            }
        })
        .collect())
}

/// `n` iid draws from `p(·;λ)`; draw `i` uses substream `i` of `seed`.
pub fn sample(fam: &dyn ExponentialFamily, source: &Param, n: usize, seed: u64) -> Result<Vec<Sample>> {
    fam.validate_source(source)?;
    let streams = Substreams::new(seed);
    (0..n as u64)
        .map(|i| fam.sample(source, &mut streams.stream(i)))
        .collect()
}
