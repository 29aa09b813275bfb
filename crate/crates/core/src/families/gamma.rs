//! Gamma, Beta and Dirichlet families, whose moments involve the digamma
//! function.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand_core::RngCore;

use super::{log_uniform, natural_layout, scalar_sample, uniform_in, vector_sample};
use crate::error::{Error, Result};
use crate::family::{Capabilities, ExponentialFamily, FamilyDescriptor, Support};
use crate::oracle::sampling;
use crate::param::{Block, BlockShape, Param, ParamKind, Sample, SuffStat};
use crate::special::{digamma, ln_beta, ln_gamma};

const FULL: Capabilities = Capabilities {
    has_entropy: true,
    has_moment: true,
    has_carrier_expectation: true,
    has_sampler: true,
    has_omega_solver: true,
    is_discrete: false,
};

fn positive_entries(desc: &FamilyDescriptor, values: &[f64]) -> Result<()> {
    for (i, v) in values.iter().enumerate() {
        if !(*v > 0.0 && v.is_finite()) {
            let name = desc.param_names.get(i).copied().unwrap_or(desc.param_names[0]);
            return Err(Error::InvalidParameter(format!(
                "{name} must be positive and finite, got {v}"
            )));
        }
    }
    Ok(())
}

/// Gamma distributions with shape α and rate β on `(0, ∞)`.
///
/// Triple: θ = (α − 1, −β), t(x) = (log x, x), k = 0.
pub struct Gamma {
    desc: FamilyDescriptor,
}

impl Gamma {
    pub fn new() -> Self {
        Self {
            desc: FamilyDescriptor {
                id: "gamma",
                name: "Gamma",
                order: 2,
                sample_dim: 1,
                support: Support::Positive,
                param_names: vec!["shape", "rate"],
                param_shapes: vec![BlockShape::Scalar, BlockShape::Scalar],
                caps: FULL,
            },
        }
    }

    fn params(&self, p: &Param) -> Result<(f64, f64)> {
        self.desc.check_layout(p, ParamKind::Source)?;
        let (a, b) = (p.scalar(0)?, p.scalar(1)?);
        positive_entries(&self.desc, &[a, b])?;
        Ok((a, b))
    }
}

impl Default for Gamma {
    fn default() -> Self {
        Self::new()
    }
}

impl ExponentialFamily for Gamma {
    fn descriptor(&self) -> &FamilyDescriptor {
        &self.desc
    }

    fn validate_source(&self, source: &Param) -> Result<()> {
        self.params(source).map(|_| ())
    }

    fn to_natural(&self, source: &Param) -> Result<Param> {
        let (a, b) = self.params(source)?;
        Ok(Param::natural(vec![Block::Scalar(a - 1.0), Block::Scalar(-b)]))
    }

    fn to_source(&self, natural: &Param) -> Result<Param> {
        natural_layout(&self.desc, natural, &[BlockShape::Scalar, BlockShape::Scalar])?;
        let (t1, t2) = (natural.scalar(0)?, natural.scalar(1)?);
        if !(t1 > -1.0 && t2 < 0.0) {
            return Err(Error::NaturalDomainViolation(format!(
                "gamma needs θ₁ > −1 and θ₂ < 0, got ({t1}, {t2})"
            )));
        }
        Ok(Param::source_scalars(&[t1 + 1.0, -t2]))
    }

    fn sufficient_stat(&self, x: &Sample) -> Result<SuffStat> {
        let x = scalar_sample(&self.desc, x)?;
        Ok(SuffStat(vec![Block::Scalar(x.ln()), Block::Scalar(x)]))
    }

    fn carrier(&self, x: &Sample) -> Result<f64> {
        scalar_sample(&self.desc, x).map(|_| 0.0)
    }

    fn log_density(&self, source: &Param, x: &Sample) -> Result<f64> {
        let (a, b) = self.params(source)?;
        let x = scalar_sample(&self.desc, x)?;
        Ok(a * b.ln() - ln_gamma(a) + (a - 1.0) * x.ln() - b * x)
    }

    fn default_omega(&self) -> Sample {
        Block::Scalar(1.0)
    }

    fn random_source(&self, rng: &mut dyn RngCore) -> Param {
        Param::source_scalars(&[log_uniform(rng, 0.5, 8.0), log_uniform(rng, 0.3, 4.0)])
    }

    fn random_support_point(&self, rng: &mut dyn RngCore) -> Sample {
        Block::Scalar(log_uniform(rng, 0.05, 10.0))
    }

    fn moment(&self, source: &Param) -> Result<Param> {
        let (a, b) = self.params(source)?;
        Ok(Param::moment(vec![
            Block::Scalar(digamma(a) - b.ln()),
            Block::Scalar(a / b),
        ]))
    }

    fn entropy(&self, source: &Param) -> Result<f64> {
        let (a, b) = self.params(source)?;
        Ok(a - b.ln() + ln_gamma(a) + (1.0 - a) * digamma(a))
    }

    fn carrier_expectation(&self, source: &Param) -> Result<f64> {
        self.params(source).map(|_| 0.0)
    }

    /// Two points with arithmetic mean `E[x]` and geometric mean `exp E[log x]`.
    fn omega_points(&self, source: &Param) -> Result<Vec<Sample>> {
        let (a, b) = self.params(source)?;
        let mean = a / b;
        let log_geo = digamma(a) - b.ln();
        let disc = mean * mean - (2.0 * log_geo).exp();
        if disc < 0.0 {
            return Err(Error::DegenerateSolution(format!(
                "gamma discriminant {disc} is negative"
            )));
        }
        if disc == 0.0 {
            return Ok(vec![Block::Scalar(mean)]);
        }
        let r = disc.sqrt();
        // product form keeps the small root accurate
        let hi = mean + r;
        let lo = (2.0 * log_geo).exp() / hi;
        Ok(vec![Block::Scalar(lo), Block::Scalar(hi)])
    }

    fn sample(&self, source: &Param, rng: &mut dyn RngCore) -> Result<Sample> {
        let (a, b) = self.params(source)?;
        Ok(Block::Scalar(sampling::gamma(a, rng) / b))
    }
}

/// Roots in `(0, 1)` of `z² − (1 + a − b) z + a` with `a = exp(2 E[log x])`
/// and `b = exp(2 E[log(1−x)])`: the two points whose statistics average to the
/// Beta moment parameter.
pub(crate) fn beta_omega(mean_log: f64, mean_log1m: f64) -> Result<Vec<f64>> {
    let a = (2.0 * mean_log).exp();
    let b = (2.0 * mean_log1m).exp();
    let s = 1.0 + a - b;
    let disc = s * s - 4.0 * a;
    if !(disc >= 0.0) {
        return Err(Error::DegenerateSolution(format!(
            "beta discriminant {disc} is negative"
        )));
    }
    let r = disc.sqrt();
    let hi = 0.5 * (s + r);
    let lo = a / hi;
    if !(lo > 0.0 && hi < 1.0 && lo < 1.0 && hi > 0.0) {
        return Err(Error::DegenerateSolution(format!(
            "beta roots ({lo}, {hi}) leave (0, 1)"
        )));
    }
    if r == 0.0 {
        return Ok(vec![lo]);
    }
    Ok(vec![lo, hi])
}

/// Beta distributions on `(0, 1)`.
///
/// Triple: θ = (α − 1, β − 1), t(x) = (log x, log(1 − x)), k = 0.
pub struct Beta {
    desc: FamilyDescriptor,
}

impl Beta {
    pub fn new() -> Self {
        Self {
            desc: FamilyDescriptor {
                id: "beta",
                name: "Beta",
                order: 2,
                sample_dim: 1,
                support: Support::UnitInterval,
                param_names: vec!["alpha", "beta"],
                param_shapes: vec![BlockShape::Scalar, BlockShape::Scalar],
                caps: FULL,
            },
        }
    }

    fn params(&self, p: &Param) -> Result<(f64, f64)> {
        self.desc.check_layout(p, ParamKind::Source)?;
        let (a, b) = (p.scalar(0)?, p.scalar(1)?);
        positive_entries(&self.desc, &[a, b])?;
        Ok((a, b))
    }
}

impl Default for Beta {
    fn default() -> Self {
        Self::new()
    }
}

impl ExponentialFamily for Beta {
    fn descriptor(&self) -> &FamilyDescriptor {
        &self.desc
    }

    fn validate_source(&self, source: &Param) -> Result<()> {
        self.params(source).map(|_| ())
    }

    fn to_natural(&self, source: &Param) -> Result<Param> {
        let (a, b) = self.params(source)?;
        Ok(Param::natural(vec![Block::Scalar(a - 1.0), Block::Scalar(b - 1.0)]))
    }

    fn to_source(&self, natural: &Param) -> Result<Param> {
        natural_layout(&self.desc, natural, &[BlockShape::Scalar, BlockShape::Scalar])?;
        let (t1, t2) = (natural.scalar(0)?, natural.scalar(1)?);
        if !(t1 > -1.0 && t2 > -1.0) {
            return Err(Error::NaturalDomainViolation(format!(
                "beta needs θ > −1, got ({t1}, {t2})"
            )));
        }
        Ok(Param::source_scalars(&[t1 + 1.0, t2 + 1.0]))
    }

    fn sufficient_stat(&self, x: &Sample) -> Result<SuffStat> {
        let x = scalar_sample(&self.desc, x)?;
        Ok(SuffStat(vec![Block::Scalar(x.ln()), Block::Scalar((-x).ln_1p())]))
    }

    fn carrier(&self, x: &Sample) -> Result<f64> {
        scalar_sample(&self.desc, x).map(|_| 0.0)
    }

    fn log_density(&self, source: &Param, x: &Sample) -> Result<f64> {
        let (a, b) = self.params(source)?;
        let x = scalar_sample(&self.desc, x)?;
        Ok((a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - ln_beta(&[a, b]))
    }

    fn default_omega(&self) -> Sample {
        Block::Scalar(0.5)
    }

    fn random_source(&self, rng: &mut dyn RngCore) -> Param {
        Param::source_scalars(&[log_uniform(rng, 0.5, 8.0), log_uniform(rng, 0.5, 8.0)])
    }

    fn random_support_point(&self, rng: &mut dyn RngCore) -> Sample {
        Block::Scalar(uniform_in(rng, 0.02, 0.98))
    }

    fn moment(&self, source: &Param) -> Result<Param> {
        let (a, b) = self.params(source)?;
        let s = digamma(a + b);
        Ok(Param::moment(vec![
            Block::Scalar(digamma(a) - s),
            Block::Scalar(digamma(b) - s),
        ]))
    }

    fn entropy(&self, source: &Param) -> Result<f64> {
        let (a, b) = self.params(source)?;
        Ok(ln_beta(&[a, b]) - (a - 1.0) * digamma(a) - (b - 1.0) * digamma(b) + (a + b - 2.0) * digamma(a + b))
    }

    fn carrier_expectation(&self, source: &Param) -> Result<f64> {
        self.params(source).map(|_| 0.0)
    }

    fn omega_points(&self, source: &Param) -> Result<Vec<Sample>> {
        let eta = self.moment(source)?;
        let roots = beta_omega(eta.scalar(0)?, eta.scalar(1)?)?;
        Ok(roots.into_iter().map(Block::Scalar).collect())
    }

    fn sample(&self, source: &Param, rng: &mut dyn RngCore) -> Result<Sample> {
        let (a, b) = self.params(source)?;
        Ok(Block::Scalar(sampling::dirichlet(&[a, b], rng)[0]))
    }
}

/// Dirichlet distributions on the open simplex of `ℝ^d`, `d ≥ 2`.
///
/// Triple: θᵢ = αᵢ − 1, tᵢ(x) = log xᵢ, k = 0.
pub struct Dirichlet {
    desc: FamilyDescriptor,
}

impl Dirichlet {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "dirichlet dimension must be at least 2, got {dim}"
            )));
        }
        Ok(Self {
            desc: FamilyDescriptor {
                id: "dirichlet",
                name: "Dirichlet",
                order: dim,
                sample_dim: dim,
                support: Support::Simplex(dim),
                param_names: vec!["concentration"],
                param_shapes: vec![BlockShape::Vector(dim)],
                caps: Capabilities {
                    has_omega_solver: dim == 2,
                    ..FULL
                },
            },
        })
    }

    fn dim(&self) -> usize {
        self.desc.sample_dim
    }

    fn alpha<'a>(&self, p: &'a Param) -> Result<&'a [f64]> {
        self.desc.check_layout(p, ParamKind::Source)?;
        let a = p.vector(0)?;
        positive_entries(&self.desc, a)?;
        Ok(a)
    }
}

impl ExponentialFamily for Dirichlet {
    fn descriptor(&self) -> &FamilyDescriptor {
        &self.desc
    }

    fn validate_source(&self, source: &Param) -> Result<()> {
        self.alpha(source).map(|_| ())
    }

    fn to_natural(&self, source: &Param) -> Result<Param> {
        let a = self.alpha(source)?;
        Ok(Param::natural(vec![Block::Vector(a.iter().map(|v| v - 1.0).collect())]))
    }

    fn to_source(&self, natural: &Param) -> Result<Param> {
        natural_layout(&self.desc, natural, &[BlockShape::Vector(self.dim())])?;
        let t = natural.vector(0)?;
        if !t.iter().all(|&v| v > -1.0) {
            return Err(Error::NaturalDomainViolation("dirichlet needs every θᵢ > −1".into()));
        }
        Ok(Param::source(vec![Block::Vector(t.iter().map(|v| v + 1.0).collect())]))
    }

    fn sufficient_stat(&self, x: &Sample) -> Result<SuffStat> {
        let x = vector_sample(&self.desc, x)?;
        Ok(SuffStat(vec![Block::Vector(x.iter().map(|v| v.ln()).collect())]))
    }

    fn carrier(&self, x: &Sample) -> Result<f64> {
        vector_sample(&self.desc, x).map(|_| 0.0)
    }

    fn log_density(&self, source: &Param, x: &Sample) -> Result<f64> {
        let a = self.alpha(source)?;
        let x = vector_sample(&self.desc, x)?;
        Ok(a.iter().zip(x).map(|(ai, xi)| (ai - 1.0) * xi.ln()).sum::<f64>() - ln_beta(a))
    }

    fn default_omega(&self) -> Sample {
        Block::Vector(vec![1.0 / self.dim() as f64; self.dim()])
    }

    fn random_source(&self, rng: &mut dyn RngCore) -> Param {
        Param::source(vec![Block::Vector(
            (0..self.dim()).map(|_| log_uniform(rng, 0.5, 5.0)).collect(),
        )])
    }

    fn random_support_point(&self, rng: &mut dyn RngCore) -> Sample {
        Block::Vector(sampling::dirichlet(&vec![2.0; self.dim()], rng))
    }

    fn moment(&self, source: &Param) -> Result<Param> {
        let a = self.alpha(source)?;
        let s = digamma(a.iter().sum());
        Ok(Param::moment(vec![Block::Vector(
            a.iter().map(|&v| digamma(v) - s).collect(),
        )]))
    }

    fn entropy(&self, source: &Param) -> Result<f64> {
        let a = self.alpha(source)?;
        let total: f64 = a.iter().sum();
        let d = self.dim() as f64;
        Ok(ln_beta(a) + (total - d) * digamma(total) - a.iter().map(|&v| (v - 1.0) * digamma(v)).sum::<f64>())
    }

    fn carrier_expectation(&self, source: &Param) -> Result<f64> {
        self.alpha(source).map(|_| 0.0)
    }

    /// Available for `d = 2`, where the family is a Beta family in `x₁`.
    fn omega_points(&self, source: &Param) -> Result<Vec<Sample>> {
        if self.dim() != 2 {
            return Err(crate::family::unsupported(self.desc.id, "omega-point solver for d > 2"));
        }
        let eta = self.moment(source)?;
        let e = eta.vector(0)?;
        let roots = beta_omega(e[0], e[1])?;
        Ok(roots.into_iter().map(|z| Block::Vector(vec![z, 1.0 - z])).collect())
    }

    fn sample(&self, source: &Param, rng: &mut dyn RngCore) -> Result<Sample> {
        Ok(Block::Vector(sampling::dirichlet(self.alpha(source)?, rng)))
    }
}
