//! The exponential-family contract.
//!
//! A family exposes the parameter conversions θ(λ) and λ(θ), the canonical
//! triple (t, k, published density) and, optionally, closed-form moments,
//! entropy, ω-point solvers and a sampler. The log-normalizer F is never part
//! of the contract; [`ExponentialFamily::implicit_cumulant`] recovers it from
//! a single density evaluation when a diagnostic needs it.

use alloc::format;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::param::{Block, BlockShape, Param, ParamKind, Sample, SuffStat};

/// Sample space of a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    /// `[0, ∞)`
    NonNegative,
    /// `(0, ∞)`
    Positive,
    /// `ℝ`
    Real,
    /// `(0, 1)`
    UnitInterval,
    /// `{0, 1, 2, ...}`
    Naturals,
    /// `{0, 1}`
    Binary,
    /// Open probability simplex in `ℝ^d`.
    Simplex(usize),
    /// `ℝ^d`
    Euclidean(usize),
    /// Symmetric positive-definite `d × d` matrices.
    SpdCone(usize),
}

const SIMPLEX_TOL: f64 = 1e-9;

impl Support {
    pub fn is_discrete(&self) -> bool {
        matches!(self, Support::Naturals | Support::Binary)
    }

    /// Reject samples of the wrong shape or outside the support.
    pub fn check(&self, x: &Sample) -> Result<()> {
        let ok = match (self, x) {
            (Support::NonNegative, Block::Scalar(v)) => *v >= 0.0 && v.is_finite(),
            (Support::Positive, Block::Scalar(v)) => *v > 0.0 && v.is_finite(),
            (Support::Real, Block::Scalar(v)) => v.is_finite(),
            (Support::UnitInterval, Block::Scalar(v)) => *v > 0.0 && *v < 1.0,
            (Support::Naturals, Block::Scalar(v)) => *v >= 0.0 && v.is_finite() && libm::floor(*v) == *v,
            (Support::Binary, Block::Scalar(v)) => *v == 0.0 || *v == 1.0,
            (Support::Simplex(d), Block::Vector(v)) => {
                v.len() == *d
                    && v.iter().all(|&c| c > 0.0 && c < 1.0)
                    && (v.iter().sum::<f64>() - 1.0).abs() <= SIMPLEX_TOL
            }
            (Support::Euclidean(d), Block::Vector(v)) => v.len() == *d && v.iter().all(|c| c.is_finite()),
            (Support::SpdCone(d), Block::Matrix(m)) => m.dim() == *d && m.is_spd(),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::OutOfSupport(format!("{x:?} is not in {self:?}")))
        }
    }

    /// Shape of a single sample.
    pub fn sample_shape(&self) -> BlockShape {
        match self {
            Support::Simplex(d) | Support::Euclidean(d) => BlockShape::Vector(*d),
            Support::SpdCone(d) => BlockShape::Matrix(*d),
            _ => BlockShape::Scalar,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Capabilities {
    pub has_entropy: bool,
    pub has_moment: bool,
    pub has_carrier_expectation: bool,
    pub has_sampler: bool,
    pub has_omega_solver: bool,
    pub is_discrete: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyDescriptor {
    /// Stable lowercase identifier used by the CLI and job files.
    pub id: &'static str,
    pub name: &'static str,
    /// Dimension D of the natural parameter space.
    pub order: usize,
    /// Dimension d of the sample space.
    pub sample_dim: usize,
    pub support: Support,
    /// Names of the source-parameter blocks, in order.
    pub param_names: Vec<&'static str>,
    pub param_shapes: Vec<BlockShape>,
    pub caps: Capabilities,
}

impl FamilyDescriptor {
    /// Check kind and block layout of a parameter.
    pub fn check_layout(&self, p: &Param, kind: ParamKind) -> Result<()> {
        p.expect_kind(kind)?;
        p.expect_shapes(&self.param_shapes, &self.param_names)
    }
}

pub(crate) fn unsupported(id: &str, what: &str) -> Error {
    Error::Unsupported(format!("{what} is not available for the {id} family"))
}

/// A full regular exponential family with a fixed canonical factorization
/// `p(x;λ) = exp(θ(λ)ᵀt(x) − F(θ(λ)) + k(x))`.
///
/// Implementors supply the published density directly; F never appears.
pub trait ExponentialFamily: Send + Sync {
    fn descriptor(&self) -> &FamilyDescriptor;

    /// Reject source parameters outside Λ (eagerly; no NaN propagation).
    fn validate_source(&self, source: &Param) -> Result<()>;

    /// θ(λ).
    fn to_natural(&self, source: &Param) -> Result<Param>;

    /// λ(θ); fails with [`Error::NaturalDomainViolation`] if θ ∉ Θ.
    fn to_source(&self, natural: &Param) -> Result<Param>;

    /// t(x).
    fn sufficient_stat(&self, x: &Sample) -> Result<SuffStat>;

    /// k(x).
    fn carrier(&self, x: &Sample) -> Result<f64>;

    /// log p(x; λ), from the published density formula.
    fn log_density(&self, source: &Param, x: &Sample) -> Result<f64>;

    /// The canonical ω used when the caller does not supply one.
    fn default_omega(&self) -> Sample;

    /// A parameter drawn from a moderate region of Λ, for randomized checks.
    fn random_source(&self, rng: &mut dyn RngCore) -> Param;

    /// A support point drawn from a moderate region of the support.
    fn random_support_point(&self, rng: &mut dyn RngCore) -> Sample;

    /// η(λ) = E[t(x)], laid out like θ.
    fn moment(&self, _source: &Param) -> Result<Param> {
        Err(unsupported(self.descriptor().id, "moment"))
    }

    /// Shannon (differential) entropy.
    fn entropy(&self, _source: &Param) -> Result<f64> {
        Err(unsupported(self.descriptor().id, "entropy"))
    }

    /// E[k(x)].
    fn carrier_expectation(&self, _source: &Param) -> Result<f64> {
        Err(unsupported(self.descriptor().id, "carrier expectation"))
    }

    /// Distinct support points whose mean sufficient statistic equals η(λ).
    fn omega_points(&self, _source: &Param) -> Result<Vec<Sample>> {
        Err(unsupported(self.descriptor().id, "omega-point solver"))
    }

    /// θ′(u) for order-1 families.
    fn natural_derivative(&self, _source: &Param) -> Result<f64> {
        Err(unsupported(self.descriptor().id, "natural-parameter derivative"))
    }

    /// One draw from p(·; λ).
    fn sample(&self, _source: &Param, _rng: &mut dyn RngCore) -> Result<Sample> {
        Err(unsupported(self.descriptor().id, "sampler"))
    }

    fn id(&self) -> &'static str {
        self.descriptor().id
    }

    /// log p̃(x; λ) = θ(λ)ᵀt(x) + k(x).
    fn log_unnormalized_density(&self, source: &Param, x: &Sample) -> Result<f64> {
        let theta = self.to_natural(source)?;
        let t = self.sufficient_stat(x)?;
        Ok(theta.dot_stat(&t) + self.carrier(x)?)
    }

    /// F̂(ω) = θ(λ)ᵀt(ω) + k(ω) − log p(ω; λ), equal to F(θ(λ)) for every ω.
    fn implicit_cumulant(&self, source: &Param, omega: &Sample) -> Result<f64> {
        Ok(self.log_unnormalized_density(source, omega)? - self.log_density(source, omega)?)
    }
}
