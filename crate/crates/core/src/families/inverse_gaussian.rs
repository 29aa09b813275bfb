//! Inverse Gaussian family.

use alloc::format;
use alloc::vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand_core::RngCore;

use super::{log_uniform, natural_layout, scalar_sample};
use crate::error::{Error, Result};
use crate::family::{Capabilities, ExponentialFamily, FamilyDescriptor, Support};
use crate::oracle::sampling;
use crate::param::{Block, BlockShape, Param, ParamKind, Sample, SuffStat};
use crate::special::LN_2PI;

/// Inverse Gaussian distributions with mean μ and shape λ on `(0, ∞)`.
///
/// Triple: θ = (−λ/(2μ²), −λ/2), t(x) = (x, 1/x), k(x) = −(3/2) log x − ½ log 2π.
pub struct InverseGaussian {
    desc: FamilyDescriptor,
}

impl InverseGaussian {
    pub fn new() -> Self {
        Self {
            desc: FamilyDescriptor {
                id: "inverse_gaussian",
                name: "Inverse Gaussian",
                order: 2,
                sample_dim: 1,
                support: Support::Positive,
                param_names: vec!["mean", "shape"],
                param_shapes: vec![BlockShape::Scalar, BlockShape::Scalar],
                caps: Capabilities {
                    has_entropy: false,
                    has_moment: true,
                    has_carrier_expectation: false,
                    has_sampler: true,
                    has_omega_solver: false,
                    is_discrete: false,
                },
            },
        }
    }

    fn params(&self, p: &Param) -> Result<(f64, f64)> {
        self.desc.check_layout(p, ParamKind::Source)?;
        let (m, l) = (p.scalar(0)?, p.scalar(1)?);
        for (name, v) in [("mean", m), ("shape", l)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok((m, l))
    }
}

impl Default for InverseGaussian {
    fn default() -> Self {
        Self::new()
    }
}

impl ExponentialFamily for InverseGaussian {
    fn descriptor(&self) -> &FamilyDescriptor {
        &self.desc
    }

    fn validate_source(&self, source: &Param) -> Result<()> {
        self.params(source).map(|_| ())
    }

    fn to_natural(&self, source: &Param) -> Result<Param> {
        let (m, l) = self.params(source)?;
        Ok(Param::natural(vec![
            Block::Scalar(-l / (2.0 * m * m)),
            Block::Scalar(-l / 2.0),
        ]))
    }

    fn to_source(&self, natural: &Param) -> Result<Param> {
        natural_layout(&self.desc, natural, &[BlockShape::Scalar, BlockShape::Scalar])?;
        let (t1, t2) = (natural.scalar(0)?, natural.scalar(1)?);
        if !(t1 < 0.0 && t2 < 0.0) {
            return Err(Error::NaturalDomainViolation(format!(
                "inverse_gaussian needs θ₁ < 0 and θ₂ < 0, got ({t1}, {t2})"
            )));
        }
        Ok(Param::source_scalars(&[(t2 / t1).sqrt(), -2.0 * t2]))
    }

    fn sufficient_stat(&self, x: &Sample) -> Result<SuffStat> {
        let x = scalar_sample(&self.desc, x)?;
        Ok(SuffStat(vec![Block::Scalar(x), Block::Scalar(1.0 / x)]))
    }

    fn carrier(&self, x: &Sample) -> Result<f64> {
        let x = scalar_sample(&self.desc, x)?;
        Ok(-1.5 * x.ln() - 0.5 * LN_2PI)
    }

    fn log_density(&self, source: &Param, x: &Sample) -> Result<f64> {
        let (m, l) = self.params(source)?;
        let x = scalar_sample(&self.desc, x)?;
        Ok(0.5 * (l.ln() - LN_2PI) - 1.5 * x.ln() - l * (x - m) * (x - m) / (2.0 * m * m * x))
    }

    fn default_omega(&self) -> Sample {
        Block::Scalar(1.0)
    }

    fn random_source(&self, rng: &mut dyn RngCore) -> Param {
        Param::source_scalars(&[log_uniform(rng, 0.5, 3.0), log_uniform(rng, 0.5, 5.0)])
    }

    fn random_support_point(&self, rng: &mut dyn RngCore) -> Sample {
        Block::Scalar(log_uniform(rng, 0.05, 8.0))
    }

    fn moment(&self, source: &Param) -> Result<Param> {
        let (m, l) = self.params(source)?;
        Ok(Param::moment(vec![Block::Scalar(m), Block::Scalar(1.0 / m + 1.0 / l)]))
    }

    fn sample(&self, source: &Param, rng: &mut dyn RngCore) -> Result<Sample> {
        let (m, l) = self.params(source)?;
        Ok(Block::Scalar(sampling::inverse_gaussian(m, l, rng)))
    }
}
