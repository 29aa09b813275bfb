//! Poisson and Bernoulli families.

use alloc::format;
use alloc::vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand_core::RngCore;

use super::{log_uniform, natural_scalar, positive_scalar, scalar_sample, uniform_in};
use crate::error::{Error, Result};
use crate::family::{Capabilities, ExponentialFamily, FamilyDescriptor, Support};
use crate::oracle::sampling::{self, uniform};
use crate::param::{Block, BlockShape, Param, Sample, SuffStat};
use crate::special::{ln_factorial, logistic, logit};

/// Relative tail bound at which the Poisson series are cut.
const SERIES_CUTOFF: f64 = 1e-17;

/// Poisson distributions `λˣ e^{−λ} / x!` on `{0, 1, ...}`.
///
/// Triple: θ = log λ, t(x) = x, k(x) = −log x!.
pub struct Poisson {
    desc: FamilyDescriptor,
}

impl Poisson {
    pub fn new() -> Self {
        Self {
            desc: FamilyDescriptor {
                id: "poisson",
                name: "Poisson",
                order: 1,
                sample_dim: 1,
                support: Support::Naturals,
                param_names: vec!["rate"],
                param_shapes: vec![BlockShape::Scalar],
                caps: Capabilities {
                    has_entropy: true,
                    has_moment: true,
                    has_carrier_expectation: true,
                    has_sampler: true,
                    has_omega_solver: false,
                    is_discrete: true,
                },
            },
        }
    }

    fn rate(&self, p: &Param) -> Result<f64> {
        positive_scalar(&self.desc, p, 0)
    }

    /// `(Σ p_x log p_x, Σ p_x log x!)`, summed until the geometric tail
    /// bound of the log-concave pmf falls below the cutoff.
    fn series(rate: f64) -> (f64, f64) {
        let ln_rate = rate.ln();
        let mut plogp = 0.0;
        let mut plogfact = 0.0;
        let mut x = 0.0;
        loop {
            let lf = ln_factorial(x);
            let lp = x * ln_rate - rate - lf;
            let p = lp.exp();
            plogp += p * lp;
            plogfact += p * lf;
            let r = rate / (x + 1.0);
            // beyond the mode the ratio p_{x+1}/p_x = r < 1 only shrinks
            if r < 1.0 {
                let tail = p * r / (1.0 - r);
                // log x! grows slower than any geometric factor; bound it by its next value
                let scale = 1.0 + lp.abs() + ln_factorial(x + 1.0);
                if tail * scale < SERIES_CUTOFF {
                    break;
                }
            }
            x += 1.0;
        }
        (plogp, plogfact)
    }
}

impl Default for Poisson {
    fn default() -> Self {
        Self::new()
    }
}

impl ExponentialFamily for Poisson {
    fn descriptor(&self) -> &FamilyDescriptor {
        &self.desc
    }

    fn validate_source(&self, source: &Param) -> Result<()> {
        self.rate(source).map(|_| ())
    }

    fn to_natural(&self, source: &Param) -> Result<Param> {
        Ok(Param::natural(vec![Block::Scalar(self.rate(source)?.ln())]))
    }

    fn to_source(&self, natural: &Param) -> Result<Param> {
        let theta = natural_scalar(&self.desc, natural)?;
        let rate = theta.exp();
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::NaturalDomainViolation(format!(
                "poisson rate e^θ overflows for θ = {theta}"
            )));
        }
        Ok(Param::source_scalars(&[rate]))
    }

    fn sufficient_stat(&self, x: &Sample) -> Result<SuffStat> {
        let x = scalar_sample(&self.desc, x)?;
        Ok(SuffStat(vec![Block::Scalar(x)]))
    }

    fn carrier(&self, x: &Sample) -> Result<f64> {
        scalar_sample(&self.desc, x).map(|x| -ln_factorial(x))
    }

    fn log_density(&self, source: &Param, x: &Sample) -> Result<f64> {
        let l = self.rate(source)?;
        let x = scalar_sample(&self.desc, x)?;
        Ok(x * l.ln() - l - ln_factorial(x))
    }

    fn default_omega(&self) -> Sample {
        Block::Scalar(0.0)
    }

    fn random_source(&self, rng: &mut dyn RngCore) -> Param {
        Param::source_scalars(&[log_uniform(rng, 0.2, 20.0)])
    }

    fn random_support_point(&self, rng: &mut dyn RngCore) -> Sample {
        Block::Scalar(uniform_in(rng, 0.0, 15.0).floor())
    }

    fn moment(&self, source: &Param) -> Result<Param> {
        Ok(Param::moment(vec![Block::Scalar(self.rate(source)?)]))
    }

    fn entropy(&self, source: &Param) -> Result<f64> {
        Ok(-Self::series(self.rate(source)?).0)
    }

    fn carrier_expectation(&self, source: &Param) -> Result<f64> {
        Ok(-Self::series(self.rate(source)?).1)
    }

    fn natural_derivative(&self, source: &Param) -> Result<f64> {
        Ok(1.0 / self.rate(source)?)
    }

    fn sample(&self, source: &Param, rng: &mut dyn RngCore) -> Result<Sample> {
        Ok(Block::Scalar(sampling::poisson(self.rate(source)?, rng)))
    }
}

/// Bernoulli distributions on `{0, 1}`.
///
/// Triple: θ = logit p, t(x) = x, k = 0.
pub struct Bernoulli {
    desc: FamilyDescriptor,
}

impl Bernoulli {
    pub fn new() -> Self {
        Self {
            desc: FamilyDescriptor {
                id: "bernoulli",
                name: "Bernoulli",
                order: 1,
                sample_dim: 1,
                support: Support::Binary,
                param_names: vec!["probability"],
                param_shapes: vec![BlockShape::Scalar],
                caps: Capabilities {
                    has_entropy: true,
                    has_moment: true,
                    has_carrier_expectation: true,
                    has_sampler: true,
                    has_omega_solver: false,
                    is_discrete: true,
                },
            },
        }
    }

    fn prob(&self, p: &Param) -> Result<f64> {
        self.desc.check_layout(p, crate::param::ParamKind::Source)?;
        let v = p.scalar(0)?;
        if v > 0.0 && v < 1.0 {
            Ok(v)
        } else {
            Err(Error::InvalidParameter(format!(
                "probability must lie in (0, 1), got {v}"
            )))
        }
    }
}

impl Default for Bernoulli {
    fn default() -> Self {
        Self::new()
    }
}

impl ExponentialFamily for Bernoulli {
    fn descriptor(&self) -> &FamilyDescriptor {
        &self.desc
    }

    fn validate_source(&self, source: &Param) -> Result<()> {
        self.prob(source).map(|_| ())
    }

    fn to_natural(&self, source: &Param) -> Result<Param> {
        Ok(Param::natural(vec![Block::Scalar(logit(self.prob(source)?))]))
    }

    fn to_source(&self, natural: &Param) -> Result<Param> {
        let p = logistic(natural_scalar(&self.desc, natural)?);
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::NaturalDomainViolation(format!(
                "bernoulli probability saturates at {p}"
            )));
        }
        Ok(Param::source_scalars(&[p]))
    }

    fn sufficient_stat(&self, x: &Sample) -> Result<SuffStat> {
        let x = scalar_sample(&self.desc, x)?;
        Ok(SuffStat(vec![Block::Scalar(x)]))
    }

    fn carrier(&self, x: &Sample) -> Result<f64> {
        scalar_sample(&self.desc, x).map(|_| 0.0)
    }

    fn log_density(&self, source: &Param, x: &Sample) -> Result<f64> {
        let p = self.prob(source)?;
        let x = scalar_sample(&self.desc, x)?;
        Ok(if x == 1.0 { p.ln() } else { (-p).ln_1p() })
    }

    fn default_omega(&self) -> Sample {
        Block::Scalar(0.0)
    }

    fn random_source(&self, rng: &mut dyn RngCore) -> Param {
        Param::source_scalars(&[uniform_in(rng, 0.05, 0.95)])
    }

    fn random_support_point(&self, rng: &mut dyn RngCore) -> Sample {
        Block::Scalar(if uniform(rng) < 0.5 { 0.0 } else { 1.0 })
    }

    fn moment(&self, source: &Param) -> Result<Param> {
        Ok(Param::moment(vec![Block::Scalar(self.prob(source)?)]))
    }

    fn entropy(&self, source: &Param) -> Result<f64> {
        let p = self.prob(source)?;
        Ok(-p * p.ln() - (1.0 - p) * (-p).ln_1p())
    }

    fn carrier_expectation(&self, source: &Param) -> Result<f64> {
        self.prob(source).map(|_| 0.0)
    }

    fn natural_derivative(&self, source: &Param) -> Result<f64> {
        let p = self.prob(source)?;
        Ok(1.0 / (p * (1.0 - p)))
    }

    fn sample(&self, source: &Param, rng: &mut dyn RngCore) -> Result<Sample> {
        let p = self.prob(source)?;
        Ok(Block::Scalar(if uniform(rng) < p { 1.0 } else { 0.0 }))
    }
}
