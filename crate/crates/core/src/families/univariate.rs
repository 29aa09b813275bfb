//! Order-1 continuous families: exponential, zero-centered Laplace,
//! Weibull with a prescribed shape, and Rayleigh.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand_core::RngCore;

use super::{log_uniform, natural_scalar, positive_scalar, scalar_sample, uniform_in};
use crate::error::{Error, Result};
use crate::family::{Capabilities, ExponentialFamily, FamilyDescriptor, Support};
use crate::oracle::sampling::{standard_exponential, uniform};
use crate::param::{Block, BlockShape, Param, Sample, SuffStat};
use crate::special::EULER_GAMMA;

fn scalar_descriptor(
    id: &'static str,
    name: &'static str,
    param: &'static str,
    support: Support,
    caps: Capabilities,
) -> FamilyDescriptor {
    FamilyDescriptor {
        id,
        name,
        order: 1,
        sample_dim: 1,
        support,
        param_names: vec![param],
        param_shapes: vec![BlockShape::Scalar],
        caps,
    }
}

const FULL: Capabilities = Capabilities {
    has_entropy: true,
    has_moment: true,
    has_carrier_expectation: true,
    has_sampler: true,
    has_omega_solver: true,
    is_discrete: false,
};

/// Exponential distributions `λ e^{−λx}` on `[0, ∞)`.
///
/// Triple: θ = λ, t(x) = −x, k = 0.
pub struct Exponential {
    desc: FamilyDescriptor,
}

impl Exponential {
    pub fn new() -> Self {
        Self {
            desc: scalar_descriptor("exponential", "Exponential", "rate", Support::NonNegative, FULL),
        }
    }

    fn rate(&self, p: &Param) -> Result<f64> {
        positive_scalar(&self.desc, p, 0)
    }
}

impl Default for Exponential {
    fn default() -> Self {
        Self::new()
    }
}

impl ExponentialFamily for Exponential {
    fn descriptor(&self) -> &FamilyDescriptor {
        &self.desc
    }

    fn validate_source(&self, source: &Param) -> Result<()> {
        self.rate(source).map(|_| ())
    }

    fn to_natural(&self, source: &Param) -> Result<Param> {
        Ok(Param::natural(vec![Block::Scalar(self.rate(source)?)]))
    }

    fn to_source(&self, natural: &Param) -> Result<Param> {
        let theta = natural_scalar(&self.desc, natural)?;
        if !(theta > 0.0) {
            return Err(Error::NaturalDomainViolation(alloc::format!(
                "exponential needs θ > 0, got {theta}"
            )));
        }
        Ok(Param::source_scalars(&[theta]))
    }

    fn sufficient_stat(&self, x: &Sample) -> Result<SuffStat> {
        let x = scalar_sample(&self.desc, x)?;
        Ok(SuffStat(vec![Block::Scalar(-x)]))
    }

    fn carrier(&self, x: &Sample) -> Result<f64> {
        scalar_sample(&self.desc, x).map(|_| 0.0)
    }

    fn log_density(&self, source: &Param, x: &Sample) -> Result<f64> {
        let l = self.rate(source)?;
        let x = scalar_sample(&self.desc, x)?;
        Ok(l.ln() - l * x)
    }

    fn default_omega(&self) -> Sample {
        Block::Scalar(0.0)
    }

    fn random_source(&self, rng: &mut dyn RngCore) -> Param {
        Param::source_scalars(&[log_uniform(rng, 0.2, 5.0)])
    }

    fn random_support_point(&self, rng: &mut dyn RngCore) -> Sample {
        Block::Scalar(uniform_in(rng, 0.0, 3.0))
    }

    fn moment(&self, source: &Param) -> Result<Param> {
        Ok(Param::moment(vec![Block::Scalar(-1.0 / self.rate(source)?)]))
    }

    fn entropy(&self, source: &Param) -> Result<f64> {
        Ok(1.0 - self.rate(source)?.ln())
    }

    fn carrier_expectation(&self, source: &Param) -> Result<f64> {
        self.rate(source).map(|_| 0.0)
    }

    fn omega_points(&self, source: &Param) -> Result<Vec<Sample>> {
        Ok(vec![Block::Scalar(1.0 / self.rate(source)?)])
    }

    fn natural_derivative(&self, source: &Param) -> Result<f64> {
        self.rate(source).map(|_| 1.0)
    }

    fn sample(&self, source: &Param, rng: &mut dyn RngCore) -> Result<Sample> {
        Ok(Block::Scalar(standard_exponential(rng) / self.rate(source)?))
    }
}

/// Zero-centered Laplace distributions `e^{−|x|/λ} / (2λ)` on ℝ.
///
/// Triple: θ = 1/λ, t(x) = −|x|, k = −log 2.
pub struct Laplace {
    desc: FamilyDescriptor,
}

impl Laplace {
    pub fn new() -> Self {
        Self {
            desc: scalar_descriptor("laplace", "Zero-centered Laplace", "scale", Support::Real, FULL),
        }
    }

    fn scale(&self, p: &Param) -> Result<f64> {
        positive_scalar(&self.desc, p, 0)
    }
}

impl Default for Laplace {
    fn default() -> Self {
        Self::new()
    }
}

impl ExponentialFamily for Laplace {
    fn descriptor(&self) -> &FamilyDescriptor {
        &self.desc
    }

    fn validate_source(&self, source: &Param) -> Result<()> {
        self.scale(source).map(|_| ())
    }

    fn to_natural(&self, source: &Param) -> Result<Param> {
        Ok(Param::natural(vec![Block::Scalar(1.0 / self.scale(source)?)]))
    }

    fn to_source(&self, natural: &Param) -> Result<Param> {
        let theta = natural_scalar(&self.desc, natural)?;
        if !(theta > 0.0) {
            return Err(Error::NaturalDomainViolation(alloc::format!(
                "laplace needs θ > 0, got {theta}"
            )));
        }
        Ok(Param::source_scalars(&[1.0 / theta]))
    }

    fn sufficient_stat(&self, x: &Sample) -> Result<SuffStat> {
        let x = scalar_sample(&self.desc, x)?;
        Ok(SuffStat(vec![Block::Scalar(-x.abs())]))
    }

    fn carrier(&self, x: &Sample) -> Result<f64> {
        scalar_sample(&self.desc, x).map(|_| -core::f64::consts::LN_2)
    }

    fn log_density(&self, source: &Param, x: &Sample) -> Result<f64> {
        let b = self.scale(source)?;
        let x = scalar_sample(&self.desc, x)?;
        Ok(-(2.0 * b).ln() - x.abs() / b)
    }

    fn default_omega(&self) -> Sample {
        Block::Scalar(0.0)
    }

    fn random_source(&self, rng: &mut dyn RngCore) -> Param {
        Param::source_scalars(&[log_uniform(rng, 0.2, 5.0)])
    }

    fn random_support_point(&self, rng: &mut dyn RngCore) -> Sample {
        Block::Scalar(uniform_in(rng, -3.0, 3.0))
    }

    fn moment(&self, source: &Param) -> Result<Param> {
        Ok(Param::moment(vec![Block::Scalar(-self.scale(source)?)]))
    }

    fn entropy(&self, source: &Param) -> Result<f64> {
        Ok(1.0 + (2.0 * self.scale(source)?).ln())
    }

    fn carrier_expectation(&self, source: &Param) -> Result<f64> {
        self.scale(source).map(|_| -core::f64::consts::LN_2)
    }

    fn omega_points(&self, source: &Param) -> Result<Vec<Sample>> {
        // −|ω| = −λ
        Ok(vec![Block::Scalar(self.scale(source)?)])
    }

    fn natural_derivative(&self, source: &Param) -> Result<f64> {
        let b = self.scale(source)?;
        Ok(-1.0 / (b * b))
    }

    fn sample(&self, source: &Param, rng: &mut dyn RngCore) -> Result<Sample> {
        let b = self.scale(source)?;
        let u = uniform(rng) - 0.5;
        Ok(Block::Scalar(-b * u.signum() * (1.0 - 2.0 * u.abs()).ln()))
    }
}

/// Weibull distributions with a prescribed shape `k` and scale λ on `(0, ∞)`.
///
/// Triple: θ = λ^{−k}, t(x) = −x^k, k(x) = log k + (k−1) log x.
pub struct Weibull {
    shape: f64,
    desc: FamilyDescriptor,
}

impl Weibull {
    pub fn new(shape: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!(
                "weibull shape must be positive, got {shape}"
            )));
        }
        Ok(Self {
            shape,
            desc: scalar_descriptor("weibull", "Weibull (fixed shape)", "scale", Support::Positive, FULL),
        })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    fn scale(&self, p: &Param) -> Result<f64> {
        positive_scalar(&self.desc, p, 0)
    }
}

impl ExponentialFamily for Weibull {
    fn descriptor(&self) -> &FamilyDescriptor {
        &self.desc
    }

    fn validate_source(&self, source: &Param) -> Result<()> {
        self.scale(source).map(|_| ())
    }

    fn to_natural(&self, source: &Param) -> Result<Param> {
        Ok(Param::natural(vec![Block::Scalar(
            self.scale(source)?.powf(-self.shape),
        )]))
    }

    fn to_source(&self, natural: &Param) -> Result<Param> {
        let theta = natural_scalar(&self.desc, natural)?;
        if !(theta > 0.0) {
            return Err(Error::NaturalDomainViolation(alloc::format!(
                "weibull needs θ > 0, got {theta}"
            )));
        }
        Ok(Param::source_scalars(&[theta.powf(-1.0 / self.shape)]))
    }

    fn sufficient_stat(&self, x: &Sample) -> Result<SuffStat> {
        let x = scalar_sample(&self.desc, x)?;
        Ok(SuffStat(vec![Block::Scalar(-x.powf(self.shape))]))
    }

    fn carrier(&self, x: &Sample) -> Result<f64> {
        let x = scalar_sample(&self.desc, x)?;
        Ok(self.shape.ln() + (self.shape - 1.0) * x.ln())
    }

    fn log_density(&self, source: &Param, x: &Sample) -> Result<f64> {
        let l = self.scale(source)?;
        let x = scalar_sample(&self.desc, x)?;
        let k = self.shape;
        Ok(k.ln() - l.ln() + (k - 1.0) * (x / l).ln() - (x / l).powf(k))
    }

    fn default_omega(&self) -> Sample {
        Block::Scalar(1.0)
    }

    fn random_source(&self, rng: &mut dyn RngCore) -> Param {
        Param::source_scalars(&[log_uniform(rng, 0.3, 3.0)])
    }

    fn random_support_point(&self, rng: &mut dyn RngCore) -> Sample {
        Block::Scalar(log_uniform(rng, 0.1, 3.0))
    }

    fn moment(&self, source: &Param) -> Result<Param> {
        Ok(Param::moment(vec![Block::Scalar(
            -self.scale(source)?.powf(self.shape),
        )]))
    }

    fn entropy(&self, source: &Param) -> Result<f64> {
        let l = self.scale(source)?;
        let k = self.shape;
        Ok(EULER_GAMMA * (1.0 - 1.0 / k) + (l / k).ln() + 1.0)
    }

    fn carrier_expectation(&self, source: &Param) -> Result<f64> {
        let l = self.scale(source)?;
        let k = self.shape;
        // E[log x] = log λ − γ/k
        Ok(k.ln() + (k - 1.0) * (l.ln() - EULER_GAMMA / k))
    }

    fn omega_points(&self, source: &Param) -> Result<Vec<Sample>> {
        // −ω^k = −λ^k
        Ok(vec![Block::Scalar(self.scale(source)?)])
    }

    fn natural_derivative(&self, source: &Param) -> Result<f64> {
        let l = self.scale(source)?;
        Ok(-self.shape * l.powf(-self.shape - 1.0))
    }

    fn sample(&self, source: &Param, rng: &mut dyn RngCore) -> Result<Sample> {
        let l = self.scale(source)?;
        Ok(Block::Scalar(l * standard_exponential(rng).powf(1.0 / self.shape)))
    }
}

/// Rayleigh distributions `(x/σ²) e^{−x²/(2σ²)}` on `(0, ∞)`.
///
/// Triple: θ = −1/(2σ²), t(x) = x², k(x) = log x.
pub struct Rayleigh {
    desc: FamilyDescriptor,
}

impl Rayleigh {
    pub fn new() -> Self {
        Self {
            desc: scalar_descriptor("rayleigh", "Rayleigh", "scale", Support::Positive, FULL),
        }
    }

    fn scale(&self, p: &Param) -> Result<f64> {
        positive_scalar(&self.desc, p, 0)
    }
}

impl Default for Rayleigh {
    fn default() -> Self {
        Self::new()
    }
}

impl ExponentialFamily for Rayleigh {
    fn descriptor(&self) -> &FamilyDescriptor {
        &self.desc
    }

    fn validate_source(&self, source: &Param) -> Result<()> {
        self.scale(source).map(|_| ())
    }

    fn to_natural(&self, source: &Param) -> Result<Param> {
        let s = self.scale(source)?;
        Ok(Param::natural(vec![Block::Scalar(-0.5 / (s * s))]))
    }

    fn to_source(&self, natural: &Param) -> Result<Param> {
        let theta = natural_scalar(&self.desc, natural)?;
        if !(theta < 0.0) {
            return Err(Error::NaturalDomainViolation(alloc::format!(
                "rayleigh needs θ < 0, got {theta}"
            )));
        }
        Ok(Param::source_scalars(&[(-0.5 / theta).sqrt()]))
    }

    fn sufficient_stat(&self, x: &Sample) -> Result<SuffStat> {
        let x = scalar_sample(&self.desc, x)?;
        Ok(SuffStat(vec![Block::Scalar(x * x)]))
    }

    fn carrier(&self, x: &Sample) -> Result<f64> {
        scalar_sample(&self.desc, x).map(|x| x.ln())
    }

    fn log_density(&self, source: &Param, x: &Sample) -> Result<f64> {
        let s = self.scale(source)?;
        let x = scalar_sample(&self.desc, x)?;
        Ok(x.ln() - 2.0 * s.ln() - x * x / (2.0 * s * s))
    }

    fn default_omega(&self) -> Sample {
        Block::Scalar(1.0)
    }

    fn random_source(&self, rng: &mut dyn RngCore) -> Param {
        Param::source_scalars(&[log_uniform(rng, 0.5, 2.0)])
    }

    fn random_support_point(&self, rng: &mut dyn RngCore) -> Sample {
        Block::Scalar(log_uniform(rng, 0.05, 5.0))
    }

    fn moment(&self, source: &Param) -> Result<Param> {
        let s = self.scale(source)?;
        Ok(Param::moment(vec![Block::Scalar(2.0 * s * s)]))
    }

    fn entropy(&self, source: &Param) -> Result<f64> {
        let s = self.scale(source)?;
        Ok(1.0 + (s / core::f64::consts::SQRT_2).ln() + 0.5 * EULER_GAMMA)
    }

    fn carrier_expectation(&self, source: &Param) -> Result<f64> {
        // x² / (2σ²) is unit exponential
        let s = self.scale(source)?;
        Ok(0.5 * ((2.0 * s * s).ln() - EULER_GAMMA))
    }

    fn omega_points(&self, source: &Param) -> Result<Vec<Sample>> {
        Ok(vec![Block::Scalar(self.scale(source)? * core::f64::consts::SQRT_2)])
    }

    fn natural_derivative(&self, source: &Param) -> Result<f64> {
        let s = self.scale(source)?;
        Ok(1.0 / (s * s * s))
    }

    fn sample(&self, source: &Param, rng: &mut dyn RngCore) -> Result<Sample> {
        let s = self.scale(source)?;
        Ok(Block::Scalar(s * (2.0 * standard_exponential(rng)).sqrt()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_triple() {
        let f = Exponential::new();
        let l = Param::source_scalars(&[2.0]);
        let x = Block::Scalar(3.0);
        assert_eq!(f.log_unnormalized_density(&l, &x).unwrap(), -6.0);
        assert_eq!(
            f.log_density(&Param::source_scalars(&[1.0]), &Block::Scalar(0.0))
                .unwrap(),
            0.0
        );
        assert_eq!(
            f.to_natural(&Param::source_scalars(&[1.0])).unwrap().scalar(0).unwrap(),
            1.0
        );
        assert_relative_eq!(f.entropy(&Param::source_scalars(&[1.0])).unwrap(), 1.0);
    }

    #[test]
    fn exponential_rejects_bad_input() {
        let f = Exponential::new();
        assert!(matches!(
            f.to_natural(&Param::source_scalars(&[-1.0])),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            f.to_natural(&Param::source_scalars(&[f64::NAN])),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            f.log_density(&Param::source_scalars(&[1.0]), &Block::Scalar(-0.5)),
            Err(Error::OutOfSupport(_))
        ));
        assert!(matches!(
            f.to_source(&Param::natural(vec![Block::Scalar(-0.1)])),
            Err(Error::NaturalDomainViolation(_))
        ));
    }

    #[test]
    fn weibull_with_unit_shape_is_exponential() {
        let w = Weibull::new(1.0).unwrap();
        let e = Exponential::new();
        for &x in &[0.1, 1.0, 2.5] {
            let lw = w
                .log_density(&Param::source_scalars(&[2.0]), &Block::Scalar(x))
                .unwrap();
            let le = e
                .log_density(&Param::source_scalars(&[0.5]), &Block::Scalar(x))
                .unwrap();
            assert_relative_eq!(lw, le, epsilon = 1e-14);
        }
        assert!(Weibull::new(0.0).is_err());
    }

    #[test]
    fn rayleigh_is_weibull_two_with_scaled_parameter() {
        // λ = √2 σ
        let r = Rayleigh::new();
        let w = Weibull::new(2.0).unwrap();
        let s = 0.8;
        for &x in &[0.2, 1.0, 3.0] {
            let lr = r.log_density(&Param::source_scalars(&[s]), &Block::Scalar(x)).unwrap();
            let lw = w
                .log_density(
                    &Param::source_scalars(&[core::f64::consts::SQRT_2 * s]),
                    &Block::Scalar(x),
                )
                .unwrap();
            assert_relative_eq!(lr, lw, epsilon = 1e-13);
        }
    }

    #[test]
    fn laplace_sampler_is_symmetric() {
        let f = Laplace::new();
        let p = Param::source_scalars(&[1.5]);
        let streams = crate::oracle::sampling::Substreams::new(5);
        let n = 100_000;
        let xs: Vec<f64> = (0..n)
            .map(|i| f.sample(&p, &mut streams.stream(i)).unwrap().as_scalar().unwrap())
            .collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let mean_abs = xs.iter().map(|x| x.abs()).sum::<f64>() / n as f64;
        assert!(mean.abs() < 5.0 * (2.0 * 1.5 * 1.5 / n as f64).sqrt());
        assert!((mean_abs - 1.5).abs() < 5.0 * 1.5 / (n as f64).sqrt());
    }
}
