//! Normal families: univariate, fixed-covariance, zero-centered and full
//! multivariate.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand_core::RngCore;

use super::{
    log_uniform, natural_layout, random_spd, random_vector, scalar_sample, spd_block, uniform_in, vector_sample,
};
use crate::error::{Error, Result};
use crate::family::{Capabilities, ExponentialFamily, FamilyDescriptor, Support};
use crate::linalg::{Cholesky, SymMatrix};
use crate::oracle::sampling::{multivariate_normal, standard_normal};
use crate::param::{Block, BlockShape, Param, ParamKind, Sample, SuffStat};
use crate::special::LN_2PI;

const FULL: Capabilities = Capabilities {
    has_entropy: true,
    has_moment: true,
    has_carrier_expectation: true,
    has_sampler: true,
    has_omega_solver: true,
    is_discrete: false,
};

/// `½ log |2πe Σ|` from `log |Σ|`.
fn gaussian_entropy(d: usize, log_det: f64) -> f64 {
    0.5 * (d as f64 * (LN_2PI + 1.0) + log_det)
}

/// Univariate normal distributions, source `(μ, σ²)`.
///
/// Triple: θ = (μ/σ², −1/(2σ²)), t(x) = (x, x²), k = 0.
pub struct Gaussian1d {
    desc: FamilyDescriptor,
}

impl Gaussian1d {
    pub fn new() -> Self {
        Self {
            desc: FamilyDescriptor {
                id: "gaussian1d",
                name: "Univariate normal",
                order: 2,
                sample_dim: 1,
                support: Support::Real,
                param_names: vec!["mean", "variance"],
                param_shapes: vec![BlockShape::Scalar, BlockShape::Scalar],
                caps: FULL,
            },
        }
    }

    fn params(&self, p: &Param) -> Result<(f64, f64)> {
        self.desc.check_layout(p, ParamKind::Source)?;
        let (m, v) = (p.scalar(0)?, p.scalar(1)?);
        if !m.is_finite() {
            return Err(Error::InvalidParameter(format!("mean must be finite, got {m}")));
        }
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "variance must be positive and finite, got {v}"
            )));
        }
        Ok((m, v))
    }
}

impl Default for Gaussian1d {
    fn default() -> Self {
        Self::new()
    }
}

impl ExponentialFamily for Gaussian1d {
    fn descriptor(&self) -> &FamilyDescriptor {
        &self.desc
    }

    fn validate_source(&self, source: &Param) -> Result<()> {
        self.params(source).map(|_| ())
    }

    fn to_natural(&self, source: &Param) -> Result<Param> {
        let (m, v) = self.params(source)?;
        Ok(Param::natural(vec![Block::Scalar(m / v), Block::Scalar(-0.5 / v)]))
    }

    fn to_source(&self, natural: &Param) -> Result<Param> {
        natural_layout(&self.desc, natural, &[BlockShape::Scalar, BlockShape::Scalar])?;
        let (t1, t2) = (natural.scalar(0)?, natural.scalar(1)?);
        if !(t2 < 0.0) {
            return Err(Error::NaturalDomainViolation(format!(
                "gaussian1d needs θ₂ < 0, got {t2}"
            )));
        }
        let v = -0.5 / t2;
        Ok(Param::source_scalars(&[t1 * v, v]))
    }

    fn sufficient_stat(&self, x: &Sample) -> Result<SuffStat> {
        let x = scalar_sample(&self.desc, x)?;
        Ok(SuffStat(vec![Block::Scalar(x), Block::Scalar(x * x)]))
    }

    fn carrier(&self, x: &Sample) -> Result<f64> {
        scalar_sample(&self.desc, x).map(|_| 0.0)
    }

    fn log_density(&self, source: &Param, x: &Sample) -> Result<f64> {
        let (m, v) = self.params(source)?;
        let x = scalar_sample(&self.desc, x)?;
        Ok(-0.5 * (LN_2PI + v.ln()) - (x - m) * (x - m) / (2.0 * v))
    }

    fn default_omega(&self) -> Sample {
        Block::Scalar(0.0)
    }

    fn random_source(&self, rng: &mut dyn RngCore) -> Param {
        Param::source_scalars(&[uniform_in(rng, -2.0, 2.0), log_uniform(rng, 0.2, 4.0)])
    }

    fn random_support_point(&self, rng: &mut dyn RngCore) -> Sample {
        Block::Scalar(uniform_in(rng, -3.0, 3.0))
    }

    fn moment(&self, source: &Param) -> Result<Param> {
        let (m, v) = self.params(source)?;
        Ok(Param::moment(vec![Block::Scalar(m), Block::Scalar(m * m + v)]))
    }

    fn entropy(&self, source: &Param) -> Result<f64> {
        let (_, v) = self.params(source)?;
        Ok(gaussian_entropy(1, v.ln()))
    }

    fn carrier_expectation(&self, source: &Param) -> Result<f64> {
        self.params(source).map(|_| 0.0)
    }

    fn omega_points(&self, source: &Param) -> Result<Vec<Sample>> {
        let (m, v) = self.params(source)?;
        let s = v.sqrt();
        Ok(vec![Block::Scalar(m - s), Block::Scalar(m + s)])
    }

    fn sample(&self, source: &Param, rng: &mut dyn RngCore) -> Result<Sample> {
        let (m, v) = self.params(source)?;
        Ok(Block::Scalar(m + v.sqrt() * standard_normal(rng)))
    }
}

fn mean_block(desc: &FamilyDescriptor, p: &Param, i: usize) -> Result<Vec<f64>> {
    let m = p.vector(i)?;
    if m.iter().all(|v| v.is_finite()) {
        Ok(m.to_vec())
    } else {
        Err(Error::InvalidParameter(format!("{}: mean must be finite", desc.id)))
    }
}

/// Multivariate normal with a covariance fixed at construction, source `μ`.
///
/// Triple: θ = Σ⁻¹μ, t(x) = x, k(x) = −½xᵀΣ⁻¹x − (d/2) log 2π − ½ log|Σ|.
pub struct FixedCovGaussian {
    cov: SymMatrix,
    chol: Cholesky,
    desc: FamilyDescriptor,
}

impl FixedCovGaussian {
    pub fn new(cov: SymMatrix) -> Result<Self> {
        let chol = cov
            .cholesky()
            .map_err(|_| Error::InvalidParameter("covariance must be symmetric positive definite".into()))?;
        let d = cov.dim();
        Ok(Self {
            cov,
            chol,
            desc: FamilyDescriptor {
                id: "gaussian_fixed_cov",
                name: "Normal with fixed covariance",
                order: d,
                sample_dim: d,
                support: Support::Euclidean(d),
                param_names: vec!["mean"],
                param_shapes: vec![BlockShape::Vector(d)],
                caps: FULL,
            },
        })
    }

    pub fn covariance(&self) -> &SymMatrix {
        &self.cov
    }

    fn mean(&self, p: &Param) -> Result<Vec<f64>> {
        self.desc.check_layout(p, ParamKind::Source)?;
        mean_block(&self.desc, p, 0)
    }

    fn dim(&self) -> usize {
        self.cov.dim()
    }
}

impl ExponentialFamily for FixedCovGaussian {
    fn descriptor(&self) -> &FamilyDescriptor {
        &self.desc
    }

    fn validate_source(&self, source: &Param) -> Result<()> {
        self.mean(source).map(|_| ())
    }

    fn to_natural(&self, source: &Param) -> Result<Param> {
        Ok(Param::natural(vec![Block::Vector(
            self.chol.solve(&self.mean(source)?),
        )]))
    }

    fn to_source(&self, natural: &Param) -> Result<Param> {
        natural_layout(&self.desc, natural, &[BlockShape::Vector(self.dim())])?;
        Ok(Param::source(vec![Block::Vector(self.cov.mul_vec(natural.vector(0)?))]))
    }

    fn sufficient_stat(&self, x: &Sample) -> Result<SuffStat> {
        let x = vector_sample(&self.desc, x)?;
        Ok(SuffStat(vec![Block::Vector(x.to_vec())]))
    }

    fn carrier(&self, x: &Sample) -> Result<f64> {
        let x = vector_sample(&self.desc, x)?;
        let d = self.dim() as f64;
        Ok(-0.5 * self.chol.inv_quad_form(x) - 0.5 * d * LN_2PI - 0.5 * self.chol.log_det())
    }

    fn log_density(&self, source: &Param, x: &Sample) -> Result<f64> {
        let m = self.mean(source)?;
        let x = vector_sample(&self.desc, x)?;
        let diff: Vec<f64> = x.iter().zip(&m).map(|(a, b)| a - b).collect();
        let d = self.dim() as f64;
        Ok(-0.5 * (d * LN_2PI + self.chol.log_det() + self.chol.inv_quad_form(&diff)))
    }

    fn default_omega(&self) -> Sample {
        Block::Vector(vec![0.0; self.dim()])
    }

    fn random_source(&self, rng: &mut dyn RngCore) -> Param {
        Param::source(vec![Block::Vector(random_vector(rng, self.dim(), 2.0))])
    }

    fn random_support_point(&self, rng: &mut dyn RngCore) -> Sample {
        Block::Vector(random_vector(rng, self.dim(), 3.0))
    }

    fn moment(&self, source: &Param) -> Result<Param> {
        Ok(Param::moment(vec![Block::Vector(self.mean(source)?)]))
    }

    fn entropy(&self, source: &Param) -> Result<f64> {
        self.mean(source)?;
        Ok(gaussian_entropy(self.dim(), self.chol.log_det()))
    }

    fn carrier_expectation(&self, source: &Param) -> Result<f64> {
        // E[xᵀΣ⁻¹x] = d + μᵀΣ⁻¹μ
        let m = self.mean(source)?;
        let d = self.dim() as f64;
        Ok(-0.5 * (d + self.chol.inv_quad_form(&m)) - 0.5 * d * LN_2PI - 0.5 * self.chol.log_det())
    }

    fn omega_points(&self, source: &Param) -> Result<Vec<Sample>> {
        Ok(vec![Block::Vector(self.mean(source)?)])
    }

    fn sample(&self, source: &Param, rng: &mut dyn RngCore) -> Result<Sample> {
        let m = self.mean(source)?;
        Ok(Block::Vector(multivariate_normal(&m, &self.chol, rng)))
    }
}

/// Zero-centered multivariate normal, source `Σ`.
///
/// Triple: θ = −½Σ⁻¹, t(x) = xxᵀ, k = 0 (the `2π` factor stays in the
/// log-normalizer).
pub struct ZeroMeanMvn {
    desc: FamilyDescriptor,
}

impl ZeroMeanMvn {
    pub fn new(dim: usize) -> Self {
        Self {
            desc: FamilyDescriptor {
                id: "mvn_zero_mean",
                name: "Zero-centered multivariate normal",
                order: dim * (dim + 1) / 2,
                sample_dim: dim,
                support: Support::Euclidean(dim),
                param_names: vec!["covariance"],
                param_shapes: vec![BlockShape::Matrix(dim)],
                caps: FULL,
            },
        }
    }

    fn dim(&self) -> usize {
        self.desc.sample_dim
    }

    fn cov(&self, p: &Param) -> Result<SymMatrix> {
        self.desc.check_layout(p, ParamKind::Source)?;
        spd_block(&self.desc, p, 0)
    }
}

impl ExponentialFamily for ZeroMeanMvn {
    fn descriptor(&self) -> &FamilyDescriptor {
        &self.desc
    }

    fn validate_source(&self, source: &Param) -> Result<()> {
        self.cov(source).map(|_| ())
    }

    fn to_natural(&self, source: &Param) -> Result<Param> {
        let prec = self.cov(source)?.inverse_spd()?;
        Ok(Param::natural(vec![Block::Matrix(prec.scale(-0.5))]))
    }

    fn to_source(&self, natural: &Param) -> Result<Param> {
        natural_layout(&self.desc, natural, &[BlockShape::Matrix(self.dim())])?;
        let prec = natural.matrix(0)?.scale(-2.0);
        let cov = prec
            .inverse_spd()
            .map_err(|_| Error::NaturalDomainViolation("mvn_zero_mean needs θ negative definite".into()))?;
        Ok(Param::source(vec![Block::Matrix(cov)]))
    }

    fn sufficient_stat(&self, x: &Sample) -> Result<SuffStat> {
        let x = vector_sample(&self.desc, x)?;
        Ok(SuffStat(vec![Block::Matrix(SymMatrix::outer(x))]))
    }

    fn carrier(&self, x: &Sample) -> Result<f64> {
        vector_sample(&self.desc, x).map(|_| 0.0)
    }

    fn log_density(&self, source: &Param, x: &Sample) -> Result<f64> {
        let chol = self.cov(source)?.cholesky()?;
        let x = vector_sample(&self.desc, x)?;
        let d = self.dim() as f64;
        Ok(-0.5 * (d * LN_2PI + chol.log_det() + chol.inv_quad_form(x)))
    }

    fn default_omega(&self) -> Sample {
        Block::Vector(vec![0.0; self.dim()])
    }

    fn random_source(&self, rng: &mut dyn RngCore) -> Param {
        Param::source(vec![Block::Matrix(random_spd(rng, self.dim(), 1.0))])
    }

    fn random_support_point(&self, rng: &mut dyn RngCore) -> Sample {
        Block::Vector(random_vector(rng, self.dim(), 3.0))
    }

    fn moment(&self, source: &Param) -> Result<Param> {
        Ok(Param::moment(vec![Block::Matrix(self.cov(source)?)]))
    }

    fn entropy(&self, source: &Param) -> Result<f64> {
        Ok(gaussian_entropy(self.dim(), self.cov(source)?.log_det_spd()?))
    }

    fn carrier_expectation(&self, source: &Param) -> Result<f64> {
        self.cov(source).map(|_| 0.0)
    }

    fn omega_points(&self, source: &Param) -> Result<Vec<Sample>> {
        // ωᵢ = √(d λᵢ) vᵢ, so (1/d) Σ ωᵢωᵢᵀ = Σ λᵢ vᵢvᵢᵀ = Σ
        let cov = self.cov(source)?;
        let d = self.dim() as f64;
        let (values, vectors) = cov.eigen();
        Ok(values
            .iter()
            .zip(vectors)
            .map(|(&l, v)| {
                let s = (d * l).sqrt();
                Block::Vector(v.iter().map(|c| s * c).collect())
            })
            .collect())
    }

    fn sample(&self, source: &Param, rng: &mut dyn RngCore) -> Result<Sample> {
        let chol = self.cov(source)?.cholesky()?;
        Ok(Block::Vector(multivariate_normal(&vec![0.0; self.dim()], &chol, rng)))
    }
}

/// Multivariate normal, source `(μ, Σ)`.
///
/// Triple: θ = (Σ⁻¹μ, ½Σ⁻¹), t(x) = (x, −xxᵀ), k = 0.
pub struct Mvn {
    desc: FamilyDescriptor,
}

impl Mvn {
    pub fn new(dim: usize) -> Self {
        Self {
            desc: FamilyDescriptor {
                id: "mvn",
                name: "Multivariate normal",
                order: dim + dim * (dim + 1) / 2,
                sample_dim: dim,
                support: Support::Euclidean(dim),
                param_names: vec!["mean", "covariance"],
                param_shapes: vec![BlockShape::Vector(dim), BlockShape::Matrix(dim)],
                caps: FULL,
            },
        }
    }

    fn dim(&self) -> usize {
        self.desc.sample_dim
    }

    fn params(&self, p: &Param) -> Result<(Vec<f64>, SymMatrix)> {
        self.desc.check_layout(p, ParamKind::Source)?;
        Ok((mean_block(&self.desc, p, 0)?, spd_block(&self.desc, p, 1)?))
    }
}

impl ExponentialFamily for Mvn {
    fn descriptor(&self) -> &FamilyDescriptor {
        &self.desc
    }

    fn validate_source(&self, source: &Param) -> Result<()> {
        self.params(source).map(|_| ())
    }

    fn to_natural(&self, source: &Param) -> Result<Param> {
        let (m, cov) = self.params(source)?;
        let chol = cov.cholesky()?;
        Ok(Param::natural(vec![
            Block::Vector(chol.solve(&m)),
            Block::Matrix(chol.inverse().scale(0.5)),
        ]))
    }

    fn to_source(&self, natural: &Param) -> Result<Param> {
        let d = self.dim();
        natural_layout(&self.desc, natural, &[BlockShape::Vector(d), BlockShape::Matrix(d)])?;
        let cov = natural
            .matrix(1)?
            .scale(2.0)
            .inverse_spd()
            .map_err(|_| Error::NaturalDomainViolation("mvn needs the matrix block positive definite".into()))?;
        let m = cov.mul_vec(natural.vector(0)?);
        Ok(Param::source(vec![Block::Vector(m), Block::Matrix(cov)]))
    }

    fn sufficient_stat(&self, x: &Sample) -> Result<SuffStat> {
        let x = vector_sample(&self.desc, x)?;
        Ok(SuffStat(vec![
            Block::Vector(x.to_vec()),
            Block::Matrix(SymMatrix::outer(x).scale(-1.0)),
        ]))
    }

    fn carrier(&self, x: &Sample) -> Result<f64> {
        vector_sample(&self.desc, x).map(|_| 0.0)
    }

    fn log_density(&self, source: &Param, x: &Sample) -> Result<f64> {
        let (m, cov) = self.params(source)?;
        let chol = cov.cholesky()?;
        let x = vector_sample(&self.desc, x)?;
        let diff: Vec<f64> = x.iter().zip(&m).map(|(a, b)| a - b).collect();
        let d = self.dim() as f64;
        Ok(-0.5 * (d * LN_2PI + chol.log_det() + chol.inv_quad_form(&diff)))
    }

    fn default_omega(&self) -> Sample {
        Block::Vector(vec![0.0; self.dim()])
    }

    fn random_source(&self, rng: &mut dyn RngCore) -> Param {
        let d = self.dim();
        Param::source(vec![
            Block::Vector(random_vector(rng, d, 2.0)),
            Block::Matrix(random_spd(rng, d, 1.0)),
        ])
    }

    fn random_support_point(&self, rng: &mut dyn RngCore) -> Sample {
        Block::Vector(random_vector(rng, self.dim(), 3.0))
    }

    fn moment(&self, source: &Param) -> Result<Param> {
        let (m, cov) = self.params(source)?;
        let second = SymMatrix::outer(&m).add(&cov);
        Ok(Param::moment(vec![Block::Vector(m), Block::Matrix(second.scale(-1.0))]))
    }

    fn entropy(&self, source: &Param) -> Result<f64> {
        let (_, cov) = self.params(source)?;
        Ok(gaussian_entropy(self.dim(), cov.log_det_spd()?))
    }

    fn carrier_expectation(&self, source: &Param) -> Result<f64> {
        self.params(source).map(|_| 0.0)
    }

    /// The `2d` sigma points `μ ± cᵢ`, with `cᵢ` the columns of `√(dΣ)`.
    fn omega_points(&self, source: &Param) -> Result<Vec<Sample>> {
        let (m, cov) = self.params(source)?;
        let d = self.dim();
        let root = cov.scale(d as f64).sqrt_spd()?;
        let mut points = Vec::with_capacity(2 * d);
        for j in 0..d {
            let c = root.column(j);
            points.push(Block::Vector(m.iter().zip(&c).map(|(a, b)| a + b).collect()));
            points.push(Block::Vector(m.iter().zip(&c).map(|(a, b)| a - b).collect()));
        }
        Ok(points)
    }

    fn sample(&self, source: &Param, rng: &mut dyn RngCore) -> Result<Sample> {
        let (m, cov) = self.params(source)?;
        Ok(Block::Vector(multivariate_normal(&m, &cov.cholesky()?, rng)))
    }
}
