//! The family catalog.
//!
//! Each family fixes one canonical factorization `(θ(λ), t(x), k(x))` and
//! implements the published density directly. Source parameter layouts:
//!
//! | id | source blocks |
//! |----|---------------|
//! | `exponential` | rate |
//! | `poisson` | rate |
//! | `laplace` | scale (zero-centered) |
//! | `weibull` | scale, with the shape fixed per family |
//! | `rayleigh` | scale |
//! | `bernoulli` | success probability |
//! | `gaussian1d` | mean, variance |
//! | `gaussian_fixed_cov` | mean vector, with the covariance fixed per family |
//! | `mvn_zero_mean` | covariance |
//! | `mvn` | mean vector, covariance |
//! | `gamma` | shape, rate |
//! | `beta` | α, β |
//! | `dirichlet` | concentration vector |
//! | `inverse_gaussian` | mean, shape |
//! | `wishart` | degrees of freedom, scale matrix |

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::family::{ExponentialFamily, FamilyDescriptor};
use crate::linalg::SymMatrix;
use crate::oracle::sampling::uniform;
use crate::param::{BlockShape, Param, ParamKind, Sample};

mod discrete;
mod gamma;
mod gaussian;
mod inverse_gaussian;
mod mixture;
mod univariate;
mod wishart;

pub use discrete::{Bernoulli, Poisson};
pub use gamma::{Beta, Dirichlet, Gamma};
pub use gaussian::{FixedCovGaussian, Gaussian1d, Mvn, ZeroMeanMvn};
pub use inverse_gaussian::InverseGaussian;
pub use mixture::{Component, MixtureDensity, MixtureFamily};
pub use univariate::{Exponential, Laplace, Rayleigh, Weibull};
pub use wishart::Wishart;

/// Construction-time constants for the families that need them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FamilyOptions {
    /// Weibull shape `k` (default 2).
    pub shape: Option<f64>,
    /// Dimension for the vector and matrix families (default 2).
    pub dim: Option<usize>,
    /// Fixed covariance of `gaussian_fixed_cov` (default identity).
    pub covariance: Option<SymMatrix>,
}

pub struct CatalogEntry {
    pub id: &'static str,
    pub summary: &'static str,
    /// Instance built with default options.
    pub family: Box<dyn ExponentialFamily>,
}

const IDS: [(&str, &str); 15] = [
    ("exponential", "exponential distributions, rate λ"),
    ("poisson", "Poisson distributions, rate λ"),
    ("laplace", "zero-centered Laplace distributions, scale λ"),
    (
        "weibull",
        "Weibull distributions with fixed shape k (option `shape`), scale λ",
    ),
    ("rayleigh", "Rayleigh distributions, scale σ"),
    ("bernoulli", "Bernoulli distributions, success probability p"),
    ("gaussian1d", "univariate normal distributions, mean and variance"),
    (
        "gaussian_fixed_cov",
        "multivariate normal with fixed covariance (option `covariance`), mean",
    ),
    (
        "mvn_zero_mean",
        "zero-centered multivariate normal (option `dim`), covariance",
    ),
    ("mvn", "multivariate normal (option `dim`), mean and covariance"),
    ("gamma", "gamma distributions, shape α and rate β"),
    ("beta", "beta distributions, shapes α and β"),
    (
        "dirichlet",
        "Dirichlet distributions (option `dim`), concentration vector",
    ),
    ("inverse_gaussian", "inverse Gaussian distributions, mean μ and shape λ"),
    (
        "wishart",
        "central Wishart distributions (option `dim`), degrees of freedom n and scale S",
    ),
];

/// Every registered family, built with default options.
pub fn catalog() -> Vec<CatalogEntry> {
    IDS.iter()
        .map(|&(id, summary)| CatalogEntry {
            id,
            summary,
            family: lookup(id, &FamilyOptions::default()).expect("default options are valid"),
        })
        .collect()
}

/// Identifiers of all registered families.
pub fn family_ids() -> Vec<&'static str> {
    IDS.iter().map(|(id, _)| *id).collect()
}

/// Build the family registered under `id`.
pub fn lookup(id: &str, options: &FamilyOptions) -> Result<Box<dyn ExponentialFamily>> {
    let dim = options.dim.unwrap_or(2);
    if dim == 0 {
        return Err(Error::InvalidParameter("dim must be at least 1".into()));
    }
    let family: Box<dyn ExponentialFamily> = match id {
        "exponential" => Box::new(Exponential::new()),
        "poisson" => Box::new(Poisson::new()),
        "laplace" => Box::new(Laplace::new()),
        "weibull" => Box::new(Weibull::new(options.shape.unwrap_or(2.0))?),
        "rayleigh" => Box::new(Rayleigh::new()),
        "bernoulli" => Box::new(Bernoulli::new()),
        "gaussian1d" => Box::new(Gaussian1d::new()),
        "gaussian_fixed_cov" => {
            let cov = match &options.covariance {
                Some(c) => c.clone(),
                None => SymMatrix::identity(dim),
            };
            Box::new(FixedCovGaussian::new(cov)?)
        }
        "mvn_zero_mean" => Box::new(ZeroMeanMvn::new(dim)),
        "mvn" => Box::new(Mvn::new(dim)),
        "gamma" => Box::new(Gamma::new()),
        "beta" => Box::new(Beta::new()),
        "dirichlet" => Box::new(Dirichlet::new(options.dim.unwrap_or(3))?),
        "inverse_gaussian" => Box::new(InverseGaussian::new()),
        "wishart" => Box::new(Wishart::new(dim)),
        _ => return Err(Error::InvalidParameter(format!("unknown family `{id}`"))),
    };
    Ok(family)
}

// ---- shared helpers ------------------------------------------------------

fn block_name(desc: &FamilyDescriptor, i: usize) -> &'static str {
    desc.param_names.get(i).copied().unwrap_or("parameter")
}

/// Positive finite scalar block `i` of a source parameter, after a layout check.
pub(crate) fn positive_scalar(desc: &FamilyDescriptor, p: &Param, i: usize) -> Result<f64> {
    desc.check_layout(p, ParamKind::Source)?;
    let v = p.scalar(i)?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!(
            "{} must be positive and finite, got {v}",
            block_name(desc, i)
        )))
    }
}

/// The single scalar of an order-1 natural parameter.
pub(crate) fn natural_scalar(desc: &FamilyDescriptor, p: &Param) -> Result<f64> {
    p.expect_kind(ParamKind::Natural)?;
    p.expect_shapes(&[BlockShape::Scalar], &["theta"])?;
    let v = p.scalar(0)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NaturalDomainViolation(format!("{}: θ must be finite", desc.id)))
    }
}

/// Check a natural parameter's kind and layout and that every entry is finite.
pub(crate) fn natural_layout(desc: &FamilyDescriptor, p: &Param, shapes: &[BlockShape]) -> Result<()> {
    p.expect_kind(ParamKind::Natural)?;
    p.expect_shapes(shapes, &[])?;
    if p.components().iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NaturalDomainViolation(format!("{}: θ must be finite", desc.id)))
    }
}

pub(crate) fn scalar_sample(desc: &FamilyDescriptor, x: &Sample) -> Result<f64> {
    desc.support.check(x)?;
    Ok(x.as_scalar().expect("scalar support"))
}

pub(crate) fn vector_sample<'a>(desc: &FamilyDescriptor, x: &'a Sample) -> Result<&'a [f64]> {
    desc.support.check(x)?;
    Ok(x.as_vector().expect("vector support"))
}

pub(crate) fn uniform_in(rng: &mut dyn RngCore, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform(rng)
}

pub(crate) fn log_uniform(rng: &mut dyn RngCore, lo: f64, hi: f64) -> f64 {
    uniform_in(rng, lo.ln(), hi.ln()).exp()
}

/// A well-conditioned random SPD matrix `L Lᵀ` with `diag(L) ∈ [0.5, 1.5]`.
pub(crate) fn random_spd(rng: &mut dyn RngCore, d: usize, scale: f64) -> SymMatrix {
    let mut l = alloc::vec![0.0; d * d];
    for i in 0..d {
        l[i * d + i] = uniform_in(rng, 0.5, 1.5);
        for j in 0..i {
            l[i * d + j] = uniform_in(rng, -0.4, 0.4);
        }
    }
    let mut m = alloc::vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            m[i * d + j] = scale * (0..d).map(|k| l[i * d + k] * l[j * d + k]).sum::<f64>();
        }
    }
    SymMatrix::from_rows(d, m).expect("L Lᵀ is symmetric")
}

pub(crate) fn random_vector(rng: &mut dyn RngCore, d: usize, half_width: f64) -> Vec<f64> {
    (0..d).map(|_| uniform_in(rng, -half_width, half_width)).collect()
}

/// Validate an SPD matrix block, mapping failure to an error naming the block.
pub(crate) fn spd_block(desc: &FamilyDescriptor, p: &Param, i: usize) -> Result<SymMatrix> {
    let m = p.matrix(i)?;
    if m.as_slice().iter().all(|v| v.is_finite()) && m.is_spd() {
        Ok(m.clone())
    } else {
        Err(Error::InvalidParameter(format!(
            "{} must be symmetric positive definite",
            block_name(desc, i)
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_lists_every_id_once() {
        let cat = catalog();
        assert_eq!(cat.len(), 15);
        for e in &cat {
            assert_eq!(e.id, e.family.id());
        }
        let mut ids = family_ids();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 15);
        assert!(ids.contains(&"poisson"));
    }

    #[test]
    fn lookup_rejects_unknown_and_bad_options() {
        assert!(lookup("cauchy", &FamilyOptions::default()).is_err());
        let bad = FamilyOptions {
            shape: Some(-1.0),
            ..Default::default()
        };
        assert!(lookup("weibull", &bad).is_err());
        let cov = FamilyOptions {
            covariance: Some(SymMatrix::diagonal(&[1.0, -1.0])),
            ..Default::default()
        };
        assert!(lookup("gaussian_fixed_cov", &cov).is_err());
    }

    mod props {
        use super::*;
        use crate::oracle::sampling::Substreams;
        use crate::param::Block;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn conversions_round_trip(seed in any::<u64>()) {
                for e in catalog() {
                    let fam = e.family.as_ref();
                    let src = fam.random_source(&mut Substreams::new(seed).stream(0));
                    let th = fam.to_natural(&src).unwrap();
                    let back = fam.to_source(&th).unwrap();
                    for (x, y) in src.components().iter().zip(back.components()) {
                        prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()), "{}: λ {x} → {y}", e.id);
                    }
                    let th2 = fam.to_natural(&back).unwrap();
                    for (x, y) in th.components().iter().zip(th2.components()) {
                        prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()), "{}: θ {x} → {y}", e.id);
                    }
                }
            }

            #[test]
            fn implicit_cumulant_ignores_the_base_point(seed in any::<u64>()) {
                for e in catalog() {
                    let fam = e.family.as_ref();
                    let mut rng = Substreams::new(seed).stream(0);
                    let src = fam.random_source(&mut rng);
                    let f: Vec<f64> = (0..5)
                        .map(|_| fam.implicit_cumulant(&src, &fam.random_support_point(&mut rng)).unwrap())
                        .collect();
                    for v in &f {
                        prop_assert!((v - f[0]).abs() <= 1e-10 * (1.0 + f[0].abs()), "{}: {v} vs {}", e.id, f[0]);
                    }
                }
            }

            #[test]
            fn cumulant_gradient_is_the_moment(seed in any::<u64>()) {
                for e in catalog().into_iter().filter(|e| e.family.descriptor().order == 1) {
                    let fam = e.family.as_ref();
                    let src = fam.random_source(&mut Substreams::new(seed).stream(0));
                    let th = fam.to_natural(&src).unwrap().scalar(0).unwrap();
                    let w = fam.default_omega();
                    let f = |x: f64| {
                        let p = fam.to_source(&Param::natural(alloc::vec![Block::Scalar(x)])).unwrap();
                        fam.implicit_cumulant(&p, &w).unwrap()
                    };
                    let h = 1e-5;
                    let fd = (f(th + h) - f(th - h)) / (2.0 * h);
                    let eta = fam.moment(&src).unwrap().scalar(0).unwrap();
                    prop_assert!((fd - eta).abs() <= 1e-4 * eta.abs(), "{}: {fd} vs {eta}", e.id);
                }
            }
        }
    }
}
