//! Central Wishart family.

use alloc::format;
use alloc::vec;

use rand_core::RngCore;

use super::{natural_layout, random_spd, spd_block, uniform_in};
use crate::error::{Error, Result};
use crate::family::{Capabilities, ExponentialFamily, FamilyDescriptor, Support};
use crate::linalg::SymMatrix;
use crate::oracle::sampling;
use crate::param::{Block, BlockShape, Param, ParamKind, Sample, SuffStat};
use crate::special::{ln_multi_gamma, multi_digamma};

/// Wishart distributions `W_d(n, S)` on the SPD cone, `n > d − 1`.
///
/// Triple: θ = ((n − d − 1)/2, −½S⁻¹), t(X) = (log|X|, X), k = 0.
pub struct Wishart {
    desc: FamilyDescriptor,
}

impl Wishart {
    pub fn new(dim: usize) -> Self {
        Self {
            desc: FamilyDescriptor {
                id: "wishart",
                name: "Central Wishart",
                order: 1 + dim * (dim + 1) / 2,
                sample_dim: dim * (dim + 1) / 2,
                support: Support::SpdCone(dim),
                param_names: vec!["dof", "scale"],
                param_shapes: vec![BlockShape::Scalar, BlockShape::Matrix(dim)],
                caps: Capabilities {
                    has_entropy: true,
                    has_moment: true,
                    has_carrier_expectation: true,
                    has_sampler: true,
                    has_omega_solver: false,
                    is_discrete: false,
                },
            },
        }
    }

    fn dim(&self) -> usize {
        match self.desc.support {
            Support::SpdCone(d) => d,
            _ => unreachable!(),
        }
    }

    fn params(&self, p: &Param) -> Result<(f64, SymMatrix)> {
        self.desc.check_layout(p, ParamKind::Source)?;
        let n = p.scalar(0)?;
        let d = self.dim() as f64;
        if !(n > d - 1.0 && n.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "dof must exceed {} for d = {d}, got {n}",
                d - 1.0
            )));
        }
        Ok((n, spd_block(&self.desc, p, 1)?))
    }

    fn matrix_sample<'a>(&self, x: &'a Sample) -> Result<&'a SymMatrix> {
        self.desc.support.check(x)?;
        Ok(x.as_matrix().expect("matrix support"))
    }
}

impl ExponentialFamily for Wishart {
    fn descriptor(&self) -> &FamilyDescriptor {
        &self.desc
    }

    fn validate_source(&self, source: &Param) -> Result<()> {
        self.params(source).map(|_| ())
    }

    fn to_natural(&self, source: &Param) -> Result<Param> {
        let (n, s) = self.params(source)?;
        let d = self.dim() as f64;
        Ok(Param::natural(vec![
            Block::Scalar(0.5 * (n - d - 1.0)),
            Block::Matrix(s.inverse_spd()?.scale(-0.5)),
        ]))
    }

    fn to_source(&self, natural: &Param) -> Result<Param> {
        let d = self.dim();
        natural_layout(&self.desc, natural, &[BlockShape::Scalar, BlockShape::Matrix(d)])?;
        let ts = natural.scalar(0)?;
        if !(ts > -1.0) {
            return Err(Error::NaturalDomainViolation(format!(
                "wishart needs θ_s > −1, got {ts}"
            )));
        }
        let s = natural
            .matrix(1)?
            .scale(-2.0)
            .inverse_spd()
            .map_err(|_| Error::NaturalDomainViolation("wishart needs θ_M negative definite".into()))?;
        Ok(Param::source(vec![
            Block::Scalar(2.0 * ts + d as f64 + 1.0),
            Block::Matrix(s),
        ]))
    }

    fn sufficient_stat(&self, x: &Sample) -> Result<SuffStat> {
        let m = self.matrix_sample(x)?;
        Ok(SuffStat(vec![
            Block::Scalar(m.log_det_spd()?),
            Block::Matrix(m.clone()),
        ]))
    }

    fn carrier(&self, x: &Sample) -> Result<f64> {
        self.matrix_sample(x).map(|_| 0.0)
    }

    fn log_density(&self, source: &Param, x: &Sample) -> Result<f64> {
        let (n, s) = self.params(source)?;
        let m = self.matrix_sample(x)?;
        let d = self.dim() as f64;
        let chol = s.cholesky()?;
        let tr = chol.inverse().frobenius_inner(m);
        Ok(0.5 * (n - d - 1.0) * m.log_det_spd()?
            - 0.5 * tr
            - 0.5 * n * d * core::f64::consts::LN_2
            - 0.5 * n * chol.log_det()
            - ln_multi_gamma(self.dim(), 0.5 * n))
    }

    fn default_omega(&self) -> Sample {
        Block::Matrix(SymMatrix::identity(self.dim()))
    }

    fn random_source(&self, rng: &mut dyn RngCore) -> Param {
        let d = self.dim();
        let n = uniform_in(rng, d as f64 + 0.5, d as f64 + 8.0);
        Param::source(vec![Block::Scalar(n), Block::Matrix(random_spd(rng, d, 0.5))])
    }

    fn random_support_point(&self, rng: &mut dyn RngCore) -> Sample {
        Block::Matrix(random_spd(rng, self.dim(), 1.0))
    }

    fn moment(&self, source: &Param) -> Result<Param> {
        let (n, s) = self.params(source)?;
        let d = self.dim();
        let ld = multi_digamma(d, 0.5 * n) + d as f64 * core::f64::consts::LN_2 + s.log_det_spd()?;
        Ok(Param::moment(vec![Block::Scalar(ld), Block::Matrix(s.scale(n))]))
    }

    fn entropy(&self, source: &Param) -> Result<f64> {
        let (n, s) = self.params(source)?;
        let di = self.dim();
        let d = di as f64;
        Ok(0.5 * (d + 1.0) * s.log_det_spd()?
            + 0.5 * d * (d + 1.0) * core::f64::consts::LN_2
            + ln_multi_gamma(di, 0.5 * n)
            - 0.5 * (n - d - 1.0) * multi_digamma(di, 0.5 * n)
            + 0.5 * n * d)
    }

    fn carrier_expectation(&self, source: &Param) -> Result<f64> {
        self.params(source).map(|_| 0.0)
    }

    fn sample(&self, source: &Param, rng: &mut dyn RngCore) -> Result<Sample> {
        let (n, s) = self.params(source)?;
        Ok(Block::Matrix(sampling::wishart(n, &s.cholesky()?, rng)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::Gamma;
    use approx::assert_relative_eq;

    // W_1(n, s) is Gamma(n/2, rate 1/(2s))
    #[test]
    fn one_dimensional_wishart_is_gamma() {
        let w = Wishart::new(1);
        let g = Gamma::new();
        let (n, s) = (3.4, 0.7);
        let pw = Param::source(vec![Block::Scalar(n), Block::Matrix(SymMatrix::diagonal(&[s]))]);
        let pg = Param::source_scalars(&[n / 2.0, 1.0 / (2.0 * s)]);
        for &x in &[0.2, 1.0, 4.0] {
            assert_relative_eq!(
                w.log_density(&pw, &Block::Matrix(SymMatrix::diagonal(&[x]))).unwrap(),
                g.log_density(&pg, &Block::Scalar(x)).unwrap(),
                epsilon = 1e-13
            );
        }
        assert_relative_eq!(w.entropy(&pw).unwrap(), g.entropy(&pg).unwrap(), epsilon = 1e-13);
        let (mw, mg) = (w.moment(&pw).unwrap(), g.moment(&pg).unwrap());
        assert_relative_eq!(mw.scalar(0).unwrap(), mg.scalar(0).unwrap(), epsilon = 1e-13);
    }

    #[test]
    fn rejects_too_few_degrees_of_freedom() {
        let w = Wishart::new(3);
        let p = Param::source(vec![Block::Scalar(1.5), Block::Matrix(SymMatrix::identity(3))]);
        assert!(matches!(w.validate_source(&p), Err(Error::InvalidParameter(_))));
    }
}
