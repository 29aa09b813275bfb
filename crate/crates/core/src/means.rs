//! Weighted quasi-arithmetic means induced by the source-to-natural map.
//!
//! `M_α(a, b) = λ(α θ(a) + (1 − α) θ(b))`, so the weight α always goes with
//! the first argument. For vector and matrix families this is evaluated by
//! composing the two conversions, never through hand-simplified formulas.

use alloc::format;

use crate::error::{Error, Result};
use crate::family::ExponentialFamily;
use crate::linalg::SymMatrix;
use crate::param::Param;

/// A single mean query.
#[derive(Clone, Copy)]
pub struct MeanRequest<'a> {
    pub family: &'a dyn ExponentialFamily,
    pub alpha: f64,
    pub a: &'a Param,
    pub b: &'a Param,
}

impl MeanRequest<'_> {
    pub fn evaluate(&self) -> Result<Param> {
        qam(self.family, self.alpha, self.a, self.b)
    }
}

/// `λ(α θ(a) + (1 − α) θ(b))`.
///
/// Any finite α is accepted; outside `[0, 1]` the combination can leave the
/// natural domain, which is reported as [`Error::NaturalDomainViolation`].
pub fn qam(fam: &dyn ExponentialFamily, alpha: f64, a: &Param, b: &Param) -> Result<Param> {
    if !alpha.is_finite() {
        return Err(Error::InvalidAlpha(alpha));
    }
    let ta = fam.to_natural(a)?;
    let tb = fam.to_natural(b)?;
    fam.to_source(&ta.lincomb(alpha, &tb, 1.0 - alpha))
}

/// First-order expansion of [`qam`] around `α = 0`:
/// `b + α (θ(a) − θ(b)) / θ′(b)`, for families with a scalar parameter.
pub fn qam_taylor(fam: &dyn ExponentialFamily, alpha: f64, a: &Param, b: &Param) -> Result<Param> {
    if !alpha.is_finite() {
        return Err(Error::InvalidAlpha(alpha));
    }
    if fam.descriptor().order != 1 {
        return Err(Error::Unsupported(format!(
            "the first-order mean expansion needs a one-parameter family; {} has order {}",
            fam.id(),
            fam.descriptor().order
        )));
    }
    let ta = fam.to_natural(a)?.scalar(0)?;
    let tb = fam.to_natural(b)?.scalar(0)?;
    let slope = fam.natural_derivative(b)?;
    let u = b.scalar(0)? + alpha * (ta - tb) / slope;
    let out = Param::source_scalars(&[u]);
    fam.validate_source(&out)?;
    Ok(out)
}

/// `(α M₁⁻¹ + (1 − α) M₂⁻¹)⁻¹`.
pub fn matrix_harmonic_barycenter(alpha: f64, m1: &SymMatrix, m2: &SymMatrix) -> Result<SymMatrix> {
    if !alpha.is_finite() {
        return Err(Error::InvalidAlpha(alpha));
    }
    if m1.dim() != m2.dim() {
        return Err(Error::InvalidParameter(format!(
            "matrix dimensions differ: {} and {}",
            m1.dim(),
            m2.dim()
        )));
    }
    let inv = m1.inverse_spd()?.lincomb(alpha, &m2.inverse_spd()?, 1.0 - alpha);
    inv.inverse_spd()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{Bernoulli, Exponential, Laplace, Poisson};
    use approx::assert_relative_eq;

    fn s(v: f64) -> Param {
        Param::source_scalars(&[v])
    }

    #[test]
    fn table_means_at_one_half() {
        assert_relative_eq!(
            qam(&Poisson::new(), 0.5, &s(1.0), &s(4.0)).unwrap().scalar(0).unwrap(),
            2.0,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            qam(&Laplace::new(), 0.5, &s(1.0), &s(3.0)).unwrap().scalar(0).unwrap(),
            1.5,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            qam(&Bernoulli::new(), 0.5, &s(0.2), &s(0.8))
                .unwrap()
                .scalar(0)
                .unwrap(),
            0.5,
            epsilon = 1e-14
        );
    }

    #[test]
    fn endpoints_return_the_arguments() {
        let f = Poisson::new();
        assert_relative_eq!(
            qam(&f, 1.0, &s(1.5), &s(7.0)).unwrap().scalar(0).unwrap(),
            1.5,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            qam(&f, 0.0, &s(1.5), &s(7.0)).unwrap().scalar(0).unwrap(),
            7.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn extrapolation_can_leave_the_domain() {
        // exponential: θ = λ, so 2·1 − 1·3 < 0
        let r = qam(&Exponential::new(), 2.0, &s(1.0), &s(3.0));
        assert!(matches!(r, Err(Error::NaturalDomainViolation(_))));
    }

    #[test]
    fn poisson_taylor_expansion() {
        let f = Poisson::new();
        let t = qam_taylor(&f, 1e-3, &s(4.0), &s(1.0)).unwrap().scalar(0).unwrap();
        assert_relative_eq!(t, 1.0 + 1e-3 * 4f64.ln(), epsilon = 1e-15);
        let exact = qam(&f, 1e-3, &s(4.0), &s(1.0)).unwrap().scalar(0).unwrap();
        assert!((t - exact).abs() < 1e-5);
        assert_eq!(qam_taylor(&f, 0.0, &s(4.0), &s(1.0)).unwrap().scalar(0).unwrap(), 1.0);
    }

    #[test]
    fn taylor_is_exact_for_a_linear_map() {
        let f = Exponential::new();
        for &a in &[0.1, 0.5, 0.9] {
            let t = qam_taylor(&f, a, &s(2.0), &s(5.0)).unwrap().scalar(0).unwrap();
            let e = qam(&f, a, &s(2.0), &s(5.0)).unwrap().scalar(0).unwrap();
            assert_relative_eq!(t, e, epsilon = 1e-14);
        }
    }

    #[test]
    fn harmonic_barycenter_of_scaled_identities() {
        let h = matrix_harmonic_barycenter(0.5, &SymMatrix::identity(2), &SymMatrix::scaled_identity(2, 3.0)).unwrap();
        for (a, b) in h.as_slice().iter().zip(SymMatrix::scaled_identity(2, 1.5).as_slice()) {
            assert_relative_eq!(*a, *b, epsilon = 1e-14);
        }
        assert!(matches!(
            matrix_harmonic_barycenter(0.5, &SymMatrix::identity(2), &SymMatrix::diagonal(&[1.0, -1.0])),
            Err(Error::NotSpd)
        ));
    }

    mod props {
        use super::*;
        use crate::families::catalog;
        use crate::oracle::sampling::Substreams;
        use proptest::prelude::*;

        fn pair(fam: &dyn ExponentialFamily, seed: u64) -> (Param, Param) {
            let mut rng = Substreams::new(seed).stream(0);
            (fam.random_source(&mut rng), fam.random_source(&mut rng))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn mean_is_linear_in_natural_coordinates(seed in any::<u64>(), alpha in 0.0..=1.0f64) {
                for e in catalog() {
                    let fam = e.family.as_ref();
                    let (a, b) = pair(fam, seed);
                    let lhs = fam.to_natural(&qam(fam, alpha, &a, &b).unwrap()).unwrap().components();
                    let rhs = fam.to_natural(&a).unwrap().lincomb(alpha, &fam.to_natural(&b).unwrap(), 1.0 - alpha).components();
                    for (x, y) in lhs.iter().zip(&rhs) {
                        prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()), "{}: {x} vs {y}", e.id);
                    }
                }
            }

            #[test]
            fn scalar_means_are_internal_and_monotone(seed in any::<u64>(), a1 in 0.0..1.0f64, a2 in 0.0..1.0f64) {
                for e in catalog().into_iter().filter(|e| e.family.descriptor().order == 1) {
                    let fam = e.family.as_ref();
                    let (a, b) = pair(fam, seed);
                    let (x, y) = (a.scalar(0).unwrap(), b.scalar(0).unwrap());
                    let m = |al: f64| qam(fam, al, &a, &b).unwrap().scalar(0).unwrap();
                    let (m1, m2) = (m(a1), m(a2));
                    let slack = 1e-14 * x.abs().max(y.abs());
                    prop_assert!(m1 >= x.min(y) - slack && m1 <= x.max(y) + slack, "{}: {m1} outside [{x}, {y}]", e.id);
                    if (a1 - a2).abs() > 1e-6 && (x - y).abs() > 1e-6 * x.abs().max(y.abs()) {
                        // weight on `a` grows with α, so the mean moves toward x
                        prop_assert!((m2 - m1) * (a2 - a1) * (x - y) > 0.0, "{}: not monotone", e.id);
                    }
                }
            }

            #[test]
            fn taylor_residual_is_quadratic(seed in any::<u64>(), alpha in 1e-4..1e-3f64) {
                for e in catalog().into_iter().filter(|e| e.family.descriptor().order == 1) {
                    let fam = e.family.as_ref();
                    let (a, b) = pair(fam, seed);
                    let residual = |al: f64| {
                        (qam(fam, al, &a, &b).unwrap().scalar(0).unwrap() - qam_taylor(fam, al, &a, &b).unwrap().scalar(0).unwrap()).abs()
                    };
                    let (r1, r2) = (residual(alpha), residual(alpha / 2.0));
                    // linear θ makes the expansion exact
                    if r1 > 1e-11 * b.scalar(0).unwrap().abs() {
                        prop_assert!(r1 / r2 >= 3.5, "{}: residual ratio {}", e.id, r1 / r2);
                    }
                }
            }
        }
    }
}
