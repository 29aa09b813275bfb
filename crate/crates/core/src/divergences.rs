//! (Dis)similarities between two members of one family, computed from
//! density evaluations and parameter conversions only.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::families::MixtureFamily;
use crate::family::ExponentialFamily;
use crate::means::qam;
use crate::oracle::{self, monte_carlo_mean, OracleConfig};
use crate::param::{Param, ParamKind, Sample};

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Limit,
    EntropyMoment,
    LogRatio,
    MonteCarlo,
    Quadrature,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Limit => "limit",
            Method::EntropyMoment => "entropy_moment",
            Method::LogRatio => "log_ratio",
            Method::MonteCarlo => "monte_carlo",
            Method::Quadrature => "quadrature",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceResult {
    pub value: f64,
    pub method: Method,
    pub alpha_used: Option<f64>,
    pub omega_used: Option<Vec<Sample>>,
    /// Method-specific diagnostic: `log ρ` for coefficients, the Richardson
    /// step difference for limits, the final bracket for Chernoff, the
    /// standard error or error bound for numerical estimates.
    pub residual: Option<f64>,
}

impl DivergenceResult {
    fn closed(value: f64) -> Self {
        Self {
            value,
            method: Method::ClosedForm,
            alpha_used: None,
            omega_used: None,
            residual: None,
        }
    }
}

/// Default step for [`kld_limit`].
pub const DEFAULT_ALPHA_STEP: f64 = 1e-3;

const LIMIT_LEVELS: usize = 4;

fn open_unit(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

fn resolve_omega(fam: &dyn ExponentialFamily, omega: Option<&Sample>) -> Result<Sample> {
    let w = omega.cloned().unwrap_or_else(|| fam.default_omega());
    fam.descriptor().support.check(&w)?;
    Ok(w)
}

fn validate_pair(fam: &dyn ExponentialFamily, l1: &Param, l2: &Param) -> Result<()> {
    fam.validate_source(l1)?;
    fam.validate_source(l2)
}

/// `log ρ_α = α l(ω;λ₁) + (1−α) l(ω;λ₂) − l(ω; M_α(λ₁,λ₂))` for any α whose
/// natural combination stays in the domain.
fn log_coefficient(fam: &dyn ExponentialFamily, l1: &Param, l2: &Param, alpha: f64, omega: &Sample) -> Result<f64> {
    let mean = qam(fam, alpha, l1, l2)?;
    Ok(
        alpha * fam.log_density(l1, omega)? + (1.0 - alpha) * fam.log_density(l2, omega)?
            - fam.log_density(&mean, omega)?,
    )
}

/// Skewed Bhattacharyya coefficient `ρ_α = ∫ p₁^α p₂^{1−α}`, `α ∈ (0, 1)`.
///
/// `residual` carries `log ρ_α` for coefficients too small to represent.
pub fn bhattacharyya_coefficient(
    fam: &dyn ExponentialFamily,
    l1: &Param,
    l2: &Param,
    alpha: f64,
    omega: Option<&Sample>,
) -> Result<DivergenceResult> {
    open_unit(alpha)?;
    validate_pair(fam, l1, l2)?;
    let w = resolve_omega(fam, omega)?;
    let lr = log_coefficient(fam, l1, l2, alpha, &w)?.min(0.0);
    Ok(DivergenceResult {
        value: lr.exp(),
        method: Method::ClosedForm,
        alpha_used: Some(alpha),
        omega_used: Some(vec![w]),
        residual: Some(lr),
    })
}

/// `−log ρ_α`, computed without leaving log space.
pub fn bhattacharyya_distance(
    fam: &dyn ExponentialFamily,
    l1: &Param,
    l2: &Param,
    alpha: f64,
    omega: Option<&Sample>,
) -> Result<DivergenceResult> {
    let mut r = bhattacharyya_coefficient(fam, l1, l2, alpha, omega)?;
    r.value = -r.residual.expect("coefficient carries log ρ");
    Ok(r)
}

/// `√(1 − ρ_½)`.
pub fn hellinger(
    fam: &dyn ExponentialFamily,
    l1: &Param,
    l2: &Param,
    omega: Option<&Sample>,
) -> Result<DivergenceResult> {
    let mut r = bhattacharyya_coefficient(fam, l1, l2, 0.5, omega)?;
    let lr = r.residual.expect("coefficient carries log ρ");
    r.value = (-lr.exp_m1()).max(0.0).sqrt();
    Ok(r)
}

/// `(1 − ρ_α) / (α(1 − α))`, with the KL limits at α = 0 (`KL(p₂:p₁)`) and
/// α = 1 (`KL(p₁:p₂)`). Extrapolated α is allowed when the natural
/// combination stays in the domain.
pub fn alpha_divergence(
    fam: &dyn ExponentialFamily,
    l1: &Param,
    l2: &Param,
    alpha: f64,
    omega: Option<&Sample>,
) -> Result<DivergenceResult> {
    if !alpha.is_finite() {
        return Err(Error::InvalidAlpha(alpha));
    }
    if alpha == 1.0 {
        return kld(fam, l1, l2).map(|r| DivergenceResult {
            alpha_used: Some(1.0),
            ..r
        });
    }
    if alpha == 0.0 {
        return kld(fam, l2, l1).map(|r| DivergenceResult {
            alpha_used: Some(0.0),
            ..r
        });
    }
    validate_pair(fam, l1, l2)?;
    let w = resolve_omega(fam, omega)?;
    let mut lr = log_coefficient(fam, l1, l2, alpha, &w)?;
    if alpha > 0.0 && alpha < 1.0 {
        lr = lr.min(0.0);
    } else {
        lr = lr.max(0.0);
    }
    Ok(DivergenceResult {
        value: -lr.exp_m1() / (alpha * (1.0 - alpha)),
        method: Method::ClosedForm,
        alpha_used: Some(alpha),
        omega_used: Some(vec![w]),
        residual: Some(lr),
    })
}

const CHERNOFF_LO: f64 = 1e-6;
const CHERNOFF_HI: f64 = 1.0 - 1e-6;
const CHERNOFF_MAX_ITER: usize = 200;
const CHERNOFF_TOL: f64 = 1e-10;
const CHERNOFF_GRID: usize = 64;

fn golden_max(f: &dyn Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<(f64, f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..CHERNOFF_MAX_ITER {
        if b - a < CHERNOFF_TOL {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let (x, fx) = if fc >= fd { (c, fc) } else { (d, fd) };
    Ok((x, fx, b - a))
}

/// Chernoff information `max_{α∈(0,1)} −log ρ_α`; `alpha_used` is the maximizer.
///
/// Golden-section search on the concave objective, cross-checked against a
/// coarse grid; if the grid beats the search, it is repeated inside the
/// grid cell around the better point.
pub fn chernoff_information(fam: &dyn ExponentialFamily, l1: &Param, l2: &Param) -> Result<DivergenceResult> {
    validate_pair(fam, l1, l2)?;
    let w = fam.default_omega();
    if l1 == l2 {
        return Ok(DivergenceResult {
            value: 0.0,
            method: Method::ClosedForm,
            alpha_used: Some(0.5),
            omega_used: Some(vec![w]),
            residual: Some(0.0),
        });
    }
    let objective = |a: f64| -> Result<f64> { Ok(-log_coefficient(fam, l1, l2, a, &w)?) };
    let (mut best_a, mut best, mut bracket) = golden_max(&objective, CHERNOFF_LO, CHERNOFF_HI)?;

    let h = (CHERNOFF_HI - CHERNOFF_LO) / CHERNOFF_GRID as f64;
    let mut grid_best = (best_a, best);
    for i in 0..=CHERNOFF_GRID {
        let a = CHERNOFF_LO + i as f64 * h;
        let v = objective(a)?;
        if v > grid_best.1 {
            grid_best = (a, v);
        }
    }
    if grid_best.1 > best {
        let (a, b) = ((grid_best.0 - h).max(CHERNOFF_LO), (grid_best.0 + h).min(CHERNOFF_HI));
        let (x, fx, br) = golden_max(&objective, a, b)?;
        if fx > grid_best.1 {
            (best_a, best, bracket) = (x, fx, br);
        } else {
            (best_a, best, bracket) = (grid_best.0, grid_best.1, h);
        }
    }
    Ok(DivergenceResult {
        value: best.max(0.0),
        method: Method::ClosedForm,
        alpha_used: Some(best_a),
        omega_used: Some(vec![w]),
        residual: Some(bracket),
    })
}

/// KL divergence as the α → 0 limit of the scaled skewed Bhattacharyya
/// distance, Romberg-extrapolated over `{α, α/2, α/4, α/8}`.
///
/// `residual` is `|D(α) − D(α/2)|`.
pub fn kld_limit(
    fam: &dyn ExponentialFamily,
    l1: &Param,
    l2: &Param,
    alpha_step: f64,
    omega: Option<&Sample>,
) -> Result<DivergenceResult> {
    if !(alpha_step > 0.0 && alpha_step <= 0.1) {
        return Err(Error::InvalidAlpha(alpha_step));
    }
    validate_pair(fam, l1, l2)?;
    let w = resolve_omega(fam, omega)?;
    let lp1 = fam.log_density(l1, &w)?;
    let lp2 = fam.log_density(l2, &w)?;
    let scaled = |a: f64| -> Result<f64> {
        let mean = qam(fam, a, l2, l1)?;
        Ok(lp1 - lp2 + (fam.log_density(&mean, &w)? - lp1) / a)
    };
    // D(a) = KL + c₁a + c₂a² + …; each Romberg column cancels one more term
    let mut table = [0.0; LIMIT_LEVELS];
    for (i, slot) in table.iter_mut().enumerate() {
        *slot = scaled(alpha_step / (1u32 << i) as f64)?;
    }
    let (d1, d2) = (table[0], table[1]);
    for col in 1..LIMIT_LEVELS {
        let f = (1u32 << col) as f64;
        for i in (col..LIMIT_LEVELS).rev() {
            table[i] = (f * table[i] - table[i - 1]) / (f - 1.0);
        }
    }
    Ok(DivergenceResult {
        value: table[LIMIT_LEVELS - 1].max(0.0),
        method: Method::Limit,
        alpha_used: Some(alpha_step),
        omega_used: Some(vec![w]),
        residual: Some((d1 - d2).abs()),
    })
}

/// `KL = −log p(ω;λ₂) − h(p₁) − E₁[k] − θ₂ᵀ(η₁ − t(ω)) + k(ω)`, which does
/// not depend on ω.
pub fn kld_entropy_moment(
    fam: &dyn ExponentialFamily,
    l1: &Param,
    l2: &Param,
    omega: Option<&Sample>,
) -> Result<DivergenceResult> {
    validate_pair(fam, l1, l2)?;
    let caps = fam.descriptor().caps;
    if !(caps.has_entropy && caps.has_moment && caps.has_carrier_expectation) {
        return Err(crate::family::unsupported(fam.id(), "entropy/moment KL"));
    }
    let w = resolve_omega(fam, omega)?;
    let h1 = fam.entropy(l1)?;
    let eta1 = fam.moment(l1)?;
    let ek1 = fam.carrier_expectation(l1)?;
    let theta2 = fam.to_natural(l2)?;
    let tw = fam.sufficient_stat(&w)?.into_moment();
    let v = -fam.log_density(l2, &w)? - h1 - ek1 - theta2.dot(&eta1.lincomb(1.0, &tw, -1.0)) + fam.carrier(&w)?;
    Ok(DivergenceResult {
        value: v.max(0.0),
        method: Method::EntropyMoment,
        alpha_used: None,
        omega_used: Some(vec![w]),
        residual: None,
    })
}

/// `(1/s) Σᵢ log p(ωᵢ;λ₁)/p(ωᵢ;λ₂)` over points whose mean sufficient
/// statistic is `E₁[t]`. Exact up to rounding.
pub fn kld_logratio(fam: &dyn ExponentialFamily, l1: &Param, l2: &Param) -> Result<DivergenceResult> {
    validate_pair(fam, l1, l2)?;
    let points = fam.omega_points(l1)?;
    let mut acc = 0.0;
    for w in &points {
        acc += fam.log_density(l1, w)? - fam.log_density(l2, w)?;
    }
    Ok(DivergenceResult {
        value: (acc / points.len() as f64).max(0.0),
        method: Method::LogRatio,
        alpha_used: None,
        omega_used: Some(points),
        residual: None,
    })
}

/// KL divergence by the first method that applies: log-ratio, then
/// entropy/moment, then the Richardson-extrapolated limit.
pub fn kld(fam: &dyn ExponentialFamily, l1: &Param, l2: &Param) -> Result<DivergenceResult> {
    let skip = |e: &Error| matches!(e, Error::Unsupported(_) | Error::DegenerateSolution(_));
    match kld_logratio(fam, l1, l2) {
        Err(e) if skip(&e) => {}
        other => return other,
    }
    match kld_entropy_moment(fam, l1, l2, None) {
        Err(e) if skip(&e) => {}
        other => return other,
    }
    kld_limit(fam, l1, l2, DEFAULT_ALPHA_STEP, None)
}

/// Choice of KL evaluation route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KlMethod {
    Auto,
    LogRatio,
    EntropyMoment,
    Limit { alpha_step: f64 },
    Quadrature,
    MonteCarlo,
}

pub fn kld_with(
    fam: &dyn ExponentialFamily,
    l1: &Param,
    l2: &Param,
    method: KlMethod,
    omega: Option<&Sample>,
    cfg: &OracleConfig,
) -> Result<DivergenceResult> {
    let estimate = |e: oracle::Estimate, m: Method| DivergenceResult {
        value: e.value,
        method: m,
        alpha_used: None,
        omega_used: None,
        residual: Some(e.error),
    };
    match method {
        KlMethod::Auto => kld(fam, l1, l2),
        KlMethod::LogRatio => kld_logratio(fam, l1, l2),
        KlMethod::EntropyMoment => kld_entropy_moment(fam, l1, l2, omega),
        KlMethod::Limit { alpha_step } => kld_limit(fam, l1, l2, alpha_step, omega),
        KlMethod::Quadrature => Ok(estimate(oracle::kld_quadrature(fam, l1, l2, cfg)?, Method::Quadrature)),
        KlMethod::MonteCarlo => Ok(estimate(oracle::kld_monte_carlo(fam, l1, l2, cfg)?, Method::MonteCarlo)),
    }
}

/// `(θ₂ − θ₁)ᵀ(η₂ − η₁)`.
pub fn jeffreys(fam: &dyn ExponentialFamily, l1: &Param, l2: &Param) -> Result<DivergenceResult> {
    validate_pair(fam, l1, l2)?;
    if !fam.descriptor().caps.has_moment {
        return Err(crate::family::unsupported(fam.id(), "moment"));
    }
    let dt = fam.to_natural(l2)?.lincomb(1.0, &fam.to_natural(l1)?, -1.0);
    let de = fam.moment(l2)?.lincomb(1.0, &fam.moment(l1)?, -1.0);
    Ok(DivergenceResult::closed(dt.dot(&de).max(0.0)))
}

/// `h(m_{(w₁+w₂)/2}) − (h(m_{w₁}) + h(m_{w₂}))/2` by Monte Carlo, clipped to
/// `[0, log 2]`.
///
/// The three entropies share substreams, so the estimate is an average of
/// per-draw differences and `residual` is its standard error.
pub fn jensen_shannon_mixture(
    mix: &MixtureFamily,
    w1: &[f64],
    w2: &[f64],
    cfg: &OracleConfig,
) -> Result<DivergenceResult> {
    cfg.validate()?;
    mix.check_weights(w1)?;
    mix.check_weights(w2)?;
    let mid: Vec<f64> = w1.iter().zip(w2).map(|(a, b)| 0.5 * (a + b)).collect();
    let e = monte_carlo_mean(cfg.mc_samples, cfg.seed, &mut |rng| {
        let (mut r1, mut r2) = (rng.clone(), rng.clone());
        let xm = mix.sample(&mid, rng)?;
        let x1 = mix.sample(w1, &mut r1)?;
        let x2 = mix.sample(w2, &mut r2)?;
        Ok(-mix.log_density(&mid, &xm)? + 0.5 * (mix.log_density(w1, &x1)? + mix.log_density(w2, &x2)?))
    })?;
    Ok(DivergenceResult {
        value: e.value.clamp(0.0, core::f64::consts::LN_2),
        method: Method::MonteCarlo,
        alpha_used: None,
        omega_used: None,
        residual: Some(e.error),
    })
}

/// Jensen–Shannon divergence between two members of one family, as the
/// mixture JSD between the vertex weights `(1, 0)` and `(0, 1)`.
pub fn jensen_shannon(
    fam: Arc<dyn ExponentialFamily>,
    l1: &Param,
    l2: &Param,
    cfg: &OracleConfig,
) -> Result<DivergenceResult> {
    let mix = MixtureFamily::of_family(fam, vec![l1.clone(), l2.clone()])?;
    if l1 == l2 {
        cfg.validate()?;
        return Ok(DivergenceResult {
            value: 0.0,
            method: Method::MonteCarlo,
            alpha_used: None,
            omega_used: None,
            residual: Some(0.0),
        });
    }
    jensen_shannon_mixture(&mix, &[1.0, 0.0], &[0.0, 1.0], cfg)
}

/// Cauchy–Schwarz divergence `−log(∫pq / √(∫p² ∫q²))` between two normals,
/// each given as `(mean vector, covariance)`.
pub fn cauchy_schwarz_gaussian(l1: &Param, l2: &Param) -> Result<DivergenceResult> {
    let unpack = |p: &Param| -> Result<(Vec<f64>, crate::linalg::SymMatrix)> {
        p.expect_kind(ParamKind::Source)?;
        let m = p.vector(0)?.to_vec();
        let s = p.matrix(1)?.clone();
        if s.dim() != m.len() {
            return Err(Error::InvalidParameter(format!(
                "covariance is {0}×{0} but the mean has {1} entries",
                s.dim(),
                m.len()
            )));
        }
        Ok((m, s))
    };
    let (m1, s1) = unpack(l1)?;
    let (m2, s2) = unpack(l2)?;
    if m1.len() != m2.len() {
        return Err(Error::InvalidParameter(
            "the two normals have different dimensions".into(),
        ));
    }
    let d = m1.len() as f64;
    let c1 = s1.cholesky()?;
    let c2 = s2.cholesky()?;
    let p1 = c1.inverse();
    let p2 = c2.inverse();
    let psum = p1.add(&p2);
    let cs = psum.cholesky()?;
    // |(Σ₁⁻¹ + Σ₂⁻¹)⁻¹| = 1 / |Σ₁⁻¹ + Σ₂⁻¹|
    let log_term = 0.5 * (-d * core::f64::consts::LN_2 + 0.5 * (c1.log_det() + c2.log_det()) + cs.log_det());
    let h1 = p1.mul_vec(&m1);
    let h2 = p2.mul_vec(&m2);
    let h: Vec<f64> = h1.iter().zip(&h2).map(|(a, b)| a + b).collect();
    let quad = 0.5 * m1.iter().zip(&h1).map(|(a, b)| a * b).sum::<f64>()
        + 0.5 * m2.iter().zip(&h2).map(|(a, b)| a * b).sum::<f64>()
        - 0.5 * cs.inv_quad_form(&h);
    Ok(DivergenceResult::closed((log_term + quad).max(0.0)))
}
