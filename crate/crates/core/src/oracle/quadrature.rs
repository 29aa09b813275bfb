//! Adaptive Gauss–Kronrod (7/15) integration and tail-bounded lattice sums.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::Estimate;
use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod(f: &mut dyn FnMut(f64) -> Result<f64>, a: f64, b: f64) -> Result<Segment> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx)? + f(c + dx)?;
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    Ok(Segment {
        a,
        b,
        value: k * h,
        error: ((k - g) * h).abs(),
    })
}

/// ∫ₐᵇ f by global adaptive bisection of the worst segment.
pub(crate) fn integrate(
    f: &mut dyn FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    initial_pieces: usize,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<Estimate> {
    let n = initial_pieces.max(1);
    let mut segs: Vec<Segment> = Vec::with_capacity(n + max_subdivisions);
    for i in 0..n {
        let lo = a + (b - a) * i as f64 / n as f64;
        let hi = a + (b - a) * (i + 1) as f64 / n as f64;
        segs.push(kronrod(f, lo, hi)?);
    }
    let mut splits = 0;
    loop {
        let total: f64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.error).sum();
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::NonConvergent(format!("integrand is not finite on [{a}, {b}]")));
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(Estimate {
                value: total,
                error: err,
            });
        }
        if splits >= max_subdivisions {
            return Err(Error::NonConvergent(format!(
                "quadrature error {err:e} above tolerance after {splits} subdivisions"
            )));
        }
        let (worst, _) = segs.iter().enumerate().fold(
            (0, -1.0),
            |(bi, be), (i, s)| if s.error > be { (i, s.error) } else { (bi, be) },
        );
        let s = segs.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if !(mid > s.a && mid < s.b) {
            return Err(Error::NonConvergent(format!(
                "segment near {mid} cannot be bisected further"
            )));
        }
        segs.push(kronrod(f, s.a, mid)?);
        segs.push(kronrod(f, mid, s.b)?);
        splits += 1;
    }
}

/// Coordinate change from ℝ onto a one-dimensional support.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Line {
    Real,
    /// `x = eᵘ`
    Positive,
    /// `x = 1 / (1 + e⁻ᵘ)`
    Unit,
}

impl Line {
    /// `(x(u), log dx/du)`
    fn map(self, u: f64) -> (f64, f64) {
        match self {
            Line::Real => (u, 0.0),
            Line::Positive => (u.exp(), u),
            Line::Unit => {
                let x = crate::special::logistic(u);
                // log x + log(1 − x) = −softplus(−u) − softplus(u)
                let sp = |v: f64| {
                    if v > 0.0 {
                        v + (-v).exp().ln_1p()
                    } else {
                        v.exp().ln_1p()
                    }
                };
                (x, -sp(-u) - sp(u))
            }
        }
    }
}

/// `∫ exp(lw(x)) · g(x) dx` over the support described by `line`, where
/// `term(x)` returns `(lw(x), g(x))` and `lw = −∞` marks points where the
/// integrand vanishes.
///
/// The support is pulled back to ℝ, split at 0, and each half mapped onto
/// `(0, 1)` by `u = t/(1−t)`. The integrand is rescaled by its largest value
/// on a coarse grid so densities far from unity stay representable.
pub(crate) fn integrate_line(
    line: Line,
    term: &dyn Fn(f64) -> Result<(f64, f64)>,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<(Estimate, f64)> {
    // log of the full integrand on the t-scale, plus g
    let eval = |t: f64, sign: f64| -> Result<(f64, f64)> {
        let u = sign * t / (1.0 - t);
        let (x, lj) = line.map(u);
        // the map has saturated onto a boundary point; the mass beyond is negligible
        let saturated = match line {
            Line::Real => false,
            Line::Positive => x == 0.0,
            Line::Unit => x == 0.0 || x == 1.0,
        };
        if !x.is_finite() || saturated {
            return Ok((f64::NEG_INFINITY, 0.0));
        }
        let (lw, g) = term(x)?;
        Ok((lw + lj - 2.0 * (1.0 - t).ln(), g))
    };

    let mut shift = f64::NEG_INFINITY;
    for sign in [-1.0, 1.0] {
        for j in 1..256 {
            let (lw, _) = eval(j as f64 / 256.0, sign)?;
            if lw.is_finite() {
                shift = shift.max(lw);
            }
        }
    }
    if shift == f64::NEG_INFINITY {
        return Ok((Estimate { value: 0.0, error: 0.0 }, 0.0));
    }

    let mut total = Estimate { value: 0.0, error: 0.0 };
    for sign in [-1.0, 1.0] {
        let mut f = |t: f64| -> Result<f64> {
            let (lw, g) = eval(t, sign)?;
            Ok(if lw == f64::NEG_INFINITY {
                0.0
            } else {
                (lw - shift).exp() * g
            })
        };
        let upper_unit = line == Line::Unit && sign > 0.0;
        let t_hi = if upper_unit { UNIT_CUT / (1.0 + UNIT_CUT) } else { 1.0 };
        let half = integrate(
            &mut f,
            0.0,
            t_hi,
            16,
            0.5 * abs_tol * (-shift).exp(),
            rel_tol,
            max_subdivisions,
        )?;
        total.value += half.value;
        total.error += half.error;
        if upper_unit {
            let tail = unit_tail(line, term, shift)?;
            total.value += tail.value;
            total.error += tail.error;
        }
    }
    Ok((total, shift))
}

/// Past this logistic coordinate `1 − x` keeps too few digits to evaluate
/// densities that are singular at 1.
const UNIT_CUT: f64 = 18.0;

/// Mass of the unit-interval integrand beyond `u = UNIT_CUT`, assuming the
/// log-weight and `g` are both affine in `u` there (power-law behaviour in
/// `1 − x`, as for every density with a `log(1 − x)` statistic).
fn unit_tail(line: Line, term: &dyn Fn(f64) -> Result<(f64, f64)>, shift: f64) -> Result<Estimate> {
    let at = |u: f64| -> Result<(f64, f64)> {
        let (x, lj) = line.map(u);
        let (lw, g) = term(x)?;
        Ok((lw + lj, g))
    };
    let (u0, u1) = (UNIT_CUT, UNIT_CUT - 1.0);
    let (l0, g0) = at(u0)?;
    if l0 == f64::NEG_INFINITY {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let (l1, g1) = at(u1)?;
    let slope = (l0 - l1) / (u0 - u1);
    if !(slope < 0.0) {
        return Err(Error::NonConvergent("integrand does not decay toward 1".into()));
    }
    let dg = (g0 - g1) / (u0 - u1);
    // ∫₀^∞ e^{slope·v} (g₀ + dg·v) dv
    let w = (l0 - shift).exp();
    let value = w * (g0 / -slope + dg / (slope * slope));
    Ok(Estimate {
        value,
        error: 1e-6 * value.abs(),
    })
}

/// `Σ_{x ≥ 0} exp(lw(x)) · g(x)` for a log-concave weight sequence.
///
/// Past the mode the ratios `w(x+1)/w(x)` are non-increasing, so the remaining
/// tail is dominated by a geometric series; summation stops once that bound
/// (with a linear allowance for the growth of `g`) drops below `cutoff`.
pub(crate) fn sum_lattice(term: &dyn Fn(f64) -> Result<(f64, f64)>, cutoff: f64, max_terms: u64) -> Result<Estimate> {
    let mut sum = 0.0;
    let (mut lw, mut g) = term(0.0)?;
    let mut x = 0.0;
    for _ in 0..max_terms {
        if lw > f64::NEG_INFINITY {
            sum += lw.exp() * g;
        }
        let (lw_next, g_next) = term(x + 1.0)?;
        if lw_next == f64::NEG_INFINITY && lw == f64::NEG_INFINITY {
            return Ok(Estimate { value: sum, error: 0.0 });
        }
        let log_r = lw_next - lw;
        if log_r < 0.0 {
            let r = log_r.exp();
            let tail = lw_next.exp() * (1.0 + g_next.abs()) / ((1.0 - r) * (1.0 - r));
            if tail < cutoff {
                return Ok(Estimate {
                    value: sum,
                    error: tail,
                });
            }
        }
        lw = lw_next;
        g = g_next;
        x += 1.0;
    }
    Err(Error::NonConvergent(format!(
        "lattice sum did not reach its tail bound within {max_terms} terms"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integrates_polynomials_exactly() {
        let mut f = |x: f64| Ok(x.powi(6) - 2.0 * x);
        let e = integrate(&mut f, 0.0, 2.0, 1, 1e-14, 1e-14, 10).unwrap();
        assert_relative_eq!(e.value, 128.0 / 7.0 - 4.0, epsilon = 1e-12);
    }

    #[test]
    fn line_integrals_of_standard_densities() {
        let gauss = |x: f64| Ok((-0.5 * x * x - 0.5 * crate::special::LN_2PI, 1.0));
        let (e, shift) = integrate_line(Line::Real, &gauss, 1e-13, 1e-12, 500).unwrap();
        assert_relative_eq!(e.value * shift.exp(), 1.0, epsilon = 1e-11);

        // x^{-1/2} e^{-x} / Γ(1/2): singular at the origin
        let gam = |x: f64| Ok((-0.5 * x.ln() - x - 0.5 * core::f64::consts::PI.ln(), 1.0));
        let (e, shift) = integrate_line(Line::Positive, &gam, 1e-13, 1e-12, 500).unwrap();
        assert_relative_eq!(e.value * shift.exp(), 1.0, epsilon = 1e-10);

        let uniform = |_x: f64| Ok((0.0, 1.0));
        let (e, shift) = integrate_line(Line::Unit, &uniform, 1e-13, 1e-12, 500).unwrap();
        assert_relative_eq!(e.value * shift.exp(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn mass_singular_at_one_is_recovered() {
        // Beta(2, ½): x (1 − x)^{-1/2} · 3/4, and its mean 4/5
        let beta = |x: f64| Ok((x.ln() - 0.5 * (-x).ln_1p() + 0.75f64.ln(), x));
        let (e, shift) = integrate_line(Line::Unit, &beta, 1e-13, 1e-12, 2000).unwrap();
        assert_relative_eq!(e.value * shift.exp(), 0.8, epsilon = 1e-10);
        let norm = |x: f64| Ok((x.ln() - 0.5 * (-x).ln_1p() + 0.75f64.ln(), 1.0));
        let (e, shift) = integrate_line(Line::Unit, &norm, 1e-13, 1e-12, 2000).unwrap();
        assert_relative_eq!(e.value * shift.exp(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn kink_at_origin_is_handled() {
        let laplace = |x: f64| Ok((-x.abs() - core::f64::consts::LN_2, x.abs()));
        let (e, shift) = integrate_line(Line::Real, &laplace, 1e-13, 1e-12, 500).unwrap();
        assert_relative_eq!(e.value * shift.exp(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn geometric_lattice_sum() {
        // Σ 2^{-(x+1)} = 1
        let t = |x: f64| Ok((-(x + 1.0) * core::f64::consts::LN_2, 1.0));
        let e = sum_lattice(&t, 1e-15, 1000).unwrap();
        assert_relative_eq!(e.value, 1.0, epsilon = 1e-14);
        assert!(e.error < 1e-15);
    }

    #[test]
    fn reports_non_convergence() {
        let mut f = |x: f64| Ok(1.0 / x.sqrt());
        assert!(matches!(
            integrate(&mut f, 0.0, 1.0, 1, 1e-15, 1e-15, 5),
            Err(Error::NonConvergent(_))
        ));
    }
}
