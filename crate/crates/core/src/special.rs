//! Special functions used by the closed-form moments and entropies.

#[allow(unused_imports)]
use num_traits::Float;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

pub const LN_2PI: f64 = 1.837_877_066_409_345_5;

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `log x!` for a nonnegative integer-valued `x`.
pub fn ln_factorial(x: f64) -> f64 {
    libm::lgamma(x + 1.0)
}

/// Digamma ψ(x) for x > 0: upward recurrence then the asymptotic series.
pub fn digamma(mut x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NAN;
    }
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // Bernoulli terms B_{2k} / (2k x^{2k}), k = 1..7
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    acc + x.ln() - 0.5 * inv - series
}

/// `log B(a)` for the multivariate Beta function `Π Γ(aᵢ) / Γ(Σ aᵢ)`.
pub fn ln_beta(a: &[f64]) -> f64 {
    a.iter().map(|&v| ln_gamma(v)).sum::<f64>() - ln_gamma(a.iter().sum())
}

/// Log of the multivariate gamma function Γ_d(x).
pub fn ln_multi_gamma(d: usize, x: f64) -> f64 {
    let dd = d as f64;
    dd * (dd - 1.0) / 4.0 * core::f64::consts::PI.ln()
        + (1..=d).map(|j| ln_gamma(x + (1.0 - j as f64) / 2.0)).sum::<f64>()
}

/// Multivariate digamma ψ_d(x) = Σ_{j=1}^{d} ψ(x + (1−j)/2).
pub fn multi_digamma(d: usize, x: f64) -> f64 {
    (1..=d).map(|j| digamma(x + (1.0 - j as f64) / 2.0)).sum()
}

/// `log(eᵃ + eᵇ)`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `log Σ exp(xᵢ)`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

pub fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn digamma_reference_values() {
        assert_relative_eq!(digamma(1.0), -EULER_GAMMA, epsilon = 1e-15);
        assert_relative_eq!(digamma(2.0), 1.0 - EULER_GAMMA, epsilon = 1e-15);
        assert_relative_eq!(
            digamma(0.5),
            -EULER_GAMMA - 2.0 * core::f64::consts::LN_2,
            epsilon = 1e-14
        );
        // ψ(x+1) = ψ(x) + 1/x
        for &x in &[0.01, 0.3, 1.7, 12.5, 250.0] {
            assert_relative_eq!(digamma(x + 1.0), digamma(x) + 1.0 / x, max_relative = 1e-13);
        }
    }

    #[test]
    fn digamma_is_derivative_of_ln_gamma() {
        for &x in &[0.4, 1.3, 3.0, 7.25, 40.0] {
            let h = 1e-5;
            let fd = (ln_gamma(x + h) - ln_gamma(x - h)) / (2.0 * h);
            assert_relative_eq!(digamma(x), fd, max_relative = 1e-8);
        }
    }

    #[test]
    fn multivariate_gamma_reduces_to_gamma() {
        assert_relative_eq!(ln_multi_gamma(1, 2.5), ln_gamma(2.5), epsilon = 1e-15);
        assert_relative_eq!(multi_digamma(1, 2.5), digamma(2.5), epsilon = 1e-15);
        // Γ_2(x) = √π Γ(x) Γ(x − ½)
        let x = 3.2;
        let expected = 0.5 * core::f64::consts::PI.ln() + ln_gamma(x) + ln_gamma(x - 0.5);
        assert_relative_eq!(ln_multi_gamma(2, x), expected, epsilon = 1e-14);
    }

    #[test]
    fn log_add_exp_handles_extremes() {
        assert_relative_eq!(log_add_exp(0.0, 0.0), core::f64::consts::LN_2, epsilon = 1e-16);
        assert_eq!(log_add_exp(f64::NEG_INFINITY, -3.0), -3.0);
        assert_relative_eq!(log_add_exp(-1000.0, -1000.0), -1000.0 + core::f64::consts::LN_2);
        assert_relative_eq!(
            log_sum_exp(&[1.0, 2.0, 3.0]),
            (1f64.exp() + 2f64.exp() + 3f64.exp()).ln()
        );
    }

    #[test]
    fn logistic_inverts_logit() {
        for &p in &[1e-6, 0.2, 0.5, 0.8, 1.0 - 1e-9] {
            assert_relative_eq!(logistic(logit(p)), p, max_relative = 1e-9);
        }
    }
}
