//! Invariant suites run per family against the oracle.
//!
//! Each check draws random parameters from the family's moderate region,
//! compares a closed form with an independent route, and reports the worst
//! discrepancy seen together with the tolerance it was held to.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::divergences::{bhattacharyya_coefficient, kld_entropy_moment, kld_limit, kld_logratio};
use crate::error::{Error, Result};
use crate::family::ExponentialFamily;
use crate::oracle::{self, sampling::Substreams, OracleConfig, Route};
use crate::param::{Block, Param};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub family: &'static str,
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed discrepancy, in the units of the tolerance.
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Random parameters per check.
    pub trials: usize,
    pub mc_samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: oracle::DEFAULT_SEED,
            trials: 8,
            mc_samples: 40_000,
        }
    }
}

struct Tally {
    family: &'static str,
    name: &'static str,
    tolerance: f64,
    worst: f64,
    skipped: Option<String>,
    failed: Option<String>,
}

impl Tally {
    fn new(family: &'static str, name: &'static str, tolerance: f64) -> Self {
        Self {
            family,
            name,
            tolerance,
            worst: 0.0,
            skipped: None,
            failed: None,
        }
    }

    /// Record a discrepancy; NaN counts as a failure.
    fn see(&mut self, err: f64, context: impl FnOnce() -> String) {
        if !(err <= self.worst) {
            self.worst = if err.is_nan() { f64::INFINITY } else { err };
        }
        if !(err <= self.tolerance) && self.failed.is_none() {
            self.failed = Some(context());
        }
    }

    fn error(&mut self, e: Error) {
        if self.failed.is_none() {
            self.failed = Some(format!("error: {e}"));
        }
        self.worst = f64::INFINITY;
    }

    fn finish(self) -> Check {
        let passed = self.failed.is_none();
        let detail = self.failed.or(self.skipped).unwrap_or_default();
        Check {
            family: self.family,
            name: self.name,
            passed,
            worst: self.worst,
            tolerance: self.tolerance,
            detail,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + b.abs())
}

/// Run every applicable invariant for one family.
pub fn verify_family(fam: &dyn ExponentialFamily, cfg: &VerifyConfig) -> Vec<Check> {
    let streams = Substreams::new(cfg.seed);
    let mut rng = streams.stream(0);
    let params: Vec<Param> = (0..cfg.trials.max(2)).map(|_| fam.random_source(&mut rng)).collect();
    let mc = oracle::route(fam) == Route::MonteCarlo;
    // Pairs for the divergence checks. Sampled routes pair each member with
    // the natural midpoint toward the next one, which keeps the second moment
    // of the density ratio finite.
    let pairs: Vec<(Param, Param)> = params
        .chunks(2)
        .filter(|c| c.len() == 2)
        .map(|c| {
            let b = if mc {
                crate::means::qam(fam, 0.5, &c[0], &c[1]).unwrap_or_else(|_| c[1].clone())
            } else {
                c[1].clone()
            };
            (c[0].clone(), b)
        })
        .collect();
    let points: Vec<Block> = (0..5).map(|_| fam.random_support_point(&mut rng)).collect();
    let ocfg = OracleConfig::default()
        .with_seed(cfg.seed)
        .with_samples(cfg.mc_samples.max(1000));
    let id = fam.id();
    let caps = fam.descriptor().caps;
    let mut out = Vec::new();

    // λ → θ → λ and θ → λ → θ
    let mut t = Tally::new(id, "round_trip", 1e-12);
    for p in &params {
        match fam.to_natural(p).and_then(|th| Ok((fam.to_source(&th)?, th))) {
            Ok((back, th)) => {
                let e = p
                    .components()
                    .iter()
                    .zip(back.components())
                    .map(|(a, b)| rel(b, *a))
                    .fold(0.0, f64::max);
                t.see(e, || format!("λ round trip off by {e:e}"));
                match fam.to_natural(&back) {
                    Ok(th2) => {
                        let e = th
                            .components()
                            .iter()
                            .zip(th2.components())
                            .map(|(a, b)| rel(b, *a))
                            .fold(0.0, f64::max);
                        t.see(e, || format!("θ round trip off by {e:e}"));
                    }
                    Err(e) => t.error(e),
                }
            }
            Err(e) => t.error(e),
        }
    }
    out.push(t.finish());

    // F̂(ω) constant in ω
    let mut t = Tally::new(id, "implicit_cumulant", 1e-10);
    for p in &params {
        let vals: Result<Vec<f64>> = points.iter().map(|w| fam.implicit_cumulant(p, w)).collect();
        match vals {
            Ok(v) => {
                let e = v.iter().map(|x| rel(*x, v[0])).fold(0.0, f64::max);
                t.see(e, || format!("F̂ varies by {e:e} across support points"));
            }
            Err(e) => t.error(e),
        }
    }
    out.push(t.finish());

    let route = oracle::route(fam);
    // thresholds in absolute units for deterministic routes, or in standard errors for MC
    let name_tol = match route {
        Route::Summation => 1e-10,
        Route::Quadrature => 1e-8,
        Route::MonteCarlo => 3.0,
    };

    let mut t = Tally::new(id, "normalization", name_tol);
    for (i, p) in params.iter().enumerate() {
        let e = if mc {
            // importance sampling through a different member
            let other = &params[(i + 1) % params.len()];
            oracle::integral_i(fam, p, other, 1.0, 0.0, &ocfg)
        } else {
            oracle::normalization(fam, p, &ocfg)
        };
        match e {
            Ok(e) => {
                let d = if mc {
                    (e.value - 1.0).abs() / e.error.max(1e-300)
                } else {
                    (e.value - 1.0).abs()
                };
                t.see(d, || format!("total mass {}", e.value));
            }
            Err(e) => t.error(e),
        }
    }
    out.push(t.finish());

    if caps.has_moment {
        let mut t = Tally::new(id, "moment", if mc { 3.0 } else { 1e-7 });
        for p in &params {
            let eta = match fam.moment(p) {
                Ok(m) => m.components(),
                Err(e) => {
                    t.error(e);
                    continue;
                }
            };
            if mc {
                match oracle::sufficient_stat_monte_carlo(fam, p, &ocfg) {
                    Ok(est) => {
                        for (j, (e, m)) in est.iter().zip(&eta).enumerate() {
                            let z = (e.value - m).abs() / e.error.max(1e-300);
                            t.see(z, || format!("component {j}: {} vs {m} ({z:.2}σ)", e.value));
                        }
                    }
                    Err(e) => t.error(e),
                }
            } else {
                for j in 0..eta.len() {
                    let g = |x: &Block| -> Result<f64> { Ok(fam.sufficient_stat(x)?.components()[j]) };
                    match oracle::expectation(fam, p, &g, &ocfg) {
                        Ok(e) => {
                            let d = rel(e.value, eta[j]);
                            t.see(d, || format!("component {j}: {} vs {}", e.value, eta[j]));
                        }
                        Err(e) => t.error(e),
                    }
                }
            }
        }
        out.push(t.finish());
    }

    if caps.has_entropy {
        let mut t = Tally::new(id, "entropy", if mc { 3.0 } else { 1e-7 });
        for p in &params {
            match (fam.entropy(p), oracle::entropy(fam, p, &ocfg)) {
                (Ok(h), Ok(e)) => {
                    let d = if mc {
                        (e.value - h).abs() / e.error.max(1e-300)
                    } else {
                        rel(e.value, h)
                    };
                    t.see(d, || format!("entropy {h} vs oracle {}", e.value));
                }
                (Err(e), _) | (_, Err(e)) => t.error(e),
            }
        }
        out.push(t.finish());
    }

    if caps.has_carrier_expectation {
        let mut t = Tally::new(id, "carrier_expectation", if mc { 3.0 } else { 1e-7 });
        for p in &params {
            let g = |x: &Block| fam.carrier(x);
            match (fam.carrier_expectation(p), oracle::expectation(fam, p, &g, &ocfg)) {
                (Ok(k), Ok(e)) => {
                    let d = if mc {
                        if e.error == 0.0 {
                            (e.value - k).abs() * 1e12
                        } else {
                            (e.value - k).abs() / e.error
                        }
                    } else {
                        rel(e.value, k)
                    };
                    t.see(d, || format!("E[k] {k} vs oracle {}", e.value));
                }
                (Err(e), _) | (_, Err(e)) => t.error(e),
            }
        }
        out.push(t.finish());
    }

    // ∇F = η through a centered difference of F̂ in θ
    if fam.descriptor().order == 1 && caps.has_moment {
        let mut t = Tally::new(id, "gradient", 1e-4);
        let w = fam.default_omega();
        for p in &params {
            let res = (|| -> Result<(f64, f64)> {
                let th = fam.to_natural(p)?.scalar(0)?;
                let f_hat = |x: f64| -> Result<f64> {
                    let src = fam.to_source(&Param::natural(vec![Block::Scalar(x)]))?;
                    fam.implicit_cumulant(&src, &w)
                };
                let h = 1e-5;
                let fd = (f_hat(th + h)? - f_hat(th - h)?) / (2.0 * h);
                Ok((fd, fam.moment(p)?.scalar(0)?))
            })();
            match res {
                Ok((fd, eta)) => {
                    let d = (fd - eta).abs() / eta.abs().max(1e-12);
                    t.see(d, || format!("finite difference {fd} vs moment {eta}"));
                }
                Err(e) => t.error(e),
            }
        }
        out.push(t.finish());
    }

    if caps.has_omega_solver {
        let mut t = Tally::new(id, "omega_points", 1e-10);
        for p in &params {
            let res = (|| -> Result<f64> {
                let pts = fam.omega_points(p)?;
                let mut acc = fam.sufficient_stat(&pts[0])?;
                for w in &pts[1..] {
                    fam.descriptor().support.check(w)?;
                    acc = acc.lincomb(1.0, &fam.sufficient_stat(w)?, 1.0);
                }
                let s = pts.len() as f64;
                let eta = fam.moment(p)?.components();
                Ok(acc
                    .components()
                    .iter()
                    .zip(&eta)
                    .map(|(a, e)| (a / s - e).abs() / (1.0 + e.abs()))
                    .fold(0.0, f64::max))
            })();
            match res {
                Ok(d) => t.see(d, || format!("mean statistic off by {d:e}")),
                Err(Error::DegenerateSolution(_)) => {}
                Err(e) => t.error(e),
            }
        }
        out.push(t.finish());
    }

    // ρ_α independent of ω, and equal to the oracle integral
    let mut inv = Tally::new(id, "bhattacharyya_omega_invariance", 1e-9);
    let mut orc = Tally::new(id, "bhattacharyya_oracle", if mc { 3.0 } else { 1e-6 });
    for (a, b) in &pairs {
        for &alpha in &[0.1, 0.5, 0.9] {
            let vals: Result<Vec<f64>> = points
                .iter()
                .map(|w| bhattacharyya_coefficient(fam, a, b, alpha, Some(w)).map(|r| r.value))
                .collect();
            match vals {
                Ok(v) => {
                    let e = v.iter().map(|x| (x - v[0]).abs() / v[0]).fold(0.0, f64::max);
                    inv.see(e, || format!("α = {alpha}: ρ varies by {e:e}"));
                    match oracle::integral_i(fam, a, b, alpha, 1.0 - alpha, &ocfg) {
                        Ok(e) => {
                            let d = if mc {
                                (e.value - v[0]).abs() / e.error.max(1e-300)
                            } else {
                                (e.value - v[0]).abs()
                            };
                            orc.see(d, || format!("α = {alpha}: ρ {} vs oracle {}", v[0], e.value));
                        }
                        Err(e) => orc.error(e),
                    }
                }
                Err(e) => inv.error(e),
            }
        }
    }
    out.push(inv.finish());
    out.push(orc.finish());

    // KL: every available closed route against each other and the oracle
    let mut t = Tally::new(id, "kl_cross_method", 1e-9);
    let mut lim = Tally::new(id, "kl_limit", 1e-5);
    let mut kq = Tally::new(id, "kl_oracle", if mc { 3.0 } else { 1e-6 });
    for (a, b) in &pairs {
        let lr = kld_logratio(fam, a, b).map(|r| r.value);
        let em = kld_entropy_moment(fam, a, b, None).map(|r| r.value);
        let reference = match (&lr, &em) {
            (Ok(x), Ok(y)) => {
                let d = (x - y).abs() / (1.0 + y.abs());
                t.see(d, || format!("log-ratio {x} vs entropy/moment {y}"));
                Some(*y)
            }
            (Ok(x), _) => Some(*x),
            (_, Ok(y)) => Some(*y),
            _ => None,
        };
        match kld_limit(fam, a, b, 1e-3, None) {
            Ok(l) => {
                if let Some(r) = reference {
                    lim.see((l.value - r).abs(), || format!("limit {} vs {r}", l.value));
                }
                let reference = reference.unwrap_or(l.value);
                let o = if mc {
                    oracle::kld_monte_carlo(fam, a, b, &ocfg)
                } else {
                    oracle::kld_quadrature(fam, a, b, &ocfg)
                };
                match o {
                    Ok(e) => {
                        let d = if mc {
                            (e.value - reference).abs() / e.error.max(1e-300)
                        } else {
                            (e.value - reference).abs()
                        };
                        kq.see(d, || format!("KL {reference} vs oracle {}", e.value));
                    }
                    Err(e) => kq.error(e),
                }
            }
            Err(e) => lim.error(e),
        }
    }
    if caps.has_omega_solver && caps.has_entropy && caps.has_carrier_expectation {
        out.push(t.finish());
    }
    out.push(lim.finish());
    out.push(kq.finish());
    out
}

/// Every family in the catalog.
pub fn verify_all(cfg: &VerifyConfig) -> Vec<Check> {
    crate::families::catalog()
        .iter()
        .flat_map(|e| verify_family(e.family.as_ref(), cfg))
        .collect()
}
