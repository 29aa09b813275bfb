//! Acceptance gate: one PASS/FAIL line per criterion.

use std::f64::consts::LN_2;
use std::process::ExitCode;
use std::sync::Arc;

use expfam_div::divergences::{
    bhattacharyya_coefficient, bhattacharyya_distance, cauchy_schwarz_gaussian, chernoff_information, jeffreys,
    jensen_shannon, jensen_shannon_mixture, kld, kld_entropy_moment, kld_limit, kld_logratio, Method,
};
use expfam_div::families::{
    Bernoulli, Beta, Dirichlet, Exponential, FixedCovGaussian, Gamma, Gaussian1d, InverseGaussian, Laplace,
    MixtureFamily, Mvn, Poisson, Rayleigh, Weibull, Wishart, ZeroMeanMvn,
};
use expfam_div::means::qam;
use expfam_div::oracle::{self, sampling::Substreams, Route};
use expfam_div::{Block, ExponentialFamily, OracleConfig, Param, SymMatrix};

type Fam = Box<dyn ExponentialFamily>;

struct Outcome {
    failures: Vec<String>,
    checks: usize,
}

impl Outcome {
    fn new() -> Self {
        Self {
            failures: Vec::new(),
            checks: 0,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn fail(&mut self, what: String) {
        self.checks += 1;
        self.failures.push(what);
    }
}

fn within(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn s(v: f64) -> Param {
    Param::source_scalars(&[v])
}

fn pairs(fam: &dyn ExponentialFamily, n: usize, seed: u64) -> Vec<(Param, Param)> {
    let mut rng = Substreams::new(seed).stream(0);
    (0..n)
        .map(|_| (fam.random_source(&mut rng), fam.random_source(&mut rng)))
        .collect()
}

fn mean_cov(p: &Param) -> (Vec<f64>, SymMatrix) {
    (p.vector(0).unwrap().to_vec(), p.matrix(1).unwrap().clone())
}

/// Published closed form of `D_KL[N(μ₁,Σ₁) : N(μ₂,Σ₂)]`.
fn kl_mvn(m1: &[f64], s1: &SymMatrix, m2: &[f64], s2: &SymMatrix) -> f64 {
    let inv2 = s2.inverse_spd().unwrap();
    let delta: Vec<f64> = m2.iter().zip(m1).map(|(a, b)| a - b).collect();
    0.5 * (inv2.frobenius_inner(s1) + inv2.quad_form(&delta) - m1.len() as f64 + s2.log_det_spd().unwrap()
        - s1.log_det_spd().unwrap())
}

/// Families of the coefficient regression.
fn regression_families() -> Vec<Fam> {
    vec![
        Box::new(Exponential::new()),
        Box::new(Poisson::new()),
        Box::new(Laplace::new()),
        Box::new(Weibull::new(1.0).unwrap()),
        Box::new(Weibull::new(2.0).unwrap()),
        Box::new(Weibull::new(3.0).unwrap()),
        Box::new(Rayleigh::new()),
        Box::new(Bernoulli::new()),
        Box::new(Gaussian1d::new()),
        Box::new(Gamma::new()),
        Box::new(Beta::new()),
        Box::new(Dirichlet::new(2).unwrap()),
        Box::new(Dirichlet::new(3).unwrap()),
        Box::new(Mvn::new(1)),
        Box::new(Mvn::new(2)),
        Box::new(Mvn::new(3)),
        Box::new(InverseGaussian::new()),
    ]
}

fn all_families() -> Vec<Fam> {
    let mut v = regression_families();
    v.push(Box::new(
        FixedCovGaussian::new(SymMatrix::from_lower(&[1.0, 0.3, 2.0]).unwrap()).unwrap(),
    ));
    v.push(Box::new(ZeroMeanMvn::new(2)));
    v.push(Box::new(Wishart::new(2)));
    v
}

fn label(fam: &dyn ExponentialFamily) -> String {
    let d = fam.descriptor();
    match d.id {
        "weibull" => format!("weibull(k={:?})", lookup_shape(fam)),
        "dirichlet" | "mvn" | "mvn_zero_mean" | "wishart" | "gaussian_fixed_cov" => {
            format!("{}(d={})", d.id, d.sample_dim)
        }
        id => id.to_string(),
    }
}

fn lookup_shape(fam: &dyn ExponentialFamily) -> f64 {
    // t(x) = −x^k, so k = log(−t(e)) at x = e
    let t = fam
        .sufficient_stat(&Block::Scalar(std::f64::consts::E))
        .unwrap()
        .components()[0];
    (-t).ln()
}

fn criterion_1() -> Outcome {
    const TOL_DETERMINISTIC: f64 = 1e-6;
    const SIGMAS: f64 = 3.0;
    let mut out = Outcome::new();
    for (fi, fam) in regression_families().iter().enumerate() {
        let fam = fam.as_ref();
        let mc = oracle::route(fam) == Route::MonteCarlo;
        for (pi, (a, b)) in pairs(fam, 50, 100 + fi as u64).iter().enumerate() {
            let cfg = OracleConfig::default()
                .with_seed(1_000 * fi as u64 + pi as u64)
                .with_samples(20_000);
            for &alpha in &[0.1, 0.5, 0.9] {
                let rho = match bhattacharyya_coefficient(fam, a, b, alpha, None) {
                    Ok(r) => r.value,
                    Err(e) => {
                        out.fail(format!("{} pair {pi}: {e}", label(fam)));
                        continue;
                    }
                };
                match oracle::integral_i(fam, a, b, alpha, 1.0 - alpha, &cfg) {
                    Ok(e) => {
                        let ok = if mc {
                            (e.value - rho).abs() <= SIGMAS * e.error
                        } else {
                            within(e.value, rho, TOL_DETERMINISTIC)
                        };
                        out.check(ok, || {
                            format!(
                                "{} pair {pi} α={alpha}: ρ {rho} vs oracle {} ± {:e}",
                                label(fam),
                                e.value,
                                e.error
                            )
                        });
                    }
                    Err(e) => out.fail(format!("{} pair {pi}: oracle {e}", label(fam))),
                }
            }
        }
    }
    let ex = bhattacharyya_coefficient(&Exponential::new(), &s(1.0), &s(3.0), 0.5, None)
        .unwrap()
        .value;
    out.check(within(ex, 3f64.sqrt() / 2.0, 1e-12), || {
        format!("exponential (1,3): {ex}")
    });
    let po = bhattacharyya_distance(&Poisson::new(), &s(1.0), &s(4.0), 0.5, None)
        .unwrap()
        .value;
    out.check(within(po, 0.5, 1e-12), || format!("Poisson (1,4) distance: {po}"));
    let wb = bhattacharyya_coefficient(&Weibull::new(2.0).unwrap(), &s(1.0), &s(2.0), 0.5, None)
        .unwrap()
        .value;
    out.check(within(wb, 0.8, 1e-12), || format!("Weibull k=2 (1,2): {wb}"));
    out
}

fn criterion_2() -> Outcome {
    const REL_TOL: f64 = 1e-9;
    let mut out = Outcome::new();
    for (fi, fam) in all_families().iter().enumerate() {
        let fam = fam.as_ref();
        let mut rng = Substreams::new(200 + fi as u64).stream(1);
        for (pi, (a, b)) in pairs(fam, 50, 200 + fi as u64).iter().enumerate() {
            let omegas: Vec<Block> = (0..5).map(|_| fam.random_support_point(&mut rng)).collect();
            for &alpha in &[0.1, 0.5, 0.9] {
                let vals: Vec<f64> = omegas
                    .iter()
                    .map(|w| bhattacharyya_coefficient(fam, a, b, alpha, Some(w)).unwrap().value)
                    .collect();
                let (lo, hi) = vals
                    .iter()
                    .fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
                out.check((hi - lo) / hi < REL_TOL, || {
                    format!("{} pair {pi} α={alpha}: ρ spans [{lo}, {hi}]", label(fam))
                });
            }
        }
    }
    out
}

fn criterion_3() -> Outcome {
    const TOL: f64 = 1e-10;
    let mut out = Outcome::new();
    let mut scalar_case = |fam: &dyn ExponentialFamily, name: &str, published: &dyn Fn(f64, f64) -> f64, seed: u64| {
        for (a, b) in pairs(fam, 100, seed) {
            let (x, y) = (a.scalar(0).unwrap(), b.scalar(0).unwrap());
            let m = qam(fam, 0.5, &a, &b).unwrap().scalar(0).unwrap();
            let p = published(x, y);
            out.check(within(m, p, TOL), || format!("{name} ({x}, {y}): {m} vs {p}"));
        }
    };
    scalar_case(&Exponential::new(), "arithmetic", &|x, y| (x + y) / 2.0, 301);
    scalar_case(&Poisson::new(), "geometric", &|x, y| (x * y).sqrt(), 302);
    scalar_case(&Laplace::new(), "harmonic", &|x, y| 2.0 * x * y / (x + y), 303);
    for k in [1.0, 2.0, 3.0] {
        let power = move |x: f64, y: f64| (0.5 * x.powf(-k) + 0.5 * y.powf(-k)).powf(-1.0 / k);
        scalar_case(&Weibull::new(k).unwrap(), "power", &power, 304 + k as u64);
    }
    scalar_case(
        &Bernoulli::new(),
        "Bernoulli",
        &|x, y| {
            let a = (x * y / ((1.0 - x) * (1.0 - y))).sqrt();
            a / (1.0 + a)
        },
        308,
    );

    let ig = InverseGaussian::new();
    for (a, b) in pairs(&ig, 100, 309) {
        let (m1, l1, m2, l2) = (
            a.scalar(0).unwrap(),
            a.scalar(1).unwrap(),
            b.scalar(0).unwrap(),
            b.scalar(1).unwrap(),
        );
        let mu = ((l1 + l2) * m1 * m1 * m2 * m2 / (l1 * m2 * m2 + l2 * m1 * m1)).sqrt();
        let lam = (l1 + l2) / 2.0;
        let m = qam(&ig, 0.5, &a, &b).unwrap();
        let (gm, gl) = (m.scalar(0).unwrap(), m.scalar(1).unwrap());
        out.check(within(gm, mu, TOL) && within(gl, lam, TOL), || {
            format!("inverse Gaussian: ({gm}, {gl}) vs ({mu}, {lam})")
        });
    }

    let wishart = Wishart::new(2);
    for (a, b) in pairs(&wishart, 100, 310) {
        let n = (a.scalar(0).unwrap() + b.scalar(0).unwrap()) / 2.0;
        let s1i = a.matrix(1).unwrap().inverse_spd().unwrap();
        let s2i = b.matrix(1).unwrap().inverse_spd().unwrap();
        let sm = s1i.lincomb(0.5, &s2i, 0.5).inverse_spd().unwrap();
        let m = qam(&wishart, 0.5, &a, &b).unwrap();
        let err = m
            .matrix(1)
            .unwrap()
            .sub(&sm)
            .max_abs()
            .max((m.scalar(0).unwrap() - n).abs());
        out.check(err <= TOL, || format!("Wishart mean off by {err:e}"));
    }

    for d in 1..=3 {
        let mvn = Mvn::new(d);
        for (a, b) in pairs(&mvn, 100, 310 + d as u64) {
            let ((m1, s1), (m2, s2)) = (mean_cov(&a), mean_cov(&b));
            let (i1, i2) = (s1.inverse_spd().unwrap(), s2.inverse_spd().unwrap());
            let sigma = i1.lincomb(0.5, &i2, 0.5).inverse_spd().unwrap();
            let rhs: Vec<f64> = i1
                .mul_vec(&m1)
                .iter()
                .zip(i2.mul_vec(&m2))
                .map(|(x, y)| 0.5 * x + 0.5 * y)
                .collect();
            let mu = sigma.mul_vec(&rhs);
            let m = qam(&mvn, 0.5, &a, &b).unwrap();
            let err = m
                .vector(0)
                .unwrap()
                .iter()
                .zip(&mu)
                .map(|(x, y)| (x - y).abs())
                .fold(m.matrix(1).unwrap().sub(&sigma).max_abs(), f64::max);
            out.check(err <= TOL, || format!("MVN d={d} mean off by {err:e}"));
        }
    }
    out
}

fn criterion_4() -> Outcome {
    const CROSS_REL: f64 = 1e-9;
    const LIMIT_ABS: f64 = 1e-5;
    const ORACLE_ABS: f64 = 1e-6;
    let mut out = Outcome::new();
    let cfg = OracleConfig::default();
    let cov2 = SymMatrix::from_lower(&[1.0, 0.3, 2.0]).unwrap();
    let families: Vec<Fam> = vec![
        Box::new(Exponential::new()),
        Box::new(Rayleigh::new()),
        Box::new(Gaussian1d::new()),
        Box::new(FixedCovGaussian::new(SymMatrix::identity(1).scale(0.7)).unwrap()),
        Box::new(FixedCovGaussian::new(cov2.clone()).unwrap()),
        Box::new(ZeroMeanMvn::new(1)),
        Box::new(ZeroMeanMvn::new(2)),
        Box::new(Mvn::new(1)),
        Box::new(Mvn::new(2)),
        Box::new(Gamma::new()),
        Box::new(Beta::new()),
    ];
    for (fi, fam) in families.iter().enumerate() {
        let fam = fam.as_ref();
        let name = label(fam);
        for (pi, (a, b)) in pairs(fam, 50, 400 + fi as u64).iter().enumerate() {
            let (lr, em, lim) = match (
                kld_logratio(fam, a, b),
                kld_entropy_moment(fam, a, b, None),
                kld_limit(fam, a, b, 1e-3, None),
            ) {
                (Ok(x), Ok(y), Ok(z)) => (x.value, y.value, z.value),
                (x, y, z) => {
                    out.fail(format!("{name} pair {pi}: {:?} {:?} {:?}", x.err(), y.err(), z.err()));
                    continue;
                }
            };
            out.check((lr - em).abs() <= CROSS_REL * (1.0 + em), || {
                format!("{name} pair {pi}: log-ratio {lr} vs entropy/moment {em}")
            });
            out.check(within(lim, em, LIMIT_ABS) && within(lim, lr, LIMIT_ABS), || {
                format!("{name} pair {pi}: limit {lim} vs {em}")
            });
            let reference = if oracle::route(fam) == Route::MonteCarlo {
                // two-dimensional Gaussian families: the published closed form
                let (m1, s1, m2, s2) = match fam.id() {
                    "gaussian_fixed_cov" => (
                        a.vector(0).unwrap().to_vec(),
                        cov2.clone(),
                        b.vector(0).unwrap().to_vec(),
                        cov2.clone(),
                    ),
                    "mvn_zero_mean" => (
                        vec![0.0; 2],
                        a.matrix(0).unwrap().clone(),
                        vec![0.0; 2],
                        b.matrix(0).unwrap().clone(),
                    ),
                    _ => {
                        let ((m1, s1), (m2, s2)) = (mean_cov(a), mean_cov(b));
                        (m1, s1, m2, s2)
                    }
                };
                kl_mvn(&m1, &s1, &m2, &s2)
            } else {
                match oracle::kld_quadrature(fam, a, b, &cfg) {
                    Ok(e) => e.value,
                    Err(e) => {
                        out.fail(format!("{name} pair {pi}: oracle {e}"));
                        continue;
                    }
                }
            };
            for (m, v) in [("log-ratio", lr), ("entropy/moment", em), ("limit", lim)] {
                out.check(within(v, reference, ORACLE_ABS), || {
                    format!("{name} pair {pi}: {m} {v} vs oracle {reference}")
                });
            }
        }
    }
    let spot: [(&dyn ExponentialFamily, Param, Param, f64, &str); 4] = [
        (&Exponential::new(), s(1.0), s(2.0), 1.0 - LN_2, "exponential (1,2)"),
        (&Poisson::new(), s(2.0), s(1.0), 2.0 * LN_2 - 1.0, "Poisson (2,1)"),
        (
            &Weibull::new(2.0).unwrap(),
            s(1.0),
            s(2.0),
            2.0 * LN_2 - 0.75,
            "Weibull k=2 (1,2)",
        ),
        (
            &Gaussian1d::new(),
            Param::source_scalars(&[0.0, 1.0]),
            Param::source_scalars(&[1.0, 1.0]),
            0.5,
            "Gaussian (0,1)→(1,1)",
        ),
    ];
    for (fam, a, b, want, name) in spot {
        let v = kld(fam, &a, &b).unwrap().value;
        out.check(within(v, want, 1e-12), || format!("{name}: {v} vs {want}"));
        let l = kld_limit(fam, &a, &b, 1e-3, None).unwrap().value;
        out.check(within(l, want, LIMIT_ABS), || format!("{name} limit: {l} vs {want}"));
    }
    out
}

fn criterion_5() -> Outcome {
    const STAT_ABS: f64 = 1e-10;
    const KL_ABS: f64 = 1e-9;
    let mut out = Outcome::new();
    for d in 1..=3usize {
        let mvn = Mvn::new(d);
        for (a, b) in pairs(&mvn, 67, 500 + d as u64) {
            let ((m1, s1), (m2, s2)) = (mean_cov(&a), mean_cov(&b));
            let pts = mvn.omega_points(&a).unwrap();
            out.check(pts.len() == 2 * d, || format!("d={d}: {} sigma points", pts.len()));
            let n = pts.len() as f64;
            let mut mean = vec![0.0; d];
            let mut second = vec![0.0; d * d];
            for p in &pts {
                let x = p.as_vector().unwrap();
                for i in 0..d {
                    mean[i] += x[i] / n;
                    for j in 0..d {
                        second[i * d + j] += x[i] * x[j] / n;
                    }
                }
            }
            let mut err = mean.iter().zip(&m1).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            for i in 0..d {
                for j in 0..d {
                    err = err.max((second[i * d + j] - (m1[i] * m1[j] + s1.get(i, j))).abs());
                }
            }
            out.check(err <= STAT_ABS, || format!("d={d}: sigma-point moments off by {err:e}"));
            let lr = kld_logratio(&mvn, &a, &b).unwrap().value;
            let cf = kl_mvn(&m1, &s1, &m2, &s2);
            out.check(within(lr, cf, KL_ABS), || {
                format!("d={d}: log-ratio KL {lr} vs closed form {cf}")
            });
        }
    }
    out
}

fn criterion_6() -> Outcome {
    const TOL: f64 = 1e-10;
    let mut out = Outcome::new();
    for (fi, fam) in all_families().iter().enumerate() {
        let fam = fam.as_ref();
        let name = label(fam);
        for (pi, (a, b)) in pairs(fam, 50, 600 + fi as u64).iter().enumerate() {
            let j = match jeffreys(fam, a, b) {
                Ok(j) => j.value,
                Err(e) => {
                    out.fail(format!("{name}: {e}"));
                    continue;
                }
            };
            out.check(j > 1e-12, || format!("{name} pair {pi}: Jeffreys {j}"));
            let ab = kld(fam, a, b).unwrap();
            let ba = kld(fam, b, a).unwrap();
            if ab.method != Method::Limit && ba.method != Method::Limit {
                let sum = ab.value + ba.value;
                out.check(within(j, sum, TOL), || {
                    format!("{name} pair {pi}: Jeffreys {j} vs KL sum {sum}")
                });
            }
        }
        let (a, _) = &pairs(fam, 1, 650 + fi as u64)[0];
        let j0 = jeffreys(fam, a, a).unwrap().value;
        out.check((0.0..=1e-12).contains(&j0), || {
            format!("{name}: Jeffreys at equal arguments {j0}")
        });
    }
    let j = jeffreys(&Exponential::new(), &s(1.0), &s(2.0)).unwrap().value;
    out.check(within(j, 0.5, 1e-14), || format!("exponential (1,2): {j}"));
    out
}

fn criterion_7() -> Outcome {
    const GRID_TOL: f64 = 1e-9;
    const ALPHA_TOL: f64 = 1e-6;
    let mut out = Outcome::new();
    for (fi, fam) in all_families().iter().enumerate() {
        let fam = fam.as_ref();
        let name = label(fam);
        for (pi, (a, b)) in pairs(fam, 20, 700 + fi as u64).iter().enumerate() {
            let c = chernoff_information(fam, a, b).unwrap();
            let db = bhattacharyya_distance(fam, a, b, 0.5, None).unwrap().value;
            out.check(c.value >= db - 1e-12, || {
                format!("{name} pair {pi}: Chernoff {} below D_B {db}", c.value)
            });
            let star = c.alpha_used.unwrap();
            out.check(star > 0.0 && star < 1.0, || format!("{name} pair {pi}: α* = {star}"));
            let w = fam.default_omega();
            let grid = (1..100_000)
                .map(|i| {
                    -bhattacharyya_coefficient(fam, a, b, i as f64 * 1e-5, Some(&w))
                        .unwrap()
                        .residual
                        .unwrap()
                })
                .fold(f64::NEG_INFINITY, f64::max);
            out.check(within(c.value, grid, GRID_TOL), || {
                format!("{name} pair {pi}: golden {} vs grid {grid}", c.value)
            });
        }
    }
    let cov = SymMatrix::from_lower(&[1.0, 0.3, 2.0]).unwrap();
    let fixed = FixedCovGaussian::new(cov).unwrap();
    for (pi, (a, b)) in pairs(&fixed, 20, 790).iter().enumerate() {
        let star = chernoff_information(&fixed, a, b).unwrap().alpha_used.unwrap();
        out.check(within(star, 0.5, ALPHA_TOL), || {
            format!("fixed-Σ Gaussian pair {pi}: α* = {star}")
        });
    }
    out
}

fn criterion_8() -> Outcome {
    const FAR_TOL: f64 = 1e-3;
    let mut out = Outcome::new();
    let g: Arc<dyn ExponentialFamily> = Arc::new(Gaussian1d::new());
    let far = jensen_shannon(
        g.clone(),
        &Param::source_scalars(&[0.0, 1.0]),
        &Param::source_scalars(&[40.0, 1.0]),
        &OracleConfig::default().with_samples(1_000_000),
    )
    .unwrap();
    out.check(within(far.value, LN_2, FAR_TOL), || {
        format!("separated unit Gaussians: {}", far.value)
    });

    let mix = MixtureFamily::of_family(
        g,
        vec![
            Param::source_scalars(&[-2.0, 1.0]),
            Param::source_scalars(&[0.5, 0.3]),
            Param::source_scalars(&[3.0, 2.0]),
        ],
    )
    .unwrap();
    let cfg = OracleConfig::default().with_samples(50_000);
    let mut rng = Substreams::new(800).stream(0);
    for i in 0..20 {
        let mut draw = || {
            let raw: Vec<f64> = (0..3)
                .map(|_| -expfam_div::oracle::sampling::uniform(&mut rng).ln())
                .collect();
            let t: f64 = raw.iter().sum();
            raw.iter().map(|v| v / t).collect::<Vec<f64>>()
        };
        let (w1, w2) = (draw(), draw());
        let j = jensen_shannon_mixture(&mix, &w1, &w2, &cfg.with_seed(800 + i)).unwrap();
        out.check((0.0..=LN_2).contains(&j.value), || {
            format!("weights pair {i}: JSD {}", j.value)
        });
        let same = jensen_shannon_mixture(&mix, &w1, &w1, &cfg.with_seed(900 + i)).unwrap();
        let se = same.residual.unwrap();
        out.check(same.value.abs() <= 3.0 * se, || {
            format!("equal weights {i}: JSD {} ± {se}", same.value)
        });
    }
    out
}

fn criterion_9() -> Outcome {
    const TOL: f64 = 1e-7;
    let mut out = Outcome::new();
    let mvn = Mvn::new(1);
    let cfg = OracleConfig::default();
    for (pi, (a, b)) in pairs(&mvn, 50, 900).iter().enumerate() {
        let cs = cauchy_schwarz_gaussian(a, b).unwrap().value;
        let cross = oracle::integral_i(&mvn, a, b, 1.0, 1.0, &cfg).unwrap().value;
        let n1 = oracle::integral_i(&mvn, a, a, 2.0, 0.0, &cfg).unwrap().value;
        let n2 = oracle::integral_i(&mvn, b, b, 2.0, 0.0, &cfg).unwrap().value;
        let q = -(cross / (n1 * n2).sqrt()).ln();
        out.check(within(cs, q, TOL), || {
            format!("pair {pi}: closed form {cs} vs quadrature {q}")
        });
        let zero = cauchy_schwarz_gaussian(a, a).unwrap().value;
        out.check(zero.abs() <= 1e-12, || {
            format!("pair {pi}: identical arguments give {zero}")
        });
    }
    out
}

fn criterion_10() -> Outcome {
    const SIGMAS: f64 = 3.0;
    let mut out = Outcome::new();
    let mvn = Mvn::new(2);
    // The estimator's variance is finite only when 2Σ₂⁻¹ − Σ₁⁻¹ is positive
    // definite, so the first random pair meeting that condition is used.
    let (a, b) = pairs(&mvn, 100, 1000)
        .into_iter()
        .find(|(a, b)| {
            let (i1, i2) = (
                a.matrix(1).unwrap().inverse_spd().unwrap(),
                b.matrix(1).unwrap().inverse_spd().unwrap(),
            );
            i2.lincomb(2.0, &i1, -1.0).is_spd()
        })
        .expect("a pair with finite estimator variance");
    let cfg = OracleConfig::default().with_samples(1_000_000);
    let first = oracle::kld_monte_carlo(&mvn, &a, &b, &cfg).unwrap();
    let second = oracle::kld_monte_carlo(&mvn, &a, &b, &cfg).unwrap();
    out.check(
        first.value.to_bits() == second.value.to_bits() && first.error.to_bits() == second.error.to_bits(),
        || format!("reruns differ: {} vs {}", first.value, second.value),
    );
    let ((m1, s1), (m2, s2)) = (mean_cov(&a), mean_cov(&b));
    let exact = kl_mvn(&m1, &s1, &m2, &s2);
    out.check((first.value - exact).abs() <= SIGMAS * first.error, || {
        format!("estimate {} ± {:e} vs closed form {exact}", first.value, first.error)
    });
    out
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("closed-form Bhattacharyya coefficient vs oracle integral", criterion_1),
        ("ω-invariance of the coefficient", criterion_2),
        ("published quasi-arithmetic means", criterion_3),
        ("KL cross-method agreement and oracle", criterion_4),
        ("sigma-point identity and Gaussian KL", criterion_5),
        ("Jeffreys as symmetrized KL", criterion_6),
        ("Chernoff information vs grid search", criterion_7),
        ("mixture Jensen-Shannon divergence", criterion_8),
        ("Cauchy-Schwarz Gaussian divergence vs quadrature", criterion_9),
        ("Monte Carlo extended KL for bivariate normals", criterion_10),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let o = run();
        let ok = o.failures.is_empty();
        all &= ok;
        println!(
            "{} {:>2}: {name} ({} checks, {} failed, {:.1}s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            o.checks,
            o.failures.len(),
            start.elapsed().as_secs_f64()
        );
        for f in o.failures.iter().take(10) {
            println!("        {f}");
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
