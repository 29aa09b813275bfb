//! Evaluation of measures over pairs and grids.

use expfam_div::divergences::{
    alpha_divergence, bhattacharyya_coefficient, bhattacharyya_distance, cauchy_schwarz_gaussian, chernoff_information,
    hellinger, jeffreys, jensen_shannon, kld_with,
};
use expfam_div::{Block, DivergenceResult, Param, Result, SymMatrix};
use rayon::prelude::*;

use crate::error::CliError;
use crate::job::{Job, Measure, MeasureKind};

/// Relative tolerance of the symmetry check on deterministic symmetric measures.
const SYMMETRY_TOL: f64 = 1e-9;

pub struct PairResult {
    pub measure: usize,
    pub a: usize,
    pub b: usize,
    pub result: DivergenceResult,
}

pub struct Grid {
    pub measure: usize,
    /// Row-major, `cells[i * n + j] = D[names[i] : names[j]]`.
    pub cells: Vec<DivergenceResult>,
}

/// `(mean vector, covariance)` form of a univariate normal.
fn as_mvn(p: &Param) -> Result<Param> {
    let (m, v) = (p.scalar(0)?, p.scalar(1)?);
    Ok(Param::source(vec![
        Block::Vector(vec![m]),
        Block::Matrix(SymMatrix::diagonal(&[v])),
    ]))
}

fn raw(job: &Job, m: &Measure, a: &Param, b: &Param) -> Result<DivergenceResult> {
    let fam = job.family.as_ref();
    let w = m.omega.as_ref();
    match m.kind {
        MeasureKind::Bhat => bhattacharyya_coefficient(fam, a, b, m.alpha, w),
        MeasureKind::BhatDistance => bhattacharyya_distance(fam, a, b, m.alpha, w),
        MeasureKind::Hellinger => hellinger(fam, a, b, w),
        MeasureKind::Alpha => alpha_divergence(fam, a, b, m.alpha, w),
        MeasureKind::Chernoff => chernoff_information(fam, a, b),
        MeasureKind::Kl => kld_with(fam, a, b, m.kl, w, &m.cfg),
        MeasureKind::Jeffreys => jeffreys(fam, a, b),
        MeasureKind::Jsd => jensen_shannon(job.family.clone(), a, b, &m.cfg),
        MeasureKind::Cs if fam.id() == "gaussian1d" => cauchy_schwarz_gaussian(&as_mvn(a)?, &as_mvn(b)?),
        MeasureKind::Cs => cauchy_schwarz_gaussian(a, b),
    }
}

pub fn evaluate(job: &Job, k: usize, i: usize, j: usize) -> std::result::Result<DivergenceResult, CliError> {
    let m = &job.measures[k];
    raw(job, m, &job.params[i], &job.params[j]).map_err(|e| {
        CliError::from_library(
            &format!("measures[{k}] ({}, {} : {})", m.label, job.names[i], job.names[j]),
            &e,
        )
    })
}

/// Every measure on every requested pair, in job order.
pub fn compute(job: &Job) -> std::result::Result<Vec<PairResult>, CliError> {
    let tasks: Vec<(usize, usize, usize)> = (0..job.measures.len())
        .flat_map(|k| job.pairs.iter().map(move |&(a, b)| (k, a, b)))
        .collect();
    tasks
        .par_iter()
        .map(|&(k, a, b)| {
            evaluate(job, k, a, b).map(|result| PairResult {
                measure: k,
                a,
                b,
                result,
            })
        })
        .collect()
}

/// One square grid per measure. Cells are evaluated in parallel; the output
/// order does not depend on scheduling.
pub fn matrix(job: &Job) -> std::result::Result<Vec<Grid>, CliError> {
    let n = job.names.len();
    (0..job.measures.len())
        .map(|k| {
            let m = &job.measures[k];
            // Monte Carlo cells are computed once per unordered pair.
            let mirror = m.kind == MeasureKind::Jsd;
            let mut cells: Vec<Option<DivergenceResult>> = (0..n * n)
                .into_par_iter()
                .map(|c| {
                    let (i, j) = (c / n, c % n);
                    if mirror && j < i {
                        Ok(None)
                    } else {
                        evaluate(job, k, i, j).map(Some)
                    }
                })
                .collect::<std::result::Result<_, _>>()?;
            for i in 0..n {
                for j in 0..i {
                    let upper = cells[j * n + i].clone().expect("upper triangle is computed");
                    match &cells[i * n + j] {
                        None => cells[i * n + j] = Some(upper),
                        Some(lower) if m.symmetric() => {
                            let (x, y) = (upper.value, lower.value);
                            if (x - y).abs() > SYMMETRY_TOL * (1.0 + x.abs().max(y.abs())) {
                                return Err(CliError::numeric(format!(
                                    "measures[{k}] ({}): asymmetric result {x} vs {y} for {} and {}",
                                    m.label, job.names[j], job.names[i]
                                )));
                            }
                            cells[i * n + j] = Some(DivergenceResult {
                                value: x,
                                ..lower.clone()
                            });
                        }
                        Some(_) => {}
                    }
                }
            }
            Ok(Grid {
                measure: k,
                cells: cells.into_iter().map(|c| c.expect("every cell is filled")).collect(),
            })
        })
        .collect()
}
