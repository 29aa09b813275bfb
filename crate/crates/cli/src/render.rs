//! CSV and JSON rendering with 12 significant digits.

use expfam_div::{Block, DivergenceResult};
use serde::Serialize;

use crate::eval::{Grid, PairResult};
use crate::job::Job;

const DIGITS: usize = 12;

/// `%.12g`-style formatting: fixed notation for moderate exponents, trailing
/// zeros trimmed.
pub fn sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..DIGITS as i32).contains(&exp) {
        let decimals = (DIGITS as i32 - 1 - exp).max(0) as usize;
        trim(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim(mantissa.to_string()))
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// `v` rounded to 12 significant digits (for JSON numbers).
pub fn round(v: f64) -> f64 {
    if v.is_finite() {
        format!("{:.*e}", DIGITS - 1, v).parse().expect("own formatting parses")
    } else {
        v
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(sig).unwrap_or_default()
}

fn csv_text(rows: Vec<Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(vec![]);
    for r in rows {
        w.write_record(&r).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 input")
}

pub fn compute_csv(job: &Job, results: &[PairResult]) -> String {
    let mut rows = vec![["measure", "a", "b", "value", "method", "alpha_used", "residual"]
        .map(String::from)
        .to_vec()];
    for r in results {
        rows.push(vec![
            job.measures[r.measure].label.clone(),
            job.names[r.a].clone(),
            job.names[r.b].clone(),
            sig(r.result.value),
            r.result.method.as_str().into(),
            opt(r.result.alpha_used),
            opt(r.result.residual),
        ]);
    }
    csv_text(rows)
}

/// One block per measure: header `label,n₁,n₂,…`, then `nᵢ,D[nᵢ:n₁],…`.
/// Blocks are separated by an empty line.
pub fn matrix_csv(job: &Job, grids: &[Grid]) -> String {
    let n = job.names.len();
    grids
        .iter()
        .map(|g| {
            let mut rows = vec![std::iter::once(job.measures[g.measure].label.clone())
                .chain(job.names.iter().cloned())
                .collect()];
            for i in 0..n {
                rows.push(
                    std::iter::once(job.names[i].clone())
                        .chain((0..n).map(|j| sig(g.cells[i * n + j].value)))
                        .collect(),
                );
            }
            csv_text(rows)
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// JSON form of a sample point; matrices as row-major lower triangles.
#[derive(Serialize)]
#[serde(untagged)]
enum Point {
    Scalar(f64),
    List(Vec<f64>),
}

fn point(b: &Block) -> Point {
    match b {
        Block::Scalar(v) => Point::Scalar(round(*v)),
        Block::Vector(v) => Point::List(v.iter().copied().map(round).collect()),
        Block::Matrix(m) => Point::List(m.to_lower().into_iter().map(round).collect()),
    }
}

#[derive(Serialize)]
struct ResultJson {
    value: f64,
    method: &'static str,
    alpha_used: Option<f64>,
    omega_used: Option<Vec<Point>>,
    residual: Option<f64>,
}

fn result_json(r: &DivergenceResult) -> ResultJson {
    ResultJson {
        value: round(r.value),
        method: r.method.as_str(),
        alpha_used: r.alpha_used.map(round),
        omega_used: r.omega_used.as_ref().map(|w| w.iter().map(point).collect()),
        residual: r.residual.map(round),
    }
}

#[derive(Serialize)]
struct PairJson<'a> {
    measure: &'a str,
    a: &'a str,
    b: &'a str,
    #[serde(flatten)]
    result: ResultJson,
}

#[derive(Serialize)]
struct GridJson<'a> {
    measure: &'a str,
    names: &'a [String],
    cells: Vec<Vec<ResultJson>>,
}

pub fn compute_json(job: &Job, results: &[PairResult]) -> String {
    let rows: Vec<PairJson> = results
        .iter()
        .map(|r| PairJson {
            measure: &job.measures[r.measure].label,
            a: &job.names[r.a],
            b: &job.names[r.b],
            result: result_json(&r.result),
        })
        .collect();
    let body = serde_json::json!({ "family": job.family.id(), "results": rows });
    serde_json::to_string_pretty(&body).expect("serializable") + "\n"
}

pub fn matrix_json(job: &Job, grids: &[Grid]) -> String {
    let n = job.names.len();
    let out: Vec<GridJson> = grids
        .iter()
        .map(|g| GridJson {
            measure: &job.measures[g.measure].label,
            names: &job.names,
            cells: g
                .cells
                .chunks(n)
                .map(|row| row.iter().map(result_json).collect())
                .collect(),
        })
        .collect();
    let body = serde_json::json!({ "family": job.family.id(), "matrices": out });
    serde_json::to_string_pretty(&body).expect("serializable") + "\n"
}
