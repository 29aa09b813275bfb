//! Job files: the serialized schema and its validation into evaluable form.

use std::collections::BTreeMap;
use std::sync::Arc;

use expfam_div::divergences::KlMethod;
use expfam_div::families::family_ids;
use expfam_div::oracle::DEFAULT_SEED;
use expfam_div::{lookup, Block, BlockShape, ExponentialFamily, FamilyOptions, OracleConfig, Param, Sample, SymMatrix};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SEED_ENV: &str = "EXPFAM_DIV_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family_options: Option<FamilyOptionsSpec>,
    pub densities: Vec<DensitySpec>,
    pub measures: Vec<MeasureSpec>,
    /// Ordered pairs evaluated by `compute`; all `i < j` pairs when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<(String, String)>>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyOptionsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Row-major lower triangle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covariance: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySpec {
    pub name: String,
    /// Source parameters keyed by name; matrices as row-major lower triangles.
    pub params: BTreeMap<String, Value>,
}

/// A scalar, a vector, or a packed symmetric matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Scalar(f64),
    List(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    Bhat,
    BhatDistance,
    Hellinger,
    Alpha,
    Chernoff,
    Kl,
    Jeffreys,
    Jsd,
    Cs,
}

impl MeasureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MeasureKind::Bhat => "bhat",
            MeasureKind::BhatDistance => "bhat_distance",
            MeasureKind::Hellinger => "hellinger",
            MeasureKind::Alpha => "alpha",
            MeasureKind::Chernoff => "chernoff",
            MeasureKind::Kl => "kl",
            MeasureKind::Jeffreys => "jeffreys",
            MeasureKind::Jsd => "jsd",
            MeasureKind::Cs => "cs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KlMethodSpec {
    Auto,
    LogRatio,
    EntropyMoment,
    Limit,
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub kind: MeasureKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<KlMethodSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSpec>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_subdivisions: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_mass_cutoff: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: Format,
    /// Standard output when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

/// Parse a job file, reporting the JSON path of the first offending field.
pub fn parse(text: &str) -> Result<JobSpec, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." || path == "?" {
            "$".to_string()
        } else {
            path
        };
        CliError::input(path, e.into_inner().to_string())
    })
}

/// A measure with every option resolved.
#[derive(Debug, Clone)]
pub struct Measure {
    pub kind: MeasureKind,
    pub label: String,
    pub alpha: f64,
    pub kl: KlMethod,
    pub omega: Option<Sample>,
    pub cfg: OracleConfig,
}

impl Measure {
    /// Whether `D(a, b) = D(b, a)` holds exactly in exact arithmetic.
    pub fn symmetric(&self) -> bool {
        match self.kind {
            MeasureKind::Hellinger
            | MeasureKind::Chernoff
            | MeasureKind::Jeffreys
            | MeasureKind::Jsd
            | MeasureKind::Cs => true,
            MeasureKind::Bhat | MeasureKind::BhatDistance | MeasureKind::Alpha => self.alpha == 0.5,
            MeasureKind::Kl => false,
        }
    }
}

pub struct Job {
    pub family: Arc<dyn ExponentialFamily>,
    pub names: Vec<String>,
    pub params: Vec<Param>,
    pub measures: Vec<Measure>,
    pub pairs: Vec<(usize, usize)>,
    pub output: OutputSpec,
}

/// Oracle seed: `EXPFAM_DIV_SEED` when set, the library default otherwise.
pub fn default_seed() -> Result<u64, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::input(SEED_ENV, format!("`{v}` is not an unsigned 64-bit integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

impl JobSpec {
    pub fn resolve(&self) -> Result<Job, CliError> {
        let seed = default_seed()?;
        let family = self.build_family()?;
        if self.densities.is_empty() {
            return Err(CliError::input("densities", "at least one density is required"));
        }
        let mut names: Vec<String> = Vec::with_capacity(self.densities.len());
        let mut params = Vec::with_capacity(self.densities.len());
        for (i, d) in self.densities.iter().enumerate() {
            if d.name.is_empty() {
                return Err(CliError::input(format!("densities[{i}].name"), "must not be empty"));
            }
            if names.contains(&d.name) {
                return Err(CliError::input(
                    format!("densities[{i}].name"),
                    format!("duplicate name `{}`", d.name),
                ));
            }
            names.push(d.name.clone());
            params.push(build_param(
                family.as_ref(),
                &d.params,
                &format!("densities[{i}].params"),
            )?);
        }
        if self.measures.is_empty() {
            return Err(CliError::input("measures", "at least one measure is required"));
        }
        let measures = self
            .measures
            .iter()
            .enumerate()
            .map(|(i, m)| build_measure(family.as_ref(), m, &format!("measures[{i}]"), seed))
            .collect::<Result<Vec<_>, _>>()?;
        let pairs = match &self.pairs {
            Some(list) => list
                .iter()
                .enumerate()
                .map(|(k, (a, b))| {
                    let find = |n: &str, slot: usize| {
                        names.iter().position(|x| x == n).ok_or_else(|| {
                            CliError::input(format!("pairs[{k}][{slot}]"), format!("no density named `{n}`"))
                        })
                    };
                    Ok((find(a, 0)?, find(b, 1)?))
                })
                .collect::<Result<Vec<_>, CliError>>()?,
            None => {
                let n = names.len();
                (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
            }
        };
        Ok(Job {
            family,
            names,
            params,
            measures,
            pairs,
            output: self.output.clone(),
        })
    }

    fn build_family(&self) -> Result<Arc<dyn ExponentialFamily>, CliError> {
        if !family_ids().contains(&self.family.as_str()) {
            return Err(CliError::input(
                "family",
                format!("unknown family `{}` (see `list-families`)", self.family),
            ));
        }
        let spec = self.family_options.clone().unwrap_or_default();
        let covariance = spec
            .covariance
            .as_deref()
            .map(SymMatrix::from_lower)
            .transpose()
            .map_err(|e| CliError::input("family_options.covariance", e.to_string()))?;
        let options = FamilyOptions {
            shape: spec.shape,
            dim: spec.dim,
            covariance,
        };
        lookup(&self.family, &options)
            .map(Arc::from)
            .map_err(|e| CliError::input("family_options", e.to_string()))
    }
}

fn block(value: &Value, shape: BlockShape, path: &str) -> Result<Block, CliError> {
    match (shape, value) {
        (BlockShape::Scalar, Value::Scalar(v)) => Ok(Block::Scalar(*v)),
        (BlockShape::Vector(d), Value::List(v)) if v.len() == d => Ok(Block::Vector(v.clone())),
        (BlockShape::Matrix(d), Value::List(v)) if v.len() == d * (d + 1) / 2 => SymMatrix::from_lower(v)
            .map(Block::Matrix)
            .map_err(|e| CliError::input(path, e.to_string())),
        (BlockShape::Scalar, _) => Err(CliError::input(path, "expected a number")),
        (BlockShape::Vector(d), _) => Err(CliError::input(path, format!("expected a list of {d} numbers"))),
        (BlockShape::Matrix(d), _) => Err(CliError::input(
            path,
            format!("expected a row-major lower triangle of {} numbers", d * (d + 1) / 2),
        )),
    }
}

fn build_param(fam: &dyn ExponentialFamily, values: &BTreeMap<String, Value>, path: &str) -> Result<Param, CliError> {
    let desc = fam.descriptor();
    if let Some(extra) = values.keys().find(|k| !desc.param_names.contains(&k.as_str())) {
        return Err(CliError::input(
            format!("{path}.{extra}"),
            format!("unknown parameter (expected {})", desc.param_names.join(", ")),
        ));
    }
    let blocks = desc
        .param_names
        .iter()
        .zip(&desc.param_shapes)
        .map(|(name, &shape)| {
            let at = format!("{path}.{name}");
            let v = values
                .get(*name)
                .ok_or_else(|| CliError::input(&at, "missing parameter"))?;
            block(v, shape, &at)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let p = Param::source(blocks);
    fam.validate_source(&p)
        .map_err(|e| CliError::input(path, e.to_string()))?;
    Ok(p)
}

fn build_measure(fam: &dyn ExponentialFamily, m: &MeasureSpec, path: &str, seed: u64) -> Result<Measure, CliError> {
    use MeasureKind::*;
    let unused = |field: &str| CliError::input(format!("{path}.{field}"), format!("not used by `{}`", m.kind.as_str()));
    let takes_alpha = matches!(m.kind, Bhat | BhatDistance | Alpha);
    let takes_omega = matches!(m.kind, Bhat | BhatDistance | Hellinger | Alpha | Kl);
    let takes_oracle = matches!(m.kind, Kl | Jsd);
    if m.alpha.is_some() && !takes_alpha {
        return Err(unused("alpha"));
    }
    if m.method.is_some() && m.kind != Kl {
        return Err(unused("method"));
    }
    if m.omega.is_some() && !takes_omega {
        return Err(unused("omega"));
    }
    if m.oracle.is_some() && !takes_oracle {
        return Err(unused("oracle"));
    }
    let method = m.method.unwrap_or(KlMethodSpec::Auto);
    if m.alpha_step.is_some() && method != KlMethodSpec::Limit {
        return Err(CliError::input(
            format!("{path}.alpha_step"),
            "only used with method `limit`",
        ));
    }

    let alpha = m.alpha.unwrap_or(0.5);
    let alpha_ok = match m.kind {
        Bhat | BhatDistance => alpha > 0.0 && alpha < 1.0,
        _ => alpha.is_finite(),
    };
    if !alpha_ok {
        return Err(CliError::input(
            format!("{path}.alpha"),
            format!("{alpha} is outside the admissible range"),
        ));
    }
    let alpha_step = m.alpha_step.unwrap_or(expfam_div::divergences::DEFAULT_ALPHA_STEP);
    if !(alpha_step > 0.0 && alpha_step < 0.5) {
        return Err(CliError::input(format!("{path}.alpha_step"), "must lie in (0, 0.5)"));
    }
    let kl = match method {
        KlMethodSpec::Auto => KlMethod::Auto,
        KlMethodSpec::LogRatio => KlMethod::LogRatio,
        KlMethodSpec::EntropyMoment => KlMethod::EntropyMoment,
        KlMethodSpec::Limit => KlMethod::Limit { alpha_step },
        KlMethodSpec::Quadrature => KlMethod::Quadrature,
        KlMethodSpec::MonteCarlo => KlMethod::MonteCarlo,
    };
    if m.omega.is_some() && m.kind == Kl && !matches!(method, KlMethodSpec::EntropyMoment | KlMethodSpec::Limit) {
        return Err(CliError::input(
            format!("{path}.omega"),
            "only used with methods `entropy_moment` and `limit`",
        ));
    }

    let omega = match &m.omega {
        Some(v) => {
            let at = format!("{path}.omega");
            let support = fam.descriptor().support;
            let w = block(v, support.sample_shape(), &at)?;
            support.check(&w).map_err(|e| CliError::input(&at, e.to_string()))?;
            Some(w)
        }
        None => None,
    };

    let o = m.oracle.clone().unwrap_or_default();
    let base = OracleConfig::default();
    let cfg = OracleConfig {
        abs_tol: o.abs_tol.unwrap_or(base.abs_tol),
        rel_tol: o.rel_tol.unwrap_or(base.rel_tol),
        max_subdivisions: o.max_subdivisions.unwrap_or(base.max_subdivisions),
        mc_samples: o.mc_samples.unwrap_or(base.mc_samples),
        seed: o.seed.unwrap_or(seed),
        tail_mass_cutoff: o.tail_mass_cutoff.unwrap_or(base.tail_mass_cutoff),
    };
    cfg.validate()
        .map_err(|e| CliError::input(format!("{path}.oracle"), e.to_string()))?;

    if m.kind == Cs && !matches!(fam.id(), "gaussian1d" | "mvn") {
        return Err(CliError::input(
            format!("{path}.kind"),
            "`cs` needs the gaussian1d or mvn family",
        ));
    }

    let mut label = m.kind.as_str().to_string();
    if m.alpha.is_some() {
        label = format!("{label}({alpha})");
    } else if m.kind == Kl && method != KlMethodSpec::Auto {
        label = format!(
            "{label}({})",
            serde_json::to_value(method).expect("plain enum").as_str().unwrap_or("")
        );
    }
    Ok(Measure {
        kind: m.kind,
        label,
        alpha,
        kl,
        omega,
        cfg,
    })
}
