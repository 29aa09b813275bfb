//! Mixture families `m_w(x) = Σ wᵢ pᵢ(x)` over fixed component densities.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::family::ExponentialFamily;
use crate::oracle::sampling::uniform;
use crate::oracle::Density;
use crate::param::{Param, Sample};
use crate::special::log_sum_exp;

const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Clone)]
pub struct Component {
    pub family: Arc<dyn ExponentialFamily>,
    pub source: Param,
}

/// Fixed components sharing one sample space, mixed by a weight vector on
/// the probability simplex.
#[derive(Clone)]
pub struct MixtureFamily {
    components: Vec<Component>,
}

impl MixtureFamily {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidParameter("a mixture needs at least one component".into()))?;
        let shape = first.family.descriptor().support.sample_shape();
        for (i, c) in components.iter().enumerate() {
            c.family.validate_source(&c.source)?;
            if c.family.descriptor().support.sample_shape() != shape {
                return Err(Error::InvalidParameter(format!(
                    "component {i} lives on a different sample space"
                )));
            }
            if !c.family.descriptor().caps.has_sampler {
                return Err(Error::Unsupported(format!(
                    "component {i} ({}) has no sampler",
                    c.family.id()
                )));
            }
        }
        Ok(Self { components })
    }

    /// Components drawn from a single family.
    pub fn of_family(family: Arc<dyn ExponentialFamily>, sources: Vec<Param>) -> Result<Self> {
        Self::new(
            sources
                .into_iter()
                .map(|source| Component {
                    family: family.clone(),
                    source,
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn check_weights(&self, w: &[f64]) -> Result<()> {
        if w.len() != self.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} mixture weights, got {}",
                self.len(),
                w.len()
            )));
        }
        if !w.iter().all(|&v| v >= 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter("mixture weights must be nonnegative".into()));
        }
        let s: f64 = w.iter().sum();
        if (s - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidParameter(format!("mixture weights sum to {s}, not 1")));
        }
        Ok(())
    }

    /// `log m_w(x)`; a point outside every weighted component's support is an error.
    pub fn log_density(&self, w: &[f64], x: &Sample) -> Result<f64> {
        self.check_weights(w)?;
        let mut terms = Vec::with_capacity(self.len());
        let mut first_err = None;
        for (c, &wi) in self.components.iter().zip(w) {
            if wi == 0.0 {
                continue;
            }
            match c.family.log_density(&c.source, x) {
                Ok(l) => terms.push(wi.ln() + l),
                Err(Error::OutOfSupport(m)) => first_err = first_err.or(Some(Error::OutOfSupport(m))),
                Err(e) => return Err(e),
            }
        }
        if terms.is_empty() {
            return Err(first_err.unwrap_or_else(|| Error::OutOfSupport("point outside the mixture support".into())));
        }
        Ok(log_sum_exp(&terms))
    }

    /// One draw: a uniform picks the component, the rest of the stream draws from it.
    pub fn sample(&self, w: &[f64], rng: &mut dyn RngCore) -> Result<Sample> {
        self.check_weights(w)?;
        let u = uniform(rng);
        let mut acc = 0.0;
        let mut pick = self.len() - 1;
        for (i, &wi) in w.iter().enumerate() {
            acc += wi;
            if u < acc && wi > 0.0 {
                pick = i;
                break;
            }
        }
        // rounding in the cumulative sum must never select a zero-weight component
        while w[pick] == 0.0 {
            pick -= 1;
        }
        let c = &self.components[pick];
        c.family.sample(&c.source, rng)
    }

    /// The member at weights `w`, as a [`Density`].
    pub fn at<'a>(&'a self, w: &'a [f64]) -> Result<MixtureDensity<'a>> {
        self.check_weights(w)?;
        Ok(MixtureDensity {
            mixture: self,
            weights: w,
        })
    }
}

pub struct MixtureDensity<'a> {
    mixture: &'a MixtureFamily,
    weights: &'a [f64],
}

impl Density for MixtureDensity<'_> {
    fn log_density(&self, x: &Sample) -> Result<f64> {
        self.mixture.log_density(self.weights, x)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Result<Sample> {
        self.mixture.sample(self.weights, rng)
    }
}
