//! # expfam-div
//!
//! Statistical (dis)similarities between two densities of the same
//! exponential family, computed from the density function and the
//! parameter conversions alone. The log-normalizer is never evaluated.
//!
//! For any point `ω` of the support, the log-normalizer is recovered as
//! `F(θ) = θᵀt(ω) + k(ω) − log p(ω; θ)`, and because Jensen and Bregman
//! generators are defined up to an affine term, `−log p(ω; θ)` can stand in
//! for `F` directly. This gives:
//!
//! | Quantity | Expression |
//! |----------|------------|
//! | Bhattacharyya coefficient | `ρ_α = p(ω;λ₁)^α p(ω;λ₂)^{1−α} / p(ω; M_α(λ₁,λ₂))` |
//! | Hellinger distance | `√(1 − ρ_½)` |
//! | α-divergence | `(1 − ρ_α) / (α(1−α))` |
//! | Chernoff information | `max_α −log ρ_α` |
//! | KL (log-ratio) | `(1/s) Σ log p(ωᵢ;λ₁)/p(ωᵢ;λ₂)` with `(1/s) Σ t(ωᵢ) = E₁[t]` |
//! | Jeffreys | `(θ₂ − θ₁)ᵀ(η₂ − η₁)` |
//!
//! where `M_α(a, b) = λ(αθ(a) + (1−α)θ(b))` is the weighted quasi-arithmetic
//! mean induced by the source-to-natural conversion.
//!
//! The [`oracle`] module holds brute-force ground truth (adaptive
//! Gauss–Kronrod quadrature, tail-bounded summation and seeded Monte Carlo)
//! used to check every closed form.
//!
//! The crate is `no_std` and only needs `alloc`. Float methods come from
//! `num_traits::Float`; when `std` is linked its inherent methods take over,
//! so those imports are marked `allow(unused_imports)`.

#![no_std]
// Parameter checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod divergences;
mod error;
pub mod families;
pub mod family;
pub mod linalg;
pub mod means;
pub mod oracle;
pub mod param;
pub mod special;
pub mod verify;

pub use divergences::{DivergenceResult, Method};
pub use error::{Error, Result};
pub use families::{catalog, lookup, CatalogEntry, FamilyOptions, MixtureFamily};
pub use family::{Capabilities, ExponentialFamily, FamilyDescriptor, Support};
pub use linalg::SymMatrix;
pub use oracle::OracleConfig;
pub use param::{Block, BlockShape, Param, ParamKind, Sample, SuffStat};
