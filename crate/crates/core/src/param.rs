//! Block-structured parameter vectors.
//!
//! A parameter is an ordered list of blocks (scalar, vector, or symmetric
//! matrix) tagged with the coordinate system it lives in. Inner products and
//! linear combinations act blockwise, using traces for matrix blocks.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    /// Conventional parameterization λ (rate, mean/variance, shape/rate, ...).
    Source,
    /// Natural parameter θ.
    Natural,
    /// Moment parameter η = E[t(x)].
    Moment,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    Scalar(f64),
    Vector(Vec<f64>),
    Matrix(SymMatrix),
}

/// A point of the sample space. Every registered family draws samples that
/// fit in a single block.
pub type Sample = Block;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockShape {
    Scalar,
    Vector(usize),
    Matrix(usize),
}

impl Block {
    pub fn shape(&self) -> BlockShape {
        match self {
            Block::Scalar(_) => BlockShape::Scalar,
            Block::Vector(v) => BlockShape::Vector(v.len()),
            Block::Matrix(m) => BlockShape::Matrix(m.dim()),
        }
    }

    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            Block::Scalar(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_vector(&self) -> Option<&[f64]> {
        match self {
            Block::Vector(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_matrix(&self) -> Option<&SymMatrix> {
        match self {
            Block::Matrix(m) => Some(m),
            _ => None,
        }
    }

    /// Inner product; traces for matrix blocks. Shapes must agree.
    pub fn dot(&self, other: &Block) -> f64 {
        match (self, other) {
            (Block::Scalar(a), Block::Scalar(b)) => a * b,
            (Block::Vector(a), Block::Vector(b)) => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            (Block::Matrix(a), Block::Matrix(b)) => a.frobenius_inner(b),
            _ => panic!("block shape mismatch in inner product"),
        }
    }

    /// `a·self + b·other`.
    pub fn lincomb(&self, a: f64, other: &Block, b: f64) -> Block {
        match (self, other) {
            (Block::Scalar(x), Block::Scalar(y)) => Block::Scalar(a * x + b * y),
            (Block::Vector(x), Block::Vector(y)) => {
                Block::Vector(x.iter().zip(y).map(|(u, v)| a * u + b * v).collect())
            }
            (Block::Matrix(x), Block::Matrix(y)) => Block::Matrix(x.lincomb(a, y, b)),
            _ => panic!("block shape mismatch in linear combination"),
        }
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        match self {
            Block::Scalar(v) => v.abs(),
            Block::Vector(v) => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            Block::Matrix(m) => m.max_abs(),
        }
    }

    /// Flattened components (full matrix storage for matrix blocks).
    pub fn components(&self) -> Vec<f64> {
        match self {
            Block::Scalar(v) => alloc::vec![*v],
            Block::Vector(v) => v.clone(),
            Block::Matrix(m) => m.as_slice().to_vec(),
        }
    }
}

fn blocks_dot(a: &[Block], b: &[Block]) -> f64 {
    assert_eq!(a.len(), b.len(), "block count mismatch in inner product");
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn blocks_lincomb(x: &[Block], a: f64, y: &[Block], b: f64) -> Vec<Block> {
    assert_eq!(x.len(), y.len(), "block count mismatch in linear combination");
    x.iter().zip(y).map(|(u, v)| u.lincomb(a, v, b)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub kind: ParamKind,
    pub blocks: Vec<Block>,
}

impl Param {
    pub fn new(kind: ParamKind, blocks: Vec<Block>) -> Self {
        Self { kind, blocks }
    }

    pub fn source(blocks: Vec<Block>) -> Self {
        Self::new(ParamKind::Source, blocks)
    }

    pub fn natural(blocks: Vec<Block>) -> Self {
        Self::new(ParamKind::Natural, blocks)
    }

    pub fn moment(blocks: Vec<Block>) -> Self {
        Self::new(ParamKind::Moment, blocks)
    }

    /// Source parameter made of scalar blocks.
    pub fn source_scalars(values: &[f64]) -> Self {
        Self::source(values.iter().map(|&v| Block::Scalar(v)).collect())
    }

    pub fn scalar(&self, i: usize) -> Result<f64> {
        self.blocks
            .get(i)
            .and_then(Block::as_scalar)
            .ok_or_else(|| Error::InvalidParameter(format!("block {i} must be a scalar")))
    }

    pub fn vector(&self, i: usize) -> Result<&[f64]> {
        self.blocks
            .get(i)
            .and_then(Block::as_vector)
            .ok_or_else(|| Error::InvalidParameter(format!("block {i} must be a vector")))
    }

    pub fn matrix(&self, i: usize) -> Result<&SymMatrix> {
        self.blocks
            .get(i)
            .and_then(Block::as_matrix)
            .ok_or_else(|| Error::InvalidParameter(format!("block {i} must be a matrix")))
    }

    pub fn shapes(&self) -> Vec<BlockShape> {
        self.blocks.iter().map(Block::shape).collect()
    }

    /// Blockwise inner product with a sufficient statistic.
    pub fn dot_stat(&self, t: &SuffStat) -> f64 {
        blocks_dot(&self.blocks, &t.0)
    }

    /// Blockwise inner product with another parameter.
    pub fn dot(&self, other: &Param) -> f64 {
        blocks_dot(&self.blocks, &other.blocks)
    }

    /// `a·self + b·other`, keeping the kind of `self`.
    pub fn lincomb(&self, a: f64, other: &Param, b: f64) -> Param {
        Param::new(self.kind, blocks_lincomb(&self.blocks, a, &other.blocks, b))
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().fold(0.0, |m, b| m.max(b.max_abs()))
    }

    pub fn components(&self) -> Vec<f64> {
        self.blocks.iter().flat_map(Block::components).collect()
    }

    pub(crate) fn expect_kind(&self, kind: ParamKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "expected a {kind:?} parameter, got {:?}",
                self.kind
            )))
        }
    }

    pub(crate) fn expect_shapes(&self, shapes: &[BlockShape], names: &[&str]) -> Result<()> {
        if self.blocks.len() != shapes.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} parameter blocks, got {}",
                shapes.len(),
                self.blocks.len()
            )));
        }
        for (i, (b, s)) in self.blocks.iter().zip(shapes).enumerate() {
            if b.shape() != *s {
                let name: String = names.get(i).map(|n| String::from(*n)).unwrap_or_default();
                return Err(Error::InvalidParameter(format!(
                    "{name}: expected {s:?}, got {:?}",
                    b.shape()
                )));
            }
        }
        Ok(())
    }
}

/// Value of the sufficient statistic t(x), laid out like the natural parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SuffStat(pub Vec<Block>);

impl SuffStat {
    pub fn lincomb(&self, a: f64, other: &SuffStat, b: f64) -> SuffStat {
        SuffStat(blocks_lincomb(&self.0, a, &other.0, b))
    }

    pub fn components(&self) -> Vec<f64> {
        self.0.iter().flat_map(Block::components).collect()
    }

    /// Reinterpret as a moment parameter (used when averaging statistics).
    pub fn into_moment(self) -> Param {
        Param::moment(self.0)
    }
}
