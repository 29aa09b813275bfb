//! Small dense symmetric matrices.
//!
//! Everything here is sized for the covariance and scale matrices of the
//! registered families (a handful of dimensions), so plain row-major storage
//! and O(n³) factorizations are fine.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-10;

/// Symmetric `n × n` matrix, stored in full row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Build from full row-major entries, rejecting asymmetric input.
    ///
    /// Entries are averaged with their transpose so the stored matrix is
    /// exactly symmetric.
    pub fn from_rows(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::InvalidParameter(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
        }
        let scale = data.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            for j in 0..i {
                if (data[i * n + j] - data[j * n + i]).abs() > SYMMETRY_TOL * scale {
                    return Err(Error::InvalidParameter(format!("matrix is not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(Self::from_rows_unchecked(n, data))
    }

    fn from_rows_unchecked(n: usize, mut data: Vec<f64>) -> Self {
        for i in 0..n {
            for j in 0..i {
                let avg = 0.5 * (data[i * n + j] + data[j * n + i]);
                data[i * n + j] = avg;
                data[j * n + i] = avg;
            }
        }
        Self { n, data }
    }

    /// Build from a row-major lower triangle `[a00, a10, a11, a20, a21, a22, ...]`.
    pub fn from_lower(packed: &[f64]) -> Result<Self> {
        let len = packed.len();
        let mut n = 0;
        while n * (n + 1) / 2 < len {
            n += 1;
        }
        if n == 0 || n * (n + 1) / 2 != len {
            return Err(Error::InvalidParameter(format!(
                "{len} entries do not form a lower triangle"
            )));
        }
        if packed.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
        }
        let mut data = vec![0.0; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in 0..=i {
                data[i * n + j] = packed[k];
                data[j * n + i] = packed[k];
                k += 1;
            }
        }
        Ok(Self { n, data })
    }

    /// Row-major lower triangle, the inverse of [`SymMatrix::from_lower`].
    pub fn to_lower(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n * (self.n + 1) / 2);
        for i in 0..self.n {
            for j in 0..=i {
                out.push(self.get(i, j));
            }
        }
        out
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, s: f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = s;
        }
        Self { n, data }
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut data = vec![0.0; n * n];
        for (i, d) in diag.iter().enumerate() {
            data[i * n + i] = *d;
        }
        Self { n, data }
    }

    /// `v vᵀ`.
    pub fn outer(v: &[f64]) -> Self {
        let n = v.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = v[i] * v[j];
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `a·self + b·other`.
    pub fn lincomb(&self, a: f64, other: &Self, b: f64) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(x, y)| a * x + b * y).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.lincomb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.lincomb(1.0, other, -1.0)
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// `tr(self · other)`; for symmetric arguments this is the Frobenius inner product.
    pub fn frobenius_inner(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// `vᵀ self v`.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        self.mul_vec(v).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// `self · other · self`, symmetric whenever both factors are.
    pub fn sandwich(&self, other: &Self) -> Self {
        let n = self.n;
        let mut tmp = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                tmp[i * n + j] = (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum();
            }
        }
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n).map(|k| tmp[i * n + k] * self.get(k, j)).sum();
            }
        }
        Self::from_rows_unchecked(n, out)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn cholesky(&self) -> Result<Cholesky> {
        let n = self.n;
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotSpd);
            }
            let djj = d.sqrt();
            l[j * n + j] = djj;
            for i in (j + 1)..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / djj;
            }
        }
        Ok(Cholesky { n, l })
    }

    pub fn is_spd(&self) -> bool {
        self.cholesky().is_ok()
    }

    pub fn inverse_spd(&self) -> Result<Self> {
        Ok(self.cholesky()?.inverse())
    }

    pub fn log_det_spd(&self) -> Result<f64> {
        Ok(self.cholesky()?.log_det())
    }

    /// Eigen-decomposition by cyclic Jacobi rotations.
    ///
    /// Returns eigenvalues in ascending order with the matching unit
    /// eigenvectors.
    pub fn eigen(&self) -> (Vec<f64>, Vec<Vec<f64>>) {
        let n = self.n;
        let mut a = self.data.clone();
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i * n + j] * a[i * n + j])
                .sum();
            let total: f64 = a.iter().map(|x| x * x).sum();
            if off <= 1e-32 * total.max(f64::MIN_POSITIVE) {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let app = a[p * n + p];
                    let aqq = a[q * n + q];
                    let tau = (aqq - app) / (2.0 * apq);
                    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let t = if tau == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
        let values = order.iter().map(|&i| a[i * n + i]).collect();
        let vectors = order.iter().map(|&i| (0..n).map(|k| v[k * n + i]).collect()).collect();
        (values, vectors)
    }

    /// Symmetric positive-definite square root `R` with `R R = self`.
    pub fn sqrt_spd(&self) -> Result<Self> {
        let (values, vectors) = self.eigen();
        if values.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::NotSpd);
        }
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for (l, e) in values.iter().zip(&vectors) {
            let s = l.sqrt();
            for i in 0..n {
                for j in 0..n {
                    data[i * n + j] += s * e[i] * e[j];
                }
            }
        }
        Ok(Self::from_rows_unchecked(n, data))
    }

    /// Column `j` as a vector (equal to row `j` by symmetry).
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }
}

/// Lower-triangular Cholesky factor `L` with `L Lᵀ = A`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.l[i * self.n + j]
    }

    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.n).map(|i| self.get(i, i).ln()).sum::<f64>()
    }

    /// Solve `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let y = self.solve_lower(b);
        let n = self.n;
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.get(k, i) * x[k];
            }
            x[i] = s / self.get(i, i);
        }
        x
    }

    /// Solve `L y = b`.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.get(i, k) * y[k];
            }
            y[i] = s / self.get(i, i);
        }
        y
    }

    /// `bᵀ A⁻¹ b`, computed as `‖L⁻¹ b‖²`.
    pub fn inv_quad_form(&self, b: &[f64]) -> f64 {
        self.solve_lower(b).iter().map(|y| y * y).sum()
    }

    /// `L z`.
    pub fn mul_lower(&self, z: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..=i).map(|k| self.get(i, k) * z[k]).sum())
            .collect()
    }

    pub fn inverse(&self) -> SymMatrix {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = 0.0);
            e[j] = 1.0;
            let col = self.solve(&e);
            for i in 0..n {
                data[i * n + j] = col[i];
            }
        }
        SymMatrix::from_rows_unchecked(n, data)
    }

    /// Row-major lower-triangular entries of `L`.
    pub fn lower_rows(&self) -> &[f64] {
        &self.l
    }
}
