use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Storage and sparsity pattern of a [`ComplexMatrix`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Structure {
    Dense,
    /// Entries strictly above the diagonal are exactly zero.
    LowerTriangular,
    /// Entry `(i, j)` is `c[i - j]` for `j <= i` and zero otherwise; only the
    /// first column `c` is stored.
    LowerTriangularToeplitz,
}

impl Structure {
    /// Structure of a sum or product of matrices with these structures.
    fn meet(self, other: Structure) -> Structure {
        use Structure::*;
        match (self, other) {
            (LowerTriangularToeplitz, LowerTriangularToeplitz) => LowerTriangularToeplitz,
            (Dense, _) | (_, Dense) => Dense,
            _ => LowerTriangular,
        }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Structure::Dense => "dense",
            Structure::LowerTriangular => "lower_triangular",
            Structure::LowerTriangularToeplitz => "lower_triangular_toeplitz",
        };
        f.write_str(s)
    }
}

/// Square complex matrix. Dense and lower-triangular matrices keep all
/// `N * N` entries in row-major order; lower-triangular Toeplitz matrices keep
/// their first column only, so that discretized convolution operators at very
/// large `N` stay representable.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    structure: Structure,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self::lower_toeplitz(vec![ZERO; dim])
    }

    pub fn identity(dim: usize) -> Self {
        let mut col = vec![ZERO; dim];
        if dim > 0 {
            col[0] = ONE;
        }
        Self::lower_toeplitz(col)
    }

    /// Dense matrix from `dim * dim` row-major entries.
    pub fn from_rows(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::input(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Self {
            dim,
            structure: Structure::Dense,
            data,
        })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self {
            dim,
            structure: Structure::Dense,
            data,
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO })
    }

    /// Lower-triangular matrix from row-major entries; anything nonzero above
    /// the diagonal is rejected.
    pub fn lower_triangular(dim: usize, data: Vec<C64>) -> Result<Self> {
        let mut m = Self::from_rows(dim, data)?;
        for i in 0..dim {
            for j in (i + 1)..dim {
                if m.data[i * dim + j] != ZERO {
                    return Err(Error::input(format!(
                        "entry ({i},{j}) above the diagonal is nonzero"
                    )));
                }
            }
        }
        m.structure = Structure::LowerTriangular;
        Ok(m)
    }

    /// Lower-triangular Toeplitz matrix with the given first column.
    pub fn lower_toeplitz(column: Vec<C64>) -> Self {
        Self {
            dim: column.len(),
            structure: Structure::LowerTriangularToeplitz,
            data: column,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    /// First column, when the matrix is stored as lower-triangular Toeplitz.
    pub fn toeplitz_column(&self) -> Option<&[C64]> {
        match self.structure {
            Structure::LowerTriangularToeplitz => Some(&self.data),
            _ => None,
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        debug_assert!(i < self.dim && j < self.dim);
        match self.structure {
            Structure::LowerTriangularToeplitz => {
                if j <= i {
                    self.data[i - j]
                } else {
                    ZERO
                }
            }
            _ => self.data[i * self.dim + j],
        }
    }

    /// Full row-major entries regardless of storage.
    pub fn to_row_major(&self) -> Vec<C64> {
        match self.structure {
            Structure::LowerTriangularToeplitz => {
                let n = self.dim;
                let mut out = vec![ZERO; n * n];
                for i in 0..n {
                    for j in 0..=i {
                        out[i * n + j] = self.data[i - j];
                    }
                }
                out
            }
            _ => self.data.clone(),
        }
    }

    pub fn to_dense(&self) -> Self {
        Self {
            dim: self.dim,
            structure: Structure::Dense,
            data: self.to_row_major(),
        }
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self.get(i, j)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Exact (bitwise) zero test.
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| *z == ZERO)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Row/column of the entry with the largest modulus (first in row-major
    /// order on ties) together with that entry.
    pub fn argmax_abs(&self) -> (usize, usize, C64) {
        let mut best = (0, 0, ZERO);
        let mut best_abs = -1.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let z = self.get(i, j);
                if z.norm() > best_abs {
                    best_abs = z.norm();
                    best = (i, j, z);
                }
            }
        }
        best
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        if self.structure == other.structure {
            return self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
        }
        let mut m = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                m = m.max((self.get(i, j) - other.get(i, j)).norm());
            }
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        match self.structure {
            Structure::LowerTriangularToeplitz => {
                let n = self.dim;
                self.data
                    .iter()
                    .enumerate()
                    .map(|(k, z)| (n - k) as f64 * z.norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            }
            _ => self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
        }
    }

    pub fn column_norm(&self, j: usize) -> f64 {
        (0..self.dim)
            .map(|i| self.get(i, j).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, alpha: C64) -> Self {
        Self {
            dim: self.dim,
            structure: self.structure,
            data: self.data.iter().map(|z| z * alpha).collect(),
        }
    }

    pub fn add(&self, other: &ComplexMatrix) -> Self {
        Self::linear_combination(self.dim, &[(ONE, self), (ONE, other)])
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Self {
        Self::linear_combination(self.dim, &[(ONE, self), (-ONE, other)])
    }

    /// `sum_i c_i * A_i`; the result keeps the common structure of the terms.
    pub fn linear_combination(dim: usize, terms: &[(C64, &ComplexMatrix)]) -> Self {
        let structure = terms
            .iter()
            .fold(Structure::LowerTriangularToeplitz, |s, (_, m)| {
                s.meet(m.structure)
            });
        match structure {
            Structure::LowerTriangularToeplitz => {
                let mut col = vec![ZERO; dim];
                for (c, m) in terms {
                    assert_eq!(m.dim, dim, "dimension mismatch");
                    for (acc, z) in col.iter_mut().zip(&m.data) {
                        *acc += c * z;
                    }
                }
                Self::lower_toeplitz(col)
            }
            _ => {
                let mut data = vec![ZERO; dim * dim];
                for (c, m) in terms {
                    assert_eq!(m.dim, dim, "dimension mismatch");
                    if m.structure == Structure::LowerTriangularToeplitz {
                        for i in 0..dim {
                            for j in 0..=i {
                                data[i * dim + j] += c * m.data[i - j];
                            }
                        }
                    } else {
                        for (acc, z) in data.iter_mut().zip(&m.data) {
                            *acc += c * z;
                        }
                    }
                }
                Self {
                    dim,
                    structure,
                    data,
                }
            }
        }
    }

    /// Entry `(i, j)` becomes `f(i - j, a_ij)`; the structure is preserved
    /// because the map depends on the entry's band only.
    pub fn map_by_band(&self, f: impl Fn(isize, C64) -> C64) -> Self {
        let n = self.dim;
        let data = match self.structure {
            Structure::LowerTriangularToeplitz => self
                .data
                .iter()
                .enumerate()
                .map(|(k, &z)| f(k as isize, z))
                .collect(),
            _ => self
                .data
                .iter()
                .enumerate()
                .map(|(idx, &z)| f((idx / n) as isize - (idx % n) as isize, z))
                .collect(),
        };
        Self {
            dim: n,
            structure: self.structure,
            data,
        }
    }

    /// Conjugate transpose (always stored dense).
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let n = self.dim;
        assert_eq!(x.len(), n, "dimension mismatch");
        match self.structure {
            Structure::LowerTriangularToeplitz => {
                let c = &self.data;
                (0..n)
                    .map(|i| {
                        let mut acc = ZERO;
                        for k in 0..=i {
                            acc += c[k] * x[i - k];
                        }
                        acc
                    })
                    .collect()
            }
            Structure::LowerTriangular => (0..n)
                .map(|i| {
                    let row = &self.data[i * n..i * n + i + 1];
                    row.iter().zip(x).map(|(a, b)| a * b).sum()
                })
                .collect(),
            Structure::Dense => (0..n)
                .map(|i| {
                    let row = &self.data[i * n..(i + 1) * n];
                    row.iter().zip(x).map(|(a, b)| a * b).sum()
                })
                .collect(),
        }
    }

    /// `A^H y`.
    pub fn adjoint_matvec(&self, y: &[C64]) -> Vec<C64> {
        let n = self.dim;
        assert_eq!(y.len(), n, "dimension mismatch");
        match self.structure {
            Structure::LowerTriangularToeplitz => {
                let c = &self.data;
                (0..n)
                    .map(|j| {
                        let mut acc = ZERO;
                        for i in j..n {
                            acc += c[i - j].conj() * y[i];
                        }
                        acc
                    })
                    .collect()
            }
            _ => {
                let mut out = vec![ZERO; n];
                for (i, &yi) in y.iter().enumerate() {
                    if yi == ZERO {
                        continue;
                    }
                    let hi = if self.structure == Structure::LowerTriangular {
                        i + 1
                    } else {
                        n
                    };
                    let row = &self.data[i * n..i * n + hi];
                    for (o, a) in out.iter_mut().zip(row) {
                        *o += a.conj() * yi;
                    }
                }
                out
            }
        }
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Self {
        let n = self.dim;
        assert_eq!(other.dim, n, "dimension mismatch");
        match self.structure.meet(other.structure) {
            Structure::LowerTriangularToeplitz => {
                Self::lower_toeplitz(causal_convolution(&self.data, &other.data))
            }
            structure => {
                let a = self.to_row_major();
                let b = other.to_row_major();
                let lower = structure == Structure::LowerTriangular;
                let mut data = vec![ZERO; n * n];
                for i in 0..n {
                    let jmax = if lower { i + 1 } else { n };
                    for j in 0..jmax {
                        let aij = a[i * n + j];
                        if aij == ZERO {
                            continue;
                        }
                        let kmax = if lower { j + 1 } else { n };
                        let out = &mut data[i * n..i * n + kmax];
                        let brow = &b[j * n..j * n + kmax];
                        for (o, bj) in out.iter_mut().zip(brow) {
                            *o += aij * bj;
                        }
                    }
                }
                Self {
                    dim: n,
                    structure,
                    data,
                }
            }
        }
    }

    /// `A^k`; `A^0` is the identity.
    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::identity(self.dim);
        for _ in 0..k {
            acc = acc.matmul(self);
        }
        acc
    }

    /// Successive powers `A^1, ..., A^d`.
    pub fn powers(&self, d: usize) -> Vec<Self> {
        let mut out: Vec<Self> = Vec::with_capacity(d);
        for k in 0..d {
            let next = if k == 0 {
                self.clone()
            } else {
                out[k - 1].matmul(self)
            };
            out.push(next);
        }
        out
    }

    /// Top-left `n x n` corner (a compression of the operator).
    pub fn top_left(&self, n: usize) -> Self {
        assert!(n <= self.dim, "corner larger than matrix");
        match self.structure {
            Structure::LowerTriangularToeplitz => Self::lower_toeplitz(self.data[..n].to_vec()),
            structure => {
                let mut data = Vec::with_capacity(n * n);
                for i in 0..n {
                    data.extend_from_slice(&self.data[i * self.dim..i * self.dim + n]);
                }
                Self {
                    dim: n,
                    structure,
                    data,
                }
            }
        }
    }
}

/// First `a.len()` terms of the causal convolution `c_k = sum_j a_j b_{k-j}`.
/// Leading zeros propagate exactly, which keeps band arithmetic bitwise.
pub fn causal_convolution(a: &[C64], b: &[C64]) -> Vec<C64> {
    let n = a.len();
    let a0 = a.iter().position(|z| *z != ZERO).unwrap_or(n);
    let b0 = b.iter().position(|z| *z != ZERO).unwrap_or(n);
    let mut out = vec![ZERO; n];
    for k in (a0 + b0)..n {
        let mut acc = ZERO;
        for j in a0..=(k - b0) {
            acc += a[j] * b[k - j];
        }
        out[k] = acc;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn toeplitz_product_matches_dense_product() {
        let a = ComplexMatrix::lower_toeplitz(vec![c(0.5), c(1.0), C64::new(0.0, 2.0), c(-1.0)]);
        let b = ComplexMatrix::lower_toeplitz(vec![c(0.0), c(3.0), c(1.0), c(0.25)]);
        let fast = a.matmul(&b);
        assert_eq!(fast.structure(), Structure::LowerTriangularToeplitz);
        let slow = a.to_dense().matmul(&b.to_dense());
        assert!(fast.max_abs_diff(&slow) < 1e-15);
    }

    #[test]
    fn lower_triangular_rejects_upper_entries() {
        let data = vec![c(1.0), c(2.0), c(0.0), c(1.0)];
        assert!(ComplexMatrix::lower_triangular(2, data).is_err());
        let data = vec![c(1.0), c(0.0), c(2.0), c(1.0)];
        let m = ComplexMatrix::lower_triangular(2, data).unwrap();
        assert_eq!(m.structure(), Structure::LowerTriangular);
    }

    #[test]
    fn adjoint_matvec_agrees_with_explicit_adjoint() {
        let a = ComplexMatrix::from_fn(5, |i, j| {
            C64::new(i as f64 - j as f64, (i * j) as f64 * 0.1)
        });
        let t = ComplexMatrix::lower_toeplitz(
            (0..5)
                .map(|k| C64::new(1.0 / (k + 1) as f64, k as f64))
                .collect(),
        );
        let y: Vec<C64> = (0..5).map(|k| C64::new(k as f64, 1.0)).collect();
        for m in [&a, &t] {
            let lhs = m.adjoint_matvec(&y);
            let rhs = m.adjoint().matvec(&y);
            for (l, r) in lhs.iter().zip(&rhs) {
                assert!((l - r).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn band_powers_are_exact_zero() {
        // first nonzero entry at index 2 of 5: the cube starts at index 6 > 4
        let t = ComplexMatrix::lower_toeplitz(vec![c(0.0), c(0.0), c(1.3), c(-0.7), c(2.0)]);
        assert!(!t.pow(2).is_zero());
        assert!(t.pow(3).is_zero());
    }

    #[test]
    fn top_left_keeps_structure() {
        let t = ComplexMatrix::lower_toeplitz(vec![c(1.0), c(2.0), c(3.0)]);
        let corner = t.top_left(2);
        assert_eq!(corner.structure(), Structure::LowerTriangularToeplitz);
        assert_eq!(corner.get(1, 0), c(2.0));
        let d = t.to_dense().top_left(2);
        assert_eq!(d.max_abs_diff(&corner), 0.0);
    }
}
