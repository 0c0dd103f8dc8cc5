use std::hash::{DefaultHasher, Hash, Hasher};
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use cblas_sys::{cblas_dgemm, cblas_zgemm, CBLAS_LAYOUT, CBLAS_TRANSPOSE};

use crate::{Complex64, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix, column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for col in 0..dim {
            for row in 0..dim {
                data.push(f(row, col));
            }
        }
        Self { dim, data }
    }

    /// Builds from row-major entries, the natural order for literals in code.
    pub fn from_rows(dim: usize, rows: &[Complex64]) -> Result<Self> {
        if rows.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: rows.len(),
            });
        }
        Ok(Self::from_fn(dim, |r, c| rows[r * dim + c]))
    }

    pub fn from_real_rows(dim: usize, rows: &[f64]) -> Result<Self> {
        let rows: Vec<Complex64> = rows.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_rows(dim, &rows)
    }

    pub fn from_col_major(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Outer product |a⟩⟨b|.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        Ok(Self::from_fn(a.len(), |r, c| a[r] * b[c].conj()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn column(&self, col: usize) -> &[Complex64] {
        &self.data[col * self.dim..(col + 1) * self.dim]
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    /// (A + A†)/2.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |r, c| (self[(r, c)] + self[(c, r)].conj()) * 0.5)
    }

    /// max |A − A†|.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for c in 0..n {
            for r in 0..=c {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// max |A†A − I|.
    pub fn unitarity_residual(&self) -> f64 {
        let g = self.gemm(self, true, false);
        (&g - &Self::identity(self.dim)).max_abs()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        self.gemm(other, false, false)
    }

    /// A† B without forming A†.
    pub fn adjoint_mul(&self, other: &Self) -> Self {
        self.gemm(other, true, false)
    }

    /// A B† without forming B†.
    pub fn mul_adjoint(&self, other: &Self) -> Self {
        self.gemm(other, false, true)
    }

    fn gemm(&self, other: &Self, adj_a: bool, adj_b: bool) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        if n == 0 {
            return out;
        }
        let op = |adj: bool| {
            if adj {
                CBLAS_TRANSPOSE::CblasConjTrans
            } else {
                CBLAS_TRANSPOSE::CblasNoTrans
            }
        };
        let alpha = [1.0, 0.0];
        let beta = [0.0, 0.0];
        let n_i = n as i32;
        // SAFETY: all three buffers hold n*n Complex64 values, which share the
        // [f64; 2] layout expected by CBLAS.
        unsafe {
            cblas_zgemm(
                CBLAS_LAYOUT::CblasColMajor,
                op(adj_a),
                op(adj_b),
                n_i,
                n_i,
                n_i,
                alpha.as_ptr() as *const _,
                self.data.as_ptr() as *const _,
                n_i,
                other.data.as_ptr() as *const _,
                n_i,
                beta.as_ptr() as *const _,
                out.data.as_mut_ptr() as *mut _,
                n_i,
            );
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        let mut out = vec![ZERO; self.dim];
        for (c, &x) in v.iter().enumerate() {
            if x == ZERO {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.column(c)) {
                *o += a * x;
            }
        }
        out
    }

    /// Kronecker product A ⊗ B, row index `i_a * dim_b + i_b`.
    pub fn kron(&self, other: &Self) -> Self {
        let (na, nb) = (self.dim, other.dim);
        let n = na * nb;
        let mut out = Self::zeros(n);
        for ca in 0..na {
            for ra in 0..na {
                let a = self[(ra, ca)];
                if a == ZERO {
                    continue;
                }
                for cb in 0..nb {
                    let col = ca * nb + cb;
                    let dst = &mut out.data[col * n + ra * nb..col * n + ra * nb + nb];
                    for (d, &b) in dst.iter_mut().zip(other.column(cb)) {
                        *d = a * b;
                    }
                }
            }
        }
        out
    }

    /// Integer power by repeated multiplication; `pow(0)` is the identity.
    pub fn pow(&self, exponent: u32) -> Self {
        let mut acc = Self::identity(self.dim);
        for _ in 0..exponent {
            acc = acc.matmul(self);
        }
        acc
    }

    pub fn real_part(&self) -> RealMatrix {
        RealMatrix::from_fn(self.dim, |r, c| self[(r, c)].re)
    }

    /// Stable hash of the bit pattern, used to identify matrices in error reports.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.dim.hash(&mut h);
        for z in &self.data {
            z.re.to_bits().hash(&mut h);
            z.im.to_bits().hash(&mut h);
        }
        h.finish()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[c * self.dim + r]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[c * self.dim + r]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Square real matrix, column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for col in 0..dim {
            for row in 0..dim {
                data.push(f(row, col));
            }
        }
        Self { dim, data }
    }

    pub fn from_rows(dim: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: rows.len(),
            });
        }
        Ok(Self::from_fn(dim, |r, c| rows[r * dim + c]))
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim, |r, c| Complex64::new(self[(r, c)], 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        if n == 0 {
            return out;
        }
        let n_i = n as i32;
        // SAFETY: buffers hold n*n f64 values.
        unsafe {
            cblas_dgemm(
                CBLAS_LAYOUT::CblasColMajor,
                CBLAS_TRANSPOSE::CblasNoTrans,
                CBLAS_TRANSPOSE::CblasNoTrans,
                n_i,
                n_i,
                n_i,
                1.0,
                self.data.as_ptr(),
                n_i,
                other.data.as_ptr(),
                n_i,
                0.0,
                out.data.as_mut_ptr(),
                n_i,
            );
        }
        out
    }

    /// Trailing principal block starting at `offset`.
    pub fn trailing_block(&self, offset: usize) -> Self {
        let n = self.dim - offset;
        Self::from_fn(n, |r, c| self[(r + offset, c + offset)])
    }

    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.dim.hash(&mut h);
        for x in &self.data {
            x.to_bits().hash(&mut h);
        }
        h.finish()
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;

    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[c * self.dim + r]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[c * self.dim + r]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn from_rows_is_row_major() {
        let m = ComplexMatrix::from_real_rows(2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(m[(0, 1)], c(2.0, 0.0));
        assert_eq!(m[(1, 0)], c(3.0, 0.0));
    }

    #[test]
    fn matmul_matches_hand_product() {
        let a = ComplexMatrix::from_rows(2, &[c(1.0, 1.0), c(0.0, 0.0), c(2.0, 0.0), c(0.0, -1.0)])
            .unwrap();
        let b = ComplexMatrix::from_real_rows(2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let p = a.matmul(&b);
        // row 0: (1+i)*[1,2]; row 1: 2*[1,2] - i*[3,4]
        assert_eq!(p[(0, 0)], c(1.0, 1.0));
        assert_eq!(p[(0, 1)], c(2.0, 2.0));
        assert_eq!(p[(1, 0)], c(2.0, -3.0));
        assert_eq!(p[(1, 1)], c(4.0, -4.0));
        let pa = a.adjoint_mul(&b);
        let expect = a.adjoint().matmul(&b);
        assert!((&pa - &expect).max_abs() < 1e-15);
        let pb = a.mul_adjoint(&b);
        let expect = a.matmul(&b.adjoint());
        assert!((&pb - &expect).max_abs() < 1e-15);
    }

    #[test]
    fn kron_index_layout() {
        let a = ComplexMatrix::from_real_rows(2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = ComplexMatrix::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let k = a.kron(&b);
        for ra in 0..2 {
            for ca in 0..2 {
                for rb in 0..2 {
                    for cb in 0..2 {
                        assert_eq!(k[(ra * 2 + rb, ca * 2 + cb)], a[(ra, ca)] * b[(rb, cb)]);
                    }
                }
            }
        }
    }

    #[test]
    fn real_matmul() {
        let a = RealMatrix::from_rows(2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let p = a.matmul(&a);
        assert_eq!(
            p,
            RealMatrix::from_rows(2, &[7.0, 10.0, 15.0, 22.0]).unwrap()
        );
    }

    #[test]
    fn pow_zero_is_identity() {
        let a = ComplexMatrix::from_real_rows(2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(a.pow(0), ComplexMatrix::identity(2));
        assert_eq!(a.pow(2), a.matmul(&a));
    }

    #[test]
    fn wrong_length_rejected() {
        assert!(ComplexMatrix::from_real_rows(2, &[1.0, 2.0, 3.0]).is_err());
    }
}
