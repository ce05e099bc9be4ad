use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[T]> + '_ {
        // chunks_exact panics on a zero chunk size
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, values: &[T]) {
        for (i, &v) in values.iter().enumerate() {
            self[(i, j)] = v;
        }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self { rows: idx.len(), cols: self.cols, data }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])])
    }

    /// First `n` columns.
    pub fn leading_columns(&self, n: usize) -> Self {
        Self::from_fn(self.rows, n, |i, j| self[(i, j)])
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let a = self.row(i);
            let o = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (l, &ail) in a.iter().enumerate() {
                if ail == T::zero() {
                    continue;
                }
                for (oj, &blj) in o.iter_mut().zip(other.row(l)) {
                    *oj = *oj + ail * blj;
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ · other` without materializing the transpose.
    pub fn tr_matmul(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply ({}x{})ᵀ by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.cols, other.cols);
        for l in 0..self.rows {
            let a = self.row(l);
            let b = other.row(l);
            for (i, &ali) in a.iter().enumerate() {
                if ali == T::zero() {
                    continue;
                }
                let o = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (oj, &blj) in o.iter_mut().zip(b) {
                    *oj = *oj + ali * blj;
                }
            }
        }
        Ok(out)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect(),
        })
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(())
    }

    /// Converts the entries to another scalar type.
    pub fn cast<U: Scalar>(&self) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| U::of(v.as_f64())).collect(),
        }
    }

    pub fn squared_norm(&self) -> T {
        self.data.iter().map(|&v| v * v).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.squared_norm().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Largest absolute deviation of `selfᵀ self` from the identity.
    pub fn orthonormality_defect(&self) -> T {
        let gram = self.tr_matmul(self).expect("square gram");
        let mut worst = T::zero();
        for i in 0..gram.rows {
            for j in 0..gram.cols {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((gram[(i, j)] - target).abs());
            }
        }
        worst
    }
}

/// Kronecker product `a ⊗ b`, shape `(a.rows·b.rows) × (a.cols·b.cols)`.
///
/// Entry `(ia·b.rows + ib, ja·b.cols + jb)` equals `a[ia,ja]·b[ib,jb]`. This is
/// the ordering the tensor unfoldings in [`crate::Tensor3`] are built against.
pub fn kronecker<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let (br, bc) = b.shape();
    Matrix::from_fn(a.rows * br, a.cols * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix<f64> {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn kronecker_of_identities_is_identity() {
        let i2 = Matrix::<f64>::identity(2);
        assert_eq!(kronecker(&i2, &i2), Matrix::identity(4));
    }

    #[test]
    fn kronecker_with_scalar_scales() {
        let b = m(&[&[1.0, -2.0, 0.5], &[3.0, 4.0, 7.0]]);
        let two = m(&[&[2.0]]);
        assert_eq!(kronecker(&two, &b), b.scale(2.0));
    }

    #[test]
    fn kronecker_block_expansion() {
        // blocks 1·S 2·S / 3·S 4·S with S the 2x2 swap
        let a = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let s = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let expected = m(&[
            &[0.0, 1.0, 0.0, 2.0],
            &[1.0, 0.0, 2.0, 0.0],
            &[0.0, 3.0, 0.0, 4.0],
            &[3.0, 0.0, 4.0, 0.0],
        ]);
        assert_eq!(kronecker(&a, &s), expected);
    }

    #[test]
    fn matmul_rejects_mismatch() {
        let a = Matrix::<f64>::zeros(2, 3);
        assert!(matches!(a.matmul(&a), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn tr_matmul_matches_transpose_product() {
        let a = m(&[&[1.0, 2.0], &[3.0, -1.0], &[0.5, 4.0]]);
        let b = m(&[&[2.0], &[1.0], &[-3.0]]);
        assert_eq!(a.tr_matmul(&b).unwrap(), a.transpose().matmul(&b).unwrap());
    }

    #[test]
    fn from_rows_rejects_ragged() {
        let rows: Vec<Vec<f64>> = vec![vec![1.0, 2.0], vec![3.0]];
        assert!(Matrix::from_rows(&rows).is_err());
    }
}
