use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::{Error, Result, Scalar};

/// Mode of a three-way array: units, variables, occasions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    First,
    Second,
    Third,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::First, Mode::Second, Mode::Third];
}

/// Dense `n × J × K` array.
///
/// Unfoldings are ordered so that a Tucker3 model
/// `G = U Λ (V ⊗ B)ᵀ` holds with [`crate::kronecker`]'s ordering:
///
/// * mode 1: `n × (J·K)`, entry `(i, j, k)` at `(i, k·J + j)`
/// * mode 2: `J × (n·K)`, entry `(i, j, k)` at `(j, k·n + i)`
/// * mode 3: `K × (n·J)`, entry `(i, j, k)` at `(k, j·n + i)`
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Tensor3<T> {
    dims: (usize, usize, usize),
    data: Vec<T>,
}

impl<T: Scalar> Tensor3<T> {
    pub fn zeros(n: usize, j: usize, k: usize) -> Self {
        Self { dims: (n, j, k), data: vec![T::zero(); n * j * k] }
    }

    pub fn from_fn(n: usize, j: usize, k: usize, mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * j * k);
        for a in 0..n {
            for b in 0..j {
                for c in 0..k {
                    data.push(f(a, b, c));
                }
            }
        }
        Self { dims: (n, j, k), data }
    }

    pub fn from_vec(dims: (usize, usize, usize), data: Vec<T>) -> Result<Self> {
        if data.len() != dims.0 * dims.1 * dims.2 {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {:?} tensor",
                data.len(),
                dims
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn dim(&self, mode: Mode) -> usize {
        match mode {
            Mode::First => self.dims.0,
            Mode::Second => self.dims.1,
            Mode::Third => self.dims.2,
        }
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims.1 + j) * self.dims.2 + k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> T {
        self.data[self.offset(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: T) {
        let o = self.offset(i, j, k);
        self.data[o] = v;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn squared_norm(&self) -> T {
        self.data.iter().map(|&v| v * v).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.squared_norm().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", self.dims, other.dims)));
        }
        Ok(Self {
            dims: self.dims,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        })
    }

    /// Cell of the mode-`mode` unfolding that holds entry `(i, j, k)`.
    #[inline]
    fn unfolded_cell(dims: (usize, usize, usize), mode: Mode, i: usize, j: usize, k: usize) -> (usize, usize) {
        let (n, jj, _) = dims;
        match mode {
            Mode::First => (i, k * jj + j),
            Mode::Second => (j, k * n + i),
            Mode::Third => (k, j * n + i),
        }
    }

    fn unfolded_shape(dims: (usize, usize, usize), mode: Mode) -> (usize, usize) {
        let (n, j, k) = dims;
        match mode {
            Mode::First => (n, j * k),
            Mode::Second => (j, n * k),
            Mode::Third => (k, n * j),
        }
    }

    /// Mode-n matricization.
    pub fn unfold(&self, mode: Mode) -> Matrix<T> {
        let (rows, cols) = Self::unfolded_shape(self.dims, mode);
        let mut out = Matrix::zeros(rows, cols);
        let (n, j, k) = self.dims;
        for a in 0..n {
            for b in 0..j {
                for c in 0..k {
                    out[Self::unfolded_cell(self.dims, mode, a, b, c)] = self.get(a, b, c);
                }
            }
        }
        out
    }

    /// Inverse of [`Tensor3::unfold`].
    pub fn fold(m: &Matrix<T>, mode: Mode, dims: (usize, usize, usize)) -> Result<Self> {
        if m.shape() != Self::unfolded_shape(dims, mode) {
            return Err(Error::DimensionMismatch(format!(
                "{:?} matrix cannot fold into {:?} along {:?}",
                m.shape(),
                dims,
                mode
            )));
        }
        Ok(Self::from_fn(dims.0, dims.1, dims.2, |a, b, c| {
            m[Self::unfolded_cell(dims, mode, a, b, c)]
        }))
    }

    /// Mode-n product `self ×ₙ m`, where `m` is `p × dim(mode)`.
    pub fn mode_product(&self, mode: Mode, m: &Matrix<T>) -> Result<Self> {
        if m.cols() != self.dim(mode) {
            return Err(Error::DimensionMismatch(format!(
                "mode {:?} has size {}, factor is {}x{}",
                mode,
                self.dim(mode),
                m.rows(),
                m.cols()
            )));
        }
        let mut dims = self.dims;
        match mode {
            Mode::First => dims.0 = m.rows(),
            Mode::Second => dims.1 = m.rows(),
            Mode::Third => dims.2 = m.rows(),
        }
        let unfolded = m.matmul(&self.unfold(mode))?;
        Self::fold(&unfolded, mode, dims)
    }

    /// `self ×ₙ mᵀ` for `m` of shape `dim(mode) × p`.
    pub fn mode_product_transposed(&self, mode: Mode, m: &Matrix<T>) -> Result<Self> {
        if m.rows() != self.dim(mode) {
            return Err(Error::DimensionMismatch(format!(
                "mode {:?} has size {}, factor is {}x{}",
                mode,
                self.dim(mode),
                m.rows(),
                m.cols()
            )));
        }
        let mut dims = self.dims;
        match mode {
            Mode::First => dims.0 = m.cols(),
            Mode::Second => dims.1 = m.cols(),
            Mode::Third => dims.2 = m.cols(),
        }
        let unfolded = m.tr_matmul(&self.unfold(mode))?;
        Self::fold(&unfolded, mode, dims)
    }
}
