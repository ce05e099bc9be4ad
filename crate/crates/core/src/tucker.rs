//! Tucker3 decomposition of the unit × variable × cluster distance tensor.
//!
//! The model is `g_ijk = Σ_rqs λ_rqs u_ir b_jq v_ks + e_ijk` with orthonormal
//! `U` (n×R), `B` (J×Q), `V` (K×S) and a full core `Λ` (R×Q×S). Factors are
//! fitted by higher-order orthogonal iteration (alternating least squares)
//! from an HOSVD start.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::linalg::{kronecker, truncated_basis, Matrix, Mode, Tensor3};
use crate::sampling::rng;
use crate::{Error, Result, Scalar};

/// What each cell of the distance tensor holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TensorEntries {
    /// `|x_ij − c_kj|`
    #[default]
    Absolute,
    /// `(x_ij − c_kj)²`
    Squared,
}

/// `g(i, j, k) = |x_ij − c_kj|`, shape `n × J × K`.
pub fn distance_tensor<T: Scalar>(x: &Matrix<T>, c: &Matrix<T>) -> Result<Tensor3<T>> {
    distance_tensor_with(x, c, TensorEntries::Absolute)
}

pub fn distance_tensor_with<T: Scalar>(
    x: &Matrix<T>,
    c: &Matrix<T>,
    entries: TensorEntries,
) -> Result<Tensor3<T>> {
    if x.cols() != c.cols() {
        return Err(Error::DimensionMismatch(format!(
            "data has {} variables, centers have {}",
            x.cols(),
            c.cols()
        )));
    }
    Ok(Tensor3::from_fn(x.rows(), x.cols(), c.rows(), |i, j, k| {
        let diff = x[(i, j)] - c[(k, j)];
        match entries {
            TensorEntries::Absolute => diff.abs(),
            TensorEntries::Squared => diff * diff,
        }
    }))
}

/// Component counts for the unit, variable, and cluster modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranks {
    pub r: usize,
    pub q: usize,
    pub s: usize,
}

impl Ranks {
    pub fn new(r: usize, q: usize, s: usize) -> Self {
        Self { r, q, s }
    }

    /// `Q = K − 1` clamped to `[1, J]`, `S = min(K, Q)`, `R = min(n, Q·S)`.
    pub fn defaults(n: usize, j: usize, k: usize) -> Self {
        Self::with_q(n, k, k.saturating_sub(1).clamp(1, j.max(1)))
    }

    /// Defaults for `R` and `S` around a chosen `Q`. `Q` itself is kept as
    /// given, so an out-of-range choice fails [`Ranks::validate`].
    pub fn with_q(n: usize, k: usize, q: usize) -> Self {
        let s = k.min(q).max(1);
        let r = n.min(q * s).max(1);
        Self { r, q, s }
    }

    pub fn validate(&self, dims: (usize, usize, usize)) -> Result<()> {
        for (what, rank, max) in [
            ("R (unit mode)", self.r, dims.0),
            ("Q (variable mode)", self.q, dims.1),
            ("S (cluster mode)", self.s, dims.2),
        ] {
            if rank == 0 || rank > max {
                return Err(Error::RankOutOfRange { what, rank, max });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TuckerInit {
    /// Leading singular subspaces of the three unfoldings.
    #[default]
    Hosvd,
    /// Seeded random orthonormal factors.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuckerConfig<T> {
    pub ranks: Ranks,
    pub max_sweeps: usize,
    /// Sweeps stop once the explained fraction improves by less than this.
    pub fit_tolerance: T,
    pub init: TuckerInit,
    pub seed: u64,
}

impl<T: Scalar> TuckerConfig<T> {
    pub fn new(ranks: Ranks) -> Self {
        Self { ranks, max_sweeps: 200, fit_tolerance: T::of(1e-8), init: TuckerInit::Hosvd, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuckerFactors<T> {
    /// `n × R`
    pub u: Matrix<T>,
    /// `J × Q`, the variable loadings used to project the data.
    pub b: Matrix<T>,
    /// `K × S`
    pub v: Matrix<T>,
    /// `R × Q × S`
    pub core: Tensor3<T>,
    /// `1 − ‖E‖²/‖G‖²`
    pub explained_fraction: T,
    pub sweeps: usize,
    /// Explained fraction at the start and after every sweep.
    pub fit_trace: Vec<T>,
}

impl<T: Scalar> TuckerFactors<T> {
    /// `Λ ×₁ U ×₂ B ×₃ V`.
    pub fn reconstruct(&self) -> Tensor3<T> {
        self.core
            .mode_product(Mode::First, &self.u)
            .and_then(|t| t.mode_product(Mode::Second, &self.b))
            .and_then(|t| t.mode_product(Mode::Third, &self.v))
            .expect("factor shapes agree with core")
    }

    /// Mode-1 unfolding of the reconstruction, `U · Λ₍₁₎ · (V ⊗ B)ᵀ`.
    pub fn reconstruct_unfolded(&self) -> Matrix<T> {
        let vb = kronecker(&self.v, &self.b);
        self.u
            .matmul(&self.core.unfold(Mode::First))
            .and_then(|m| m.matmul(&vb.transpose()))
            .expect("factor shapes agree with core")
    }

    pub fn ranks(&self) -> Ranks {
        Ranks::new(self.u.cols(), self.b.cols(), self.v.cols())
    }
}

/// Fits a Tucker3 model to `g` by alternating least squares.
pub fn tucker3<T: Scalar>(g: &Tensor3<T>, cfg: &TuckerConfig<T>) -> Result<TuckerFactors<T>> {
    let ranks = cfg.ranks;
    ranks.validate(g.dims())?;
    if !g.is_finite() {
        return Err(Error::NonFinite("distance tensor"));
    }
    let (n, j, k) = g.dims();
    let total = g.squared_norm();

    let (mut u, mut b, mut v) = match cfg.init {
        TuckerInit::Hosvd => (
            truncated_basis(&g.unfold(Mode::First), ranks.r)?,
            truncated_basis(&g.unfold(Mode::Second), ranks.q)?,
            truncated_basis(&g.unfold(Mode::Third), ranks.s)?,
        ),
        TuckerInit::Random => {
            let mut rng = rng(cfg.seed);
            let mut random = |rows: usize, cols: usize| {
                let m = Matrix::from_fn(rows, cols, |_, _| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    T::of(z)
                });
                truncated_basis(&m, cols)
            };
            (random(n, ranks.r)?, random(j, ranks.q)?, random(k, ranks.s)?)
        }
    };

    let mut core = project_core(g, &u, &b, &v)?;
    let mut fit = fit_from_core(&core, total);
    let mut fit_trace = vec![fit];
    let mut sweeps = 0;

    while sweeps < cfg.max_sweeps {
        sweeps += 1;
        let w = g.mode_product_transposed(Mode::Second, &b)?.mode_product_transposed(Mode::Third, &v)?;
        u = truncated_basis(&w.unfold(Mode::First), ranks.r)?;
        let w = g.mode_product_transposed(Mode::First, &u)?.mode_product_transposed(Mode::Third, &v)?;
        b = truncated_basis(&w.unfold(Mode::Second), ranks.q)?;
        let w = g.mode_product_transposed(Mode::First, &u)?.mode_product_transposed(Mode::Second, &b)?;
        v = truncated_basis(&w.unfold(Mode::Third), ranks.s)?;

        core = w.mode_product_transposed(Mode::Third, &v)?;
        let next = fit_from_core(&core, total);
        fit_trace.push(next);
        let improvement = next - fit;
        fit = next;
        if improvement < cfg.fit_tolerance {
            break;
        }
    }

    let mut factors = TuckerFactors {
        u,
        b,
        v,
        core,
        explained_fraction: T::zero(),
        sweeps,
        fit_trace,
    };
    factors.explained_fraction = explained_variability(&factors, g)?;
    Ok(factors)
}

/// `1 − ‖G − Ĝ‖²_F / ‖G‖²_F`, clamped to `[0, 1]`. A zero tensor is fitted
/// perfectly by anything, so its explained fraction is 1.
pub fn explained_variability<T: Scalar>(f: &TuckerFactors<T>, g: &Tensor3<T>) -> Result<T> {
    let dims = (f.u.rows(), f.b.rows(), f.v.rows());
    if dims != g.dims() {
        return Err(Error::DimensionMismatch(format!(
            "factors describe {:?}, tensor is {:?}",
            dims,
            g.dims()
        )));
    }
    let total = g.squared_norm();
    if total == T::zero() {
        return Ok(T::one());
    }
    let residual = g.sub(&f.reconstruct())?.squared_norm();
    Ok((T::one() - residual / total).max(T::zero()).min(T::one()))
}

fn project_core<T: Scalar>(g: &Tensor3<T>, u: &Matrix<T>, b: &Matrix<T>, v: &Matrix<T>) -> Result<Tensor3<T>> {
    g.mode_product_transposed(Mode::First, u)?
        .mode_product_transposed(Mode::Second, b)?
        .mode_product_transposed(Mode::Third, v)
}

/// With orthonormal factors `‖G‖² = ‖Λ‖² + ‖E‖²`.
fn fit_from_core<T: Scalar>(core: &Tensor3<T>, total: T) -> T {
    if total == T::zero() {
        return T::one();
    }
    (core.squared_norm() / total).min(T::one())
}
