//! Factor PD-clustering.
//!
//! Alternates two steps until the JDF stops decreasing: a Tucker3
//! decomposition of the distance tensor built from the current centers,
//! whose variable-mode factor `B` defines a projection `X* = X·B`, and a
//! PD-clustering of the projected data.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::pdc::{pdc_from, reseed, weighted_centers, PdcConfig, PdcModel, StopReason};
use crate::sampling::distinct_rows;
use crate::tucker::{distance_tensor_with, tucker3, Ranks, TensorEntries, TuckerConfig, TuckerInit};
use crate::{Error, Result, Scalar};

/// How Tucker3 component counts are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum RankChoice {
    /// [`Ranks::defaults`] for the data shape.
    #[default]
    Default,
    /// Fixed `Q`, with `R` and `S` derived as in [`Ranks::with_q`].
    Q(usize),
    Explicit(Ranks),
}

/// Source of the variable loading matrix `B`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub enum Loading<T> {
    #[default]
    Tucker3,
    /// A fixed `J × Q` loading, bypassing the decomposition. The fit is then
    /// a single PD-clustering of `X·B`.
    Fixed(Matrix<T>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FpdcConfig<T> {
    pub k: usize,
    pub ranks: RankChoice,
    pub tucker_max_sweeps: usize,
    pub tucker_fit_tolerance: T,
    pub tucker_init: TuckerInit,
    pub tensor_entries: TensorEntries,
    pub loading: Loading<T>,
    pub pdc: PdcConfig<T>,
    pub max_outer_iters: usize,
    pub standardize: bool,
    pub seed: u64,
}

impl<T: Scalar> FpdcConfig<T> {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            ranks: RankChoice::Default,
            tucker_max_sweeps: 200,
            tucker_fit_tolerance: T::of(1e-8),
            tucker_init: TuckerInit::Hosvd,
            tensor_entries: TensorEntries::Absolute,
            loading: Loading::Tucker3,
            pdc: PdcConfig::default(),
            max_outer_iters: 50,
            standardize: true,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn resolve_ranks(&self, n: usize, j: usize) -> Ranks {
        match self.ranks {
            RankChoice::Default => Ranks::defaults(n, j, self.k),
            RankChoice::Q(q) => Ranks::with_q(n, self.k, q),
            RankChoice::Explicit(r) => r,
        }
    }

    fn tucker_config(&self, ranks: Ranks) -> TuckerConfig<T> {
        TuckerConfig {
            ranks,
            max_sweeps: self.tucker_max_sweeps,
            fit_tolerance: self.tucker_fit_tolerance,
            init: self.tucker_init,
            seed: self.seed,
        }
    }
}

/// Column centering and scaling applied before clustering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization<T> {
    pub means: Vec<T>,
    /// Sample standard deviations (`n − 1` denominator).
    pub sds: Vec<T>,
    /// Original indices of the columns that were kept.
    pub kept: Vec<usize>,
    /// Constant columns, dropped.
    pub dropped: Vec<usize>,
}

/// Z-scores every column, dropping constant ones.
pub fn standardize<T: Scalar>(x: &Matrix<T>) -> Result<(Matrix<T>, Standardization<T>)> {
    let n = x.rows();
    if n < 2 {
        return Err(Error::InvalidParameter("standardization needs at least two rows".into()));
    }
    let mut st = Standardization { means: Vec::new(), sds: Vec::new(), kept: Vec::new(), dropped: Vec::new() };
    for j in 0..x.cols() {
        let col = x.column(j);
        let mean = col.iter().copied().sum::<T>() / T::of_usize(n);
        let var = col.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / T::of_usize(n - 1);
        let sd = var.sqrt();
        if !(sd > T::epsilon() * mean.abs().max(T::one())) {
            log::warn!("dropping constant column {j}");
            st.dropped.push(j);
            continue;
        }
        st.means.push(mean);
        st.sds.push(sd);
        st.kept.push(j);
    }
    if st.kept.is_empty() {
        return Err(Error::InvalidParameter("every column is constant".into()));
    }
    let z = Matrix::from_fn(n, st.kept.len(), |i, c| (x[(i, st.kept[c])] - st.means[c]) / st.sds[c]);
    Ok((z, st))
}

/// `X* = X·B`.
pub fn project<T: Scalar>(x: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    if x.cols() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "data has {} variables, loading has {} rows",
            x.cols(),
            b.rows()
        )));
    }
    x.matmul(b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FpdcModel<T> {
    /// Clustering of the projected data; centers are `K × Q`.
    pub model: PdcModel<T>,
    /// `J × Q` loading of the best outer iterate.
    pub loading: Matrix<T>,
    /// `n × Q` projected coordinates `X·B`.
    pub projected: Matrix<T>,
    /// `K × J` centers in the (standardized) variable space that generated
    /// the best iterate's distance tensor.
    pub original_centers: Matrix<T>,
    /// Tucker3 explained fraction for the best iterate, when Tucker3 ran.
    pub explained_fraction: Option<T>,
    pub ranks: Ranks,
    /// Final inner JDF of every outer iteration.
    pub outer_trace: Vec<T>,
    pub outer_iterations: usize,
    pub best_outer: usize,
    pub stop: StopReason,
    pub standardization: Option<Standardization<T>>,
}

impl<T: Scalar> FpdcModel<T> {
    pub fn jdf(&self) -> T {
        self.model.jdf_total
    }
}

pub fn fpdc<T: Scalar>(x: &Matrix<T>, cfg: &FpdcConfig<T>) -> Result<FpdcModel<T>> {
    let k = cfg.k;
    if k == 0 {
        return Err(Error::InvalidParameter("cluster count must be at least 1".into()));
    }
    if x.rows() < k {
        return Err(Error::TooFewPoints { n: x.rows(), k });
    }
    if x.cols() == 0 {
        return Err(Error::InvalidParameter("data has no variables".into()));
    }
    if cfg.max_outer_iters == 0 {
        return Err(Error::InvalidParameter("max_outer_iters must be at least 1".into()));
    }
    if !x.is_finite() {
        return Err(Error::NonFinite("data"));
    }

    let (data, standardization) = if cfg.standardize {
        let (z, st) = standardize(x)?;
        (z, Some(st))
    } else {
        (x.clone(), None)
    };
    let (n, j) = data.shape();
    let ranks = match &cfg.loading {
        Loading::Tucker3 => {
            let r = cfg.resolve_ranks(n, j);
            r.validate((n, j, k))?;
            r
        }
        Loading::Fixed(b) => {
            if b.rows() != j || b.cols() == 0 {
                return Err(Error::DimensionMismatch(format!(
                    "fixed loading is {}x{} for {j} variables",
                    b.rows(),
                    b.cols()
                )));
            }
            Ranks::new(0, b.cols(), 0)
        }
    };
    let tucker_cfg = cfg.tucker_config(ranks);

    let mut centers = distinct_rows(&data, k, cfg.seed)?;
    let mut outer_trace = Vec::new();
    let mut best: Option<FpdcModel<T>> = None;
    let mut previous = T::infinity();
    let mut stop = StopReason::MaxIterations;

    for outer in 0..cfg.max_outer_iters {
        let (b, explained) = match &cfg.loading {
            Loading::Tucker3 => {
                let g = distance_tensor_with(&data, &centers, cfg.tensor_entries)?;
                let f = tucker3(&g, &tucker_cfg)?;
                (f.b, Some(f.explained_fraction))
            }
            Loading::Fixed(b) => (b.clone(), None),
        };
        let projected = project(&data, &b)?;
        let start = project(&centers, &b)?;
        let inner = pdc_from(&projected, start, &cfg.pdc)?;
        let total = inner.jdf_total;
        outer_trace.push(total);
        log::debug!("outer iteration {outer}: jdf {total}");

        let (next, degenerate) =
            weighted_centers(&data, &inner.probabilities, &inner.distances, cfg.pdc.center_weights)?;

        if best.as_ref().is_none_or(|m| total < m.jdf()) {
            best = Some(FpdcModel {
                model: inner.clone(),
                loading: b,
                projected,
                original_centers: centers.clone(),
                explained_fraction: explained,
                ranks,
                outer_trace: Vec::new(),
                outer_iterations: 0,
                best_outer: outer,
                stop,
                standardization: None,
            });
        }
        if matches!(cfg.loading, Loading::Fixed(_)) {
            // nothing to alternate with: another pass would only continue the same PD-clustering
            stop = inner.stop;
            break;
        }
        let decrease = previous - total;
        if !(decrease > T::zero()) || decrease < cfg.pdc.min_jdf_decrease {
            stop = StopReason::JdfStalled;
            break;
        }
        previous = total;

        centers = reseed(&data, next, &degenerate, &inner.jdf_per_point);
    }

    let mut model = best.expect("at least one outer iteration");
    model.outer_iterations = outer_trace.len();
    model.outer_trace = outer_trace;
    model.stop = stop;
    model.standardization = standardization;
    Ok(model)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Multistart<T> {
    pub best: FpdcModel<T>,
    pub best_run: usize,
    /// Final JDF of every run, in run order.
    pub jdf_samples: Vec<T>,
    /// Outer JDF trace of every run, in run order.
    pub traces: Vec<Vec<T>>,
    pub stops: Vec<StopReason>,
}

/// Runs [`fpdc`] `runs` times with seeds `cfg.seed + r` and keeps the lowest
/// JDF (earliest run on ties). Runs execute on the current rayon pool; the
/// result does not depend on scheduling.
pub fn multistart<T: Scalar>(x: &Matrix<T>, cfg: &FpdcConfig<T>, runs: usize) -> Result<Multistart<T>> {
    if runs == 0 {
        return Err(Error::InvalidParameter("runs must be at least 1".into()));
    }
    let models = (0..runs)
        .into_par_iter()
        .map(|r| fpdc(x, &cfg.clone().with_seed(run_seed(cfg.seed, r))))
        .collect::<Result<Vec<_>>>()?;
    let jdf_samples: Vec<T> = models.iter().map(|m| m.jdf()).collect();
    let traces = models.iter().map(|m| m.outer_trace.clone()).collect();
    let stops = models.iter().map(|m| m.stop).collect();
    let best_run = jdf_samples
        .iter()
        .enumerate()
        .fold(0, |b, (r, &v)| if v < jdf_samples[b] { r } else { b });
    let best = models.into_iter().nth(best_run).expect("best run exists");
    Ok(Multistart { best, best_run, jdf_samples, traces, stops })
}

/// Seed used by run `r` of a multistart with base seed `seed`.
pub fn run_seed(seed: u64, r: usize) -> u64 {
    seed.wrapping_add(r as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_loading_leaves_data_unchanged() {
        let x = Matrix::from_rows(&[[1.0, 2.0, 3.0], [-4.0, 5.5, 0.0]]).unwrap();
        assert_eq!(project(&x, &Matrix::identity(3)).unwrap(), x);
    }

    #[test]
    fn selector_loading_picks_a_column() {
        let x = Matrix::from_rows(&[[1.0, 2.0, 3.0], [-4.0, 5.5, 0.0]]).unwrap();
        let b = Matrix::from_rows(&[[0.0], [1.0], [0.0]]).unwrap();
        assert_eq!(project(&x, &b).unwrap().column(0), x.column(1));
    }

    #[test]
    fn hand_projection() {
        let x = Matrix::from_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]).unwrap();
        let b = Matrix::from_rows(&[[1.0, 0.0], [2.0, -1.0], [0.0, 3.0]]).unwrap();
        let expected = Matrix::from_rows(&[[5.0, 7.0], [14.0, 13.0]]).unwrap();
        assert_eq!(project(&x, &b).unwrap(), expected);
        assert!(project(&b, &b).is_err());
    }

    #[test]
    fn standardize_drops_constant_columns() {
        let x = Matrix::from_rows(&[[1.0, 5.0, 2.0], [3.0, 5.0, 4.0], [5.0, 5.0, 9.0]]).unwrap();
        let (z, st) = standardize(&x).unwrap();
        assert_eq!(st.dropped, vec![1]);
        assert_eq!(z.shape(), (3, 2));
        assert_eq!(z.column(0), vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let x = Matrix::<f64>::zeros(3, 2);
        assert!(matches!(fpdc(&x, &FpdcConfig::new(4)), Err(Error::TooFewPoints { .. })));
        assert!(matches!(fpdc(&x, &FpdcConfig::new(2)), Err(Error::InvalidParameter(_))));
        let mut cfg = FpdcConfig::new(2);
        cfg.standardize = false;
        cfg.loading = Loading::Fixed(Matrix::identity(3));
        assert!(matches!(fpdc(&x, &cfg), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn run_seeds_offset_by_index() {
        assert_eq!(run_seed(7, 0), 7);
        assert_eq!(run_seed(7, 3), 10);
        assert_eq!(run_seed(u64::MAX, 1), 0);
    }
}
