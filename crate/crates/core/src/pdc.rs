//! Probabilistic distance clustering.
//!
//! Each point's belonging probability to a cluster is inversely proportional
//! to its squared Euclidean distance from the cluster center, so that
//! `p_ik · d_ik` is the same for every `k`. That common value is the point's
//! joint distance function (JDF); the sum of JDFs over all points is the
//! objective the algorithm drives down.

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::sampling::distinct_rows;
use crate::{Error, Result, Scalar};

/// Total weight below which a cluster is considered to have collapsed.
const DEGENERATE_WEIGHT: f64 = 1e-12;

/// How data points are weighted when recomputing centers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CenterWeights {
    /// `u_ik = p_ik²`. The fixed points of this update are exactly the
    /// stationary points of the squared-distance JDF objective, and each
    /// update cannot increase it.
    #[default]
    ProbabilitySquared,
    /// `u_ik = p_ik² / d_ik`, the Weiszfeld-style weights that are stationary
    /// for unsquared distances. Kept for comparison; with squared distances
    /// its fixed points are not stationary for the JDF.
    ProbabilitySquaredOverDistance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdcConfig<T> {
    pub max_iters: usize,
    /// Absolute JDF decrease below which the iteration counts as converged.
    pub min_jdf_decrease: T,
    /// Lower bound applied to every distance before it is divided by.
    pub distance_floor: T,
    pub seed: u64,
    pub center_weights: CenterWeights,
}

impl<T: Scalar> Default for PdcConfig<T> {
    fn default() -> Self {
        Self {
            max_iters: 500,
            min_jdf_decrease: T::of(1e-9),
            distance_floor: T::of(1e-12),
            seed: 0,
            center_weights: CenterWeights::default(),
        }
    }
}

impl<T: Scalar> PdcConfig<T> {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
        }
        if !(self.distance_floor > T::zero()) || !self.distance_floor.is_finite() {
            return Err(Error::InvalidParameter("distance_floor must be positive".into()));
        }
        if !(self.min_jdf_decrease >= T::zero()) {
            return Err(Error::InvalidParameter("min_jdf_decrease must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    /// The JDF failed to decrease by at least the configured amount.
    JdfStalled,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdcModel<T> {
    /// `K × d` centers of the lowest-JDF iterate.
    pub centers: Matrix<T>,
    /// `n × K` belonging probabilities for those centers.
    pub probabilities: Matrix<T>,
    /// Floored squared distances for those centers.
    pub distances: Matrix<T>,
    pub jdf_total: T,
    pub jdf_per_point: Vec<T>,
    /// Number of JDF evaluations performed.
    pub iterations: usize,
    /// JDF after every evaluation, in order.
    pub trace: Vec<T>,
    pub stop: StopReason,
}

impl<T: Scalar> PdcModel<T> {
    pub fn k(&self) -> usize {
        self.centers.rows()
    }
}

/// Squared Euclidean distances, `n × K`.
pub fn distances<T: Scalar>(x: &Matrix<T>, c: &Matrix<T>) -> Result<Matrix<T>> {
    if x.cols() != c.cols() {
        return Err(Error::DimensionMismatch(format!(
            "data has {} variables, centers have {}",
            x.cols(),
            c.cols()
        )));
    }
    if c.rows() == 0 {
        return Err(Error::InvalidParameter("at least one center is required".into()));
    }
    Ok(Matrix::from_fn(x.rows(), c.rows(), |i, k| {
        x.row(i).iter().zip(c.row(k)).map(|(&a, &b)| (a - b) * (a - b)).sum()
    }))
}

/// Entrywise `max(d, floor)`.
pub fn floor_distances<T: Scalar>(d: &Matrix<T>, floor: T) -> Matrix<T> {
    d.map(|v| v.max(floor))
}

/// Belonging probabilities `p_ik = Π_{m≠k} d_im / Σ_m Π_{l≠m} d_il`.
///
/// Evaluated in the algebraically equal form `(1/d_ik) / Σ_m (1/d_im)`, scaled
/// by the row minimum, which cannot overflow for large `K`. Distances must be
/// floored first.
pub fn membership_probabilities<T: Scalar>(d: &Matrix<T>) -> Matrix<T> {
    let mut p = Matrix::zeros(d.rows(), d.cols());
    for i in 0..d.rows() {
        let row = d.row(i);
        let dmin = row.iter().fold(T::infinity(), |m, &v| m.min(v));
        let inv: Vec<T> = row.iter().map(|&v| dmin / v).collect();
        let total: T = inv.iter().copied().sum();
        for (o, v) in p.row_mut(i).iter_mut().zip(inv) {
            *o = v / total;
        }
    }
    p
}

/// Per-point JDF `Π_m d_im / Σ_m Π_{l≠m} d_il` and the total objective
/// `Σ_i Σ_k d_ik p_ik²`.
pub fn joint_distance_function<T: Scalar>(d: &Matrix<T>) -> (Vec<T>, T) {
    let p = membership_probabilities(d);
    let per_point = (0..d.rows())
        .map(|i| {
            let row = d.row(i);
            let dmin = row.iter().fold(T::infinity(), |m, &v| m.min(v));
            let s: T = row.iter().map(|&v| dmin / v).sum();
            dmin / s
        })
        .collect();
    let total = objective_with(d, &p);
    (per_point, total)
}

/// `Σ_i Σ_k d_ik p_ik²` for arbitrary `p`.
pub fn objective_with<T: Scalar>(d: &Matrix<T>, p: &Matrix<T>) -> T {
    d.as_slice().iter().zip(p.as_slice()).map(|(&dv, &pv)| dv * pv * pv).sum()
}

/// New centers as convex combinations of the data rows.
///
/// Fails with [`Error::DegenerateCluster`] when a cluster's total weight has
/// vanished; [`pdc`] handles that case by re-seeding.
pub fn update_centers<T: Scalar>(
    x: &Matrix<T>,
    p: &Matrix<T>,
    d: &Matrix<T>,
    weights: CenterWeights,
) -> Result<Matrix<T>> {
    let (centers, degenerate) = weighted_centers(x, p, d, weights)?;
    match degenerate.first() {
        Some(&cluster) => Err(Error::DegenerateCluster { cluster }),
        None => Ok(centers),
    }
}

/// Returns the centers and the clusters whose weight collapsed (their rows are
/// left at zero).
pub(crate) fn weighted_centers<T: Scalar>(
    x: &Matrix<T>,
    p: &Matrix<T>,
    d: &Matrix<T>,
    weights: CenterWeights,
) -> Result<(Matrix<T>, Vec<usize>)> {
    let (n, k) = p.shape();
    if x.rows() != n || d.shape() != p.shape() {
        return Err(Error::DimensionMismatch(format!(
            "data {:?}, probabilities {:?}, distances {:?}",
            x.shape(),
            p.shape(),
            d.shape()
        )));
    }
    let mut centers = Matrix::zeros(k, x.cols());
    let mut degenerate = Vec::new();
    for c in 0..k {
        let u: Vec<T> = (0..n)
            .map(|i| {
                let pp = p[(i, c)] * p[(i, c)];
                match weights {
                    CenterWeights::ProbabilitySquared => pp,
                    CenterWeights::ProbabilitySquaredOverDistance => pp / d[(i, c)],
                }
            })
            .collect();
        let total: T = u.iter().copied().sum();
        if !(total > T::of(DEGENERATE_WEIGHT)) {
            degenerate.push(c);
            continue;
        }
        let row = centers.row_mut(c);
        for (i, &ui) in u.iter().enumerate() {
            let w = ui / total;
            for (o, &xv) in row.iter_mut().zip(x.row(i)) {
                *o = *o + w * xv;
            }
        }
    }
    Ok((centers, degenerate))
}

/// PD-clustering from `k` distinct data rows drawn with `cfg.seed`.
pub fn pdc<T: Scalar>(x: &Matrix<T>, k: usize, cfg: &PdcConfig<T>) -> Result<PdcModel<T>> {
    check_data(x, k)?;
    let start = distinct_rows(x, k, cfg.seed)?;
    pdc_from(x, start, cfg)
}

/// PD-clustering from explicit starting centers.
///
/// Alternates distances, probabilities, and center updates, recording the
/// total JDF at every step. Stops as soon as the JDF fails to decrease by
/// `cfg.min_jdf_decrease`, or after `cfg.max_iters` evaluations, and returns
/// the lowest-JDF iterate.
pub fn pdc_from<T: Scalar>(x: &Matrix<T>, start: Matrix<T>, cfg: &PdcConfig<T>) -> Result<PdcModel<T>> {
    cfg.validate()?;
    let k = start.rows();
    check_data(x, k)?;
    if start.cols() != x.cols() {
        return Err(Error::DimensionMismatch(format!(
            "data has {} variables, starting centers have {}",
            x.cols(),
            start.cols()
        )));
    }
    if !start.is_finite() {
        return Err(Error::NonFinite("starting centers"));
    }

    let mut centers = start;
    let mut trace = Vec::new();
    let mut best: Option<PdcModel<T>> = None;
    let mut previous = T::infinity();
    let mut stop = StopReason::MaxIterations;

    for _ in 0..cfg.max_iters {
        let d = floor_distances(&distances(x, &centers)?, cfg.distance_floor);
        let p = membership_probabilities(&d);
        let (per_point, total) = joint_distance_function(&d);
        trace.push(total);

        if best.as_ref().is_none_or(|b| total < b.jdf_total) {
            best = Some(PdcModel {
                centers: centers.clone(),
                probabilities: p.clone(),
                distances: d.clone(),
                jdf_total: total,
                jdf_per_point: per_point.clone(),
                iterations: 0,
                trace: Vec::new(),
                stop,
            });
        }
        let decrease = previous - total;
        if !(decrease > T::zero()) || decrease < cfg.min_jdf_decrease {
            stop = StopReason::JdfStalled;
            break;
        }
        previous = total;

        let (next, degenerate) = weighted_centers(x, &p, &d, cfg.center_weights)?;
        centers = reseed(x, next, &degenerate, &per_point);
    }

    let mut model = best.expect("at least one iteration");
    model.iterations = trace.len();
    model.trace = trace;
    model.stop = stop;
    Ok(model)
}

/// Moves collapsed centers onto the points with the largest JDF.
pub(crate) fn reseed<T: Scalar>(x: &Matrix<T>, mut centers: Matrix<T>, degenerate: &[usize], jdf: &[T]) -> Matrix<T> {
    if degenerate.is_empty() {
        return centers;
    }
    let mut order: Vec<usize> = (0..x.rows()).collect();
    order.sort_by(|&a, &b| jdf[b].partial_cmp(&jdf[a]).expect("finite jdf").then(a.cmp(&b)));
    for (&c, &row) in degenerate.iter().zip(&order) {
        log::debug!("re-seeding collapsed cluster {c} at row {row}");
        centers.row_mut(c).copy_from_slice(x.row(row));
    }
    centers
}

fn check_data<T: Scalar>(x: &Matrix<T>, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("cluster count must be at least 1".into()));
    }
    if x.rows() < k {
        return Err(Error::TooFewPoints { n: x.rows(), k });
    }
    if !x.is_finite() {
        return Err(Error::NonFinite("data"));
    }
    Ok(())
}
