//! Cluster validation: hard assignments, the probabilistic density-based
//! silhouette (dbs), misclassification against known labels, within-group
//! deviance, and the k-means baseline.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::sampling::distinct_rows;
use crate::{Error, Result, Scalar};

/// Largest cluster count for the exhaustive permutation search.
pub const MAX_PERMUTATION_K: usize = 8;

/// Hard cluster labels `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub labels: Vec<usize>,
    pub k: usize,
}

impl Assignment {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::InvalidParameter(format!("label {bad} outside 0..{k}")));
        }
        Ok(Self { labels, k })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

/// Row-wise argmax; ties go to the lowest cluster index.
pub fn assign_labels<T: Scalar>(p: &Matrix<T>) -> Assignment {
    let labels = p
        .row_iter()
        .map(|row| row.iter().enumerate().fold(0, |best, (k, &v)| if v > row[best] { k } else { best }))
        .collect();
    Assignment { labels, k: p.cols() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbsEntry<T> {
    pub row: usize,
    pub dbs: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbsSummary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub cluster_means: Vec<f64>,
    pub cluster_sizes: Vec<usize>,
    pub max_abs_log_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbsReport<T> {
    /// Normalized score of every row, in `[-1, 1]`.
    pub per_point: Vec<T>,
    /// `log(p_assigned / p_runner_up)` before normalization.
    pub log_ratio: Vec<T>,
    /// Rows of each cluster, sorted by decreasing dbs (row index on ties).
    pub clusters: Vec<Vec<DbsEntry<T>>>,
    pub summary: DbsSummary,
}

/// Density-based silhouette for probabilistic clusterings.
///
/// For row `i` assigned to cluster `a`, the raw score is
/// `log(p_ia / p_ib)` with `b` the most probable cluster other than `a`;
/// scores are divided by the largest absolute raw score. Probabilities are
/// clamped to `[prob_floor, 1]` first.
pub fn dbs<T: Scalar>(p: &Matrix<T>, a: &Assignment, prob_floor: T) -> Result<DbsReport<T>> {
    let (n, k) = p.shape();
    if k < 2 {
        return Err(Error::InvalidParameter("dbs needs at least two clusters".into()));
    }
    if a.len() != n || a.k != k {
        return Err(Error::DimensionMismatch(format!(
            "{} labels over {} clusters for a {n}x{k} probability matrix",
            a.len(),
            a.k
        )));
    }
    if !(prob_floor > T::zero() && prob_floor < T::one()) {
        return Err(Error::InvalidParameter("prob_floor must lie in (0, 1)".into()));
    }
    let clamp = |v: T| v.max(prob_floor).min(T::one());
    let log_ratio: Vec<T> = (0..n)
        .map(|i| {
            let own = a.labels[i];
            let runner_up = (0..k).filter(|&m| m != own).map(|m| clamp(p[(i, m)])).fold(T::neg_infinity(), T::max);
            (clamp(p[(i, own)]) / runner_up).ln()
        })
        .collect();
    let scale = log_ratio.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    let per_point: Vec<T> =
        if scale > T::zero() { log_ratio.iter().map(|&v| v / scale).collect() } else { vec![T::zero(); n] };

    let mut clusters: Vec<Vec<DbsEntry<T>>> = vec![Vec::new(); k];
    for (row, (&label, &score)) in a.labels.iter().zip(&per_point).enumerate() {
        clusters[label].push(DbsEntry { row, dbs: score });
    }
    for c in clusters.iter_mut() {
        c.sort_by(|x, y| y.dbs.partial_cmp(&x.dbs).expect("finite dbs").then(x.row.cmp(&y.row)));
    }

    let values: Vec<f64> = per_point.iter().map(|v| v.as_f64()).collect();
    let mean_of = |vals: &mut dyn Iterator<Item = f64>| {
        let (s, c) = vals.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
        if c == 0 { 0.0 } else { s / c as f64 }
    };
    let summary = DbsSummary {
        mean: mean_of(&mut values.iter().copied()),
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        cluster_means: clusters.iter().map(|c| mean_of(&mut c.iter().map(|e| e.dbs.as_f64()))).collect(),
        cluster_sizes: clusters.iter().map(Vec::len).collect(),
        max_abs_log_ratio: scale.as_f64(),
    };
    Ok(DbsReport { per_point, log_ratio, clusters, summary })
}

/// Cluster-to-truth relabeling with the most agreements: row `i` is matched
/// when `mapping[labels[i]] == truth[i]`. Rows flagged in `exclude` are not
/// counted. Ties go to the lexicographically first permutation.
pub fn best_matching(a: &Assignment, truth: &[usize], exclude: Option<&[bool]>) -> Result<Vec<usize>> {
    Ok(matching(&confusion(a, truth, exclude)?.0))
}

fn matching(confusion: &[Vec<usize>]) -> Vec<usize> {
    let k = confusion.len();
    let agreement = |perm: &Vec<usize>| (0..k).map(|l| confusion[l][perm[l]]).sum::<usize>();
    let mut best: Option<(usize, Vec<usize>)> = None;
    for perm in (0..k).permutations(k) {
        let score = agreement(&perm);
        if best.as_ref().is_none_or(|(b, _)| score > *b) {
            best = Some((score, perm));
        }
    }
    best.map(|(_, p)| p).unwrap_or_default()
}

/// Fraction of rows whose label disagrees with the truth under the best
/// relabeling of the clusters. Rows flagged in `exclude` are left out of both
/// counts.
pub fn misclassification_rate(a: &Assignment, truth: &[usize], exclude: Option<&[bool]>) -> Result<f64> {
    let (confusion, counted) = confusion(a, truth, exclude)?;
    let mapping = matching(&confusion);
    let agreement: usize = mapping.iter().enumerate().map(|(l, &t)| confusion[l][t]).sum();
    Ok((counted - agreement) as f64 / counted as f64)
}

/// `confusion[label][truth]` over the counted rows, and the number counted.
fn confusion(a: &Assignment, truth: &[usize], exclude: Option<&[bool]>) -> Result<(Vec<Vec<usize>>, usize)> {
    if truth.len() != a.len() {
        return Err(Error::DimensionMismatch(format!("{} labels vs {} truth values", a.len(), truth.len())));
    }
    if let Some(ex) = exclude {
        if ex.len() != a.len() {
            return Err(Error::DimensionMismatch(format!("{} labels vs {} exclusion flags", a.len(), ex.len())));
        }
    }
    let k = truth.iter().map(|&t| t + 1).max().unwrap_or(0).max(a.k);
    if k > MAX_PERMUTATION_K {
        return Err(Error::Unsupported(format!(
            "exhaustive label matching is limited to {MAX_PERMUTATION_K} clusters, got {k}"
        )));
    }
    let mut confusion = vec![vec![0usize; k]; k];
    let mut counted = 0usize;
    for (i, (&l, &t)) in a.labels.iter().zip(truth).enumerate() {
        if exclude.is_some_and(|ex| ex[i]) {
            continue;
        }
        confusion[l][t] += 1;
        counted += 1;
    }
    if counted == 0 {
        return Err(Error::InvalidParameter("no rows left to evaluate".into()));
    }
    Ok((confusion, counted))
}

/// Within-groups deviance `Σ_k Σ_{i∈k} ‖x_i − mean_k‖²`.
pub fn within_variance<T: Scalar>(x: &Matrix<T>, a: &Assignment) -> Result<T> {
    let means = cluster_means(x, a)?;
    Ok(deviance(x, a, &means))
}

fn cluster_means<T: Scalar>(x: &Matrix<T>, a: &Assignment) -> Result<Matrix<T>> {
    if a.len() != x.rows() {
        return Err(Error::DimensionMismatch(format!("{} labels for {} rows", a.len(), x.rows())));
    }
    let sizes = a.sizes();
    if let Some(cluster) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::EmptyCluster { cluster });
    }
    let mut means = Matrix::zeros(a.k, x.cols());
    for (i, &l) in a.labels.iter().enumerate() {
        for (m, &v) in means.row_mut(l).iter_mut().zip(x.row(i)) {
            *m = *m + v;
        }
    }
    for (k, &s) in sizes.iter().enumerate() {
        let s = T::of_usize(s);
        means.row_mut(k).iter_mut().for_each(|m| *m = *m / s);
    }
    Ok(means)
}

fn deviance<T: Scalar>(x: &Matrix<T>, a: &Assignment, centers: &Matrix<T>) -> T {
    a.labels.iter().enumerate().map(|(i, &l)| squared_distance(x.row(i), centers.row(l))).sum()
}

fn squared_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&u, &v)| (u - v) * (u - v)).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KmeansResult<T> {
    pub assignment: Assignment,
    pub centers: Matrix<T>,
    /// Within-groups deviance after every Lloyd step.
    pub within_trace: Vec<T>,
    pub iterations: usize,
    /// False when `max_iters` was reached before the assignment settled.
    pub converged: bool,
}

impl<T: Scalar> KmeansResult<T> {
    pub fn within_variance(&self) -> T {
        *self.within_trace.last().expect("at least one Lloyd step")
    }
}

/// Lloyd's algorithm from `k` distinct seeded rows.
///
/// Stops when the assignment no longer changes. A cluster that empties
/// takes over the point farthest from its current center.
pub fn kmeans<T: Scalar>(x: &Matrix<T>, k: usize, seed: u64, max_iters: usize) -> Result<KmeansResult<T>> {
    if !x.is_finite() {
        return Err(Error::NonFinite("data"));
    }
    if max_iters == 0 {
        return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
    }
    let mut centers = distinct_rows(x, k, seed)?;
    let mut previous: Option<Vec<usize>> = None;
    let mut within_trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iters {
        let mut labels: Vec<usize> = x.row_iter().map(|row| nearest(row, &centers).0).collect();
        fill_empty_clusters(x, &centers, &mut labels, k);
        if previous.as_ref() == Some(&labels) {
            converged = true;
            break;
        }
        iterations += 1;
        let a = Assignment { labels, k };
        centers = cluster_means(x, &a)?;
        within_trace.push(deviance(x, &a, &centers));
        previous = Some(a.labels);
    }

    let labels = previous.expect("at least one Lloyd step");
    Ok(KmeansResult { assignment: Assignment { labels, k }, centers, within_trace, iterations, converged })
}

fn nearest<T: Scalar>(row: &[T], centers: &Matrix<T>) -> (usize, T) {
    (0..centers.rows())
        .map(|c| (c, squared_distance(row, centers.row(c))))
        .fold((0, T::infinity()), |best, cur| if cur.1 < best.1 { cur } else { best })
}

fn fill_empty_clusters<T: Scalar>(x: &Matrix<T>, centers: &Matrix<T>, labels: &mut [usize], k: usize) {
    loop {
        let mut sizes = vec![0usize; k];
        labels.iter().for_each(|&l| sizes[l] += 1);
        let Some(empty) = sizes.iter().position(|&s| s == 0) else { return };
        // farthest point from its own center, among clusters that can spare one
        let donor = (0..x.rows())
            .filter(|&i| sizes[labels[i]] > 1)
            .map(|i| (i, squared_distance(x.row(i), centers.row(labels[i]))))
            .fold(None, |best: Option<(usize, T)>, cur| match best {
                Some(b) if b.1 >= cur.1 => Some(b),
                _ => Some(cur),
            });
        match donor {
            Some((i, _)) => labels[i] = empty,
            None => return,
        }
    }
}
