//! Seeded benchmark generators and the CSV dataset format.
//!
//! Two designs are provided: contaminated equicorrelated Gaussian clusters
//! centered on a hypersphere ([`generate_mz`]), and axis-independent Gaussian
//! clusters of unequal sizes ([`generate_independent`]).

use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_lr;

use crate::linalg::Matrix;
use crate::sampling::rng;
use crate::{Error, Result};

/// Quantile of the chi-square distribution with `df` degrees of freedom.
///
/// Bisection on the regularized lower incomplete gamma function; absolute
/// accuracy is better than 1e-10 over the ranges used here.
pub fn chi_square_quantile(df: usize, p: f64) -> Result<f64> {
    if df == 0 {
        return Err(Error::InvalidParameter("chi-square needs at least one degree of freedom".into()));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("probability {p} outside (0, 1)")));
    }
    let a = df as f64 / 2.0;
    let cdf = |x: f64| gamma_lr(a, x / 2.0);
    let mut hi = df as f64 + 10.0 * (2.0 * df as f64).sqrt() + 10.0;
    while cdf(hi) < p {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Coefficients `(a, b)` of `r_min = (a·√χ² + b·√χ²)/√J`.
pub const RMIN_COEFFICIENTS: (f64, f64) = (1.2, 1.0);

/// Smallest outlier displacement that keeps contaminants clear of their
/// cluster: `(1.2·√χ²_{J,1−α} + √χ²_{J,1−α}) / √J`.
pub fn r_min(j: usize, alpha: f64) -> Result<f64> {
    r_min_with(j, alpha, RMIN_COEFFICIENTS)
}

pub fn r_min_with(j: usize, alpha: f64, (a, b): (f64, f64)) -> Result<f64> {
    if j == 0 {
        return Err(Error::InvalidParameter("J must be at least 1".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha {alpha} outside (0, 1)")));
    }
    let root = chi_square_quantile(j, 1.0 - alpha)?.sqrt();
    Ok((a * root + b * root) / (j as f64).sqrt())
}

/// Contaminated correlated-Gaussian design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MzConfig {
    pub k: usize,
    pub n_per_cluster: usize,
    pub j: usize,
    /// Off-diagonal entry of the transform `Σ` (unit diagonal). The
    /// population covariance of a cluster is `Σ²`.
    pub rho: f64,
    /// Fraction of each cluster replaced by contaminants.
    pub eps: f64,
    /// Outlier displacement; contaminants are centered at `r·√J·a₀` from
    /// their cluster center.
    pub r: f64,
    pub alpha: f64,
    /// Radius of the hypersphere the cluster centers are drawn on.
    pub sphere_radius: f64,
    pub seed: u64,
    pub enforce_rmin: bool,
    pub rmin_coefficients: (f64, f64),
}

impl Default for MzConfig {
    /// Four clusters of 100 seven-dimensional points, 20% contamination,
    /// `r = 4`. `rho` and the sphere radius are not pinned by the design and
    /// default to 0.5 and 6.
    fn default() -> Self {
        Self {
            k: 4,
            n_per_cluster: 100,
            j: 7,
            rho: 0.5,
            eps: 0.2,
            r: 4.0,
            alpha: 0.01,
            sphere_radius: 6.0,
            seed: 0,
            enforce_rmin: true,
            rmin_coefficients: RMIN_COEFFICIENTS,
        }
    }
}

impl MzConfig {
    /// Contaminants per cluster, `ε·n` rounded half to even.
    pub fn contaminated_per_cluster(&self) -> usize {
        (self.eps * self.n_per_cluster as f64).round_ties_even() as usize
    }

    /// The `J × J` transform with unit diagonal and `rho` elsewhere.
    pub fn transform(&self) -> Matrix<f64> {
        Matrix::from_fn(self.j, self.j, |a, b| if a == b { 1.0 } else { self.rho })
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 || self.n_per_cluster == 0 {
            return Err(Error::InvalidParameter("need at least one cluster and one point per cluster".into()));
        }
        if self.j < 2 {
            return Err(Error::Unsupported(
                "J = 1 leaves no direction orthogonal to the ones vector for contaminants".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::InvalidParameter(format!("rho {} outside [0, 1)", self.rho)));
        }
        if !(0.0..1.0).contains(&self.eps) {
            return Err(Error::InvalidParameter(format!("eps {} outside [0, 1)", self.eps)));
        }
        if !(self.sphere_radius >= 0.0) || !self.r.is_finite() {
            return Err(Error::InvalidParameter("sphere radius and r must be finite and nonnegative".into()));
        }
        if self.enforce_rmin {
            let min = r_min_with(self.j, self.alpha, self.rmin_coefficients)?;
            if self.r < min {
                return Err(Error::InvalidParameter(format!(
                    "r = {} is below r_min = {min:.4} for J = {}, alpha = {}",
                    self.r, self.j, self.alpha
                )));
            }
        }
        Ok(())
    }
}

/// Generated data with the generating truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub x: Matrix<f64>,
    /// Generating cluster of each row, `0..K`.
    pub labels: Vec<usize>,
    pub outliers: Vec<bool>,
    /// `K × J` generating means.
    pub centers: Matrix<f64>,
}

impl LabeledDataset {
    pub fn k(&self) -> usize {
        self.centers.rows()
    }

    /// Rows whose nearest generating mean is the one they were drawn from.
    pub fn non_overlapping(&self) -> Vec<bool> {
        (0..self.x.rows())
            .map(|i| {
                let row = self.x.row(i);
                let nearest = (0..self.k())
                    .map(|k| {
                        let d: f64 = row.iter().zip(self.centers.row(k)).map(|(a, b)| (a - b) * (a - b)).sum();
                        (k, d)
                    })
                    .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
                    .0;
                nearest == self.labels[i]
            })
            .collect()
    }
}

/// A unit vector orthogonal to `(1, …, 1)`, from Gram–Schmidt on a random
/// Gaussian draw.
pub fn outlier_direction<R: Rng + ?Sized>(j: usize, rng: &mut R) -> Result<Vec<f64>> {
    if j < 2 {
        return Err(Error::Unsupported("no direction orthogonal to the ones vector in one dimension".into()));
    }
    loop {
        let mut v: Vec<f64> = (0..j).map(|_| StandardNormal.sample(rng)).collect();
        for _ in 0..2 {
            let mean = v.iter().sum::<f64>() / j as f64;
            v.iter_mut().for_each(|x| *x -= mean);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            return Ok(v);
        }
    }
}

pub fn generate_mz(cfg: &MzConfig) -> Result<LabeledDataset> {
    cfg.validate()?;
    let mut rng = rng(cfg.seed);
    let sigma = cfg.transform();
    let contaminated = cfg.contaminated_per_cluster();
    let shift = cfg.r * (cfg.j as f64).sqrt();
    let n = cfg.k * cfg.n_per_cluster;

    let mut rows = Vec::with_capacity(n);
    let mut centers = Matrix::zeros(cfg.k, cfg.j);
    for k in 0..cfg.k {
        let mut center: Vec<f64> = (0..cfg.j).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = center.iter().map(|x| x * x).sum::<f64>().sqrt();
        center.iter_mut().for_each(|x| *x *= cfg.sphere_radius / norm);
        centers.row_mut(k).copy_from_slice(&center);
        let a0 = outlier_direction(cfg.j, &mut rng)?;

        for i in 0..cfg.n_per_cluster {
            let z: Vec<f64> = (0..cfg.j).map(|_| StandardNormal.sample(&mut rng)).collect();
            let outlier = i < contaminated;
            let y: Vec<f64> = (0..cfg.j)
                .map(|a| {
                    let mixed: f64 = sigma.row(a).iter().zip(&z).map(|(s, v)| s * v).sum();
                    let offset = if outlier { shift * a0[a] } else { 0.0 };
                    mixed + center[a] + offset
                })
                .collect();
            rows.push((y, k, outlier));
        }
    }
    rows.shuffle(&mut rng);
    assemble(rows, cfg.j, centers)
}

/// Axis-independent Gaussian clusters: cluster `k` has `sizes[k]` rows drawn
/// from `N(means[k], diag(sds[k]²))`.
pub fn generate_independent(
    sizes: &[usize],
    means: &[Vec<f64>],
    sds: &[Vec<f64>],
    seed: u64,
) -> Result<LabeledDataset> {
    if sizes.is_empty() || sizes.len() != means.len() || sizes.len() != sds.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} sizes, {} means, {} standard deviations",
            sizes.len(),
            means.len(),
            sds.len()
        )));
    }
    let j = means[0].len();
    if j == 0 || means.iter().any(|m| m.len() != j) || sds.iter().any(|s| s.len() != j) {
        return Err(Error::DimensionMismatch("every mean and sd vector needs the same positive length".into()));
    }
    if sds.iter().flatten().any(|&s| !(s >= 0.0) || !s.is_finite()) {
        return Err(Error::InvalidParameter("standard deviations must be finite and nonnegative".into()));
    }
    let mut rng = rng(seed);
    let mut rows = Vec::with_capacity(sizes.iter().sum());
    for (k, &size) in sizes.iter().enumerate() {
        for _ in 0..size {
            let y = (0..j)
                .map(|a| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    means[k][a] + sds[k][a] * z
                })
                .collect();
            rows.push((y, k, false));
        }
    }
    rows.shuffle(&mut rng);
    let centers = Matrix::from_rows(means)?;
    assemble(rows, j, centers)
}

/// The four-cluster 450 × 2 independent design. Sizes, means and spreads are
/// fixed defaults; only their general shape is prescribed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependentPreset {
    pub sizes: Vec<usize>,
    pub means: Vec<Vec<f64>>,
    pub sds: Vec<Vec<f64>>,
}

impl Default for IndependentPreset {
    fn default() -> Self {
        Self {
            sizes: vec![150, 120, 100, 80],
            means: vec![vec![-3.0, -3.0], vec![3.0, -3.0], vec![-3.0, 3.0], vec![3.0, 3.0]],
            sds: vec![vec![1.0, 1.0], vec![0.8, 1.2], vec![1.2, 0.8], vec![0.9, 0.9]],
        }
    }
}

impl IndependentPreset {
    pub fn generate(&self, seed: u64) -> Result<LabeledDataset> {
        generate_independent(&self.sizes, &self.means, &self.sds, seed)
    }
}

fn assemble(rows: Vec<(Vec<f64>, usize, bool)>, j: usize, centers: Matrix<f64>) -> Result<LabeledDataset> {
    let mut data = Vec::with_capacity(rows.len() * j);
    let mut labels = Vec::with_capacity(rows.len());
    let mut outliers = Vec::with_capacity(rows.len());
    for (y, k, o) in &rows {
        data.extend_from_slice(y);
        labels.push(*k);
        outliers.push(*o);
    }
    Ok(LabeledDataset { x: Matrix::from_vec(rows.len(), j, data)?, labels, outliers, centers })
}

/// A data matrix with whatever truth columns its file carried.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Matrix<f64>,
    pub variables: Vec<String>,
    /// `0..K` when a `label` column was present.
    pub labels: Option<Vec<usize>>,
    pub outliers: Option<Vec<bool>>,
}

impl From<LabeledDataset> for Dataset {
    fn from(d: LabeledDataset) -> Self {
        let variables = (1..=d.x.cols()).map(|v| format!("v{v}")).collect();
        Dataset { x: d.x, variables, labels: Some(d.labels), outliers: Some(d.outliers) }
    }
}

impl Dataset {
    /// Writes `v1..vJ[,label][,outlier]` with 1-based labels and 0/1 flags.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        let mut header: Vec<String> = self.variables.clone();
        if self.labels.is_some() {
            header.push("label".into());
        }
        if self.outliers.is_some() {
            header.push("outlier".into());
        }
        out.write_record(&header)?;
        for i in 0..self.x.rows() {
            let mut record: Vec<String> = self.x.row(i).iter().map(|v| v.to_string()).collect();
            if let Some(l) = &self.labels {
                record.push((l[i] + 1).to_string());
            }
            if let Some(o) = &self.outliers {
                record.push(if o[i] { "1" } else { "0" }.into());
            }
            out.write_record(&record)?;
        }
        out.flush().map_err(|e| Error::Csv(e.to_string()))
    }

    /// Reads a header-led CSV; `label` and `outlier` columns are truth, every
    /// other column is a numeric variable.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(r);
        let header = reader.headers()?.clone();
        let label_col = header.iter().position(|h| h == "label");
        let outlier_col = header.iter().position(|h| h == "outlier");
        let var_cols: Vec<usize> =
            (0..header.len()).filter(|&c| Some(c) != label_col && Some(c) != outlier_col).collect();
        if var_cols.is_empty() {
            return Err(Error::Csv("no variable columns".into()));
        }
        let variables = var_cols.iter().map(|&c| header[c].to_string()).collect();

        let mut data = Vec::new();
        let mut labels = label_col.map(|_| Vec::new());
        let mut outliers = outlier_col.map(|_| Vec::new());
        let mut rows = 0;
        for (line, record) in reader.records().enumerate() {
            let record = record?;
            let field = |c: usize| record.get(c).unwrap_or("").trim();
            for &c in &var_cols {
                let v: f64 = field(c)
                    .parse()
                    .map_err(|_| Error::Csv(format!("row {}: '{}' is not a number", line + 1, field(c))))?;
                data.push(v);
            }
            if let (Some(c), Some(l)) = (label_col, labels.as_mut()) {
                let v: usize = field(c)
                    .parse()
                    .ok()
                    .filter(|&v: &usize| v >= 1)
                    .ok_or_else(|| Error::Csv(format!("row {}: bad label '{}'", line + 1, field(c))))?;
                l.push(v - 1);
            }
            if let (Some(c), Some(o)) = (outlier_col, outliers.as_mut()) {
                let v = match field(c) {
                    "1" | "true" => true,
                    "0" | "false" => false,
                    other => return Err(Error::Csv(format!("row {}: bad outlier flag '{other}'", line + 1))),
                };
                o.push(v);
            }
            rows += 1;
        }
        let x = Matrix::from_vec(rows, var_cols.len(), data)?;
        if !x.is_finite() {
            return Err(Error::NonFinite("csv data"));
        }
        Ok(Dataset { x, variables, labels, outliers })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn chi_square_quantiles_match_reference_values() {
        // reference values from an independent statistics library
        assert_relative_eq!(chi_square_quantile(7, 0.99).unwrap(), 18.475306906582357, max_relative = 1e-9);
        assert_relative_eq!(chi_square_quantile(2, 0.95).unwrap(), 5.991464547107979, max_relative = 1e-9);
        assert_relative_eq!(chi_square_quantile(30, 0.5).unwrap(), 29.336031516661585, max_relative = 1e-9);
        assert_relative_eq!(chi_square_quantile(3, 1e-6).unwrap(), 0.00024181048720124264, max_relative = 1e-7);
        assert!(chi_square_quantile(3, 1.0).is_err());
    }

    #[test]
    fn r_min_unit_quantile() {
        // alpha chosen so that the 1 - alpha quantile with one degree of freedom is exactly 1
        let alpha = 0.31731050786291415;
        assert!((r_min(1, alpha).unwrap() - 2.2).abs() < 1e-8);
    }

    #[test]
    fn r_min_default_configuration() {
        let v = r_min(7, 0.01).unwrap();
        assert!((v - 3.5741229778957884).abs() < 1e-8);
        assert!(4.0 > v);
        // alpha = 0.001 would put r_min above 4
        assert!(r_min(7, 0.001).unwrap() > 4.0);
    }

    #[test]
    fn r_min_decreases_with_alpha() {
        let values: Vec<f64> = [0.001, 0.01, 0.05, 0.1, 0.5].iter().map(|&a| r_min(7, a).unwrap()).collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]));
        assert!(r_min(7, 0.0).is_err());
    }

    #[test]
    fn default_configuration_bookkeeping() {
        let d = generate_mz(&MzConfig { seed: 3, ..MzConfig::default() }).unwrap();
        assert_eq!(d.x.shape(), (400, 7));
        assert_eq!(d.outliers.iter().filter(|&&o| o).count(), 80);
        for k in 0..4 {
            let n = (0..400).filter(|&i| d.labels[i] == k && d.outliers[i]).count();
            assert_eq!(n, 20);
        }
    }

    #[test]
    fn rounding_is_half_to_even() {
        let cfg = MzConfig { n_per_cluster: 25, eps: 0.1, ..MzConfig::default() };
        assert_eq!(cfg.contaminated_per_cluster(), 2);
        let cfg = MzConfig { n_per_cluster: 35, eps: 0.1, ..MzConfig::default() };
        assert_eq!(cfg.contaminated_per_cluster(), 4);
    }

    #[test]
    fn one_variable_is_unsupported() {
        let cfg = MzConfig { j: 1, enforce_rmin: false, ..MzConfig::default() };
        assert!(matches!(generate_mz(&cfg), Err(Error::Unsupported(_))));
    }

    #[test]
    fn small_r_is_rejected_when_enforced() {
        let cfg = MzConfig { r: 3.0, ..MzConfig::default() };
        assert!(matches!(generate_mz(&cfg), Err(Error::InvalidParameter(_))));
        assert!(generate_mz(&MzConfig { enforce_rmin: false, ..cfg }).is_ok());
    }

    #[test]
    fn pure_standard_normal_moments() {
        let n = 4000;
        let cfg = MzConfig {
            k: 1,
            n_per_cluster: n,
            j: 3,
            rho: 0.0,
            eps: 0.0,
            sphere_radius: 0.0,
            enforce_rmin: false,
            seed: 5,
            ..MzConfig::default()
        };
        let d = generate_mz(&cfg).unwrap();
        let bound = 4.0 / (n as f64).sqrt();
        for j in 0..3 {
            let col = d.x.column(j);
            let mean = col.iter().sum::<f64>() / n as f64;
            assert!(mean.abs() < bound, "mean {mean}");
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            assert!((var - 1.0).abs() < 0.1, "var {var}");
        }
    }

    #[test]
    fn correlation_follows_squared_transform() {
        let cfg = MzConfig {
            k: 1,
            n_per_cluster: 10_000,
            j: 4,
            rho: 0.5,
            eps: 0.0,
            sphere_radius: 0.0,
            enforce_rmin: false,
            seed: 8,
            ..MzConfig::default()
        };
        let d = generate_mz(&cfg).unwrap();
        // population covariance Σ² computed by direct multiplication
        let sigma = cfg.transform();
        let cov = sigma.matmul(&sigma).unwrap();
        let expected = cov[(0, 1)] / (cov[(0, 0)] * cov[(1, 1)]).sqrt();
        let (a, b) = (d.x.column(0), d.x.column(1));
        let n = a.len() as f64;
        let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
        let sab: f64 = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let saa: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let sbb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
        let r = sab / (saa * sbb).sqrt();
        assert!((r - expected).abs() < 0.03, "sample {r} vs population {expected}");
    }

    #[test]
    fn outlier_direction_is_orthogonal_unit() {
        let mut rng = rng(1);
        for j in 2..12 {
            let a0 = outlier_direction(j, &mut rng).unwrap();
            assert!(a0.iter().sum::<f64>().abs() <= 1e-12);
            assert!((a0.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn generators_are_deterministic() {
        let cfg = MzConfig { seed: 42, ..MzConfig::default() };
        assert_eq!(generate_mz(&cfg).unwrap(), generate_mz(&cfg).unwrap());
        let p = IndependentPreset::default();
        assert_eq!(p.generate(1).unwrap(), p.generate(1).unwrap());
        assert_ne!(p.generate(1).unwrap(), p.generate(2).unwrap());
    }

    #[test]
    fn zero_spread_cluster_repeats_its_mean() {
        let d = generate_independent(&[5], &[vec![1.5, -2.0]], &[vec![0.0, 0.0]], 0).unwrap();
        assert!(d.x.row_iter().all(|r| r == [1.5, -2.0]));
    }

    #[test]
    fn independent_preset_shape_and_means() {
        let p = IndependentPreset::default();
        assert_eq!(p.sizes.iter().sum::<usize>(), 450);
        let d = p.generate(7).unwrap();
        assert_eq!(d.x.shape(), (450, 2));
        for k in 0..4 {
            let rows: Vec<usize> = (0..450).filter(|&i| d.labels[i] == k).collect();
            assert_eq!(rows.len(), p.sizes[k]);
            for j in 0..2 {
                let mean = rows.iter().map(|&i| d.x[(i, j)]).sum::<f64>() / rows.len() as f64;
                let bound = 4.0 * p.sds[k][j] / (rows.len() as f64).sqrt();
                assert!((mean - p.means[k][j]).abs() < bound);
            }
        }
    }

    #[test]
    fn inconsistent_lengths_are_rejected() {
        assert!(generate_independent(&[3, 3], &[vec![0.0]], &[vec![1.0]], 0).is_err());
        assert!(generate_independent(&[3], &[vec![0.0, 1.0]], &[vec![1.0]], 0).is_err());
    }

    #[test]
    fn csv_round_trip_and_header() {
        let d: Dataset = generate_mz(&MzConfig { seed: 2, n_per_cluster: 5, ..MzConfig::default() }).unwrap().into();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("v1,v2,v3,v4,v5,v6,v7,label,outlier\n"));
        assert!(!text.contains('\r'));
        assert_eq!(Dataset::read_csv(&buf[..]).unwrap(), d);
    }

    #[test]
    fn csv_without_truth() {
        let d = Dataset::read_csv("a,b\n1,2\n3.5,-4\n".as_bytes()).unwrap();
        assert_eq!(d.x.shape(), (2, 2));
        assert!(d.labels.is_none() && d.outliers.is_none());
        assert!(Dataset::read_csv("a,b\n1,x\n".as_bytes()).is_err());
        assert!(Dataset::read_csv("a,label\n1,0\n".as_bytes()).is_err());
    }
}
