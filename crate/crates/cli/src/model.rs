use fpdc_core::evaluation::{dbs, misclassification_rate, within_variance, Assignment, DbsReport, DbsSummary};
use fpdc_core::fpdc::Standardization;
use fpdc_core::simdata::Dataset;
use fpdc_core::tucker::Ranks;
use fpdc_core::Matrix;
use serde::{Deserialize, Serialize};

use crate::args::Algo;
use crate::error::{CliError, Result};

/// Probabilities below this are clamped before taking dbs log-ratios.
pub const DBS_PROB_FLOOR: f64 = 1e-6;

/// The best run of a `cluster` invocation, as written to `model.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub algo: Algo,
    pub k: usize,
    /// Run index `r`; the run was seeded with `seed + r`.
    pub run: usize,
    pub objective_name: String,
    pub objective: f64,
    /// 1-based cluster of every row.
    pub labels: Vec<usize>,
    /// Centers in the space the algorithm worked in.
    pub centers: Matrix<f64>,
    pub probabilities: Option<Matrix<f64>>,
    pub standardization: Option<Standardization<f64>>,
    pub factor: Option<FactorModel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorModel {
    /// `J × Q` variable loadings.
    pub loading: Matrix<f64>,
    /// Centers in the (standardized) variable space that produced the loading.
    pub original_centers: Matrix<f64>,
    pub explained_fraction: Option<f64>,
    pub ranks: Ranks,
    pub outer_iterations: usize,
}

impl ModelFile {
    pub fn assignment(&self) -> Result<Assignment> {
        if self.labels.iter().any(|&l| l == 0 || l > self.k) {
            return Err(CliError::Config("model labels must lie in 1..=k".into()));
        }
        Ok(Assignment::new(self.labels.iter().map(|l| l - 1).collect(), self.k)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Misclassification {
    pub all: f64,
    /// Rows flagged as outliers left out.
    pub uncontaminated: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub rows: usize,
    pub k: usize,
    pub objective_name: String,
    pub objective: f64,
    /// Within-groups deviance of the input data under the model's labels;
    /// absent when a cluster received no rows.
    pub within_variance: Option<f64>,
    pub misclassification: Option<Misclassification>,
    pub dbs: Option<DbsSummary>,
    pub notes: Vec<String>,
}

/// Scores `model` against `data`; also returns the per-point dbs when the
/// model carries membership probabilities.
pub fn evaluate(model: &ModelFile, data: &Dataset) -> Result<(Metrics, Option<DbsReport<f64>>)> {
    if model.labels.len() != data.x.rows() {
        return Err(CliError::Config(format!(
            "model has {} rows, dataset has {}",
            model.labels.len(),
            data.x.rows()
        )));
    }
    let a = model.assignment()?;
    let mut notes = Vec::new();
    let misclassification = match &data.labels {
        Some(truth) => Some(Misclassification {
            all: misclassification_rate(&a, truth, None)?,
            uncontaminated: match &data.outliers {
                Some(o) if o.iter().any(|&f| !f) => Some(misclassification_rate(&a, truth, Some(o))?),
                _ => None,
            },
        }),
        None => {
            notes.push("dataset has no label column: misclassification not computed".into());
            None
        }
    };
    let report = match &model.probabilities {
        Some(p) => Some(dbs(p, &a, DBS_PROB_FLOOR)?),
        None => {
            notes.push("model has no membership probabilities: dbs not computed".into());
            None
        }
    };
    let within_variance = match within_variance(&data.x, &a) {
        Ok(w) => Some(w),
        Err(fpdc_core::Error::EmptyCluster { cluster }) => {
            notes.push(format!("cluster {} has no rows: within variance not computed", cluster + 1));
            None
        }
        Err(e) => return Err(e.into()),
    };
    let metrics = Metrics {
        rows: data.x.rows(),
        k: model.k,
        objective_name: model.objective_name.clone(),
        objective: model.objective,
        within_variance,
        misclassification,
        dbs: report.as_ref().map(|r| r.summary.clone()),
        notes,
    };
    Ok((metrics, report))
}
