use fpdc_core::evaluation::{assign_labels, kmeans, Assignment, KmeansResult};
use fpdc_core::fpdc::{multistart, run_seed, standardize, FpdcConfig, FpdcModel, RankChoice, Standardization};
use fpdc_core::pdc::{pdc, PdcConfig, PdcModel, StopReason};
use fpdc_core::simdata::Dataset;
use fpdc_core::tucker::{distance_tensor_with, tucker3, Ranks, TuckerConfig};
use fpdc_core::Matrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::args::{Algo, ClusterArgs, Manifest};
use crate::error::{CliError, Result};
use crate::histogram::Histogram;
use crate::io::{ensure_dir, read_dataset, write_csv_rows, write_dataset, write_json};
use crate::model::{evaluate, FactorModel, Metrics, ModelFile};
use crate::simulate;

pub const KMEANS_MAX_ITERS: usize = 300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub q: usize,
    pub explained_fraction: f64,
}

/// Summary of all runs, written to `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub algo: Algo,
    pub k: usize,
    pub runs: usize,
    pub seed: u64,
    pub objective_name: String,
    /// Final objective of run `r` at index `r`.
    pub objectives: Vec<f64>,
    pub iterations: Vec<usize>,
    /// Whether each run stopped on its own criterion rather than the cap.
    pub converged: Vec<bool>,
    pub best_run: usize,
    pub best_objective: f64,
    pub histogram: Option<Histogram>,
    pub modal_share: Option<f64>,
    /// Explained fraction of the best model's distance tensor for every
    /// number of factors (fpdc only).
    pub explained_scan: Option<Vec<ScanPoint>>,
    pub metrics: Metrics,
    pub assumptions: Vec<String>,
}

/// Everything `cluster` produces, before it is written out.
#[derive(Debug, Clone)]
pub struct ClusterOutput {
    pub dataset: Dataset,
    pub model: ModelFile,
    pub report: RunReport,
    /// Convergence trace of every run.
    pub traces: Vec<Vec<f64>>,
}

struct RunSummary {
    objective: f64,
    trace: Vec<f64>,
    converged: bool,
}

fn validate(args: &ClusterArgs) -> Result<()> {
    if args.k == 0 {
        return Err(CliError::Config("--k must be at least 1".into()));
    }
    if args.runs == 0 {
        return Err(CliError::Config("--runs must be at least 1".into()));
    }
    if args.jobs == Some(0) {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    if args.q.is_some() && args.algo != Algo::Fpdc {
        return Err(CliError::Config("--q only applies to --algo fpdc".into()));
    }
    if args.q == Some(0) {
        return Err(CliError::Config("--q must be at least 1".into()));
    }
    Ok(())
}

fn load(args: &ClusterArgs) -> Result<Dataset> {
    match (&args.input, args.preset) {
        (Some(path), None) => read_dataset(path),
        (None, Some(preset)) => Ok(Dataset::from(simulate::generate(preset, args.seed)?.0)),
        _ => Err(CliError::Config("exactly one of --input and --preset is required".into())),
    }
}

/// Lowest value, earliest on ties.
fn best_index(values: &[f64]) -> usize {
    values.iter().enumerate().fold(0, |b, (r, &v)| if v < values[b] { r } else { b })
}

fn one_based(a: &Assignment) -> Vec<usize> {
    a.labels.iter().map(|l| l + 1).collect()
}

/// Runs the clustering without touching the filesystem (except to read
/// `--input`).
pub fn cluster(args: &ClusterArgs) -> Result<ClusterOutput> {
    validate(args)?;
    let dataset = load(args)?;
    if dataset.x.rows() < args.k {
        return Err(CliError::Config(format!("--k {} exceeds the {} rows of the dataset", args.k, dataset.x.rows())));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Runtime(format!("cannot start worker threads: {e}")))?;
    log::info!("{:?}: {} runs, k = {}, data {}x{}", args.algo, args.runs, args.k, dataset.x.rows(), dataset.x.cols());

    let (model, runs, scan) = pool.install(|| match args.algo {
        Algo::Fpdc => run_fpdc(args, &dataset.x),
        Algo::Pdc => run_pdc(args, &dataset.x),
        Algo::Kmeans => run_kmeans(args, &dataset.x),
    })?;

    let objectives: Vec<f64> = runs.iter().map(|r| r.objective).collect();
    let histogram = (args.runs > 1).then(|| Histogram::new(&objectives));
    let (metrics, _) = evaluate(&model, &dataset)?;
    let report = RunReport {
        algo: args.algo,
        k: args.k,
        runs: args.runs,
        seed: args.seed,
        objective_name: model.objective_name.clone(),
        iterations: runs.iter().map(|r| r.trace.len()).collect(),
        converged: runs.iter().map(|r| r.converged).collect(),
        best_run: model.run,
        best_objective: model.objective,
        modal_share: histogram.as_ref().map(Histogram::modal_share),
        histogram,
        objectives,
        explained_scan: scan,
        metrics,
        assumptions: args.preset.map(simulate::assumptions).unwrap_or_default(),
    };
    let traces = runs.into_iter().map(|r| r.trace).collect();
    Ok(ClusterOutput { dataset, model, report, traces })
}

fn working_data(x: &Matrix<f64>, on: bool) -> Result<(Matrix<f64>, Option<Standardization<f64>>)> {
    if on {
        let (z, st) = standardize(x)?;
        Ok((z, Some(st)))
    } else {
        Ok((x.clone(), None))
    }
}

type Fitted = (ModelFile, Vec<RunSummary>, Option<Vec<ScanPoint>>);

fn run_fpdc(args: &ClusterArgs, x: &Matrix<f64>) -> Result<Fitted> {
    let mut cfg = FpdcConfig::new(args.k).with_seed(args.seed);
    cfg.standardize = args.standardize.is_on();
    if let Some(q) = args.q {
        cfg.ranks = RankChoice::Q(q);
    }
    let ms = multistart(x, &cfg, args.runs)?;
    let scan = explained_scan(x, &cfg, &ms.best)?;
    let best = ms.best;
    let runs = ms
        .jdf_samples
        .iter()
        .zip(ms.traces)
        .zip(&ms.stops)
        .map(|((&objective, trace), &stop)| RunSummary { objective, converged: stop == StopReason::JdfStalled, trace })
        .collect();
    let model = ModelFile {
        algo: Algo::Fpdc,
        k: args.k,
        run: ms.best_run,
        objective_name: "jdf".into(),
        objective: best.jdf(),
        labels: one_based(&assign_labels(&best.model.probabilities)),
        centers: best.model.centers.clone(),
        probabilities: Some(best.model.probabilities.clone()),
        standardization: best.standardization.clone(),
        factor: Some(FactorModel {
            loading: best.loading.clone(),
            original_centers: best.original_centers.clone(),
            explained_fraction: best.explained_fraction,
            ranks: best.ranks,
            outer_iterations: best.outer_iterations,
        }),
    };
    Ok((model, runs, Some(scan)))
}

/// Explained fraction of the best model's distance tensor for `Q = 1..=J`.
fn explained_scan(x: &Matrix<f64>, cfg: &FpdcConfig<f64>, best: &FpdcModel<f64>) -> Result<Vec<ScanPoint>> {
    let (data, _) = working_data(x, cfg.standardize)?;
    let (n, j) = data.shape();
    let g = distance_tensor_with(&data, &best.original_centers, cfg.tensor_entries)?;
    (1..=j)
        .map(|q| {
            let ranks = Ranks::with_q(n, cfg.k, q);
            let mut tc = TuckerConfig::new(ranks);
            tc.max_sweeps = cfg.tucker_max_sweeps;
            tc.fit_tolerance = cfg.tucker_fit_tolerance;
            Ok(ScanPoint { q, explained_fraction: tucker3(&g, &tc)?.explained_fraction })
        })
        .collect()
}

fn run_pdc(args: &ClusterArgs, x: &Matrix<f64>) -> Result<Fitted> {
    let (data, standardization) = working_data(x, args.standardize.is_on())?;
    let cfg = PdcConfig::default();
    let models: Vec<PdcModel<f64>> = (0..args.runs)
        .into_par_iter()
        .map(|r| pdc(&data, args.k, &cfg.clone().with_seed(run_seed(args.seed, r))))
        .collect::<fpdc_core::Result<_>>()?;
    let objectives: Vec<f64> = models.iter().map(|m| m.jdf_total).collect();
    let run = best_index(&objectives);
    let best = &models[run];
    let model = ModelFile {
        algo: Algo::Pdc,
        k: args.k,
        run,
        objective_name: "jdf".into(),
        objective: best.jdf_total,
        labels: one_based(&assign_labels(&best.probabilities)),
        centers: best.centers.clone(),
        probabilities: Some(best.probabilities.clone()),
        standardization,
        factor: None,
    };
    let runs = models
        .into_iter()
        .map(|m| RunSummary { objective: m.jdf_total, converged: m.stop == StopReason::JdfStalled, trace: m.trace })
        .collect();
    Ok((model, runs, None))
}

fn run_kmeans(args: &ClusterArgs, x: &Matrix<f64>) -> Result<Fitted> {
    let (data, standardization) = working_data(x, args.standardize.is_on())?;
    let results: Vec<KmeansResult<f64>> = (0..args.runs)
        .into_par_iter()
        .map(|r| kmeans(&data, args.k, run_seed(args.seed, r), KMEANS_MAX_ITERS))
        .collect::<fpdc_core::Result<_>>()?;
    let objectives: Vec<f64> = results.iter().map(KmeansResult::within_variance).collect();
    let run = best_index(&objectives);
    let best = &results[run];
    let model = ModelFile {
        algo: Algo::Kmeans,
        k: args.k,
        run,
        objective_name: "within_variance".into(),
        objective: objectives[run],
        labels: one_based(&best.assignment),
        centers: best.centers.clone(),
        probabilities: None,
        standardization,
        factor: None,
    };
    let runs = results
        .into_iter()
        .zip(objectives)
        .map(|(m, objective)| RunSummary { objective, converged: m.converged, trace: m.within_trace })
        .collect();
    Ok((model, runs, None))
}

/// Writes `report.json`, `model.json`, `traces.csv`, `histogram.csv` (more
/// than one run), `dataset.csv` (preset input) and `manifest.json`.
pub fn write(args: &ClusterArgs, out: &ClusterOutput) -> Result<()> {
    let dir = &args.out;
    ensure_dir(dir)?;
    if args.preset.is_some() {
        write_dataset(&dir.join("dataset.csv"), &out.dataset)?;
    }
    write_json(&dir.join("report.json"), &out.report)?;
    write_json(&dir.join("model.json"), &out.model)?;
    write_csv_rows(
        &dir.join("traces.csv"),
        "run,iteration,objective",
        out.traces
            .iter()
            .enumerate()
            .flat_map(|(r, t)| t.iter().enumerate().map(move |(i, v)| format!("{r},{},{v}", i + 1))),
    )?;
    if let Some(h) = &out.report.histogram {
        write_csv_rows(
            &dir.join("histogram.csv"),
            "bucket,lower,upper,count",
            (0..h.counts.len()).map(|b| format!("{},{},{},{}", b + 1, h.lower[b], h.upper[b], h.counts[b])),
        )?;
    }
    write_json(&dir.join("manifest.json"), &Manifest::Cluster(args.clone()))
}

pub fn run(args: &ClusterArgs) -> Result<()> {
    let out = cluster(args)?;
    log::info!("best run {} with {} {}", out.report.best_run, out.report.objective_name, out.report.best_objective);
    write(args, &out)
}
