use crate::args::{EvaluateArgs, Manifest};
use crate::error::Result;
use crate::io::{ensure_dir, read_dataset, read_json, write_csv_rows, write_json};
use crate::model::{evaluate, Metrics, ModelFile};

/// Writes `metrics.json`, `dbs.csv` (when the model has probabilities) and
/// `manifest.json`. Returns the metrics; their `notes` say what was skipped.
pub fn run(args: &EvaluateArgs) -> Result<Metrics> {
    let model: ModelFile = read_json(&args.model)?;
    let data = read_dataset(&args.input)?;
    let (metrics, report) = evaluate(&model, &data)?;
    ensure_dir(&args.out)?;
    if let Some(r) = &report {
        write_csv_rows(
            &args.out.join("dbs.csv"),
            "cluster,rank,row,dbs",
            r.clusters.iter().enumerate().flat_map(|(c, entries)| {
                entries.iter().enumerate().map(move |(rank, e)| format!("{},{},{},{}", c + 1, rank + 1, e.row + 1, e.dbs))
            }),
        )?;
    }
    write_json(&args.out.join("metrics.json"), &metrics)?;
    write_json(&args.out.join("manifest.json"), &Manifest::Evaluate(args.clone()))?;
    Ok(metrics)
}
