use fpdc_core::simdata::{generate_mz, Dataset, IndependentPreset, LabeledDataset, MzConfig};
use serde::Serialize;

use crate::args::{Manifest, Preset, SimulateArgs};
use crate::error::Result;
use crate::io::{ensure_dir, write_dataset, write_json};

/// Generator settings echoed to `config.json`.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "preset")]
pub enum GeneratorConfig {
    #[serde(rename = "mz-paper")]
    Mz(MzConfig),
    #[serde(rename = "indep-450x2")]
    Independent { seed: u64, clusters: IndependentPreset },
}

/// Preset parameters that are assumptions rather than documented values.
pub fn assumptions(preset: Preset) -> Vec<String> {
    match preset {
        Preset::MzPaper => {
            let d = MzConfig::default();
            vec![
                format!("within-cluster correlation rho = {} is an assumed value", d.rho),
                format!("cluster centers lie on a sphere of assumed radius {}", d.sphere_radius),
            ]
        }
        Preset::Indep450x2 => vec!["cluster sizes, means and standard deviations are assumed values".into()],
    }
}

#[derive(Debug, Serialize)]
struct ConfigEcho {
    generator: GeneratorConfig,
    assumptions: Vec<String>,
}

pub fn generate(preset: Preset, seed: u64) -> Result<(LabeledDataset, GeneratorConfig)> {
    Ok(match preset {
        Preset::MzPaper => {
            let cfg = MzConfig { seed, ..MzConfig::default() };
            (generate_mz(&cfg)?, GeneratorConfig::Mz(cfg))
        }
        Preset::Indep450x2 => {
            let clusters = IndependentPreset::default();
            (clusters.generate(seed)?, GeneratorConfig::Independent { seed, clusters })
        }
    })
}

pub fn run(args: &SimulateArgs) -> Result<()> {
    let (data, config) = generate(args.preset, args.seed)?;
    log::info!("generated {}x{} dataset", data.x.rows(), data.x.cols());
    ensure_dir(&args.out)?;
    write_dataset(&args.out.join("dataset.csv"), &Dataset::from(data))?;
    write_json(&args.out.join("config.json"), &ConfigEcho { generator: config, assumptions: assumptions(args.preset) })?;
    write_json(&args.out.join("manifest.json"), &Manifest::Simulate(args.clone()))
}
