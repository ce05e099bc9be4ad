//! Command-line pipelines: simulate benchmark data, cluster it (PD-clustering,
//! factor PD-clustering or k-means, many seeded runs), and evaluate the best
//! model. Every command writes a `manifest.json` that `replay` can re-run to
//! reproduce byte-identical outputs.

pub mod args;
pub mod cluster;
pub mod error;
pub mod evaluate;
pub mod histogram;
pub mod io;
pub mod model;
pub mod simulate;

pub use args::{Cli, Command, Manifest};
pub use error::{CliError, Result, EXIT_CONFIG, EXIT_RUNTIME};

/// Environment variable holding the log filter (`info`, `debug`, ...).
pub const LOG_ENV: &str = "FPDC_LOG";

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate(a) => simulate::run(&a),
        Command::Cluster(a) => cluster::run(&a),
        Command::Evaluate(a) => {
            for note in evaluate::run(&a)?.notes {
                eprintln!("note: {note}");
            }
            Ok(())
        }
        Command::Replay(a) => {
            let manifest: Manifest = io::read_json(&a.manifest)?;
            run(replayed(manifest, &a))
        }
    }
}

fn replayed(manifest: Manifest, a: &args::ReplayArgs) -> Command {
    match manifest {
        Manifest::Simulate(mut s) => {
            s.out = a.out.clone();
            Command::Simulate(s)
        }
        Manifest::Cluster(mut c) => {
            c.out = a.out.clone();
            c.jobs = a.jobs;
            Command::Cluster(c)
        }
        Manifest::Evaluate(mut e) => {
            e.out = a.out.clone();
            Command::Evaluate(e)
        }
    }
}
