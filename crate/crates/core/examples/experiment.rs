//! Runs all four strategies over seeded trials and writes trials.csv,
//! summary.csv and report.json.
//!
//! `cargo run --release --example experiment -- 10 42 out/`

use std::path::PathBuf;

use rne_rescue::grouping::Strategy;
use rne_rescue::harness::{run_experiment, ExperimentPlan};
use rne_rescue::sim::Scenario;

fn main() -> rne_rescue::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);
    let master_seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(42);
    let out_dir = PathBuf::from(args.next().unwrap_or_else(|| "experiment-out".into()));
    let plan = ExperimentPlan {
        scenario: Scenario::desk_scale(),
        strategies: Strategy::ALL.to_vec(),
        trials,
        master_seed,
        out_dir: Some(out_dir.clone()),
    };
    let report = run_experiment(&plan)?;
    print!("{}", report.summary_csv()?);
    println!("initial conditions {}", report.initial_hash);
    println!("wrote {}", out_dir.display());
    Ok(())
}
