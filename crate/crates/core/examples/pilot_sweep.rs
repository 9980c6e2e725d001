//! Pilot-count sweep at 0 dB (the `fig4` preset), written to CSV and SVG.
//!
//! ```text
//! cargo run --release --example pilot_sweep [-- <out_dir>]
//! ```

use std::path::PathBuf;

use thzce::bench::{emit_csv, emit_plot, run_experiment, ExperimentConfig, Preset};
use thzce::metrics::aggregate;

fn main() -> thzce::Result<()> {
    let out_dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "results".into()));
    let config = ExperimentConfig::from_preset(Preset::Fig4);
    let out = run_experiment(&config)?;
    for f in &out.failures {
        eprintln!("failed: {f:?}");
    }

    emit_csv(&out.records, &out_dir.join("fig4.csv"))?;
    emit_plot(&out.records, &out_dir.join("fig4.svg"))?;

    println!("{:>4} {:>4} {:>4} {:>9}", "alg", "pil", "N_p", "mean_db");
    for g in aggregate(&out.records)? {
        println!(
            "{:>4} {:>4} {:>4} {:>9.2}",
            g.algorithm.name(),
            g.pilot_scheme,
            g.n_pilots,
            g.mean_db
        );
    }
    println!("wrote {}", out_dir.display());
    Ok(())
}
