//! SNR sweep at N_p = 240 (the `fig5` preset): trains all four estimators on
//! ten seeded channels and prints mean NMSE per algorithm and pilot scheme.
//!
//! ```text
//! cargo run --release --example snr_sweep [-- <realizations> [snr_db,...]]
//! ```

use thzce::bench::{run_experiment, ExperimentConfig, Preset, Sweep};
use thzce::metrics::aggregate;

fn main() -> thzce::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut config = ExperimentConfig::from_preset(Preset::Fig5);
    if let Some(n) = args.next() {
        config.realizations = n.parse().expect("realization count");
    }
    if let Some(list) = args.next() {
        let snr_db = list
            .split(',')
            .map(|s| s.parse().expect("SNR in dB"))
            .collect();
        config.sweep = Sweep::Snr {
            n_pilots: 240,
            snr_db,
        };
    }
    let out = run_experiment(&config)?;
    for f in &out.failures {
        eprintln!("failed: {f:?}");
    }
    println!(
        "{:>4} {:>4} {:>7} {:>9} {:>7}",
        "alg", "pil", "snr_db", "mean_db", "std_db"
    );
    for g in aggregate(&out.records)? {
        println!(
            "{:>4} {:>4} {:>7.1} {:>9.2} {:>7.2}",
            g.algorithm.name(),
            g.pilot_scheme,
            g.snr_db,
            g.mean_db,
            g.std_db
        );
    }
    Ok(())
}
