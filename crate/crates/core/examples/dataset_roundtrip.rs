//! Writes a simulated dataset, reloads it, audits it against its own config
//! echo and checks that training on the stored blocks reproduces the direct
//! run exactly.
//!
//! ```text
//! cargo run --release --example dataset_roundtrip [-- <path>]
//! ```

use std::path::PathBuf;

use thzce::bench::{gen_dataset, load_dataset, run_experiment, ExperimentConfig, Preset};

fn main() -> thzce::Result<()> {
    let path = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "results/dataset.json".into()),
    );
    let mut config = ExperimentConfig::from_preset(Preset::Fig4);
    config.realizations = 2;

    gen_dataset(&config, &path)?;
    let size = std::fs::metadata(&path)?.len();
    let loaded = load_dataset(&path)?;
    loaded.audit()?;
    println!("{}: {} bytes, audit passed", path.display(), size);

    let from_disk = loaded.evaluate(&loaded.config);
    let direct = run_experiment(&config)?;
    assert_eq!(from_disk, direct);
    println!(
        "{} records identical to the in-memory run",
        direct.records.len()
    );
    Ok(())
}
