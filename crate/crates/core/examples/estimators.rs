//! Trains all four estimators on one channel and compares their NMSE and
//! training traces.
//!
//! ```text
//! cargo run --release --example estimators [-- <snr_db> <n_pilots>]
//! ```

use thzce::bench::{make_block, ExperimentConfig};
use thzce::channel::ChannelRealization;
use thzce::estimators::{estimate, Algorithm};
use thzce::frontend::PilotScheme;
use thzce::metrics::nmse;

fn main() -> thzce::Result<()> {
    let mut args = std::env::args().skip(1);
    let snr_db: f64 = args.next().map_or(0.0, |s| s.parse().expect("SNR in dB"));
    let n_pilots: usize = args.next().map_or(240, |s| s.parse().expect("pilot count"));

    let config = ExperimentConfig::default();
    let channel =
        ChannelRealization::generate(&config.channel_config()?, &config.path_context()?, 11)?;
    let block = make_block(&channel, PilotScheme::Zc { root: 1 }, n_pilots, snr_db, 12)?;

    println!("SNR {snr_db} dB, {n_pilots} ZC pilots");
    for algorithm in Algorithm::ALL {
        let est = estimate(
            &block.observations,
            &block.pilots,
            &config.estimator_config(algorithm),
        )?;
        let accepted = est.trace.accepted.iter().filter(|a| **a).count();
        println!(
            "{:>4}: NMSE {:>7.2} dB, {} epochs ({accepted} accepted), objective {:.4e} -> {:.4e}, {:?}",
            algorithm.name(),
            nmse(&channel.h, &est.h)?,
            est.trace.epochs(),
            est.trace.initial,
            est.trace.final_value(),
            est.trace.termination
        );
    }
    Ok(())
}
