//! Experiment driver: configuration, sweeps, datasets and result files.

use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::estimators::{estimate, Algorithm, EstimatorConfig};
use crate::frontend::{noise_power_for_snr, observe, ObservationBlock, PilotMatrix, PilotScheme};
use crate::metrics::{nmse, NmseRecord};
use crate::propagation::{from_db, LinkBudget};

mod config;
pub mod dataset;
pub mod output;
pub mod seeds;

pub use config::{ArrayKind, EstimatorOverrides, ExperimentConfig, Preset, Sweep};
pub use dataset::{gen_dataset, load_dataset, Dataset};
pub use output::{emit_csv, emit_plot, read_csv};

/// Environment variable the CLI reads as an `output_dir` override.
pub const OUTPUT_DIR_ENV: &str = "THZCE_OUTPUT_DIR";

/// A training run that did not produce a score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedRecord {
    pub algorithm: Algorithm,
    pub pilot_scheme: String,
    pub snr_db: f64,
    pub n_pilots: usize,
    pub realization: u64,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutput {
    pub records: Vec<NmseRecord>,
    pub failures: Vec<FailedRecord>,
}

impl RunOutput {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }

    fn extend(&mut self, other: RunOutput) {
        self.records.extend(other.records);
        self.failures.extend(other.failures);
    }
}

/// SNR in dB that the link budget predicts for a transmit PSD `tx_psd` (W/Hz).
pub fn physical_snr_db(config: &ExperimentConfig, tx_psd: f64) -> Result<f64> {
    let link = LinkBudget::new(
        tx_psd,
        config.frequency_hz,
        config.distance_m,
        config.medium()?,
    )?;
    link.snr_db()
}

/// Transmit PSD that yields `snr_db` under the link budget; the inverse of
/// [`physical_snr_db`].
pub fn tx_psd_for_snr(config: &ExperimentConfig, snr_db: f64) -> Result<f64> {
    let unit = LinkBudget::new(
        1.0,
        config.frequency_hz,
        config.distance_m,
        config.medium()?,
    )?;
    let thermal = crate::propagation::jn_noise_psd(config.frequency_hz, config.temperature_k, true);
    let gain = unit.received_psd()?;
    let molecular = unit.molecular_noise_psd()?;
    let target = from_db(snr_db);
    let denom = gain - target * molecular;
    if !(denom > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "{snr_db} dB is above the molecular-noise ceiling"
        )));
    }
    Ok(target * thermal / denom)
}

/// Scores one algorithm on one observation block.
pub fn score(
    h: &DMatrix<Complex64>,
    obs: &ObservationBlock,
    pilots: &PilotMatrix,
    config: &EstimatorConfig,
) -> Result<(f64, f64)> {
    let start = Instant::now();
    let est = estimate(obs, pilots, config)?;
    let elapsed = start.elapsed().as_secs_f64();
    Ok((nmse(h, &est.h)?, elapsed))
}

/// One observation block of a realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub snr_db: f64,
    pub n_pilots: usize,
    pub pilots: PilotMatrix,
    pub observations: ObservationBlock,
}

/// Generates the pilot matrix and one-bit observations for one sweep point.
pub fn make_block(
    channel: &ChannelRealization,
    scheme: PilotScheme,
    n_pilots: usize,
    snr_db: f64,
    noise_seed: u64,
) -> Result<Block> {
    let pilots = PilotMatrix::generate(scheme, channel.h.ncols(), n_pilots)?;
    let n0 = noise_power_for_snr(&channel.h, &pilots, snr_db)?;
    let observations = observe(&channel.h, &pilots, n0, noise_seed)?;
    Ok(Block {
        snr_db,
        n_pilots,
        pilots,
        observations,
    })
}

/// Trains every configured algorithm on `block` and scores the estimates.
pub fn evaluate_block(
    config: &ExperimentConfig,
    channel: &ChannelRealization,
    block: &Block,
) -> RunOutput {
    let mut out = RunOutput::default();
    for &algorithm in &config.algorithms {
        let est_cfg = config.estimator_config(algorithm);
        let scheme = block.pilots.scheme.name().to_string();
        match score(&channel.h, &block.observations, &block.pilots, &est_cfg) {
            Ok((nmse_db, secs)) => out.records.push(NmseRecord {
                algorithm,
                pilot_scheme: scheme,
                snr_db: block.snr_db,
                n_pilots: block.n_pilots,
                realization: channel.seed,
                nmse_db,
                wall_time_s: if config.record_timing { secs } else { 0.0 },
            }),
            Err(e) => out.failures.push(FailedRecord {
                algorithm,
                pilot_scheme: scheme,
                snr_db: block.snr_db,
                n_pilots: block.n_pilots,
                realization: channel.seed,
                error: e.to_string(),
            }),
        }
    }
    out
}

fn block_failure(
    config: &ExperimentConfig,
    seed: u64,
    scheme: PilotScheme,
    point: (usize, f64),
    err: &Error,
) -> RunOutput {
    RunOutput {
        records: Vec::new(),
        failures: config
            .algorithms
            .iter()
            .map(|&algorithm| FailedRecord {
                algorithm,
                pilot_scheme: scheme.name().to_string(),
                snr_db: point.1,
                n_pilots: point.0,
                realization: seed,
                error: err.to_string(),
            })
            .collect(),
    }
}

pub(crate) fn generate_channels(config: &ExperimentConfig) -> Result<Vec<ChannelRealization>> {
    let ctx = config.path_context()?;
    let channel_config = config.channel_config()?;
    (0..config.realizations)
        .map(|i| {
            ChannelRealization::generate(
                &channel_config,
                &ctx,
                seeds::channel_seed(config.master_seed, i),
            )
        })
        .collect()
}

fn with_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Runs the full sweep. Records come back ordered by realization, sweep
/// point, pilot scheme and algorithm, whatever the thread count. Stage errors
/// become [`FailedRecord`]s; only configuration errors abort the run.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutput> {
    config.validate()?;
    let channels = generate_channels(config)?;
    let points = config.sweep.points();
    let units: Vec<(usize, (usize, f64), PilotScheme)> = (0..channels.len())
        .flat_map(|i| {
            points
                .iter()
                .flat_map(move |&p| config.pilot_schemes.iter().map(move |&s| (i, p, s)))
        })
        .collect();
    let parts = with_pool(config.threads, || {
        units
            .par_iter()
            .map(|&(i, point, scheme)| {
                let channel = &channels[i];
                let noise = seeds::noise_seed(config.master_seed, i);
                match make_block(channel, scheme, point.0, point.1, noise) {
                    Ok(block) => evaluate_block(config, channel, &block),
                    Err(e) => block_failure(config, channel.seed, scheme, point, &e),
                }
            })
            .collect::<Vec<_>>()
    })?;
    let mut out = RunOutput::default();
    for part in parts {
        out.extend(part);
    }
    Ok(out)
}
