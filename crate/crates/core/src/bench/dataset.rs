//! Persisted simulation output, so estimators can run without re-simulating.
//!
//! A dataset is one JSON object:
//!
//! ```text
//! {
//!   "format": "thzce-dataset",
//!   "version": 1,
//!   "config": { ...ExperimentConfig... },
//!   "realizations": [
//!     {
//!       "index": 0,
//!       "noise_seed": 123,
//!       "channel": { "h": [[[re, im], ...], ...], "rays": [...], "seed": ..., ... },
//!       "blocks": [
//!         { "snr_db": 0.0, "n_pilots": 240,
//!           "pilots": { "x": [...], "scheme": { "scheme": "zc", "root": 1 } },
//!           "observations": { "y": [...], "n0": ..., "rx_power": ..., "seed": ... } }
//!       ]
//!     }
//!   ]
//! }
//! ```
//!
//! Complex matrices are row-major lists of `[re, im]` pairs. Blocks are stored
//! in sweep-point-major, pilot-scheme-minor order.

use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    evaluate_block, generate_channels, make_block, seeds, Block, ExperimentConfig, RunOutput,
};
use crate::channel::ChannelRealization;
use crate::error::{Error, Result};

pub const FORMAT: &str = "thzce-dataset";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationRecord {
    pub index: usize,
    pub noise_seed: u64,
    pub channel: ChannelRealization,
    pub blocks: Vec<Block>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub format: String,
    pub version: u32,
    pub config: ExperimentConfig,
    pub realizations: Vec<RealizationRecord>,
}

impl Dataset {
    /// Simulates every realization and sweep point of `config`.
    pub fn simulate(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let channels = generate_channels(config)?;
        let points = config.sweep.points();
        let realizations = channels
            .into_iter()
            .enumerate()
            .map(|(index, channel)| {
                let noise_seed = seeds::noise_seed(config.master_seed, index);
                let blocks = points
                    .iter()
                    .flat_map(|&(n_p, snr)| {
                        config.pilot_schemes.iter().map(move |&s| (n_p, snr, s))
                    })
                    .map(|(n_p, snr, scheme)| make_block(&channel, scheme, n_p, snr, noise_seed))
                    .collect::<Result<Vec<_>>>()?;
                Ok(RealizationRecord {
                    index,
                    noise_seed,
                    channel,
                    blocks,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            format: FORMAT.into(),
            version: VERSION,
            config: config.clone(),
            realizations,
        })
    }

    /// Structural checks: format tag, channel-vs-rays consistency, observation
    /// alphabet and block dimensions.
    pub fn validate(&self) -> Result<()> {
        if self.format != FORMAT || self.version != VERSION {
            return Err(Error::Dataset(format!(
                "unsupported format {} v{}",
                self.format, self.version
            )));
        }
        for (i, r) in self.realizations.iter().enumerate() {
            r.channel.verify()?;
            for (b, block) in r.blocks.iter().enumerate() {
                let at = |e: Error| Error::Dataset(format!("realization {i}, block {b}: {e}"));
                block.observations.validate().map_err(at)?;
                block.pilots.validate().map_err(at)?;
                let (m_r, m_t) = r.channel.h.shape();
                if block.observations.rx_antennas() != m_r
                    || block.pilots.tx_antennas() != m_t
                    || block.observations.len() != block.n_pilots
                    || block.pilots.len() != block.n_pilots
                {
                    return Err(at(Error::Dimension(
                        "block does not match channel or N_p".into(),
                    )));
                }
            }
        }
        Ok(())
    }

    /// Re-simulates from the echoed config and checks the result is identical.
    pub fn audit(&self) -> Result<()> {
        if Self::simulate(&self.config)? != *self {
            return Err(Error::Dataset(
                "contents differ from a fresh simulation of the echoed config".into(),
            ));
        }
        Ok(())
    }

    /// Trains and scores the configured algorithms on the stored blocks; the
    /// records match [`run_experiment`](super::run_experiment) on the same
    /// config.
    pub fn evaluate(&self, config: &ExperimentConfig) -> RunOutput {
        let mut out = RunOutput::default();
        for r in &self.realizations {
            for block in &r.blocks {
                out.extend(evaluate_block(config, &r.channel, block));
            }
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer(&mut w, self)?;
        w.flush()?;
        Ok(())
    }
}

/// Simulates `config` and writes the dataset to `path`.
pub fn gen_dataset(config: &ExperimentConfig, path: &Path) -> Result<Dataset> {
    let ds = Dataset::simulate(config)?;
    ds.save(path)?;
    Ok(ds)
}

/// Reads and validates a dataset.
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let ds: Dataset = serde_json::from_reader(BufReader::new(std::fs::File::open(path)?))?;
    ds.validate()?;
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{EstimatorOverrides, Sweep};
    use crate::estimators::Algorithm;
    use num_complex::Complex64;

    fn tiny() -> ExperimentConfig {
        ExperimentConfig {
            m_t: 4,
            m_r: 4,
            realizations: 2,
            algorithms: vec![Algorithm::Fw, Algorithm::Lr],
            sweep: Sweep::Pilots {
                snr_db: 5.0,
                n_pilots: vec![4, 8],
            },
            estimator: EstimatorOverrides {
                epochs: Some(5),
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn round_trip_and_audit() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.json");
        let written = gen_dataset(&tiny(), &path).unwrap();
        let loaded = load_dataset(&path).unwrap();
        assert_eq!(loaded, written);
        loaded.audit().unwrap();
        assert_eq!(loaded.realizations[0].blocks.len(), 2 * 2);
    }

    #[test]
    fn rejects_zero_observation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        let mut ds = Dataset::simulate(&tiny()).unwrap();
        ds.realizations[1].blocks[0].observations.y[(0, 0)] = Complex64::new(0.0, 0.0);
        ds.save(&path).unwrap();
        assert!(matches!(load_dataset(&path), Err(Error::Dataset(_))));
    }

    #[test]
    fn audit_detects_edits() {
        let mut ds = Dataset::simulate(&tiny()).unwrap();
        ds.realizations[0].blocks[0].observations.y[(0, 0)] *= Complex64::new(-1.0, 0.0);
        ds.validate().unwrap();
        assert!(ds.audit().is_err());
    }
}
