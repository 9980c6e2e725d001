use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{ArrayGeometry, ChannelConfig, PathContext};
use crate::error::{invalid, Result};
use crate::estimators::{Algorithm, EstimatorConfig, Init};
use crate::frontend::PilotScheme;
use crate::propagation::{AbsorptionSpectrum, Medium};

/// Named starting points for the two reference sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// Pilot sweep N_p ∈ {16, 32, 64, 128, 240} at 0 dB.
    Fig4,
    /// SNR sweep {-10, -5, 0, 5, 10} dB at N_p = 240.
    Fig5,
}

impl Preset {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fig4" => Ok(Preset::Fig4),
            "fig5" => Ok(Preset::Fig5),
            other => Err(invalid(format!("unknown preset `{other}`"))),
        }
    }

    pub fn sweep(&self) -> Sweep {
        match self {
            Preset::Fig4 => Sweep::Pilots {
                snr_db: 0.0,
                n_pilots: vec![16, 32, 64, 128, 240],
            },
            Preset::Fig5 => Sweep::Snr {
                n_pilots: 240,
                snr_db: vec![-10.0, -5.0, 0.0, 5.0, 10.0],
            },
        }
    }
}

/// The varied axis of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", rename_all = "snake_case")]
pub enum Sweep {
    Pilots { snr_db: f64, n_pilots: Vec<usize> },
    Snr { n_pilots: usize, snr_db: Vec<f64> },
}

impl Sweep {
    /// (N_p, SNR dB) for every sweep point, in sweep order.
    pub fn points(&self) -> Vec<(usize, f64)> {
        match self {
            Sweep::Pilots { snr_db, n_pilots } => n_pilots.iter().map(|&n| (n, *snr_db)).collect(),
            Sweep::Snr { n_pilots, snr_db } => snr_db.iter().map(|&s| (*n_pilots, s)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrayKind {
    Linear,
    /// Square planar array; M must be a perfect square.
    Planar,
}

/// Optional estimator overrides applied to every algorithm.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorOverrides {
    pub epochs: Option<usize>,
    pub learning_rate: Option<f64>,
    pub decay: Option<f64>,
    pub tolerance: Option<f64>,
    pub lambda: Option<f64>,
    pub rank: Option<usize>,
    pub budget: Option<f64>,
    pub init: Option<Init>,
}

/// Full experiment description; the JSON config file maps onto this struct.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub preset: Option<Preset>,
    pub m_t: usize,
    pub m_r: usize,
    pub frequency_hz: f64,
    pub distance_m: f64,
    pub temperature_k: f64,
    /// Absorption CSV; the bundled table when absent.
    pub absorption_table: Option<PathBuf>,
    pub array: ArrayKind,
    pub clusters: usize,
    pub rays_per_cluster: usize,
    pub reflector_index: f64,
    pub gain_tx: f64,
    pub gain_rx: f64,
    pub realizations: usize,
    pub master_seed: u64,
    pub algorithms: Vec<Algorithm>,
    pub pilot_schemes: Vec<PilotScheme>,
    pub sweep: Sweep,
    pub estimator: EstimatorOverrides,
    pub output_dir: PathBuf,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Record wall-clock training time. Off by default so CSV output is
    /// byte-reproducible.
    pub record_timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            preset: None,
            m_t: 16,
            m_r: 16,
            frequency_hz: 0.3e12,
            distance_m: 1.0,
            temperature_k: 296.0,
            absorption_table: None,
            array: ArrayKind::Linear,
            clusters: 3,
            rays_per_cluster: 2,
            reflector_index: 2.24,
            gain_tx: 1.0,
            gain_rx: 1.0,
            realizations: 10,
            master_seed: 2021,
            algorithms: Algorithm::ALL.to_vec(),
            pilot_schemes: vec![PilotScheme::Zc { root: 1 }, PilotScheme::Dft],
            sweep: Preset::Fig5.sweep(),
            estimator: EstimatorOverrides::default(),
            output_dir: PathBuf::from("results"),
            threads: None,
            record_timing: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_preset(preset: Preset) -> Self {
        Self {
            preset: Some(preset),
            sweep: preset.sweep(),
            ..Self::default()
        }
    }

    /// Parses a JSON config. A `preset` field sets the sweep unless the file
    /// also gives one explicitly.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: serde_json::Value = serde_json::from_str(text)?;
        let has_sweep = raw.get("sweep").is_some();
        let mut cfg: Self = serde_json::from_value(raw)?;
        if let (Some(p), false) = (cfg.preset, has_sweep) {
            cfg.sweep = p.sweep();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_t == 0 || self.m_r == 0 {
            return Err(invalid("antenna counts must be positive"));
        }
        if self.realizations == 0 {
            return Err(invalid("at least one realization required"));
        }
        if self.algorithms.is_empty() || self.pilot_schemes.is_empty() {
            return Err(invalid(
                "algorithm and pilot-scheme lists must be non-empty",
            ));
        }
        let points = self.sweep.points();
        if points.is_empty() {
            return Err(invalid("sweep list must be non-empty"));
        }
        if let Some(&(n, _)) = points.iter().find(|(n, _)| *n < self.m_t) {
            return Err(invalid(format!(
                "{n} pilots < {} transmit antennas",
                self.m_t
            )));
        }
        if !(self.frequency_hz > 0.0 && self.distance_m > 0.0 && self.temperature_k > 0.0) {
            return Err(invalid(
                "frequency, distance and temperature must be positive",
            ));
        }
        if self.threads == Some(0) {
            return Err(invalid("threads must be at least 1"));
        }
        self.channel_config()?.validate()
    }

    fn geometry(&self, elements: usize) -> Result<ArrayGeometry> {
        match self.array {
            ArrayKind::Linear => ArrayGeometry::linear(elements),
            ArrayKind::Planar => {
                let side = (elements as f64).sqrt().round() as usize;
                if side * side != elements {
                    return Err(invalid(format!(
                        "planar array needs a square element count, got {elements}"
                    )));
                }
                ArrayGeometry::planar(side, side)
            }
        }
    }

    pub fn channel_config(&self) -> Result<ChannelConfig> {
        Ok(ChannelConfig {
            clusters: self.clusters,
            rays_per_cluster: self.rays_per_cluster,
            tx: self.geometry(self.m_t)?,
            rx: self.geometry(self.m_r)?,
            gain_tx: self.gain_tx,
            gain_rx: self.gain_rx,
            reflector_index: Complex64::new(self.reflector_index, 0.0),
        })
    }

    pub fn medium(&self) -> Result<Medium> {
        let spectrum = match &self.absorption_table {
            Some(path) => AbsorptionSpectrum::from_csv(std::fs::File::open(path)?)?,
            None => AbsorptionSpectrum::bundled(),
        };
        Medium::with_absorption(self.temperature_k, spectrum)
    }

    /// Carrier, distance and the absorption coefficient at the carrier.
    pub fn path_context(&self) -> Result<PathContext> {
        Ok(PathContext {
            frequency: self.frequency_hz,
            distance: self.distance_m,
            absorption: self.medium()?.absorption().coefficient(self.frequency_hz)?,
        })
    }

    /// Estimator settings for `algorithm`; rank defaults to the channel's ray
    /// count, capped at the smaller array.
    pub fn estimator_config(&self, algorithm: Algorithm) -> EstimatorConfig {
        let o = &self.estimator;
        let base = EstimatorConfig::for_algorithm(algorithm);
        let ray_rank = (1 + self.clusters * self.rays_per_cluster).min(self.m_t.min(self.m_r));
        EstimatorConfig {
            epochs: o.epochs.unwrap_or(base.epochs),
            learning_rate: o.learning_rate,
            decay: o.decay,
            tolerance: o.tolerance.unwrap_or(base.tolerance),
            lambda: o.lambda.unwrap_or(base.lambda),
            rank: Some(o.rank.unwrap_or(ray_rank)),
            budget: o.budget,
            init: o.init.unwrap_or(base.init),
            ..base
        }
    }
}
