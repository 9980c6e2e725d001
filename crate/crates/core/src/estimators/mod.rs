//! Channel estimators for one-bit observations.
//!
//! Four learners share one full-batch trainer:
//!
//! * `Lr`: per-antenna logistic regression on the realified system.
//! * `Nn`: a single tanh layer whose weights are the realified channel and
//!   whose bias models the noise, trained on regularized least squares.
//! * `Pga`: projected gradient ascent of the probit likelihood over the
//!   noiseless receive matrix `H·X`, projected onto rank-`r` matrices of fixed
//!   nuclear norm after every step.
//! * `Fw`: Frank-Wolfe over the nuclear-norm ball on the same likelihood.
//!
//! The likelihood-based learners work in noise-normalized units (`H·X / σ`),
//! which makes their step sizes independent of the absolute channel scale.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::frontend::{ObservationBlock, PilotMatrix};
use crate::serde_util::{cmatrix, cvector};

pub mod frank_wolfe;
pub mod loss;
pub mod lowrank;
pub mod neural;
pub mod normal;
pub mod pga;
pub mod recover;
pub mod trainer;

pub use frank_wolfe::train_frank_wolfe;
pub use neural::{train_logistic_regression, train_nn_ce};
pub use pga::{train_pga, train_unprojected_ascent};
pub use recover::{pseudo_inverse, recover_channel};
pub use trainer::{Direction, Schedule, Termination, TrainingTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Lr,
    Nn,
    Pga,
    Fw,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Lr, Algorithm::Nn, Algorithm::Pga, Algorithm::Fw];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Lr => "lr",
            Algorithm::Nn => "nn",
            Algorithm::Pga => "pga",
            Algorithm::Fw => "fw",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lr" => Ok(Algorithm::Lr),
            "nn" => Ok(Algorithm::Nn),
            "pga" => Ok(Algorithm::Pga),
            "fw" => Ok(Algorithm::Fw),
            other => Err(invalid(format!("unknown algorithm `{other}`"))),
        }
    }

    fn default_decay(&self) -> f64 {
        match self {
            Algorithm::Lr | Algorithm::Nn => 0.7,
            Algorithm::Pga | Algorithm::Fw => 0.5,
        }
    }
}

/// Starting point for the weight-based learners.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Init {
    Zero,
    Gaussian { seed: u64, std: f64 },
}

/// Training hyperparameters. `None` fields take per-algorithm defaults at
/// training time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorConfig {
    pub algorithm: Algorithm,
    pub epochs: usize,
    /// Defaults to 0.01 for LR/NN, 1/N_p for PGA and 1 (a multiplier on the
    /// 2/(t+2) step) for FW.
    pub learning_rate: Option<f64>,
    /// Defaults to 0.7 for LR/NN and 0.5 for PGA/FW.
    pub decay: Option<f64>,
    pub tolerance: f64,
    pub lambda: f64,
    pub rank: Option<usize>,
    /// Nuclear-norm budget in noise-normalized units.
    pub budget: Option<f64>,
    /// Per-real-dimension noise std; defaults to √(N0/2) from the observations.
    pub noise_std: Option<f64>,
    pub init: Init,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Pga,
            epochs: 100,
            learning_rate: None,
            decay: None,
            tolerance: 1e-10,
            lambda: 1e-3,
            rank: None,
            budget: None,
            noise_std: None,
            init: Init::Zero,
        }
    }
}

impl EstimatorConfig {
    pub fn for_algorithm(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            ..Self::default()
        }
    }

    pub fn schedule(&self, n_pilots: usize) -> Result<Schedule> {
        let step = self.learning_rate.unwrap_or(match self.algorithm {
            Algorithm::Lr | Algorithm::Nn => 0.01,
            Algorithm::Pga => 1.0 / n_pilots as f64,
            Algorithm::Fw => 1.0,
        });
        let schedule = Schedule {
            epochs: self.epochs,
            step,
            decay: self.decay.unwrap_or(self.algorithm.default_decay()),
            tolerance: self.tolerance,
        };
        schedule.validate()?;
        Ok(schedule)
    }

    pub fn validate(&self, m_r: usize, m_t: usize) -> Result<()> {
        if !(self.lambda >= 0.0) {
            return Err(invalid(format!(
                "lambda {} must be non-negative",
                self.lambda
            )));
        }
        if let Some(r) = self.rank {
            if r == 0 || r > m_r.min(m_t) {
                return Err(invalid(format!("rank {r} outside [1, {}]", m_r.min(m_t))));
            }
        }
        if let Some(b) = self.budget {
            if !(b > 0.0 && b.is_finite()) {
                return Err(invalid(format!("budget {b} must be positive")));
            }
        }
        if let Some(s) = self.noise_std {
            if !(s > 0.0 && s.is_finite()) {
                return Err(invalid(format!("noise std {s} must be positive")));
            }
        }
        Ok(())
    }

    fn sigma(&self, obs: &ObservationBlock) -> f64 {
        self.noise_std.unwrap_or_else(|| obs.noise_std())
    }
}

/// Estimated channel, bias (LR/NN only) and training record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelEstimate {
    #[serde(with = "cmatrix")]
    pub h: DMatrix<Complex64>,
    #[serde(with = "cvector")]
    pub z: DVector<Complex64>,
    pub trace: TrainingTrace,
    pub config: EstimatorConfig,
}

impl ChannelEstimate {
    fn checked(self) -> Result<Self> {
        if self
            .h
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::NonFinite("channel estimate".into()));
        }
        Ok(self)
    }
}

fn check_inputs(obs: &ObservationBlock, pilots: &PilotMatrix) -> Result<()> {
    obs.validate()?;
    pilots.validate()?;
    if obs.len() != pilots.len() {
        return Err(Error::Dimension(format!(
            "{} observations for {} pilots",
            obs.len(),
            pilots.len()
        )));
    }
    Ok(())
}

/// Runs the configured algorithm.
pub fn estimate(
    obs: &ObservationBlock,
    pilots: &PilotMatrix,
    config: &EstimatorConfig,
) -> Result<ChannelEstimate> {
    match config.algorithm {
        Algorithm::Lr => train_logistic_regression(obs, pilots, config),
        Algorithm::Nn => train_nn_ce(obs, pilots, config),
        Algorithm::Pga => train_pga(obs, pilots, config),
        Algorithm::Fw => train_frank_wolfe(obs, pilots, config),
    }
}
