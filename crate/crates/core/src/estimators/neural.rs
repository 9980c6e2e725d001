//! Weight-based learners: logistic regression and the single-layer NN-CE.
//! Both treat the realified channel as the weight matrix and the realified
//! noise as the bias.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::loss::{Activation, CrossEntropy, LeastSquares, NeuronParams};
use super::trainer::{train, Direction, Objective};
use super::{check_inputs, ChannelEstimate, EstimatorConfig, Init};
use crate::error::{invalid, Result};
use crate::frontend::{
    derealify_channel, derealify_vector, ObservationBlock, PilotMatrix, RealifiedSystem,
};

impl Objective for LeastSquares<'_> {
    type Point = NeuronParams;

    fn direction(&self) -> Direction {
        Direction::Minimize
    }

    fn value(&self, p: &NeuronParams) -> Result<f64> {
        self.loss(p)
    }

    fn propose(&self, p: &NeuronParams, step: f64, _: usize) -> Result<NeuronParams> {
        Ok(p.axpy(-step, &self.gradient(p)?))
    }
}

impl Objective for CrossEntropy<'_> {
    type Point = NeuronParams;

    fn direction(&self) -> Direction {
        Direction::Minimize
    }

    fn value(&self, p: &NeuronParams) -> Result<f64> {
        self.loss(p)
    }

    fn propose(&self, p: &NeuronParams, step: f64, _: usize) -> Result<NeuronParams> {
        Ok(p.axpy(-step, &self.gradient(p)?))
    }
}

fn initial_params(init: &Init, m_r: usize, m_t: usize) -> Result<NeuronParams> {
    match *init {
        Init::Zero => Ok(NeuronParams::zeros(m_r, m_t)),
        Init::Gaussian { seed, std } => {
            let normal =
                Normal::new(0.0, std).map_err(|e| invalid(format!("init std {std}: {e}")))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = DMatrix::from_fn(m_r, 2 * m_t, |_, _| normal.sample(&mut rng));
            let z = DMatrix::from_fn(m_r, 2, |_, _| normal.sample(&mut rng));
            Ok(NeuronParams { h, z })
        }
    }
}

fn fit<O>(
    obs: &ObservationBlock,
    pilots: &PilotMatrix,
    config: &EstimatorConfig,
    objective: &O,
) -> Result<ChannelEstimate>
where
    O: Objective<Point = NeuronParams>,
{
    let init = initial_params(&config.init, obs.rx_antennas(), pilots.tx_antennas())?;
    let schedule = config.schedule(pilots.len())?;
    let (params, trace) = train(objective, init, &schedule)?;
    ChannelEstimate {
        h: derealify_channel(&params.h)?,
        z: derealify_vector(&params.z)?,
        trace,
        config: config.clone(),
    }
    .checked()
}

/// Per-antenna logistic models on targets mapped from ±1 to {0, 1}.
pub fn train_logistic_regression(
    obs: &ObservationBlock,
    pilots: &PilotMatrix,
    config: &EstimatorConfig,
) -> Result<ChannelEstimate> {
    check_inputs(obs, pilots)?;
    config.validate(obs.rx_antennas(), pilots.tx_antennas())?;
    let system = RealifiedSystem::new(&obs.y, pilots)?;
    let objective = CrossEntropy {
        system: &system,
        lambda: config.lambda,
    };
    fit(obs, pilots, config, &objective)
}

/// Single tanh layer trained on regularized least squares.
pub fn train_nn_ce(
    obs: &ObservationBlock,
    pilots: &PilotMatrix,
    config: &EstimatorConfig,
) -> Result<ChannelEstimate> {
    check_inputs(obs, pilots)?;
    config.validate(obs.rx_antennas(), pilots.tx_antennas())?;
    let system = RealifiedSystem::new(&obs.y, pilots)?;
    let objective = LeastSquares {
        system: &system,
        activation: Activation::Tanh,
        lambda: config.lambda,
    };
    fit(obs, pilots, config, &objective)
}
