//! Projected gradient ascent on the probit likelihood.

use std::f64::consts::FRAC_2_PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::loss::{loglik, loglik_gradient};
use super::lowrank::{low_rank_project, sorted_svd};
use super::recover::recover_channel;
use super::trainer::{train, Direction, Objective, Schedule};
use super::{check_inputs, ChannelEstimate, EstimatorConfig, TrainingTrace};
use crate::error::Result;
use crate::frontend::{ObservationBlock, PilotMatrix};

/// Probit likelihood of the observations over the noise-normalized receive
/// matrix `H·X/σ`.
pub(crate) struct Likelihood<'a> {
    pub y: &'a DMatrix<Complex64>,
    pub pilots: &'a DMatrix<Complex64>,
}

impl Likelihood<'_> {
    pub fn value(&self, x: &DMatrix<Complex64>) -> Result<f64> {
        loglik(x, self.y, 1.0)
    }

    /// `∂L/∂X · X_pᴴ · X_p`: the gradient with respect to the channel, mapped
    /// back through the pilots. A step along it keeps `X` in the pilot row
    /// space, where every `H·X_p` lives.
    pub fn channel_gradient(&self, x: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
        Ok(loglik_gradient(x, self.y, 1.0)? * self.pilots.adjoint() * self.pilots)
    }
}

struct Projected<'a> {
    lik: Likelihood<'a>,
    rank: usize,
    budget: f64,
}

impl Objective for Projected<'_> {
    type Point = DMatrix<Complex64>;

    fn direction(&self) -> Direction {
        Direction::Maximize
    }

    fn value(&self, x: &DMatrix<Complex64>) -> Result<f64> {
        self.lik.value(x)
    }

    fn propose(&self, x: &DMatrix<Complex64>, step: f64, _: usize) -> Result<DMatrix<Complex64>> {
        let ascended = x + self.lik.channel_gradient(x)? * Complex64::new(step, 0.0);
        low_rank_project(&ascended, self.rank, self.budget)
    }
}

struct Unprojected<'a> {
    lik: Likelihood<'a>,
}

impl Objective for Unprojected<'_> {
    type Point = DMatrix<Complex64>;

    fn direction(&self) -> Direction {
        Direction::Maximize
    }

    fn value(&self, x: &DMatrix<Complex64>) -> Result<f64> {
        self.lik.value(x)
    }

    fn propose(&self, x: &DMatrix<Complex64>, step: f64, _: usize) -> Result<DMatrix<Complex64>> {
        Ok(x + self.lik.channel_gradient(x)? * Complex64::new(step, 0.0))
    }
}

pub(crate) fn resolve_rank(
    config: &EstimatorConfig,
    obs: &ObservationBlock,
    pilots: &PilotMatrix,
) -> usize {
    config
        .rank
        .unwrap_or_else(|| obs.rx_antennas().min(pilots.tx_antennas()))
}

/// Bussgang-scaled least-squares estimate of `H·X/σ`: each one-bit sample is
/// mapped to its linear MMSE amplitude `√(2/π)·√(P_rx/2)` and the result is
/// projected onto the pilot row space.
pub fn least_squares_initializer(
    obs: &ObservationBlock,
    pilots: &PilotMatrix,
    sigma: f64,
) -> Result<DMatrix<Complex64>> {
    let amplitude = (FRAC_2_PI * obs.rx_power / 2.0).sqrt() / sigma;
    let scaled = &obs.y * Complex64::new(amplitude, 0.0);
    Ok(recover_channel(&scaled, pilots)? * &pilots.x)
}

/// Nuclear norm of the rank-`rank` truncation of the least-squares
/// initializer, in noise-normalized units.
pub fn default_budget(
    obs: &ObservationBlock,
    pilots: &PilotMatrix,
    sigma: f64,
    rank: usize,
) -> Result<f64> {
    let init = least_squares_initializer(obs, pilots, sigma)?;
    Ok(sorted_svd(&init)?.singular_values.iter().take(rank).sum())
}

pub(crate) fn finish(
    x_hat: DMatrix<Complex64>,
    sigma: f64,
    pilots: &PilotMatrix,
    m_r: usize,
    trace: TrainingTrace,
    config: &EstimatorConfig,
) -> Result<ChannelEstimate> {
    let h = recover_channel(&(x_hat * Complex64::new(sigma, 0.0)), pilots)?;
    ChannelEstimate {
        h,
        z: DVector::zeros(m_r),
        trace,
        config: config.clone(),
    }
    .checked()
}

/// Runs the projected ascent from zero on the noise-normalized receive matrix
/// `y ≈ sign(H·X_p/σ + noise)` and returns the final iterate.
pub fn solve_pga(
    y: &DMatrix<Complex64>,
    pilots: &DMatrix<Complex64>,
    rank: usize,
    budget: f64,
    schedule: &Schedule,
) -> Result<(DMatrix<Complex64>, TrainingTrace)> {
    let objective = Projected {
        lik: Likelihood { y, pilots },
        rank,
        budget,
    };
    train(&objective, DMatrix::zeros(y.nrows(), y.ncols()), schedule)
}

pub fn train_pga(
    obs: &ObservationBlock,
    pilots: &PilotMatrix,
    config: &EstimatorConfig,
) -> Result<ChannelEstimate> {
    check_inputs(obs, pilots)?;
    config.validate(obs.rx_antennas(), pilots.tx_antennas())?;
    let sigma = config.sigma(obs);
    let rank = resolve_rank(config, obs, pilots);
    let budget = match config.budget {
        Some(b) => b,
        None => default_budget(obs, pilots, sigma, rank)?,
    };
    let schedule = config.schedule(pilots.len())?;
    let (x_hat, trace) = solve_pga(&obs.y, &pilots.x, rank, budget, &schedule)?;
    finish(x_hat, sigma, pilots, obs.rx_antennas(), trace, config)
}

/// Plain gradient ascent with the PGA schedule but no projection; the
/// reference point for what the low-rank projection buys.
pub fn train_unprojected_ascent(
    obs: &ObservationBlock,
    pilots: &PilotMatrix,
    config: &EstimatorConfig,
) -> Result<ChannelEstimate> {
    check_inputs(obs, pilots)?;
    config.validate(obs.rx_antennas(), pilots.tx_antennas())?;
    let sigma = config.sigma(obs);
    let objective = Unprojected {
        lik: Likelihood {
            y: &obs.y,
            pilots: &pilots.x,
        },
    };
    let schedule = config.schedule(pilots.len())?;
    let (x_hat, trace) = train(
        &objective,
        DMatrix::zeros(obs.rx_antennas(), pilots.len()),
        &schedule,
    )?;
    finish(x_hat, sigma, pilots, obs.rx_antennas(), trace, config)
}
