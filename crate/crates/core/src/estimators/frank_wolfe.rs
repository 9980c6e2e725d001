//! Frank-Wolfe over the nuclear-norm ball on the probit likelihood.
//!
//! The feasible set is the ball `‖X‖_* ≤ B` intersected with the pilot row
//! space. Each step moves toward the vertex `B·u₁v₁ᴴ` built from the top
//! singular pair of the row-projected gradient, with step `γ_t = 2/(t+1)`
//! (t counted from 1) scaled by the schedule's multiplier. Rejected steps
//! shrink the multiplier so accepted iterates never lose likelihood.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::loss::loglik_gradient;
use super::lowrank::top_singular_pair;
use super::pga::{default_budget, finish, resolve_rank, Likelihood};
use super::recover::pseudo_inverse;
use super::trainer::{train, Direction, Objective, Schedule};
use super::{check_inputs, ChannelEstimate, EstimatorConfig, TrainingTrace};
use crate::error::Result;
use crate::frontend::{ObservationBlock, PilotMatrix};

struct FrankWolfe<'a> {
    lik: Likelihood<'a>,
    row_projector: DMatrix<Complex64>,
    budget: f64,
}

impl Objective for FrankWolfe<'_> {
    type Point = DMatrix<Complex64>;

    fn direction(&self) -> Direction {
        Direction::Maximize
    }

    fn value(&self, x: &DMatrix<Complex64>) -> Result<f64> {
        self.lik.value(x)
    }

    fn propose(
        &self,
        x: &DMatrix<Complex64>,
        scale: f64,
        epoch: usize,
    ) -> Result<DMatrix<Complex64>> {
        let grad = loglik_gradient(x, self.lik.y, 1.0)? * &self.row_projector;
        let (u, v) = top_singular_pair(&grad)?;
        let vertex = (u * v.adjoint()) * Complex64::new(self.budget, 0.0);
        let gamma = (scale * 2.0 / (epoch as f64 + 1.0)).min(1.0);
        Ok(x * Complex64::new(1.0 - gamma, 0.0) + vertex * Complex64::new(gamma, 0.0))
    }
}

/// Runs Frank-Wolfe from zero on the noise-normalized receive matrix
/// `y ≈ sign(H·X_p/σ + noise)`.
pub fn solve_frank_wolfe(
    y: &DMatrix<Complex64>,
    pilots: &DMatrix<Complex64>,
    budget: f64,
    schedule: &Schedule,
) -> Result<(DMatrix<Complex64>, TrainingTrace)> {
    let objective = FrankWolfe {
        lik: Likelihood { y, pilots },
        row_projector: pseudo_inverse(pilots)? * pilots,
        budget,
    };
    train(&objective, DMatrix::zeros(y.nrows(), y.ncols()), schedule)
}

pub fn train_frank_wolfe(
    obs: &ObservationBlock,
    pilots: &PilotMatrix,
    config: &EstimatorConfig,
) -> Result<ChannelEstimate> {
    check_inputs(obs, pilots)?;
    config.validate(obs.rx_antennas(), pilots.tx_antennas())?;
    let sigma = config.sigma(obs);
    let budget = match config.budget {
        Some(b) => b,
        None => default_budget(obs, pilots, sigma, resolve_rank(config, obs, pilots))?,
    };
    let schedule = config.schedule(pilots.len())?;
    let (x_hat, trace) = solve_frank_wolfe(&obs.y, &pilots.x, budget, &schedule)?;
    finish(x_hat, sigma, pilots, obs.rx_antennas(), trace, config)
}
