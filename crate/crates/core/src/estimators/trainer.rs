//! Full-batch iterative trainer with rollback on non-improvement.
//!
//! Every epoch proposes one candidate from the current point. An improving
//! candidate is accepted; otherwise the step size is multiplied by the decay
//! factor and the next epoch retries from the same point. Training stops once
//! the objective changes by less than the tolerance in a single epoch.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Minimize,
    Maximize,
}

/// An objective together with its update rule.
pub trait Objective {
    type Point: Clone;

    fn direction(&self) -> Direction;

    fn value(&self, point: &Self::Point) -> Result<f64>;

    /// Candidate for epoch `epoch` (1-based) from `point` with step size `step`.
    fn propose(&self, point: &Self::Point, step: f64, epoch: usize) -> Result<Self::Point>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub epochs: usize,
    pub step: f64,
    pub decay: f64,
    pub tolerance: f64,
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(invalid("at least one epoch required"));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(invalid(format!(
                "learning rate {} must be positive",
                self.step
            )));
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(invalid(format!("decay {} must lie in (0, 1]", self.decay)));
        }
        if !(self.tolerance > 0.0) {
            return Err(invalid(format!(
                "tolerance {} must be positive",
                self.tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    EpochLimit,
}

/// Per-epoch record: objective at the current point after the epoch, the step
/// size the epoch used, and whether its candidate was accepted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingTrace {
    pub direction: Direction,
    pub initial: f64,
    pub losses: Vec<f64>,
    pub learning_rates: Vec<f64>,
    pub accepted: Vec<bool>,
    pub termination: Termination,
}

impl TrainingTrace {
    pub fn epochs(&self) -> usize {
        self.losses.len()
    }

    pub fn final_value(&self) -> f64 {
        self.losses.last().copied().unwrap_or(self.initial)
    }

    /// True when accepted values never move against the direction.
    pub fn is_monotone(&self) -> bool {
        let mut prev = self.initial;
        self.losses.iter().all(|&v| {
            let ok = match self.direction {
                Direction::Minimize => v <= prev,
                Direction::Maximize => v >= prev,
            };
            prev = v;
            ok
        })
    }
}

pub fn train<O: Objective>(
    objective: &O,
    init: O::Point,
    schedule: &Schedule,
) -> Result<(O::Point, TrainingTrace)> {
    schedule.validate()?;
    let direction = objective.direction();
    let mut point = init;
    let mut current = objective.value(&point)?;
    if !current.is_finite() {
        return Err(Error::Diverged {
            epoch: 0,
            loss: current,
        });
    }
    let mut trace = TrainingTrace {
        direction,
        initial: current,
        losses: Vec::with_capacity(schedule.epochs),
        learning_rates: Vec::with_capacity(schedule.epochs),
        accepted: Vec::with_capacity(schedule.epochs),
        termination: Termination::EpochLimit,
    };
    let mut step = schedule.step;
    for epoch in 1..=schedule.epochs {
        let candidate = objective.propose(&point, step, epoch)?;
        let value = objective.value(&candidate)?;
        if !value.is_finite() {
            return Err(Error::Diverged { epoch, loss: value });
        }
        let improved = match direction {
            Direction::Minimize => value < current,
            Direction::Maximize => value > current,
        };
        let change = (value - current).abs();
        trace.learning_rates.push(step);
        trace.accepted.push(improved);
        if improved {
            point = candidate;
            current = value;
        } else {
            step *= schedule.decay;
        }
        trace.losses.push(current);
        if change < schedule.tolerance {
            trace.termination = Termination::Converged;
            break;
        }
    }
    Ok((point, trace))
}
