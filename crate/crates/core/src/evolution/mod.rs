//! Evolution engines.
//!
//! Trajectory times are measured in units of `1/γ` of the params they were
//! computed with (`1/Ω` when `γ′ = 0`), see [`ModelParams::time_unit`].

mod closed_form;
mod ode;
mod trotter;

use alloc::vec::Vec;
use core::fmt;

pub use closed_form::evolve_closed_form;
pub use ode::{evolve_ode, DEFAULT_ODE_TOLERANCE};
pub use trotter::{coherent_step, dissipative_step_channel, evolve_trotter, DissipativeChannel};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::state::BlochState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    ClosedForm,
    Ode,
    Trotter,
}

impl Engine {
    pub fn name(&self) -> &'static str {
        match self {
            Engine::ClosedForm => "closed_form",
            Engine::Ode => "ode",
            Engine::Trotter => "trotter",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sampled Bloch trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<BlochState>,
    engine: Engine,
    params: ModelParams,
    seed: Option<u64>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<BlochState>, engine: Engine, params: ModelParams) -> Result<Self> {
        validate_times(&times)?;
        if times.len() != states.len() {
            return Err(Error::InvalidParameter("trajectory needs one state per time point"));
        }
        Ok(Trajectory { times, states, engine, params, seed: None })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[BlochState] {
        &self.states
    }

    pub fn engine(&self) -> Engine {
        self.engine
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&BlochState> {
        self.states.last()
    }

    /// Maximum Euclidean deviation between two trajectories on the same grid.
    pub fn max_deviation(&self, other: &Trajectory) -> Result<f64> {
        if self.times != other.times {
            return Err(Error::TimeGridMismatch);
        }
        Ok(self
            .states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max))
    }
}

/// Equal-length steps of coherent rotation followed by dissipation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrotterSchedule {
    n_steps: usize,
    total_time: f64,
}

impl TrotterSchedule {
    pub fn new(n_steps: usize, total_time: f64) -> Result<Self> {
        if n_steps == 0 {
            return Err(Error::InvalidParameter("trotter schedule needs at least one step"));
        }
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(Error::InvalidParameter("trotter total time must be positive"));
        }
        Ok(TrotterSchedule { n_steps, total_time })
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn step(&self) -> f64 {
        self.total_time / self.n_steps as f64
    }

    /// `0, dt, 2dt, …, total_time`
    pub fn times(&self) -> Vec<f64> {
        let dt = self.step();
        (0..=self.n_steps).map(|k| k as f64 * dt).collect()
    }
}

/// Engine selection with the inputs each engine needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EngineSpec<'a> {
    ClosedForm { times: &'a [f64] },
    Ode { times: &'a [f64], tol: f64 },
    Trotter(TrotterSchedule),
}

impl EngineSpec<'_> {
    pub fn engine(&self) -> Engine {
        match self {
            EngineSpec::ClosedForm { .. } => Engine::ClosedForm,
            EngineSpec::Ode { .. } => Engine::Ode,
            EngineSpec::Trotter(_) => Engine::Trotter,
        }
    }
}

pub fn evolve(r0: BlochState, params: &ModelParams, spec: &EngineSpec<'_>) -> Result<Trajectory> {
    match *spec {
        EngineSpec::ClosedForm { times } => evolve_closed_form(r0, params, times),
        EngineSpec::Ode { times, tol } => evolve_ode(r0, params, times, tol),
        EngineSpec::Trotter(schedule) => evolve_trotter(r0, params, &schedule),
    }
}

pub(crate) fn validate_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidParameter("time grid is empty"));
    }
    if !times.iter().all(|t| t.is_finite() && *t >= 0.0) {
        return Err(Error::InvalidParameter("times must be finite and non-negative"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("times must be strictly increasing"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_grid_validation() {
        assert!(validate_times(&[0.0, 1.0, 2.0]).is_ok());
        assert!(validate_times(&[]).is_err());
        assert!(validate_times(&[0.0, 0.0]).is_err());
        assert!(validate_times(&[1.0, 0.5]).is_err());
        assert!(validate_times(&[-1.0, 0.5]).is_err());
    }

    #[test]
    fn schedule_validation() {
        assert!(TrotterSchedule::new(0, 1.0).is_err());
        assert!(TrotterSchedule::new(3, 0.0).is_err());
        let s = TrotterSchedule::new(4, 2.0).unwrap();
        assert_eq!(s.times(), [0.0, 0.5, 1.0, 1.5, 2.0]);
    }
}
