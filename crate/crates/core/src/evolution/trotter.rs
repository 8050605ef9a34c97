//! Trotterized evolution: alternating coherent rotations and exact
//! dissipative Kraus channels.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::{Engine, Trajectory, TrotterSchedule};
use crate::error::Result;
use crate::linalg::{Mat2, ONE, ZERO};
use crate::math;
use crate::model::ModelParams;
use crate::state::{bloch_to_density, density_to_bloch, BlochState, DensityMatrix};

/// `exp(−i φ σₓ/2)` with `φ = Ω·dt`; `dt` in trajectory time units.
pub fn coherent_step(params: &ModelParams, dt: f64) -> Mat2 {
    Mat2::rotation_x(params.omega() * params.time_unit() * dt)
}

/// Amplitude damping `|↑⟩ → |↓⟩` followed by pure dephasing.
///
/// The two channels commute, so the order inside one step does not matter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipativeChannel {
    /// Probability that `|↑⟩` decays during the step.
    pub decay_probability: f64,
    /// Extra factor applied to the coherences by dephasing.
    pub dephasing_factor: f64,
    damping: [Mat2; 2],
    dephasing: [Mat2; 2],
}

impl DissipativeChannel {
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let damped = self.damping[0].sandwich(rho.mat()) + self.damping[1].sandwich(rho.mat());
        let out = self.dephasing[0].sandwich(&damped) + self.dephasing[1].sandwich(&damped);
        DensityMatrix::from_mat(out)
    }

    /// The four Kraus operators of the composed channel.
    pub fn kraus_operators(&self) -> [Mat2; 4] {
        let [a0, a1] = self.damping;
        let [d0, d1] = self.dephasing;
        [d0 * a0, d0 * a1, d1 * a0, d1 * a1]
    }
}

/// Exact channel for one dissipative interval `dt` (trajectory time units).
///
/// Populations relax at `2αγ` (`p = 1 − e^{−2αγ dt}`); dephasing multiplies
/// the coherences by `e^{−(1−α)γ dt}` on top of the `√(1−p)` from damping.
pub fn dissipative_step_channel(params: &ModelParams, dt: f64) -> DissipativeChannel {
    let dt_phys = dt * params.time_unit();
    let decay_probability = 1.0 - math::exp(-2.0 * params.gamma_decay() * dt_phys);
    let dephasing_factor = math::exp(-params.gamma_dephase() * dt_phys);

    let keep = Complex64::new(math::sqrt(1.0 - decay_probability), 0.0);
    let jump = Complex64::new(math::sqrt(decay_probability), 0.0);
    let damping = [Mat2::diag(keep, ONE), Mat2([[ZERO, ZERO], [jump, ZERO]])];

    let q = 0.5 * (1.0 + dephasing_factor);
    let s0 = Complex64::new(math::sqrt(q), 0.0);
    let s1 = Complex64::new(math::sqrt(1.0 - q), 0.0);
    let dephasing = [Mat2::diag(s0, s0), Mat2::diag(s1, -s1)];

    DissipativeChannel { decay_probability, dephasing_factor, damping, dephasing }
}

/// Applies `n_steps` of (rotation, dissipation) and records the state after
/// every full step, starting with `r0` at `t = 0`.
pub fn evolve_trotter(r0: BlochState, params: &ModelParams, schedule: &TrotterSchedule) -> Result<Trajectory> {
    let dt = schedule.step();
    let u = coherent_step(params, dt);
    let channel = dissipative_step_channel(params, dt);

    let mut rho = bloch_to_density(&r0);
    let mut states = Vec::with_capacity(schedule.n_steps() + 1);
    states.push(r0);
    for _ in 0..schedule.n_steps() {
        let rotated = DensityMatrix::from_mat(u.sandwich(rho.mat()))?;
        rho = channel.apply(&rotated)?;
        states.push(density_to_bloch(&rho)?);
    }
    Trajectory::new(schedule.times(), states, Engine::Trotter, *params)
}
