use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::evolution::{evolve, EngineSpec, Trajectory};
use crate::linalg::Mat2;
use crate::model::{steady_state_at, ModelParams};
use crate::state::{bloch_to_density, density_to_bloch, BlochState, DensityMatrix};

/// Steady state written as `(1−p)/2 |+θ⟩⟨+θ| + (1+p)/2 |−θ⟩⟨−θ|` with
/// `|±θ⟩ = exp[−(i/2)(θ ± π/2)σₓ]|↑⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreparedEnsemble {
    pub theta: f64,
    pub p: f64,
    /// `[|+θ⟩, |−θ⟩]`
    pub components: [BlochState; 2],
    /// `[(1−p)/2, (1+p)/2]`
    pub weights: [f64; 2],
}

impl PreparedEnsemble {
    /// Weighted Bloch average of the two components.
    pub fn mixture(&self) -> Result<BlochState> {
        BlochState::mix(&[(self.weights[0], self.components[0]), (self.weights[1], self.components[1])])
    }
}

fn rotated_up(angle: f64) -> Result<BlochState> {
    let rho = bloch_to_density(&BlochState::UP);
    let out = DensityMatrix::new(Mat2::rotation_x(angle).sandwich(rho.mat()).0)?;
    density_to_bloch(&out)
}

pub fn decompose_steady_state(gamma_i_prime: f64, alpha: f64) -> Result<PreparedEnsemble> {
    if !(gamma_i_prime >= 0.0 && gamma_i_prime.is_finite()) {
        return Err(Error::InvalidParameter("gamma_i' must be non-negative and finite"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter("alpha must lie in (0, 1]"));
    }
    let ss = steady_state_at(gamma_i_prime, alpha);
    let (p, theta) = (ss.p, ss.theta);
    let half_pi = core::f64::consts::FRAC_PI_2;
    let components = [rotated_up(theta + half_pi)?, rotated_up(theta - half_pi)?];
    let weights = [0.5 * (1.0 - p), 0.5 * (1.0 + p)];
    Ok(PreparedEnsemble { theta, p, components, weights })
}

/// Evolves both pure components with the same engine and recombines them.
pub fn evolve_prepared(ensemble: &PreparedEnsemble, params: &ModelParams, spec: &EngineSpec<'_>) -> Result<Trajectory> {
    let plus = evolve(ensemble.components[0], params, spec)?;
    let minus = evolve(ensemble.components[1], params, spec)?;
    let [w_plus, w_minus] = ensemble.weights;
    let states = plus
        .states()
        .iter()
        .zip(minus.states())
        .map(|(a, b)| BlochState::mix(&[(w_plus, *a), (w_minus, *b)]))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(plus.times().to_vec(), states, spec.engine(), *params)
}
