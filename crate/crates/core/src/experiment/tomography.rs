use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::evolution::Trajectory;
use crate::math;

/// Shots per measurement axis when none are given.
pub const DEFAULT_SHOTS: u64 = 500;

/// Estimated Bloch vector at one time point with per-axis standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TomographyRecord {
    pub time: f64,
    /// Per-axis estimates; may lie slightly outside the Bloch ball.
    pub mean: [f64; 3],
    /// `√((1 − mean²)/shots)` per axis.
    pub sigma: [f64; 3],
    pub shots: u64,
    pub seed: u64,
}

impl TomographyRecord {
    /// Distance of the estimate from `target` with a first-order error bar.
    pub fn distance_to(&self, target: [f64; 3]) -> (f64, f64) {
        let diff: [f64; 3] = core::array::from_fn(|i| self.mean[i] - target[i]);
        let d = math::sqrt(diff.iter().map(|v| v * v).sum());
        let var: f64 = if d > 0.0 {
            (0..3).map(|i| (diff[i] / d) * (diff[i] / d) * self.sigma[i] * self.sigma[i]).sum()
        } else {
            self.sigma.iter().map(|s| s * s).sum()
        };
        (d, math::sqrt(var))
    }
}

/// One projective measurement series of `shots` along an axis with expectation `w`.
///
/// The generator is keyed by `(seed, time_index, axis)` so results do not
/// depend on evaluation order.
pub fn measure_axis(w: f64, shots: u64, seed: u64, time_index: u64, axis: u64) -> Result<f64> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1"));
    }
    let up = (0.5 * (1.0 + w)).clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(time_index.wrapping_mul(3).wrapping_add(axis));
    let dist = Binomial::new(shots, up).map_err(|_| Error::InvalidParameter("invalid outcome probability"))?;
    let k = dist.sample(&mut rng);
    Ok(2.0 * k as f64 / shots as f64 - 1.0)
}

/// Independent binomial tomography of every state on the trajectory.
pub fn simulate_tomography(traj: &Trajectory, shots: u64, seed: u64) -> Result<Vec<TomographyRecord>> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1"));
    }
    traj.times()
        .iter()
        .zip(traj.states())
        .enumerate()
        .map(|(i, (&time, state))| {
            let truth = state.to_array();
            let mut mean = [0.0; 3];
            let mut sigma = [0.0; 3];
            for axis in 0..3 {
                let m = measure_axis(truth[axis], shots, seed, i as u64, axis as u64)?;
                mean[axis] = m;
                sigma[axis] = math::sqrt((1.0 - m * m).max(0.0) / shots as f64);
            }
            Ok(TomographyRecord { time, mean, sigma, shots, seed })
        })
        .collect()
}
