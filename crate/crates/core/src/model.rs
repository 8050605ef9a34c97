//! The driven-dissipative qubit: generator, Bloch drift, steady states and
//! the steady-state locus.
//!
//! Rates are stored relative to the drive `Ω`: the bath coupling enters only as
//! `γ′ = γ/Ω`, decay happens at `2αγ` on the populations and coherences decay
//! at `γ`. Physical units appear only through [`ModelParams::omega`].

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;
use crate::state::BlochState;

/// Drive rate, dimensionless bath coupling and decay fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    omega: f64,
    gamma_prime: f64,
    alpha: f64,
}

impl ModelParams {
    pub fn new(omega: f64, gamma_prime: f64, alpha: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter("omega must be positive and finite"));
        }
        if !(gamma_prime >= 0.0 && gamma_prime.is_finite()) {
            return Err(Error::InvalidParameter("gamma' must be non-negative and finite"));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter("alpha must lie in [0, 1]"));
        }
        Ok(ModelParams { omega, gamma_prime, alpha })
    }

    /// Parameters in units where `Ω = 1`.
    pub fn dimensionless(gamma_prime: f64, alpha: f64) -> Result<Self> {
        Self::new(1.0, gamma_prime, alpha)
    }

    pub fn with_gamma_prime(&self, gamma_prime: f64) -> Result<Self> {
        Self::new(self.omega, gamma_prime, self.alpha)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn gamma_prime(&self) -> f64 {
        self.gamma_prime
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `γ = γ′Ω`
    pub fn gamma(&self) -> f64 {
        self.gamma_prime * self.omega
    }

    pub fn gamma_decay(&self) -> f64 {
        self.alpha * self.gamma()
    }

    pub fn gamma_dephase(&self) -> f64 {
        (1.0 - self.alpha) * self.gamma()
    }

    /// Physical duration of one trajectory time unit: `1/γ`, or `1/Ω` in the
    /// coherent limit `γ′ = 0`.
    pub fn time_unit(&self) -> f64 {
        if self.gamma_prime > 0.0 {
            1.0 / self.gamma()
        } else {
            1.0 / self.omega
        }
    }

    /// Converts a rate in units of `Ω` into a rate per trajectory time unit.
    pub fn rate_scale(&self) -> f64 {
        self.omega * self.time_unit()
    }
}

/// The 4x4 generator acting on `(ρ₁₁, ρ₂₁, ρ₁₂, ρ₂₂)`.
pub fn superoperator_matrix(params: &ModelParams) -> [[Complex64; 4]; 4] {
    let g = params.gamma();
    let a = params.alpha;
    let h = Complex64::new(0.0, 0.5 * params.omega);
    let re = |v: f64| Complex64::new(v, 0.0);
    let z = re(0.0);
    [
        [re(-2.0 * a * g), -h, h, z],
        [-h, re(-g), z, h],
        [h, z, re(-g), -h],
        [re(2.0 * a * g), h, -h, z],
    ]
}

/// Affine drift of the Bloch vector.
///
/// The y-z plane obeys `ṙ₂ = A r₂ + b` and `x` decouples with `ẋ = λ_x x`.
/// All entries are physical rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochDrift {
    pub a: [[f64; 2]; 2],
    pub b: [f64; 2],
    pub lambda_x: f64,
}

impl BlochDrift {
    /// `(ẋ, ẏ, ż)` at `r`.
    pub fn velocity(&self, r: [f64; 3]) -> [f64; 3] {
        let [_, y, z] = r;
        [
            self.lambda_x * r[0],
            self.a[0][0] * y + self.a[0][1] * z + self.b[0],
            self.a[1][0] * y + self.a[1][1] * z + self.b[1],
        ]
    }
}

pub fn bloch_drift(params: &ModelParams) -> BlochDrift {
    let g = params.gamma();
    let w = params.omega;
    let decay = 2.0 * params.alpha * g;
    BlochDrift { a: [[-g, -w], [w, -decay]], b: [0.0, -decay], lambda_x: -g }
}

/// A fixed point of the drift together with its polar description in the y-z
/// plane: `y = p cos θ`, `z = p sin θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub bloch: BlochState,
    pub p: f64,
    pub theta: f64,
    /// Set for `γ′ = 0` or `α = 0`, where the center of the ball is returned as
    /// the limiting point.
    pub degenerate: bool,
}

/// Steady state at coupling `γ′` and decay fraction `α`.
///
/// Uses `y* = 1/(γ′ + 1/(2αγ′))` and `z* = −1/(1 + 1/(2αγ′²))`, which stay
/// finite at both ends of the locus.
pub fn steady_state_at(gamma_prime: f64, alpha: f64) -> SteadyState {
    if gamma_prime == 0.0 || alpha == 0.0 {
        return SteadyState { bloch: BlochState::CENTER, p: 0.0, theta: 0.0, degenerate: true };
    }
    let s = 2.0 * alpha * gamma_prime;
    let y = 1.0 / (gamma_prime + 1.0 / s);
    let z = -1.0 / (1.0 + 1.0 / (s * gamma_prime));
    let p = s * math::sqrt(1.0 + gamma_prime * gamma_prime) / (1.0 + s * gamma_prime);
    let theta = -math::atan(gamma_prime);
    // |r*| ≤ 1 holds analytically on the whole locus.
    let bloch = BlochState::new(0.0, y, z).expect("steady state lies in the Bloch ball");
    SteadyState { bloch, p, theta, degenerate: false }
}

pub fn steady_state(params: &ModelParams) -> SteadyState {
    steady_state_at(params.gamma_prime, params.alpha)
}

/// Left-hand side of `(√(2/α) y)² + (2z + 1)² = 1`.
pub fn ellipse_lhs(state: &BlochState, alpha: f64) -> f64 {
    let u = state.y() * state.y() * 2.0 / alpha;
    let v = 2.0 * state.z() + 1.0;
    u + v * v
}

/// Steady states along a grid of couplings, in grid order.
pub fn locus_sample(alpha: f64, gamma_grid: &[f64]) -> Result<Vec<SteadyState>> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter("alpha must lie in [0, 1]"));
    }
    gamma_grid
        .iter()
        .map(|&g| {
            if !(g >= 0.0) {
                return Err(Error::InvalidParameter("locus grid values must be non-negative"));
            }
            Ok(steady_state_at(g, alpha))
        })
        .collect()
}

/// Norm of the Bloch velocity at `state`; zero exactly at a fixed point.
pub fn drift_residual(params: &ModelParams, state: &BlochState) -> f64 {
    let v = bloch_drift(params).velocity(state.to_array());
    math::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(g: f64, a: f64) -> ModelParams {
        ModelParams::dimensionless(g, a).unwrap()
    }

    #[test]
    fn coherent_generator_has_only_drive_entries() {
        let l = superoperator_matrix(&params(0.0, 0.3));
        for row in l.iter() {
            for e in row.iter() {
                assert_eq!(e.re, 0.0);
                assert!(e.im == 0.0 || (e.im.abs() - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn dissipative_diagonal_entries() {
        let l = superoperator_matrix(&params(1.0, 1.0));
        assert_eq!(l[0][0], Complex64::new(-2.0, 0.0));
        assert_eq!(l[1][1], Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn identity_is_not_stationary() {
        let l = superoperator_matrix(&params(1.0, 1.0));
        let v = [0.5, 0.0, 0.0, 0.5].map(|x| Complex64::new(x, 0.0));
        let out: [Complex64; 4] =
            core::array::from_fn(|i| (0..4).map(|j| l[i][j] * v[j]).sum::<Complex64>());
        // ρ̇₁₁ = −2αγ·½ = −1, ρ̇₂₂ = +1
        assert_eq!(out[0], Complex64::new(-1.0, 0.0));
        assert_eq!(out[3], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn trace_components_sum_to_zero_columnwise() {
        let l = superoperator_matrix(&params(2.3, 0.7));
        for (top, bottom) in l[0].iter().zip(&l[3]) {
            assert!((top + bottom).norm() < 1e-15);
        }
    }

    #[test]
    fn drift_matrices() {
        let d = bloch_drift(&params(1.0, 1.0));
        assert_eq!(d.a, [[-1.0, -1.0], [1.0, -2.0]]);
        assert_eq!(d.b, [0.0, -2.0]);
        assert_eq!(d.lambda_x, -1.0);
        let d = bloch_drift(&params(0.0, 1.0));
        assert_eq!(d.a, [[0.0, -1.0], [1.0, 0.0]]);
        assert_eq!(d.b, [0.0, 0.0]);
    }

    #[test]
    fn steady_state_reference_point() {
        let ss = steady_state(&params(1.0, 1.0));
        assert!((ss.bloch.y() - 2.0 / 3.0).abs() < 1e-15);
        assert!((ss.bloch.z() + 2.0 / 3.0).abs() < 1e-15);
        assert!((ss.p - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-15);
        assert!((ss.theta + core::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!(!ss.degenerate);
    }

    #[test]
    fn steady_state_solves_linear_system() {
        // Cramer's rule on A r + b = 0
        for &(g, a) in &[(0.3, 0.2), (1.0, 1.0), (15.0, 0.94), (200.0, 0.55)] {
            let d = bloch_drift(&params(g, a));
            let det = d.a[0][0] * d.a[1][1] - d.a[0][1] * d.a[1][0];
            let y = (-d.b[0] * d.a[1][1] + d.b[1] * d.a[0][1]) / det;
            let z = (-d.a[0][0] * d.b[1] + d.a[1][0] * d.b[0]) / det;
            let ss = steady_state(&params(g, a));
            assert!((ss.bloch.y() - y).abs() < 1e-12, "{g} {a}");
            assert!((ss.bloch.z() - z).abs() < 1e-12, "{g} {a}");
        }
    }

    #[test]
    fn large_coupling_approaches_south_pole() {
        let ss = steady_state_at(1e9, 1.0);
        assert!(ss.bloch.distance(&BlochState::DOWN) < 1e-8);
        let ss = steady_state_at(f64::INFINITY, 1.0);
        assert_eq!(ss.bloch.to_array(), [0.0, 0.0, -1.0]);
    }

    #[test]
    fn degenerate_limits_are_flagged() {
        let ss = steady_state(&params(0.0, 1.0));
        assert!(ss.degenerate);
        assert_eq!(ss.bloch, BlochState::CENTER);
        assert!(steady_state(&params(3.0, 0.0)).degenerate);
    }

    #[test]
    fn semiaxis_at_full_decay() {
        // max_γ′ y* is reached at 2αγ′² = 1
        let g_peak = (0.5f64).sqrt();
        let ss = steady_state_at(g_peak, 1.0);
        assert!((ss.bloch.y() - 0.5f64.sqrt()).abs() < 1e-15);
        let grid: Vec<f64> = (0..2001).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 2000.0)).collect();
        let ymax = locus_sample(1.0, &grid)
            .unwrap()
            .iter()
            .map(|s| s.bloch.y())
            .fold(0.0, f64::max);
        assert!(ymax <= 0.5f64.sqrt() + 1e-15);
        assert!(ymax > 0.5f64.sqrt() - 1e-4);
    }

    #[test]
    fn locus_examples() {
        let pts = locus_sample(1.0, &[0.1, 1.0, 10.0]).unwrap();
        assert_eq!(pts.len(), 3);
        assert!(pts[0].bloch.z() > pts[1].bloch.z() && pts[1].bloch.z() > pts[2].bloch.z());
        let pts = locus_sample(0.5, &[0.01, 0.2, 1.0, 5.0, 80.0]).unwrap();
        for s in pts {
            let lhs = (2.0 * s.bloch.y()).powi(2) + (2.0 * s.bloch.z() + 1.0).powi(2);
            assert!((lhs - 1.0).abs() < 1e-12);
        }
        assert!(locus_sample(1.0, &[-1.0]).is_err());
        assert!(locus_sample(1.0, &[]).unwrap().is_empty());
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0.0, 1.0, 0.5).is_err());
        assert!(ModelParams::new(1.0, -1.0, 0.5).is_err());
        assert!(ModelParams::new(1.0, 1.0, 1.5).is_err());
        assert!(ModelParams::new(1.0, f64::NAN, 0.5).is_err());
        let p = ModelParams::new(2.0, 3.0, 0.25).unwrap();
        assert_eq!(p.gamma(), 6.0);
        assert_eq!(p.gamma_decay(), 1.5);
        assert_eq!(p.gamma_dephase(), 4.5);
        assert_eq!(p.time_unit(), 1.0 / 6.0);
    }
}
