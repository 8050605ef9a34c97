//! Adaptive Dormand–Prince 5(4) integration of the Bloch equations.

use alloc::vec::Vec;

use super::{validate_times, Engine, Trajectory};
use crate::error::{Error, Result};
use crate::math;
use crate::model::{bloch_drift, ModelParams};
use crate::state::BlochState;

/// Absolute and relative local tolerance used when callers have no preference.
pub const DEFAULT_ODE_TOLERANCE: f64 = 1e-10;

const MAX_STEPS: usize = 10_000_000;

// Butcher tableau; the system is autonomous so the nodes are not needed.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// 5th minus embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type Vec3 = [f64; 3];

fn axpy(y: &Vec3, terms: &[(f64, &Vec3)]) -> Vec3 {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..3 {
            out[i] += c * k[i];
        }
    }
    out
}

struct DormandPrince<F> {
    rhs: F,
    tol: f64,
}

impl<F: Fn(&Vec3) -> Vec3> DormandPrince<F> {
    /// One trial step; returns the 5th order solution, its derivative (FSAL)
    /// and the scaled error norm.
    fn trial(&self, y: &Vec3, k1: &Vec3, h: f64) -> (Vec3, Vec3, f64) {
        let f = &self.rhs;
        let k2 = f(&axpy(y, &[(h * A21, k1)]));
        let k3 = f(&axpy(y, &[(h * A31, k1), (h * A32, &k2)]));
        let k4 = f(&axpy(y, &[(h * A41, k1), (h * A42, &k2), (h * A43, &k3)]));
        let k5 = f(&axpy(y, &[(h * A51, k1), (h * A52, &k2), (h * A53, &k3), (h * A54, &k4)]));
        let k6 = f(&axpy(y, &[(h * A61, k1), (h * A62, &k2), (h * A63, &k3), (h * A64, &k4), (h * A65, &k5)]));
        let y_new = axpy(y, &[(h * B1, k1), (h * B3, &k3), (h * B4, &k4), (h * B5, &k5), (h * B6, &k6)]);
        let k7 = f(&y_new);
        let mut err: f64 = 0.0;
        for i in 0..3 {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = self.tol + self.tol * math::abs(y[i]).max(math::abs(y_new[i]));
            err = err.max(math::abs(e) / scale);
        }
        (y_new, k7, err)
    }

    fn integrate(&self, y0: Vec3, t_out: &[f64]) -> Result<Vec<Vec3>> {
        let f = &self.rhs;
        let mut out = Vec::with_capacity(t_out.len());
        let (mut t, mut y) = (0.0, y0);
        let mut k1 = f(&y);
        let span = t_out.last().copied().unwrap_or(0.0);
        let speed = k1.iter().map(|v| math::abs(*v)).fold(0.0, f64::max).max(1.0);
        let mut h = (1e-3 / speed).min(span.max(1e-3));
        let mut steps = 0usize;

        for &target in t_out {
            while t < target {
                steps += 1;
                if steps > MAX_STEPS {
                    return Err(Error::StepSizeUnderflow { time: t, step: h });
                }
                let remaining = target - t;
                let last = h >= remaining;
                let step = if last { remaining } else { h };
                let (y_new, k_new, err) = self.trial(&y, &k1, step);
                if !err.is_finite() {
                    return Err(Error::StepSizeUnderflow { time: t, step });
                }
                if err <= 1.0 {
                    t = if last { target } else { t + step };
                    y = y_new;
                    k1 = k_new;
                }
                let factor = if err == 0.0 { 5.0 } else { (0.9 * libm::pow(err, -0.2)).clamp(0.2, 5.0) };
                let proposed = step * factor;
                // keep the regular step size when the grid point truncated it
                h = if last && err <= 1.0 { h.max(proposed) } else { proposed };
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::StepSizeUnderflow { time: t, step: h });
                }
            }
            out.push(y);
        }
        Ok(out)
    }
}

/// Integrates the three Bloch equations from `t = 0` and samples at `times`.
///
/// `tol` is used as both the absolute and the relative local tolerance.
pub fn evolve_ode(r0: BlochState, params: &ModelParams, times: &[f64], tol: f64) -> Result<Trajectory> {
    validate_times(times)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter("ODE tolerance must be positive"));
    }
    let drift = bloch_drift(params);
    let unit = params.time_unit();
    let solver = DormandPrince {
        rhs: |r: &Vec3| {
            let v = drift.velocity(*r);
            [v[0] * unit, v[1] * unit, v[2] * unit]
        },
        tol,
    };
    let samples = solver.integrate(r0.to_array(), times)?;
    let states = samples
        .into_iter()
        .map(BlochState::from_array)
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(times.to_vec(), states, Engine::Ode, *params)
}
