use alloc::vec::Vec;

use num_complex::Complex64;

use super::{validate_times, Engine, Trajectory};
use crate::error::{Error, Result};
use crate::math;
use crate::model::{steady_state, ModelParams};
use crate::spectral::spectrum;
use crate::state::BlochState;

/// Mode-sum solution `r(t) = r* + Σ cₙ vₙ e^{λₙ t}` for an arbitrary start.
///
/// Works with complex modes below the bifurcation; fails only on the Jordan
/// block, where [`super::evolve_ode`] must be used.
pub fn evolve_closed_form(r0: BlochState, params: &ModelParams, times: &[f64]) -> Result<Trajectory> {
    validate_times(times)?;
    let spec = spectrum(params)?;
    let target = steady_state(params).bloch;
    let scale = params.rate_scale();
    let [c_plus, c_minus] = spec.project([r0.y() - target.y(), r0.z() - target.z()]);

    let mut states = Vec::with_capacity(times.len());
    for &t in times {
        let e_plus = (spec.lambda_plus * (scale * t)).exp() * c_plus;
        let e_minus = (spec.lambda_minus * (scale * t)).exp() * c_minus;
        let dy: Complex64 = e_plus * spec.v_plus[0] + e_minus * spec.v_minus[0];
        let dz: Complex64 = e_plus * spec.v_plus[1] + e_minus * spec.v_minus[1];
        let magnitude = math::hypot(dy.re, dz.re).max(1.0);
        let residue = math::abs(dy.im).max(math::abs(dz.im));
        if residue > 1e-10 * magnitude {
            return Err(Error::ImaginaryResidue { residue });
        }
        let x = r0.x() * math::exp(spec.lambda_x * scale * t);
        states.push(BlochState::new(x, target.y() + dy.re, target.z() + dz.re)?);
    }
    Trajectory::new(times.to_vec(), states, Engine::ClosedForm, *params)
}
