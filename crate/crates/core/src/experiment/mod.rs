//! Emulation of the measurement protocols: steady-state preparation from two
//! pure states, shot-noise tomography, and polynomial smoothing of the
//! measured series.

mod ensemble;
mod smoothing;
mod tomography;

pub use ensemble::{decompose_steady_state, evolve_prepared, PreparedEnsemble};
pub use smoothing::polynomial_smooth;
pub use tomography::{measure_axis, simulate_tomography, TomographyRecord, DEFAULT_SHOTS};
