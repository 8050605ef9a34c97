use core::fmt;

/// Errors produced by the model, spectral and evolution routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Bloch vector longer than one (beyond the numerical slack).
    Unphysical { norm: f64 },
    NotHermitian { deviation: f64 },
    TraceNotOne { trace: f64 },
    NotPositive { min_eigenvalue: f64 },
    /// A parameter failed validation; the message names it.
    InvalidParameter(&'static str),
    /// The y-z generator is a Jordan block; closed-form modes do not exist.
    DegenerateSpectrum { discriminant: f64 },
    /// Relaxation modes are a complex pair, so the real mode coefficients are undefined.
    BelowBifurcation { gamma_f_prime: f64, gamma_b_prime: f64 },
    /// Adaptive integrator could not make progress.
    StepSizeUnderflow { time: f64, step: f64 },
    /// Imaginary part left over after recombining complex modes.
    ImaginaryResidue { residue: f64 },
    TimeGridMismatch,
}

impl Error {
    /// True for input-validation failures, false for numerical ones.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Unphysical { .. }
                | Error::NotHermitian { .. }
                | Error::TraceNotOne { .. }
                | Error::NotPositive { .. }
                | Error::InvalidParameter(_)
                | Error::TimeGridMismatch
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Unphysical { norm } => write!(f, "unphysical Bloch vector with |r| = {norm}"),
            Error::NotHermitian { deviation } => {
                write!(f, "density matrix is not Hermitian (deviation {deviation:e})")
            }
            Error::TraceNotOne { trace } => write!(f, "density matrix trace is {trace}, expected 1"),
            Error::NotPositive { min_eigenvalue } => {
                write!(f, "density matrix has negative eigenvalue {min_eigenvalue:e}")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::DegenerateSpectrum { discriminant } => write!(
                f,
                "degenerate relaxation spectrum (discriminant {discriminant:e}); use the ODE engine"
            ),
            Error::BelowBifurcation { gamma_f_prime, gamma_b_prime } => write!(
                f,
                "gamma_f' = {gamma_f_prime} is below the bifurcation point {gamma_b_prime}; \
                 modes are complex, use the complex-mode evolution"
            ),
            Error::StepSizeUnderflow { time, step } => {
                write!(f, "ODE step size underflow at t = {time} (h = {step:e})")
            }
            Error::ImaginaryResidue { residue } => {
                write!(f, "closed-form solution left imaginary residue {residue:e}")
            }
            Error::TimeGridMismatch => write!(f, "time grids are not identical"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
