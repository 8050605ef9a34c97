//! Relaxation modes of the y-z dynamics and strong-Mpemba detection.
//!
//! With `β = α − ½` and `γ′` the final coupling, the y-z generator (in units of
//! `Ω`) has eigenvalues `λ± = −γ′(α + ½) ∓ √(γ′²β² − 1)`, right eigenvectors
//! `v = (λ + 2αγ′, 1)` and left eigenvectors `u = (1, λ + γ′)`. `λ₊` is the fast
//! mode. The modes are real and distinct once `γ′` exceeds the bifurcation
//! point `1/|β|`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;
use crate::model::{steady_state_at, ModelParams};

/// `|discriminant|` below this is treated as a Jordan block.
pub const DEGENERACY_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralData {
    pub gamma_prime: f64,
    pub alpha: f64,
    /// Fast y-z rate, units of `Ω`.
    pub lambda_plus: Complex64,
    /// Slow y-z rate, units of `Ω`.
    pub lambda_minus: Complex64,
    /// Decay rate of `x`, units of `Ω`.
    pub lambda_x: f64,
    pub v_plus: [Complex64; 2],
    pub v_minus: [Complex64; 2],
    pub u_plus: [Complex64; 2],
    pub u_minus: [Complex64; 2],
    /// `(α − ½)² − 1/γ′²`
    pub discriminant: f64,
}

fn dot(u: &[Complex64; 2], v: &[Complex64; 2]) -> Complex64 {
    u[0] * v[0] + u[1] * v[1]
}

impl SpectralData {
    /// True above the bifurcation point, where both rates are real.
    pub fn modes_are_real(&self) -> bool {
        self.discriminant > 0.0
    }

    /// The y-z generator in units of `Ω`.
    pub fn generator(&self) -> [[f64; 2]; 2] {
        let g = self.gamma_prime;
        [[-g, -1.0], [1.0, -2.0 * self.alpha * g]]
    }

    /// Biorthogonal coefficients `(c₊, c₋)` with `d = c₊v₊ + c₋v₋`.
    pub fn project(&self, d: [f64; 2]) -> [Complex64; 2] {
        let d = [Complex64::new(d[0], 0.0), Complex64::new(d[1], 0.0)];
        [
            dot(&self.u_plus, &d) / dot(&self.u_plus, &self.v_plus),
            dot(&self.u_minus, &d) / dot(&self.u_minus, &self.v_minus),
        ]
    }
}

/// Closed-form spectrum at the params' coupling.
pub fn spectrum(params: &ModelParams) -> Result<SpectralData> {
    spectrum_at(params.gamma_prime(), params.alpha())
}

pub fn spectrum_at(gamma_prime: f64, alpha: f64) -> Result<SpectralData> {
    ModelParams::dimensionless(gamma_prime, alpha)?;
    let beta = alpha - 0.5;
    let discriminant = beta * beta - 1.0 / (gamma_prime * gamma_prime);
    if math::abs(discriminant) < DEGENERACY_THRESHOLD {
        return Err(Error::DegenerateSpectrum { discriminant });
    }
    // γ′√D, finite also at γ′ = 0
    let q = gamma_prime * gamma_prime * beta * beta - 1.0;
    let root = if q >= 0.0 {
        Complex64::new(math::sqrt(q), 0.0)
    } else {
        Complex64::new(0.0, math::sqrt(-q))
    };
    let centre = Complex64::new(-gamma_prime * (alpha + 0.5), 0.0);
    let lambda_plus = centre - root;
    let lambda_minus = centre + root;
    let one = Complex64::new(1.0, 0.0);
    let right = |l: Complex64| [l + 2.0 * alpha * gamma_prime, one];
    let left = |l: Complex64| [one, l + gamma_prime];
    Ok(SpectralData {
        gamma_prime,
        alpha,
        lambda_plus,
        lambda_minus,
        lambda_x: -gamma_prime,
        v_plus: right(lambda_plus),
        v_minus: right(lambda_minus),
        u_plus: left(lambda_plus),
        u_minus: left(lambda_minus),
        discriminant,
    })
}

/// Location of the bifurcation point `γ_b′ = 1/|α − ½|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bifurcation {
    At(f64),
    /// `α = ½`: the rates never split.
    Never,
}

impl Bifurcation {
    pub fn value(&self) -> Option<f64> {
        match self {
            Bifurcation::At(g) => Some(*g),
            Bifurcation::Never => None,
        }
    }
}

pub fn bifurcation_point(alpha: f64) -> Bifurcation {
    let beta = math::abs(alpha - 0.5);
    if beta == 0.0 {
        Bifurcation::Never
    } else {
        Bifurcation::At(1.0 / beta)
    }
}

/// Real mode coefficients of the displacement `r*(γᵢ) − r*(γ_f)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoefficients {
    pub plus: f64,
    pub minus: f64,
}

fn real_spectrum(gamma_f_prime: f64, alpha: f64) -> Result<SpectralData> {
    let spec = spectrum_at(gamma_f_prime, alpha)?;
    if !spec.modes_are_real() {
        let gamma_b_prime = bifurcation_point(alpha).value().unwrap_or(f64::INFINITY);
        return Err(Error::BelowBifurcation { gamma_f_prime, gamma_b_prime });
    }
    Ok(spec)
}

fn displacement(gamma_i_prime: f64, gamma_f_prime: f64, alpha: f64) -> [f64; 2] {
    let ri = steady_state_at(gamma_i_prime, alpha).bloch;
    let rf = steady_state_at(gamma_f_prime, alpha).bloch;
    [ri.y() - rf.y(), ri.z() - rf.z()]
}

fn check_initial(gamma_i_prime: f64) -> Result<()> {
    if !(gamma_i_prime >= 0.0 && gamma_i_prime.is_finite()) {
        return Err(Error::InvalidParameter("gamma_i' must be non-negative and finite"));
    }
    Ok(())
}

/// `aₙ = uₙ·(r*(γᵢ) − r*(γ_f)) / (uₙ·vₙ)`; requires real, distinct modes.
pub fn mode_coefficients(gamma_i_prime: f64, gamma_f_prime: f64, alpha: f64) -> Result<ModeCoefficients> {
    check_initial(gamma_i_prime)?;
    let spec = real_spectrum(gamma_f_prime, alpha)?;
    let [plus, minus] = spec.project(displacement(gamma_i_prime, gamma_f_prime, alpha));
    Ok(ModeCoefficients { plus: plus.re, minus: minus.re })
}

/// `∂a₋/∂γᵢ′`, from the analytic derivative of the steady state.
fn a_minus_derivative(spec: &SpectralData, gamma_i_prime: f64) -> f64 {
    let a = spec.alpha;
    let g = gamma_i_prime;
    let den = 2.0 * a * g * g + 1.0;
    let dy = 2.0 * a * (1.0 - 2.0 * a * g * g) / (den * den);
    let dz = -4.0 * a * g / (den * den);
    spec.project([dy, dz])[1].re
}

/// Closed form of `(a₊, a₋)` in an unnormalized convention.
///
/// Differs from [`mode_coefficients`] by a per-mode factor that depends on
/// `(γ_f′, α)` only, so the zero set in `γᵢ′` is the same. Requires `γᵢ′ > 0`.
pub fn unnormalized_mode_coefficients(gamma_i_prime: f64, gamma_f_prime: f64, alpha: f64) -> Result<ModeCoefficients> {
    if !(gamma_i_prime > 0.0 && gamma_i_prime.is_finite()) {
        return Err(Error::InvalidParameter("gamma_i' must be positive for the unnormalized closed form"));
    }
    let spec = real_spectrum(gamma_f_prime, alpha)?;
    let (gi, gf, a) = (gamma_i_prime, gamma_f_prime, alpha);
    let s = math::sqrt(spec.discriminant);
    let inv_gf2 = 1.0 / (gf * gf);
    let prefactor = a * (a - 0.5) / (s * (2.0 * a + inv_gf2) * (2.0 * a + 1.0 / (gi * gi))) * (gf / gi - 1.0);
    let cross = 2.0 / (gi * gf);
    let plus = 4.0 * a * (-a + 0.5 + s) - cross * (-a - 0.5 + s) + 2.0 * inv_gf2;
    let minus = 4.0 * a * (a - 0.5 + s) - cross * (a + 0.5 + s) - 2.0 * inv_gf2;
    Ok(ModeCoefficients { plus: prefactor * plus, minus: prefactor * minus })
}

/// Ratio unnormalized/projected for each mode at `(γᵢ′, γ_f′, α)`.
pub fn unnormalized_to_projection_ratio(gamma_i_prime: f64, gamma_f_prime: f64, alpha: f64) -> Result<(f64, f64)> {
    let unnorm = unnormalized_mode_coefficients(gamma_i_prime, gamma_f_prime, alpha)?;
    let proj = mode_coefficients(gamma_i_prime, gamma_f_prime, alpha)?;
    Ok((unnorm.plus / proj.plus, unnorm.minus / proj.minus))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpembaClassification {
    pub gamma_b_prime: Bifurcation,
    /// `α > ½ + 1/γ_f′`
    pub strong_possible: bool,
    /// Initial coupling at which `a₋` vanishes, when strong relaxation exists.
    pub gamma_i_sme_prime: Option<f64>,
}

/// Closed-form `γᵢ,SME′ = γ_f′(β − √(β² − γ_f′⁻²))`, evaluated as
/// `1/(γ_f′(β + √(β² − γ_f′⁻²)))` to avoid cancellation.
pub fn strong_mpemba_closed_form(gamma_f_prime: f64, alpha: f64) -> Option<f64> {
    let beta = alpha - 0.5;
    let disc = beta * beta - 1.0 / (gamma_f_prime * gamma_f_prime);
    if !(gamma_f_prime > 0.0) || !(alpha > 0.5 + 1.0 / gamma_f_prime) || disc < 0.0 {
        return None;
    }
    Some(1.0 / (gamma_f_prime * (beta + math::sqrt(disc))))
}

pub fn classify_mpemba(gamma_f_prime: f64, alpha: f64) -> Result<MpembaClassification> {
    ModelParams::dimensionless(gamma_f_prime, alpha)?;
    let gamma_b_prime = bifurcation_point(alpha);
    let gamma_i_sme_prime = strong_mpemba_closed_form(gamma_f_prime, alpha).map(|g0| {
        // one Newton step on a₋
        match real_spectrum(gamma_f_prime, alpha) {
            Ok(spec) => {
                let a = spec.project(displacement(g0, gamma_f_prime, alpha))[1].re;
                let slope = a_minus_derivative(&spec, g0);
                if slope != 0.0 && slope.is_finite() {
                    let g1 = g0 - a / slope;
                    if g1 > 0.0 { g1 } else { g0 }
                } else {
                    g0
                }
            }
            Err(_) => g0,
        }
    });
    Ok(MpembaClassification {
        gamma_b_prime,
        strong_possible: gamma_i_sme_prime.is_some(),
        gamma_i_sme_prime,
    })
}

/// Outcome of the no-strong-direct-effect check at one `(α, γ_f′)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectCheck {
    pub alpha: f64,
    pub gamma_f_prime: f64,
    pub gamma_i_sme_prime: Option<f64>,
    /// First sign change of `a₋` found for `γᵢ′ > γ_f′`, if any.
    pub cooling_zero: Option<f64>,
    /// Point lies outside `α ∈ (½, 1]`, `γ_f′ > γ_b′`, and was not checked.
    pub outside_domain: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DirectReport {
    pub points: Vec<DirectCheck>,
}

impl DirectReport {
    pub fn all_pass(&self) -> bool {
        self.points.iter().all(|p| p.pass)
    }

    pub fn checked(&self) -> usize {
        self.points.iter().filter(|p| !p.outside_domain).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &DirectCheck> {
        self.points.iter().filter(|p| !p.pass)
    }
}

/// Samples used by the sign scan over `γᵢ′ ∈ (γ_f′, 10³γ_f′]`.
pub const COOLING_SCAN_SAMPLES: usize = 4000;

/// Checks a single `(α, γ_f′)` point; see [`verify_no_direct_strong_me`].
pub fn check_direct_point(alpha: f64, gamma_f_prime: f64) -> Result<DirectCheck> {
    let mut check = DirectCheck {
        alpha,
        gamma_f_prime,
        gamma_i_sme_prime: None,
        cooling_zero: None,
        outside_domain: false,
        pass: true,
    };
    let in_domain = alpha > 0.5
        && alpha <= 1.0
        && bifurcation_point(alpha).value().is_some_and(|gb| gamma_f_prime > gb);
    if !in_domain {
        check.outside_domain = true;
        return Ok(check);
    }
    let class = classify_mpemba(gamma_f_prime, alpha)?;
    check.gamma_i_sme_prime = class.gamma_i_sme_prime;
    let below = class.gamma_i_sme_prime.is_none_or(|g| g < gamma_f_prime);

    let spec = match real_spectrum(gamma_f_prime, alpha) {
        Ok(s) => s,
        // too close to the bifurcation to resolve; only the closed-form check applies
        Err(Error::DegenerateSpectrum { .. }) => {
            check.pass = below;
            return Ok(check);
        }
        Err(e) => return Err(e),
    };
    let lo = math::ln(gamma_f_prime) + 1e-6;
    let hi = math::ln(gamma_f_prime * 1e3);
    let n = COOLING_SCAN_SAMPLES;
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..n {
        let g = math::exp(lo + (hi - lo) * k as f64 / (n - 1) as f64);
        let a = spec.project(displacement(g, gamma_f_prime, alpha))[1].re;
        if a == 0.0 {
            check.cooling_zero = Some(g);
            break;
        }
        if let Some((gp, ap)) = prev {
            if (ap < 0.0) != (a < 0.0) {
                check.cooling_zero = Some(0.5 * (gp + g));
                break;
            }
        }
        prev = Some((g, a));
    }
    check.pass = below && check.cooling_zero.is_none();
    Ok(check)
}

/// Asserts, over the Cartesian grid, that `γᵢ,SME′ < γ_f′` and that `a₋` has no
/// zero in the cooling direction.
pub fn verify_no_direct_strong_me(alpha_grid: &[f64], gamma_f_grid: &[f64]) -> Result<DirectReport> {
    let mut points = Vec::with_capacity(alpha_grid.len() * gamma_f_grid.len());
    for &alpha in alpha_grid {
        for &gf in gamma_f_grid {
            points.push(check_direct_point(alpha, gf)?);
        }
    }
    Ok(DirectReport { points })
}
