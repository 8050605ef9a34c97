//! Mpemba observables: distance to the final steady state, crossing of a cold
//! and a hot relaxation curve, scans of the slow-mode coefficient, and the
//! approach direction near equilibrium.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::evolution::{evolve_closed_form, Engine, Trajectory};
use crate::grid::lin_space;
use crate::math;
use crate::model::{steady_state, steady_state_at, ModelParams};
use crate::spectral::{bifurcation_point, mode_coefficients, spectrum};
use crate::state::BlochState;

/// Euclidean distance to the steady state of the trajectory's own params.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSeries {
    pub times: Vec<f64>,
    pub d_ss: Vec<f64>,
    pub gamma_i_prime: Option<f64>,
    pub engine: Engine,
}

pub fn distance_series(traj: &Trajectory) -> DistanceSeries {
    let target = steady_state(traj.params()).bloch;
    DistanceSeries {
        times: traj.times().to_vec(),
        d_ss: traj.states().iter().map(|s| s.distance(&target)).collect(),
        gamma_i_prime: None,
        engine: traj.engine(),
    }
}

impl DistanceSeries {
    pub fn with_label(mut self, gamma_i_prime: f64) -> Self {
        self.gamma_i_prime = Some(gamma_i_prime);
        self
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        self.times.iter().copied().zip(self.d_ss.iter().copied()).collect()
    }

    /// Least-squares slope of `ln d_ss` over samples with `t ∈ [t_lo, t_hi]`.
    pub fn log_slope(&self, t_lo: f64, t_hi: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .points()
            .into_iter()
            .filter(|(t, d)| *t >= t_lo && *t <= t_hi && *d > 0.0)
            .map(|(t, d)| (t, math::ln(d)))
            .collect();
        linear_slope(&pts)
    }

    pub fn is_monotone_decreasing(&self) -> bool {
        self.d_ss.windows(2).all(|w| w[1] <= w[0])
    }
}

/// Least-squares slope of `y` against `x`; `None` with fewer than two points.
pub fn linear_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// First sign change of `Δ(t) = d^C(t) − d^H(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingReport {
    pub t_cross: Option<f64>,
    /// Sign of `Δ` before the crossing (`0` when `Δ` vanishes everywhere).
    pub sign_before: i8,
    pub sign_after: i8,
    pub delta_initial: f64,
    /// Largest reversed gap after the crossing, `max (d^H − d^C)` for a
    /// cold curve that starts farther away.
    pub d_max_post: Option<f64>,
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Locates the first crossing by linear interpolation between samples.
pub fn find_crossing(cold: &DistanceSeries, hot: &DistanceSeries) -> Result<CrossingReport> {
    if cold.times != hot.times {
        return Err(Error::TimeGridMismatch);
    }
    let delta: Vec<f64> = cold.d_ss.iter().zip(&hot.d_ss).map(|(c, h)| c - h).collect();
    Ok(crossing_from_delta(&cold.times, &delta))
}

fn crossing_from_delta(times: &[f64], delta: &[f64]) -> CrossingReport {
    let delta_initial = delta.first().copied().unwrap_or(0.0);
    let none = |sign_before| CrossingReport {
        t_cross: None,
        sign_before,
        sign_after: sign_before,
        delta_initial,
        d_max_post: None,
    };
    let Some(start) = delta.iter().position(|d| *d != 0.0) else {
        return none(0);
    };
    let before = sign(delta[start]);
    let Some(k) = (start + 1..delta.len()).find(|&k| sign(delta[k]) != before) else {
        return none(before);
    };
    let t_cross = if delta[k] == 0.0 {
        times[k]
    } else {
        let (t0, t1, d0, d1) = (times[k - 1], times[k], delta[k - 1], delta[k]);
        t0 - d0 * (t1 - t0) / (d1 - d0)
    };
    let after = delta[k..].iter().map(|d| sign(*d)).find(|s| *s != 0).unwrap_or(0);
    let d_max_post = delta[k..]
        .iter()
        .map(|d| -(before as f64) * d)
        .fold(f64::NEG_INFINITY, f64::max);
    CrossingReport {
        t_cross: Some(t_cross),
        sign_before: before,
        sign_after: after,
        delta_initial,
        d_max_post: Some(d_max_post),
    }
}

/// Crossing of two steady-state-initialized closed-form relaxations, with the
/// crossing time refined by bisection on the exact solution.
pub fn closed_form_crossing(
    gamma_i_cold: f64,
    gamma_i_hot: f64,
    params: &ModelParams,
    times: &[f64],
) -> Result<CrossingReport> {
    let cold = distance_series(&evolve_closed_form(steady_state_at(gamma_i_cold, params.alpha()).bloch, params, times)?);
    let hot = distance_series(&evolve_closed_form(steady_state_at(gamma_i_hot, params.alpha()).bloch, params, times)?);
    let mut report = find_crossing(&cold, &hot)?;
    if let Some(t_lin) = report.t_cross {
        let k = times.partition_point(|t| *t < t_lin);
        if k > 0 && k < times.len() {
            let delta_at = |t: f64| -> Result<f64> {
                let c = distance_series(&evolve_closed_form(
                    steady_state_at(gamma_i_cold, params.alpha()).bloch,
                    params,
                    &[t],
                )?);
                let h = distance_series(&evolve_closed_form(
                    steady_state_at(gamma_i_hot, params.alpha()).bloch,
                    params,
                    &[t],
                )?);
                Ok(c.d_ss[0] - h.d_ss[0])
            };
            let (mut lo, mut hi) = (times[k - 1], times[k]);
            let s_lo = sign(delta_at(lo)?);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if sign(delta_at(mid)?) == s_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            report.t_cross = Some(0.5 * (lo + hi));
        }
    }
    Ok(report)
}

/// A sign change of `a₋` between two neighbouring grid points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroCrossing {
    pub lo: f64,
    pub hi: f64,
    /// Linear interpolation between `lo` and `hi` (exact when `lo == hi`).
    pub estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AMinusScan {
    pub gamma_f_prime: f64,
    pub alpha: f64,
    /// `(γᵢ′, a₋)` in grid order.
    pub points: Vec<(f64, f64)>,
    pub zeros: Vec<ZeroCrossing>,
}

impl AMinusScan {
    /// Zeros refined by bisection on `a₋`.
    pub fn polished_zeros(&self) -> Result<Vec<f64>> {
        self.zeros
            .iter()
            .map(|z| polish_a_minus_zero(z.lo, z.hi, self.gamma_f_prime, self.alpha))
            .collect()
    }
}

pub fn polish_a_minus_zero(lo: f64, hi: f64, gamma_f_prime: f64, alpha: f64) -> Result<f64> {
    let a = |g: f64| mode_coefficients(g, gamma_f_prime, alpha).map(|c| c.minus);
    let (mut lo, mut hi) = (lo, hi);
    let mut f_lo = a(lo)?;
    if f_lo == 0.0 || lo == hi {
        return Ok(lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = a(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn a_minus_scan(gamma_f_prime: f64, alpha: f64, gamma_i_grid: &[f64]) -> Result<AMinusScan> {
    let points = gamma_i_grid
        .iter()
        .map(|&g| mode_coefficients(g, gamma_f_prime, alpha).map(|c| (g, c.minus)))
        .collect::<Result<Vec<_>>>()?;
    let mut zeros = Vec::new();
    for (k, &(g, a)) in points.iter().enumerate() {
        if a == 0.0 {
            zeros.push(ZeroCrossing { lo: g, hi: g, estimate: g });
        } else if k > 0 {
            let (gp, ap) = points[k - 1];
            if ap != 0.0 && (ap < 0.0) != (a < 0.0) {
                let estimate = gp - ap * (g - gp) / (a - ap);
                zeros.push(ZeroCrossing { lo: gp, hi: g, estimate });
            }
        }
    }
    Ok(AMinusScan { gamma_f_prime, alpha, points, zeros })
}

/// Time grid used by [`sme_optimality_scan`]: `t ∈ [0, 10]/γ_f`.
pub fn default_scan_times() -> Vec<f64> {
    lin_space(0.0, 10.0, 4001)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmePoint {
    pub gamma_i_prime: f64,
    pub t_cross: Option<f64>,
    pub d_max_post: Option<f64>,
    pub delta_initial: f64,
}

fn check_split(gamma_f_prime: f64, alpha: f64) -> Result<()> {
    match bifurcation_point(alpha).value() {
        Some(gb) if gamma_f_prime > gb => Ok(()),
        gb => Err(Error::BelowBifurcation {
            gamma_f_prime,
            gamma_b_prime: gb.unwrap_or(f64::INFINITY),
        }),
    }
}

/// Crossing of the cold curve at `γᵢ′` against the hot curve at `γᵢ,h′`.
pub fn sme_optimality_point(
    gamma_f_prime: f64,
    alpha: f64,
    gamma_i_h_prime: f64,
    gamma_i_prime: f64,
    times: &[f64],
) -> Result<SmePoint> {
    check_split(gamma_f_prime, alpha)?;
    if !(gamma_i_prime > 0.0 && gamma_i_prime < gamma_i_h_prime) {
        return Err(Error::InvalidParameter("scan points must lie in (0, gamma_i_h')"));
    }
    let params = ModelParams::dimensionless(gamma_f_prime, alpha)?;
    let report = closed_form_crossing(gamma_i_prime, gamma_i_h_prime, &params, times)?;
    Ok(SmePoint {
        gamma_i_prime,
        t_cross: report.t_cross,
        d_max_post: report.d_max_post,
        delta_initial: report.delta_initial,
    })
}

pub fn sme_optimality_scan(
    gamma_f_prime: f64,
    alpha: f64,
    gamma_i_h_prime: f64,
    gamma_i_grid: &[f64],
) -> Result<Vec<SmePoint>> {
    let times = default_scan_times();
    gamma_i_grid
        .iter()
        .map(|&g| sme_optimality_point(gamma_f_prime, alpha, gamma_i_h_prime, g, &times))
        .collect()
}

/// Side of `v₋` from which a trajectory approaches the final steady state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approach {
    Positive,
    Negative,
    /// Slow-mode component below `1e-13`: pure fast relaxation.
    Indeterminate,
}

impl Approach {
    pub fn as_i8(&self) -> i8 {
        match self {
            Approach::Positive => 1,
            Approach::Negative => -1,
            Approach::Indeterminate => 0,
        }
    }
}

/// Sign of the `v₋` component of `r(t_late) − r*` for each initial coupling.
pub fn approach_direction(
    gamma_i_list: &[f64],
    gamma_f_prime: f64,
    alpha: f64,
    t_late: f64,
) -> Result<Vec<(f64, Approach)>> {
    check_split(gamma_f_prime, alpha)?;
    let params = ModelParams::dimensionless(gamma_f_prime, alpha)?;
    let spec = spectrum(&params)?;
    let slow = math::abs(spec.lambda_minus.re) * params.rate_scale();
    if !(t_late >= 3.0 / slow) {
        return Err(Error::InvalidParameter("t_late must be at least 3/|lambda_-|"));
    }
    let target = steady_state(&params).bloch;
    gamma_i_list
        .iter()
        .map(|&g| {
            let r0: BlochState = steady_state_at(g, alpha).bloch;
            let traj = evolve_closed_form(r0, &params, &[t_late])?;
            let r = traj.states()[0];
            let c = spec.project([r.y() - target.y(), r.z() - target.z()])[1];
            let component = c * spec.v_minus[0].norm().max(1.0);
            let dir = if component.norm() < 1e-13 {
                Approach::Indeterminate
            } else if c.re > 0.0 {
                Approach::Positive
            } else {
                Approach::Negative
            };
            Ok((g, dir))
        })
        .collect()
}
