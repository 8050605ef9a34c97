use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Sliding-window least-squares polynomial smoothing.
///
/// Each sample is replaced by the value at its own abscissa of a degree-
/// `degree` polynomial fitted to the `window` samples centred on it. Near the
/// ends the window is truncated, and the degree drops when fewer than
/// `degree + 1` samples remain. Polynomials of degree `≤ degree` are
/// reproduced exactly.
pub fn polynomial_smooth(series: &[(f64, f64)], window: usize, degree: usize) -> Result<Vec<(f64, f64)>> {
    if window.is_multiple_of(2) {
        return Err(Error::InvalidParameter("smoothing window must be odd"));
    }
    if window < degree + 1 {
        return Err(Error::InvalidParameter("smoothing window must exceed the polynomial degree"));
    }
    if window > series.len() {
        return Err(Error::InvalidParameter("smoothing window is longer than the series"));
    }
    if series.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
        return Err(Error::InvalidParameter("series contains non-finite values"));
    }
    let half = window / 2;
    let n = series.len();
    Ok((0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            let local = &series[lo..hi];
            let deg = degree.min(local.len() - 1);
            (series[i].0, fit_at(local, series[i].0, deg))
        })
        .collect())
}

/// Value at `center` of the least-squares polynomial through `points`,
/// solved by Householder QR on the scaled Vandermonde matrix.
fn fit_at(points: &[(f64, f64)], center: f64, degree: usize) -> f64 {
    let m = points.len();
    let cols = degree + 1;
    let scale = points
        .iter()
        .map(|(t, _)| math::abs(t - center))
        .fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };

    // column-major m x cols
    let mut a = vec![0.0; m * cols];
    let mut b: Vec<f64> = points.iter().map(|(_, v)| *v).collect();
    for (r, (t, _)) in points.iter().enumerate() {
        let u = (t - center) / scale;
        let mut p = 1.0;
        for c in 0..cols {
            a[c * m + r] = p;
            p *= u;
        }
    }

    for k in 0..cols {
        let norm = math::sqrt((k..m).map(|r| a[k * m + r] * a[k * m + r]).sum());
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[k * m + k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..m).map(|r| a[k * m + r]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for c in k..cols {
            let dot: f64 = (k..m).map(|r| v[r - k] * a[c * m + r]).sum();
            let f = 2.0 * dot / vnorm2;
            for r in k..m {
                a[c * m + r] -= f * v[r - k];
            }
        }
        let dot: f64 = (k..m).map(|r| v[r - k] * b[r]).sum();
        let f = 2.0 * dot / vnorm2;
        for r in k..m {
            b[r] -= f * v[r - k];
        }
    }

    // back substitution on R
    let mut coef = vec![0.0; cols];
    for k in (0..cols).rev() {
        let s: f64 = (k + 1..cols).map(|c| a[c * m + k] * coef[c]).sum();
        coef[k] = (b[k] - s) / a[k * m + k];
    }
    coef[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(f: impl Fn(f64) -> f64, n: usize) -> Vec<(f64, f64)> {
        (0..n).map(|i| {
            let t = 0.25 * i as f64;
            (t, f(t))
        }).collect()
    }

    #[test]
    fn constant_is_unchanged() {
        let s = series(|_| 3.5, 15);
        for (a, b) in polynomial_smooth(&s, 7, 3).unwrap().iter().zip(&s) {
            assert!((a.1 - b.1).abs() < 1e-13);
            assert_eq!(a.0, b.0);
        }
    }

    #[test]
    fn quadratic_is_reproduced() {
        let f = |t: f64| 0.7 - 1.3 * t + 0.4 * t * t;
        let s = series(f, 21);
        for (t, v) in polynomial_smooth(&s, 7, 2).unwrap() {
            assert!((v - f(t)).abs() < 1e-12, "{t}");
        }
    }

    #[test]
    fn noise_is_reduced() {
        let s: Vec<(f64, f64)> = (0..41).map(|i| (i as f64, if i % 2 == 0 { 1.0 } else { -1.0 })).collect();
        let out = polynomial_smooth(&s, 7, 3).unwrap();
        for (t, v) in &out[4..37] {
            assert!(v.abs() < 0.5, "{t} {v}");
        }
    }

    #[test]
    fn argument_checks() {
        let s = series(|t| t, 10);
        assert!(polynomial_smooth(&s, 6, 2).is_err());
        assert!(polynomial_smooth(&s, 3, 3).is_err());
        assert!(polynomial_smooth(&s, 11, 2).is_err());
        assert!(polynomial_smooth(&s, 1, 0).is_ok());
    }
}
