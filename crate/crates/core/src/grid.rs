//! Evenly spaced sample grids.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// `count` points from `start` to `stop` inclusive.
pub fn lin_space(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => alloc::vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count)
                .map(|i| if i == count - 1 { stop } else { start + step * i as f64 })
                .collect()
        }
    }
}

/// `count` logarithmically spaced points from `start` to `stop` inclusive.
pub fn log_space(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if !(start > 0.0 && stop > 0.0) {
        return Err(Error::InvalidParameter("logarithmic grid bounds must be positive"));
    }
    let (a, b) = (math::ln(start), math::ln(stop));
    Ok(lin_space(a, b, count)
        .into_iter()
        .enumerate()
        .map(|(i, e)| match i {
            0 => start,
            _ if i == count - 1 => stop,
            _ => math::exp(e),
        })
        .collect())
}
