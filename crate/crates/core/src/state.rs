//! Qubit state representations: Bloch vectors and 2x2 density matrices.
//!
//! The computational basis is ordered `(|↑⟩, |↓⟩)`, so `ρ₁₁` is the `|↑⟩`
//! population and `z = ρ₁₁ − ρ₂₂`. Conversions follow `ρ = ½(1 + r·σ)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::math;

/// Slack allowed on purity, trace, hermiticity and positivity checks.
pub const STATE_TOLERANCE: f64 = 1e-12;

/// A point in (or on) the Bloch ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    x: f64,
    y: f64,
    z: f64,
}

impl BlochState {
    /// `|↑⟩`, the north pole.
    pub const UP: BlochState = BlochState { x: 0.0, y: 0.0, z: 1.0 };
    /// `|↓⟩`, the south pole.
    pub const DOWN: BlochState = BlochState { x: 0.0, y: 0.0, z: -1.0 };
    /// The maximally mixed state.
    pub const CENTER: BlochState = BlochState { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = math::sqrt(x * x + y * y + z * z);
        if !norm.is_finite() || norm > 1.0 + STATE_TOLERANCE {
            return Err(Error::Unphysical { norm });
        }
        Ok(BlochState { x, y, z })
    }

    pub fn from_array(r: [f64; 3]) -> Result<Self> {
        Self::new(r[0], r[1], r[2])
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm(&self) -> f64 {
        math::sqrt(self.x * self.x + self.y * self.y + self.z * self.z)
    }

    /// Euclidean distance in Bloch space.
    pub fn distance(&self, other: &BlochState) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        math::sqrt(dx * dx + dy * dy + dz * dz)
    }

    /// Convex combination `Σ wᵢ rᵢ`. Weights must be non-negative and sum to one.
    pub fn mix(parts: &[(f64, BlochState)]) -> Result<Self> {
        let total: f64 = parts.iter().map(|(w, _)| *w).sum();
        if parts.iter().any(|(w, _)| !(*w >= 0.0)) || math::abs(total - 1.0) > STATE_TOLERANCE {
            return Err(Error::InvalidParameter("mixture weights must be non-negative and sum to 1"));
        }
        let mut r = [0.0; 3];
        for (w, s) in parts {
            r[0] += w * s.x;
            r[1] += w * s.y;
            r[2] += w * s.z;
        }
        Self::from_array(r)
    }
}

/// A validated single-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Mat2);

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(entries: [[Complex64; 2]; 2]) -> Result<Self> {
        let [[r11, r12], [r21, r22]] = entries;
        let deviation = (r21 - r12.conj())
            .norm()
            .max(math::abs(r11.im))
            .max(math::abs(r22.im));
        if !(deviation <= STATE_TOLERANCE) {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = r11.re + r22.re;
        if !(math::abs(trace - 1.0) <= STATE_TOLERANCE) {
            return Err(Error::TraceNotOne { trace });
        }
        let half_gap = math::hypot(0.5 * (r11.re - r22.re), r12.norm());
        let min_eigenvalue = 0.5 * trace - half_gap;
        if min_eigenvalue < -STATE_TOLERANCE {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(DensityMatrix(Mat2(entries)))
    }

    pub(crate) fn from_mat(m: Mat2) -> Result<Self> {
        Self::new(m.0)
    }

    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        self.0 .0
    }

    pub(crate) fn mat(&self) -> &Mat2 {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// `Tr(ρ²)`
    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// Column-stacked vectorization `(ρ₁₁, ρ₂₁, ρ₁₂, ρ₂₂)`, the basis of the
    /// superoperator matrix.
    pub fn vectorize(&self) -> [Complex64; 4] {
        let m = &self.0 .0;
        [m[0][0], m[1][0], m[0][1], m[1][1]]
    }
}

/// `ρ = ½(1 + r·σ)`.
pub fn bloch_to_density(r: &BlochState) -> DensityMatrix {
    let half = 0.5;
    let r11 = Complex64::new(half * (1.0 + r.z), 0.0);
    let r22 = Complex64::new(half * (1.0 - r.z), 0.0);
    let r12 = Complex64::new(half * r.x, -half * r.y);
    // A valid Bloch vector always yields a valid density matrix.
    DensityMatrix(Mat2([[r11, r12], [r12.conj(), r22]]))
}

/// `r = (ρ₁₂ + ρ₂₁, i(ρ₁₂ − ρ₂₁), ρ₁₁ − ρ₂₂)`.
pub fn density_to_bloch(rho: &DensityMatrix) -> Result<BlochState> {
    let [[r11, r12], [r21, r22]] = rho.entries();
    let x = (r12 + r21).re;
    let y = (Complex64::i() * (r12 - r21)).re;
    let z = (r11 - r22).re;
    BlochState::new(x, y, z)
}
