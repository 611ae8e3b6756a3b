use std::f64::consts::PI;

use num_complex::Complex64;

use super::grid::ComplexGrid;
use crate::error::{invalid, Result};

/// Coefficients with modulus at or below this are treated as exact zeros
/// and assigned phase 0. Transform round-off on exactly-zero coefficients
/// sits around 1e-17, far below any coefficient of an 8-bit image.
pub const ZERO_MODULUS: f64 = 1e-12;

/// Amplitude/phase decomposition of a [`ComplexGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct PolarSpectrum {
    pub height: usize,
    pub width: usize,
    pub amplitude: Vec<f64>,
    /// Principal argument in `(-π, π]`.
    pub phase: Vec<f64>,
}

/// Principal argument in `(-π, π]`; numerically zero coefficients get 0.
pub fn principal_phase(z: Complex64) -> f64 {
    if z.norm() <= ZERO_MODULUS {
        return 0.0;
    }
    let p = z.im.atan2(z.re);
    if p <= -PI {
        PI
    } else {
        p
    }
}

pub fn to_polar(grid: &ComplexGrid) -> PolarSpectrum {
    let (amplitude, phase) = grid.values().iter().map(|&z| (z.norm(), principal_phase(z))).unzip();
    PolarSpectrum {
        height: grid.height(),
        width: grid.width(),
        amplitude,
        phase,
    }
}

pub fn from_polar(polar: &PolarSpectrum) -> Result<ComplexGrid> {
    let n = polar.height * polar.width;
    if polar.amplitude.len() != n || polar.phase.len() != n {
        return Err(invalid!(
            "polar spectrum buffers do not match {}x{}",
            polar.height,
            polar.width
        ));
    }
    if polar.amplitude.iter().any(|&a| a < 0.0 || !a.is_finite()) {
        return Err(invalid!("amplitude must be finite and non-negative"));
    }
    let values = polar
        .amplitude
        .iter()
        .zip(&polar.phase)
        .map(|(&a, &p)| Complex64::from_polar(a, p))
        .collect();
    ComplexGrid::new(polar.height, polar.width, values)
}
