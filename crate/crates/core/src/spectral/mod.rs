//! Discrete Fourier transforms, polar decomposition and phase-only
//! reconstruction.
//!
//! Transforms use the forward-normalized convention: the forward transform
//! carries `1/N` and the inverse carries no scale, so
//! `X(u) = (1/N) Σ x(n) e^{-j2πun/N}` and `x(n) = Σ X(u) e^{+j2πun/N}`.

mod dft;
mod grid;
mod phase;
mod polar;

pub use dft::{dft1, dft2, dft2_plane, idft1, idft1_complex, idft2, idft2_complex, FftPlan};
pub use grid::{ComplexGrid, ImageGrid, RealGrid, RgbpImage, Signal1D, Spectrum1D};
pub use phase::{
    amplitude_only_raw, luminance, make_rgbp, make_rgbp_with, normalize_min_max, phase_only_image, phase_only_raw,
    PhaseMode,
};
pub use polar::{from_polar, principal_phase, to_polar, PolarSpectrum, ZERO_MODULUS};

pub use num_complex::Complex64;
