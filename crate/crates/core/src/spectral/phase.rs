use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dft::{dft2_plane, idft2};
use super::grid::{ComplexGrid, ImageGrid, RealGrid, RgbpImage};
use super::polar::to_polar;
use crate::error::{invalid, Result};

/// How the phase spectrum is turned back into a spatial map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseMode {
    /// Inverse transform of `e^{jP(u)}`: amplitude discarded, phase kept.
    UnitAmplitude,
    /// Inverse transform of `|P(u)|` used directly as a real spectrum.
    #[default]
    AbsPhase,
}

impl PhaseMode {
    pub fn name(self) -> &'static str {
        match self {
            PhaseMode::UnitAmplitude => "unit-amplitude",
            PhaseMode::AbsPhase => "abs-phase",
        }
    }
}

impl std::fmt::Display for PhaseMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PhaseMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "unit-amplitude" | "unit" => Ok(PhaseMode::UnitAmplitude),
            "abs-phase" | "abs" => Ok(PhaseMode::AbsPhase),
            other => Err(format!("unknown phase mode `{other}`")),
        }
    }
}

/// Rec. 601 luma of a 3-channel image, or the single plane of a gray image.
pub fn luminance(image: &ImageGrid) -> Vec<f64> {
    if image.channels() == 1 {
        return image.data().to_vec();
    }
    let (r, g, b) = (image.plane(0), image.plane(1), image.plane(2));
    r.iter()
        .zip(g)
        .zip(b)
        .map(|((r, g), b)| 0.299 * r + 0.587 * g + 0.114 * b)
        .collect()
}

/// Per-map min-max scaling to `[0, 1]`; a constant map becomes all zeros.
pub fn normalize_min_max(values: &[f64]) -> Vec<f64> {
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    let span = hi - lo;
    let scale = lo.abs().max(hi.abs()).max(1.0);
    if !(span > 1e-12 * scale) {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| ((v - lo) / span).clamp(0.0, 1.0)).collect()
}

fn luminance_spectrum(image: &ImageGrid) -> ComplexGrid {
    dft2_plane(image.height(), image.width(), &luminance(image))
}

/// Phase-only reconstruction before normalization.
///
/// Multi-channel images are reduced to luminance first.
pub fn phase_only_raw(image: &ImageGrid, mode: PhaseMode) -> RealGrid {
    let spectrum = luminance_spectrum(image);
    let polar = to_polar(&spectrum);
    let values = polar
        .phase
        .iter()
        .map(|&p| match mode {
            PhaseMode::UnitAmplitude => Complex64::from_polar(1.0, p),
            PhaseMode::AbsPhase => Complex64::new(p.abs(), 0.0),
        })
        .collect();
    let grid = ComplexGrid::new(spectrum.height(), spectrum.width(), values).expect("same shape");
    idft2(&grid)
}

/// Amplitude-only reconstruction (phase set to zero) before normalization.
pub fn amplitude_only_raw(image: &ImageGrid) -> RealGrid {
    let spectrum = luminance_spectrum(image);
    let values = spectrum
        .values()
        .iter()
        .map(|z| Complex64::new(z.norm(), 0.0))
        .collect();
    let grid = ComplexGrid::new(spectrum.height(), spectrum.width(), values).expect("same shape");
    idft2(&grid)
}

/// Normalized single-channel phase map of `image`.
pub fn phase_only_image(image: &ImageGrid, mode: PhaseMode) -> ImageGrid {
    let raw = phase_only_raw(image, mode);
    ImageGrid::new(raw.height, raw.width, 1, normalize_min_max(&raw.values)).expect("normalized values lie in [0, 1]")
}

/// RGB plus the default (abs-phase) spatial phase channel.
pub fn make_rgbp(image: &ImageGrid) -> Result<RgbpImage> {
    make_rgbp_with(image, PhaseMode::default())
}

pub fn make_rgbp_with(image: &ImageGrid, mode: PhaseMode) -> Result<RgbpImage> {
    if image.channels() != 3 {
        return Err(invalid!("RGBP needs a 3-channel image, got {}", image.channels()));
    }
    let phase = phase_only_image(image, mode);
    Ok(RgbpImage::from_parts(image, phase.data()))
}
