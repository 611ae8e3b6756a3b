use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::corpus::mix_seed;
use crate::error::{invalid, Result};
use crate::spectral::{dft2_plane, idft2, ComplexGrid, ImageGrid};

pub const SUPPORTED_SIZES: [usize; 3] = [32, 64, 128];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TextureKind {
    /// Amplitude spectrum decaying as `1/f^alpha`.
    FractalNoise {
        alpha: f64,
    },
    GradientSpeckle,
    TiledMosaic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TextureSpec {
    #[serde(flatten)]
    pub kind: TextureKind,
    pub size: usize,
    pub seed: u64,
}

impl TextureSpec {
    pub fn fractal(alpha: f64, size: usize, seed: u64) -> Self {
        Self {
            kind: TextureKind::FractalNoise { alpha },
            size,
            seed,
        }
    }
}

pub(crate) fn random_texture(size: usize, seed: u64, rng: &mut ChaCha8Rng) -> TextureSpec {
    let kind = match rng.random_range(0..4) {
        0 | 1 => TextureKind::FractalNoise {
            alpha: rng.random_range(0.5..2.0),
        },
        2 => TextureKind::GradientSpeckle,
        _ => TextureKind::TiledMosaic,
    };
    TextureSpec { kind, size, seed }
}

/// `count` textures of mixed kinds drawn the same way as corpus sources.
pub fn texture_batch(count: usize, size: usize, seed: u64) -> Result<Vec<ImageGrid>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count as u64)
        .map(|i| gen_texture(&random_texture(size, mix_seed(seed, i), &mut rng)))
        .collect()
}

/// Deterministic 3-channel texture for `spec`.
pub fn gen_texture(spec: &TextureSpec) -> Result<ImageGrid> {
    if !SUPPORTED_SIZES.contains(&spec.size) {
        return Err(invalid!(
            "unsupported texture size {} (expected one of {SUPPORTED_SIZES:?})",
            spec.size
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.size;
    let planes = match spec.kind {
        TextureKind::FractalNoise { alpha } => {
            if !(0.0..=4.0).contains(&alpha) {
                return Err(invalid!("fractal exponent {alpha} out of range"));
            }
            fractal_planes(n, alpha, &mut rng)
        }
        TextureKind::GradientSpeckle => gradient_speckle_planes(n, &mut rng),
        TextureKind::TiledMosaic => mosaic_planes(n, &mut rng),
    };
    ImageGrid::from_planes(n, n, &planes)
}

/// Zero-mean field with amplitude spectrum `|W(f)|·f^-alpha` for white `W`.
pub(crate) fn fractal_field(n: usize, alpha: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let white: Vec<f64> = (0..n * n).map(|_| StandardNormal.sample(rng)).collect();
    let spectrum = dft2_plane(n, n, &white);
    let freq = |i: usize| i.min(n - i) as f64;
    let shaped: Vec<Complex64> = spectrum
        .values()
        .iter()
        .enumerate()
        .map(|(idx, z)| {
            let r = freq(idx / n).hypot(freq(idx % n));
            if r == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                z * r.powf(-alpha)
            }
        })
        .collect();
    idft2(&ComplexGrid::new(n, n, shaped).expect("square grid")).values
}

fn rescale(values: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let span = (max - min).max(1e-12);
    values.iter().map(|v| lo + (hi - lo) * (v - min) / span).collect()
}

fn fractal_planes(n: usize, alpha: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let base = fractal_field(n, alpha, rng);
    (0..3)
        .map(|_| {
            let own = fractal_field(n, alpha, rng);
            let mix = rng.random_range(0.05..0.3);
            let combined: Vec<f64> = base.iter().zip(&own).map(|(b, o)| b + mix * o).collect();
            let lo = rng.random_range(0.0..0.3);
            let hi = rng.random_range(0.7..1.0);
            rescale(&combined, lo, hi)
        })
        .collect()
}

fn gradient_speckle_planes(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let theta = rng.random_range(0.0..2.0 * PI);
    let (dx, dy) = (theta.cos(), theta.sin());
    let spots: Vec<(f64, f64, f64, f64)> = (0..rng.random_range(8..24))
        .map(|_| {
            (
                rng.random_range(0.0..n as f64),
                rng.random_range(0.0..n as f64),
                rng.random_range(0.8..3.0),
                rng.random_range(-0.3..0.3),
            )
        })
        .collect();
    (0..3)
        .map(|_| {
            let start = rng.random_range(0.1..0.5);
            let slope = rng.random_range(0.2..0.5);
            let sigma = rng.random_range(0.01..0.05);
            (0..n * n)
                .map(|i| {
                    let (y, x) = ((i / n) as f64, (i % n) as f64);
                    let t = ((x - n as f64 / 2.0) * dx + (y - n as f64 / 2.0) * dy) / n as f64 + 0.5;
                    let speck: f64 = spots
                        .iter()
                        .map(|&(sy, sx, r, amp)| {
                            let d2 = (y - sy).powi(2) + (x - sx).powi(2);
                            amp * (-d2 / (2.0 * r * r)).exp()
                        })
                        .sum();
                    let noise: f64 = StandardNormal.sample(rng);
                    (start + slope * t + speck + sigma * noise).clamp(0.0, 1.0)
                })
                .collect()
        })
        .collect()
}

fn mosaic_planes(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let tile = [4usize, 8, 16][rng.random_range(0..3)];
    let off_y = rng.random_range(0..tile);
    let off_x = rng.random_range(0..tile);
    let tiles = n / tile + 2;
    let colors: Vec<[f64; 3]> = (0..tiles * tiles)
        .map(|_| [rng.random(), rng.random(), rng.random()])
        .collect();
    let sigma = rng.random_range(0.01..0.04);
    let mut planes = vec![vec![0.0; n * n]; 3];
    for i in 0..n * n {
        let ty = (i / n + off_y) / tile;
        let tx = (i % n + off_x) / tile;
        let color = colors[ty * tiles + tx];
        for (c, plane) in planes.iter_mut().enumerate() {
            let noise: f64 = StandardNormal.sample(rng);
            plane[i] = (0.15 + 0.7 * color[c] + sigma * noise).clamp(0.0, 1.0);
        }
    }
    planes
}
