use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::spectral::ImageGrid;

const BLOCK: usize = 8;
/// Dead-zone rounding offset. Plain rounding (0.5) adds more block-edge energy
/// at high frequencies than it removes.
const ROUNDING_OFFSET: f64 = 1.0 / 3.0;

/// Block-transform quantization strength; a stand-in for codec quality levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompressionLevel {
    #[default]
    None,
    Light,
    Heavy,
}

impl CompressionLevel {
    /// Quantization step in orthonormal-coefficient units.
    pub fn step(self) -> Option<f64> {
        match self {
            CompressionLevel::None => None,
            CompressionLevel::Light => Some(4.0 / 255.0),
            CompressionLevel::Heavy => Some(16.0 / 255.0),
        }
    }
}

impl std::str::FromStr for CompressionLevel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "none" => Ok(CompressionLevel::None),
            "light" => Ok(CompressionLevel::Light),
            "heavy" => Ok(CompressionLevel::Heavy),
            other => Err(format!("unknown compression level `{other}`")),
        }
    }
}

/// Orthonormal DCT-II basis, `basis[k][n]`.
fn basis() -> &'static [[f64; BLOCK]; BLOCK] {
    static BASIS: OnceLock<[[f64; BLOCK]; BLOCK]> = OnceLock::new();
    BASIS.get_or_init(|| {
        let mut m = [[0.0; BLOCK]; BLOCK];
        for (k, row) in m.iter_mut().enumerate() {
            let scale = if k == 0 {
                (1.0 / BLOCK as f64).sqrt()
            } else {
                (2.0 / BLOCK as f64).sqrt()
            };
            for (n, v) in row.iter_mut().enumerate() {
                *v = scale * (PI * (2 * n + 1) as f64 * k as f64 / (2 * BLOCK) as f64).cos();
            }
        }
        m
    })
}

type Block = [[f64; BLOCK]; BLOCK];

fn forward_block(x: &Block) -> Block {
    let c = basis();
    let mut tmp = [[0.0; BLOCK]; BLOCK];
    for k in 0..BLOCK {
        for j in 0..BLOCK {
            tmp[k][j] = (0..BLOCK).map(|n| c[k][n] * x[n][j]).sum();
        }
    }
    let mut out = [[0.0; BLOCK]; BLOCK];
    for k in 0..BLOCK {
        for l in 0..BLOCK {
            out[k][l] = (0..BLOCK).map(|j| tmp[k][j] * c[l][j]).sum();
        }
    }
    out
}

fn inverse_block(y: &Block) -> Block {
    let c = basis();
    let mut tmp = [[0.0; BLOCK]; BLOCK];
    for n in 0..BLOCK {
        for l in 0..BLOCK {
            tmp[n][l] = (0..BLOCK).map(|k| c[k][n] * y[k][l]).sum();
        }
    }
    let mut out = [[0.0; BLOCK]; BLOCK];
    for n in 0..BLOCK {
        for j in 0..BLOCK {
            out[n][j] = (0..BLOCK).map(|l| tmp[n][l] * c[l][j]).sum();
        }
    }
    out
}

/// Per-8×8-block cosine transform, dead-zone scalar quantization, inverse and clamp.
pub fn compress_block(image: &ImageGrid, level: CompressionLevel) -> Result<ImageGrid> {
    let (h, w) = (image.height(), image.width());
    if h % BLOCK != 0 || w % BLOCK != 0 {
        return Err(invalid!("image {h}x{w} is not a multiple of {BLOCK}"));
    }
    let Some(step) = level.step() else {
        return Ok(image.clone());
    };
    let mut data = image.data().to_vec();
    for c in 0..image.channels() {
        let plane = &mut data[c * h * w..(c + 1) * h * w];
        for by in (0..h).step_by(BLOCK) {
            for bx in (0..w).step_by(BLOCK) {
                let mut block = [[0.0; BLOCK]; BLOCK];
                for (y, row) in block.iter_mut().enumerate() {
                    for (x, v) in row.iter_mut().enumerate() {
                        *v = plane[(by + y) * w + bx + x];
                    }
                }
                let mut coeffs = forward_block(&block);
                for v in coeffs.iter_mut().flatten() {
                    *v = v.signum() * (v.abs() / step + ROUNDING_OFFSET).floor() * step;
                }
                let rec = inverse_block(&coeffs);
                for (y, row) in rec.iter().enumerate() {
                    for (x, v) in row.iter().enumerate() {
                        plane[(by + y) * w + bx + x] = v.clamp(0.0, 1.0);
                    }
                }
            }
        }
    }
    ImageGrid::new(h, w, image.channels(), data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_is_orthonormal() {
        let c = basis();
        for i in 0..BLOCK {
            for j in 0..BLOCK {
                let dot: f64 = (0..BLOCK).map(|n| c[i][n] * c[j][n]).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn block_transform_round_trips() {
        let mut b = [[0.0; BLOCK]; BLOCK];
        for (y, row) in b.iter_mut().enumerate() {
            for (x, v) in row.iter_mut().enumerate() {
                *v = ((y * 5 + x * 3) % 7) as f64 / 7.0;
            }
        }
        let back = inverse_block(&forward_block(&b));
        for y in 0..BLOCK {
            for x in 0..BLOCK {
                assert!((back[y][x] - b[y][x]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn none_is_identity() {
        let img = ImageGrid::new(8, 8, 1, (0..64).map(|i| i as f64 / 63.0).collect()).unwrap();
        assert_eq!(compress_block(&img, CompressionLevel::None).unwrap(), img);
    }

    #[test]
    fn indivisible_dimensions_are_rejected() {
        let img = ImageGrid::filled(12, 8, 1, 0.5).unwrap();
        assert!(compress_block(&img, CompressionLevel::Light).is_err());
    }
}
