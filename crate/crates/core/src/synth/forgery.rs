use rand::Rng;
use serde::{Deserialize, Serialize};

use super::compress::{compress_block, CompressionLevel};
use crate::error::{invalid, Result};
use crate::spectral::ImageGrid;
use crate::upsample::{ResampleChain, ResampleKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    Pristine,
    Forged,
}

/// Rotated ellipse with a smoothstep-feathered rim, in fractions of the image size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseMask {
    pub center_y: f64,
    pub center_x: f64,
    pub radius_y: f64,
    pub radius_x: f64,
    pub angle: f64,
    /// Width of the transition band as a fraction of the normalized radius.
    pub feather: f64,
}

impl EllipseMask {
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        Self {
            center_y: rng.random_range(0.4..0.6),
            center_x: rng.random_range(0.4..0.6),
            radius_y: rng.random_range(0.32..0.45),
            radius_x: rng.random_range(0.32..0.45),
            angle: rng.random_range(0.0..std::f64::consts::PI),
            feather: rng.random_range(0.1..0.25),
        }
    }

    pub fn render(&self, height: usize, width: usize) -> Vec<f64> {
        let (s, c) = self.angle.sin_cos();
        (0..height * width)
            .map(|i| {
                let y = ((i / width) as f64 + 0.5) / height as f64 - self.center_y;
                let x = ((i % width) as f64 + 0.5) / width as f64 - self.center_x;
                let u = (c * x + s * y) / self.radius_x;
                let v = (-s * x + c * y) / self.radius_y;
                let rho = u.hypot(v);
                let inner = 1.0 - self.feather;
                if rho <= inner {
                    1.0
                } else if rho >= 1.0 {
                    0.0
                } else {
                    let t = (1.0 - rho) / self.feather;
                    t * t * (3.0 - 2.0 * t)
                }
            })
            .collect()
    }
}

/// Pass a masked region through a decoder surrogate, blend it back, compress.
#[derive(Debug, Clone, PartialEq)]
pub struct ForgeryRecipe {
    pub chain: ResampleChain,
    /// Row-major blend weights in `[0, 1]`.
    pub mask: Vec<f64>,
    pub mask_height: usize,
    pub mask_width: usize,
    pub compression: CompressionLevel,
}

impl ForgeryRecipe {
    pub fn new(
        chain: ResampleChain,
        mask: Vec<f64>,
        mask_height: usize,
        mask_width: usize,
        compression: CompressionLevel,
    ) -> Result<Self> {
        if mask.len() != mask_height * mask_width {
            return Err(invalid!("mask buffer does not match {mask_height}x{mask_width}"));
        }
        if mask.iter().any(|m| !(0.0..=1.0).contains(m)) {
            return Err(invalid!("mask values must lie in [0, 1]"));
        }
        Ok(Self {
            chain,
            mask,
            mask_height,
            mask_width,
            compression,
        })
    }

    /// No resampling and an empty mask: compression only.
    pub fn pristine(height: usize, width: usize, compression: CompressionLevel) -> Self {
        Self {
            chain: ResampleChain::default(),
            mask: vec![0.0; height * width],
            mask_height: height,
            mask_width: width,
            compression,
        }
    }

    pub fn label(&self) -> Label {
        if !self.chain.is_empty() && self.mask.iter().any(|&m| m > 0.0) {
            Label::Forged
        } else {
            Label::Pristine
        }
    }
}

/// Serializable description of a forgery; expands to a [`ForgeryRecipe`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecipeDescriptor {
    pub kernel: ResampleKind,
    pub repeats: usize,
    pub mask: EllipseMask,
    pub compression: CompressionLevel,
}

impl RecipeDescriptor {
    pub fn to_recipe(&self, height: usize, width: usize) -> Result<ForgeryRecipe> {
        ForgeryRecipe::new(
            ResampleChain::decoder(self.kernel, self.repeats),
            self.mask.render(height, width),
            height,
            width,
            self.compression,
        )
    }
}

pub fn apply_forgery(image: &ImageGrid, recipe: &ForgeryRecipe) -> Result<(ImageGrid, Label)> {
    if recipe.mask_height != image.height() || recipe.mask_width != image.width() {
        return Err(invalid!(
            "mask is {}x{} but image is {}x{}",
            recipe.mask_height,
            recipe.mask_width,
            image.height(),
            image.width()
        ));
    }
    let resampled = recipe.chain.apply(image)?;
    if !resampled.same_shape(image) {
        return Err(invalid!("resample chain changes the image shape"));
    }
    let n = image.height() * image.width();
    let blended: Vec<f64> = image
        .data()
        .iter()
        .zip(resampled.data())
        .enumerate()
        .map(|(i, (&orig, &res))| {
            let m = recipe.mask[i % n];
            m * res + (1.0 - m) * orig
        })
        .collect();
    let blended = ImageGrid::from_clamped(image.height(), image.width(), image.channels(), blended)?;
    let out = compress_block(&blended, recipe.compression)?;
    Ok((out, recipe.label()))
}
