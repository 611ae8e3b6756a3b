use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LayerSpec {
    Conv {
        kernel: usize,
        stride: usize,
        in_channels: usize,
        out_channels: usize,
        padding: usize,
    },
    Relu,
    MaxPool {
        size: usize,
        stride: usize,
    },
    GlobalAvgPool,
    Dense {
        inputs: usize,
        outputs: usize,
    },
}

impl LayerSpec {
    pub fn conv3(in_channels: usize, out_channels: usize) -> Self {
        LayerSpec::Conv {
            kernel: 3,
            stride: 1,
            in_channels,
            out_channels,
            padding: 1,
        }
    }

    pub fn param_count(&self) -> usize {
        match *self {
            LayerSpec::Conv {
                kernel,
                in_channels,
                out_channels,
                ..
            } => out_channels * in_channels * kernel * kernel + out_channels,
            LayerSpec::Dense { inputs, outputs } => inputs * outputs + outputs,
            _ => 0,
        }
    }

    /// Fan-in used for weight initialization.
    pub fn fan_in(&self) -> usize {
        match *self {
            LayerSpec::Conv {
                kernel, in_channels, ..
            } => in_channels * kernel * kernel,
            LayerSpec::Dense { inputs, .. } => inputs,
            _ => 0,
        }
    }

    pub fn is_spatial(&self) -> bool {
        matches!(
            self,
            LayerSpec::Conv { .. } | LayerSpec::Relu | LayerSpec::MaxPool { .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DepthProfile {
    /// First three blocks plus the final block.
    Shallow,
    /// All blocks.
    Deep,
    /// First `depth - 1` blocks plus the final block.
    Custom(usize),
}

impl DepthProfile {
    pub fn depth(self) -> usize {
        match self {
            DepthProfile::Shallow => SHALLOW_DEPTH,
            DepthProfile::Deep => DEEP_DEPTH,
            DepthProfile::Custom(d) => d,
        }
    }
}

pub const DEEP_DEPTH: usize = 6;
pub const SHALLOW_DEPTH: usize = 4;

/// Output channels of the pooled body blocks, in order.
pub const BODY_WIDTHS: [usize; DEEP_DEPTH - 1] = [8, 16, 16, 32, 32];
/// Output channels of the final (unpooled) block.
pub const FINAL_WIDTH: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NetConfig {
    pub input_channels: usize,
    pub layers: Vec<LayerSpec>,
    pub profile: DepthProfile,
    pub classes: usize,
}

impl NetConfig {
    /// Conv blocks: `depth - 1` body blocks (3×3 conv, ReLU, 2×2 max-pool)
    /// followed by a final 3×3 conv + ReLU, global average pooling and a
    /// dense head.
    pub fn with_profile(input_channels: usize, profile: DepthProfile, classes: usize) -> Result<Self> {
        let depth = profile.depth();
        if depth == 0 || depth > DEEP_DEPTH {
            return Err(Error::InvalidConfig(format!(
                "depth must be in 1..={DEEP_DEPTH}, got {depth}"
            )));
        }
        let mut layers = Vec::new();
        let mut channels = input_channels;
        for &width in &BODY_WIDTHS[..depth - 1] {
            layers.push(LayerSpec::conv3(channels, width));
            layers.push(LayerSpec::Relu);
            layers.push(LayerSpec::MaxPool { size: 2, stride: 2 });
            channels = width;
        }
        layers.push(LayerSpec::conv3(channels, FINAL_WIDTH));
        layers.push(LayerSpec::Relu);
        layers.push(LayerSpec::GlobalAvgPool);
        layers.push(LayerSpec::Dense {
            inputs: FINAL_WIDTH,
            outputs: classes,
        });
        let config = Self {
            input_channels,
            layers,
            profile,
            classes,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn shallow(input_channels: usize, classes: usize) -> Result<Self> {
        Self::with_profile(input_channels, DepthProfile::Shallow, classes)
    }

    pub fn deep(input_channels: usize, classes: usize) -> Result<Self> {
        Self::with_profile(input_channels, DepthProfile::Deep, classes)
    }

    /// Checks channel chaining, kernel shapes, and the single dense head.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !matches!(self.input_channels, 1 | 3 | 4) {
            return bad(format!("input channels must be 1, 3 or 4, got {}", self.input_channels));
        }
        if !matches!(self.classes, 2..=5) {
            return bad(format!("class count must be in 2..=5, got {}", self.classes));
        }
        let dense_count = self
            .layers
            .iter()
            .filter(|l| matches!(l, LayerSpec::Dense { .. }))
            .count();
        if dense_count != 1 || !matches!(self.layers.last(), Some(LayerSpec::Dense { .. })) {
            return bad("exactly one dense head must end the network".into());
        }
        let mut channels = self.input_channels;
        let mut pooled = false;
        for (i, layer) in self.layers.iter().enumerate() {
            match *layer {
                LayerSpec::Conv {
                    kernel,
                    stride,
                    in_channels,
                    out_channels,
                    ..
                } => {
                    if pooled {
                        return bad(format!("layer {i}: conv after global pooling"));
                    }
                    if kernel % 2 == 0 || stride == 0 || out_channels == 0 {
                        return bad(format!("layer {i}: kernel must be odd, stride and channels positive"));
                    }
                    if in_channels != channels {
                        return bad(format!(
                            "layer {i}: expects {in_channels} channels, receives {channels}"
                        ));
                    }
                    channels = out_channels;
                }
                LayerSpec::MaxPool { size, stride } => {
                    if pooled || size == 0 || stride == 0 {
                        return bad(format!("layer {i}: invalid max-pool"));
                    }
                }
                LayerSpec::Relu => {}
                LayerSpec::GlobalAvgPool => pooled = true,
                LayerSpec::Dense { inputs, outputs } => {
                    if !pooled {
                        return bad(format!("layer {i}: dense head must follow global pooling"));
                    }
                    if inputs != channels {
                        return bad(format!("layer {i}: dense expects {inputs} inputs, receives {channels}"));
                    }
                    if outputs != self.classes {
                        return bad(format!(
                            "layer {i}: head has {outputs} outputs for {} classes",
                            self.classes
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(LayerSpec::param_count).sum()
    }

    /// Spatial size after every layer, or an error if the input is too small.
    pub fn spatial_shapes(&self, height: usize, width: usize) -> Result<Vec<(usize, usize)>> {
        let mut shapes = Vec::with_capacity(self.layers.len());
        let (mut h, mut w) = (height, width);
        for (i, layer) in self.layers.iter().enumerate() {
            match *layer {
                LayerSpec::Conv {
                    kernel,
                    stride,
                    padding,
                    ..
                } => {
                    if h + 2 * padding < kernel || w + 2 * padding < kernel {
                        return Err(Error::InvalidInput(format!(
                            "layer {i}: {h}x{w} map too small for kernel {kernel}"
                        )));
                    }
                    h = (h + 2 * padding - kernel) / stride + 1;
                    w = (w + 2 * padding - kernel) / stride + 1;
                }
                LayerSpec::MaxPool { size, stride } => {
                    if h < size || w < size {
                        return Err(Error::InvalidInput(format!(
                            "layer {i}: {h}x{w} map too small to pool by {size}"
                        )));
                    }
                    h = (h - size) / stride + 1;
                    w = (w - size) / stride + 1;
                }
                LayerSpec::GlobalAvgPool => {
                    h = 1;
                    w = 1;
                }
                _ => {}
            }
            shapes.push((h, w));
        }
        Ok(shapes)
    }

    /// Short hex digest of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(&Sha256::digest(&json)[..8])
    }
}
