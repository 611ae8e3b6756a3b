use serde::{Deserialize, Serialize};

use super::config::{LayerSpec, NetConfig};
use crate::error::Result;

/// Receptive-field geometry of one layer's output units, in input pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RfEntry {
    pub layer: usize,
    /// Side length of the receptive field.
    pub size: usize,
    /// Input-pixel distance between adjacent output units.
    pub stride: usize,
    /// Input coordinate of the centre of the first output unit's field.
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReceptiveField {
    /// One entry per spatial layer (conv, relu, max-pool), in order.
    pub layers: Vec<RfEntry>,
}

impl ReceptiveField {
    /// Field of the last spatial layer, i.e. what the classification head pools over.
    pub fn head(&self) -> RfEntry {
        *self.layers.last().expect("validated configs have a conv layer")
    }
}

/// `r_l = r_{l-1} + (k_l - 1)·j_{l-1}`, `j_l = j_{l-1}·s_l`,
/// `c_l = c_{l-1} + ((k_l - 1)/2 - p_l)·j_{l-1}`.
pub fn receptive_field(config: &NetConfig) -> Result<ReceptiveField> {
    config.validate()?;
    let (mut size, mut jump, mut offset) = (1usize, 1usize, 0.0f64);
    let mut layers = Vec::new();
    for (i, layer) in config.layers.iter().enumerate() {
        let (k, s, p) = match *layer {
            LayerSpec::Conv {
                kernel,
                stride,
                padding,
                ..
            } => (kernel, stride, padding),
            LayerSpec::MaxPool { size, stride } => (size, stride, 0),
            LayerSpec::Relu => (1, 1, 0),
            LayerSpec::GlobalAvgPool | LayerSpec::Dense { .. } => break,
        };
        offset += ((k as f64 - 1.0) / 2.0 - p as f64) * jump as f64;
        size += (k - 1) * jump;
        jump *= s;
        layers.push(RfEntry {
            layer: i,
            size,
            stride: jump,
            offset,
        });
    }
    Ok(ReceptiveField { layers })
}
