use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::NetConfig;
use super::model::Network;
use crate::error::{invalid, Error, Result};

const MAGIC: &[u8; 8] = b"PHNETCK1";

/// JSON header stored ahead of the raw parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub config: NetConfig,
    pub config_hash: String,
    pub seed: u64,
    /// Parameter count of each layer, in order.
    pub shapes: Vec<usize>,
}

/// Layout: magic, little-endian `u64` header length, JSON header,
/// then every parameter as a little-endian `f64`.
pub fn encode_checkpoint(network: &Network, seed: u64) -> Result<Vec<u8>> {
    let config = network.config().clone();
    let header = CheckpointHeader {
        config_hash: config.hash(),
        shapes: config.layers.iter().map(|l| l.param_count()).collect(),
        config,
        seed,
    };
    let json = serde_json::to_vec(&header)?;
    let mut out = Vec::with_capacity(16 + json.len() + 8 * network.params().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(json.len() as u64).to_le_bytes());
    out.extend_from_slice(&json);
    for p in network.params() {
        out.extend_from_slice(&p.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_checkpoint(bytes: &[u8]) -> Result<(Network, CheckpointHeader)> {
    if bytes.len() < 16 || &bytes[..8] != MAGIC {
        return Err(invalid!("not a checkpoint file"));
    }
    let len = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes")) as usize;
    let body = &bytes[16..];
    if body.len() < len || !(body.len() - len).is_multiple_of(8) {
        return Err(invalid!("truncated checkpoint"));
    }
    let header: CheckpointHeader = serde_json::from_slice(&body[..len])?;
    if header.config.hash() != header.config_hash {
        return Err(invalid!("checkpoint config hash mismatch"));
    }
    let params = body[len..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    let network = Network::new(header.config.clone(), params)?;
    Ok((network, header))
}

pub fn save_checkpoint(path: &Path, network: &Network, seed: u64) -> Result<()> {
    fs::write(path, encode_checkpoint(network, seed)?).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<(Network, CheckpointHeader)> {
    decode_checkpoint(&fs::read(path).map_err(|e| Error::io(path, e))?)
}
