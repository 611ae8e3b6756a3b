use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{dataset_auc, group_values, mean_std, require_cross_distribution, split_data};
use crate::error::{Error, Result};
use crate::net::{receptive_field, train, DepthProfile, InputMode, NetConfig, TrainConfig, DEEP_DEPTH};
use crate::synth::Corpus;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthRow {
    pub depth: usize,
    pub rf: usize,
    pub seed: u64,
    pub in_dist_auc: f64,
    pub cross_dist_auc: f64,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthSweep {
    pub input_mode: InputMode,
    pub rows: Vec<DepthRow>,
}

impl DepthSweep {
    /// `(depth, rf, in mean, in std, cross mean, cross std)` per depth.
    pub fn aggregates(&self) -> Vec<(usize, usize, f64, f64, f64, f64)> {
        let ins = group_values(self.rows.iter().map(|r| ((r.depth, r.rf), r.in_dist_auc)));
        let cross = group_values(self.rows.iter().map(|r| ((r.depth, r.rf), r.cross_dist_auc)));
        ins.into_iter()
            .zip(cross.into_values())
            .map(|(((depth, rf), i), c)| {
                let (im, is) = mean_std(&i);
                let (cm, cs) = mean_std(&c);
                (depth, rf, im, is, cm, cs)
            })
            .collect()
    }

    /// Per-seed rows followed by `mean` and `std` rows for every depth.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "depth",
            "rf",
            "seed",
            "in_dist_auc",
            "cross_dist_auc",
            "config_hash",
            "input_mode",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.depth.to_string(),
                r.rf.to_string(),
                r.seed.to_string(),
                r.in_dist_auc.to_string(),
                r.cross_dist_auc.to_string(),
                r.config_hash.clone(),
                self.input_mode.name().to_string(),
            ])?;
        }
        for (depth, rf, im, is, cm, cs) in self.aggregates() {
            let hash = self
                .rows
                .iter()
                .find(|r| r.depth == depth)
                .map(|r| r.config_hash.clone())
                .unwrap_or_default();
            for (label, i, c) in [("mean", im, cm), ("std", is, cs)] {
                w.write_record([
                    depth.to_string(),
                    rf.to_string(),
                    label.to_string(),
                    i.to_string(),
                    c.to_string(),
                    hash.clone(),
                    self.input_mode.name().to_string(),
                ])?;
            }
        }
        w.flush().map_err(|e| Error::io("<depth-sweep>", e))?;
        Ok(())
    }
}

/// Trains one network per (depth, seed); depth counts conv blocks.
pub fn depth_sweep(
    corpus: &Corpus,
    depths: &[usize],
    seeds: &[u64],
    mode: InputMode,
    train_config: &TrainConfig,
    on_row: &mut dyn FnMut(&DepthRow),
) -> Result<DepthSweep> {
    require_cross_distribution(corpus)?;
    if depths.is_empty() || seeds.is_empty() {
        return Err(Error::InvalidConfig("depth sweep needs depths and seeds".into()));
    }
    if let Some(d) = depths.iter().find(|&&d| d == 0 || d > DEEP_DEPTH) {
        return Err(Error::InvalidConfig(format!("depth {d} outside 1..={DEEP_DEPTH}")));
    }
    let data = split_data(corpus, mode, train_config.phase_mode)?;
    let mut rows = Vec::new();
    for &depth in depths {
        let net = NetConfig::with_profile(mode.channels(), DepthProfile::Custom(depth), corpus.class_count())?;
        let rf = receptive_field(&net)?.head().size;
        for &seed in seeds {
            let tc = TrainConfig {
                seed,
                ..train_config.clone()
            };
            let outcome = train(&net, &tc, &data.train, &data.val).map_err(|e| Error::Cell {
                cell: format!("depth={depth},seed={seed}"),
                source: Box::new(e),
            })?;
            let row = DepthRow {
                depth,
                rf,
                seed,
                in_dist_auc: dataset_auc(&outcome.network, &data.val)?,
                cross_dist_auc: dataset_auc(&outcome.network, &data.test)?,
                config_hash: net.hash(),
            };
            on_row(&row);
            rows.push(row);
        }
    }
    Ok(DepthSweep { input_mode: mode, rows })
}
