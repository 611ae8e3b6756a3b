use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{dataset_auc, mean_std, require_cross_distribution, split_data, SplitData};
use crate::error::{Error, Result};
use crate::net::{train, DepthProfile, InputMode, NetConfig, TrainConfig};
use crate::synth::Corpus;

/// One trained model in the matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub phase: bool,
    pub shallow: bool,
    pub seed: u64,
    /// AUC on the validation split (training kernels).
    pub in_dist_auc: f64,
    /// AUC on the test split (held-out kernel).
    pub cross_dist_auc: f64,
    pub best_epoch: usize,
    pub epochs: usize,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationCell {
    pub phase: bool,
    pub shallow: bool,
    pub cross_auc_mean: f64,
    pub cross_auc_std: f64,
    pub in_auc_mean: f64,
    pub in_auc_std: f64,
    pub seeds: usize,
}

impl AblationCell {
    pub fn label(&self) -> String {
        cell_label(self.phase, self.shallow)
    }
}

fn cell_label(phase: bool, shallow: bool) -> String {
    let on = |b: bool| if b { "on" } else { "off" };
    format!("phase={},shallow={}", on(phase), on(shallow))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationMatrix {
    /// Cells in order (off,off), (off,on), (on,off), (on,on).
    pub cells: Vec<AblationCell>,
    pub runs: Vec<RunRecord>,
    pub phase_mode: crate::spectral::PhaseMode,
    pub corpus_seed: u64,
}

impl AblationMatrix {
    pub fn cell(&self, phase: bool, shallow: bool) -> &AblationCell {
        self.cells
            .iter()
            .find(|c| c.phase == phase && c.shallow == shallow)
            .expect("matrix holds all four cells")
    }

    pub fn write_cells_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "phase",
            "shallow",
            "seeds",
            "cross_dist_auc_mean",
            "cross_dist_auc_std",
            "in_dist_auc_mean",
            "in_dist_auc_std",
            "eval",
        ])?;
        for c in &self.cells {
            w.write_record([
                c.phase.to_string(),
                c.shallow.to_string(),
                c.seeds.to_string(),
                c.cross_auc_mean.to_string(),
                c.cross_auc_std.to_string(),
                c.in_auc_mean.to_string(),
                c.in_auc_std.to_string(),
                "held-out-kernel".to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<ablation>", e))?;
        Ok(())
    }

    pub fn write_runs_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for r in &self.runs {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| Error::io("<ablation>", e))?;
        Ok(())
    }
}

/// Trains {RGB, RGBP} × {deep, shallow} once per seed.
///
/// Cross-distribution AUC is measured on the test split, whose forgeries use
/// a kernel withheld from training; in-distribution AUC on the val split.
pub fn ablation_matrix(
    corpus: &Corpus,
    train_config: &TrainConfig,
    seeds: &[u64],
    on_run: &mut dyn FnMut(&RunRecord),
) -> Result<AblationMatrix> {
    require_cross_distribution(corpus)?;
    if seeds.is_empty() {
        return Err(Error::InvalidConfig("ablation needs at least one seed".into()));
    }
    let classes = corpus.class_count();
    let mut runs = Vec::new();
    for phase in [false, true] {
        let mode = if phase { InputMode::Rgbp } else { InputMode::Rgb };
        let data = split_data(corpus, mode, train_config.phase_mode)?;
        for shallow in [false, true] {
            let profile = if shallow {
                DepthProfile::Shallow
            } else {
                DepthProfile::Deep
            };
            for &seed in seeds {
                let record = run_cell(&data, mode, profile, classes, train_config, seed).map_err(|e| Error::Cell {
                    cell: format!("{},seed={seed}", cell_label(phase, shallow)),
                    source: Box::new(e),
                })?;
                let record = RunRecord {
                    phase,
                    shallow,
                    ..record
                };
                on_run(&record);
                runs.push(record);
            }
        }
    }
    let cells = [(false, false), (false, true), (true, false), (true, true)]
        .into_iter()
        .map(|(phase, shallow)| {
            let of = |f: fn(&RunRecord) -> f64| -> Vec<f64> {
                runs.iter()
                    .filter(|r| r.phase == phase && r.shallow == shallow)
                    .map(f)
                    .collect()
            };
            let (cross_auc_mean, cross_auc_std) = mean_std(&of(|r| r.cross_dist_auc));
            let (in_auc_mean, in_auc_std) = mean_std(&of(|r| r.in_dist_auc));
            AblationCell {
                phase,
                shallow,
                cross_auc_mean,
                cross_auc_std,
                in_auc_mean,
                in_auc_std,
                seeds: seeds.len(),
            }
        })
        .collect();
    Ok(AblationMatrix {
        cells,
        runs,
        phase_mode: train_config.phase_mode,
        corpus_seed: corpus.manifest.seed,
    })
}

fn run_cell(
    data: &SplitData,
    mode: InputMode,
    profile: DepthProfile,
    classes: usize,
    train_config: &TrainConfig,
    seed: u64,
) -> Result<RunRecord> {
    let net = NetConfig::with_profile(mode.channels(), profile, classes)?;
    let tc = TrainConfig {
        seed,
        ..train_config.clone()
    };
    let outcome = train(&net, &tc, &data.train, &data.val)?;
    Ok(RunRecord {
        phase: mode == InputMode::Rgbp,
        shallow: profile == DepthProfile::Shallow,
        seed,
        in_dist_auc: dataset_auc(&outcome.network, &data.val)?,
        cross_dist_auc: dataset_auc(&outcome.network, &data.test)?,
        best_epoch: outcome.best_epoch,
        epochs: outcome.log.len(),
        config_hash: net.hash(),
    })
}
