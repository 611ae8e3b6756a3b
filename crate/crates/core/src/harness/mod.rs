//! Trained comparisons over a corpus: ablation matrix, depth sweep,
//! and averaged phase fingerprints.

mod ablation;
mod depth;
mod fingerprint;

pub use ablation::{ablation_matrix, AblationCell, AblationMatrix, RunRecord};
pub use depth::{depth_sweep, DepthRow, DepthSweep};
pub use fingerprint::{group_by_recipe, phase_fingerprint, FingerprintReport, GroupFingerprint, MIN_GROUP_SIZE};

use std::collections::BTreeMap;

use crate::error::{invalid, Result};
use crate::metrics::{auc_roc, forged_scores};
use crate::net::{Dataset, InputMode, Network};
use crate::spectral::PhaseMode;
use crate::synth::{Corpus, Split};

/// Pristine-vs-forged AUC of `network` on `data`.
pub fn dataset_auc(network: &Network, data: &Dataset) -> Result<f64> {
    let probs = network.predict(&data.inputs)?;
    let positive: Vec<bool> = data.labels.iter().map(|&y| y != 0).collect();
    auc_roc(&forged_scores(&probs), &positive)
}

/// Train/val/test inputs for one input mode.
pub(crate) struct SplitData {
    pub train: Dataset,
    pub val: Dataset,
    pub test: Dataset,
}

pub(crate) fn split_data(corpus: &Corpus, mode: InputMode, phase_mode: PhaseMode) -> Result<SplitData> {
    Ok(SplitData {
        train: Dataset::from_split(corpus, Split::Train, mode, phase_mode)?,
        val: Dataset::from_split(corpus, Split::Val, mode, phase_mode)?,
        test: Dataset::from_split(corpus, Split::Test, mode, phase_mode)?,
    })
}

/// Rejects corpora whose test split reuses the training kernels.
pub(crate) fn require_cross_distribution(corpus: &Corpus) -> Result<()> {
    let train = corpus.manifest.kernels_in(Split::Train);
    let test = corpus.manifest.kernels_in(Split::Test);
    if test.is_empty() || !test.is_disjoint(&train) {
        return Err(invalid!(
            "corpus is not in cross-distribution mode (train kernels {train:?}, test kernels {test:?})"
        ));
    }
    Ok(())
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub(crate) fn group_values<K: Ord + Clone>(rows: impl Iterator<Item = (K, f64)>) -> BTreeMap<K, Vec<f64>> {
    let mut out: BTreeMap<K, Vec<f64>> = BTreeMap::new();
    for (k, v) in rows {
        out.entry(k).or_default().push(v);
    }
    out
}
