//! Classification metrics: accuracy, exact ROC AUC, per-class recall.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a == 0 {
        return Err(invalid!("metrics need at least one sample"));
    }
    if a != b {
        return Err(invalid!("{a} predictions for {b} labels"));
    }
    Ok(())
}

/// Fraction of rows whose argmax equals the label.
pub fn accuracy(probabilities: &[Vec<f64>], labels: &[usize]) -> Result<f64> {
    check_lengths(probabilities.len(), labels.len())?;
    let correct = probabilities
        .iter()
        .zip(labels)
        .filter(|(p, &y)| argmax(p) == y)
        .count();
    Ok(correct as f64 / labels.len() as f64)
}

/// Mann-Whitney AUC: share of (positive, negative) pairs ranked correctly,
/// ties counting one half. Computed from mid-ranks in `O(n log n)`.
pub fn auc_roc(scores: &[f64], positive: &[bool]) -> Result<f64> {
    check_lengths(scores.len(), positive.len())?;
    if scores.iter().any(|s| s.is_nan()) {
        return Err(invalid!("scores contain NaN"));
    }
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::UndefinedMetric("AUC needs both classes present".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // twice the rank sum keeps mid-ranks integral
    let mut twice_rank_sum: u64 = 0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        // ranks start..end (0-based) share the mid-rank (start + end + 1) / 2 (1-based)
        let twice_mid = (start + end + 1) as u64;
        let pos_in_group = order[start..end].iter().filter(|&&i| positive[i]).count() as u64;
        twice_rank_sum += twice_mid * pos_in_group;
        start = end;
    }
    let n_pos = n_pos as u64;
    let twice_u = twice_rank_sum - n_pos * (n_pos + 1);
    Ok(twice_u as f64 / (2 * n_pos * n_neg as u64) as f64)
}

/// Recall of every class that occurs in `labels`; absent classes are omitted.
pub fn recall_per_class(predictions: &[usize], labels: &[usize], classes: usize) -> Result<BTreeMap<usize, f64>> {
    check_lengths(predictions.len(), labels.len())?;
    if let Some(&c) = labels.iter().chain(predictions).find(|&&c| c >= classes) {
        return Err(invalid!("class {c} out of range for {classes} classes"));
    }
    let mut totals = vec![0usize; classes];
    let mut hits = vec![0usize; classes];
    for (&p, &y) in predictions.iter().zip(labels) {
        totals[y] += 1;
        if p == y {
            hits[y] += 1;
        }
    }
    Ok((0..classes)
        .filter(|&c| totals[c] > 0)
        .map(|c| (c, hits[c] as f64 / totals[c] as f64))
        .collect())
}

/// Which held-out setting a report describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalMode {
    /// Kernels seen in training.
    InDistribution,
    /// Forgeries made with a resampling kernel withheld from training.
    CrossDistribution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    /// Pristine (class 0) against everything else, scored by `1 - p(pristine)`.
    pub auc: f64,
    pub recall: BTreeMap<usize, f64>,
    pub samples: usize,
    pub per_class_samples: BTreeMap<usize, usize>,
    pub input_mode: String,
    pub depth_profile: String,
    pub eval_mode: EvalMode,
    pub seed: u64,
    pub config_hash: String,
}

/// Scores used for AUC: probability mass away from the pristine class.
pub fn forged_scores(probabilities: &[Vec<f64>]) -> Vec<f64> {
    probabilities.iter().map(|p| 1.0 - p[0]).collect()
}

pub struct ReportContext<'a> {
    pub input_mode: &'a str,
    pub depth_profile: &'a str,
    pub eval_mode: EvalMode,
    pub seed: u64,
    pub config_hash: &'a str,
}

pub fn metrics_report(probabilities: &[Vec<f64>], labels: &[usize], ctx: &ReportContext<'_>) -> Result<MetricsReport> {
    let classes = probabilities.first().map_or(0, Vec::len);
    let predictions: Vec<usize> = probabilities.iter().map(|p| argmax(p)).collect();
    let positive: Vec<bool> = labels.iter().map(|&y| y != 0).collect();
    let mut per_class_samples = BTreeMap::new();
    for &y in labels {
        *per_class_samples.entry(y).or_insert(0) += 1;
    }
    Ok(MetricsReport {
        accuracy: accuracy(probabilities, labels)?,
        auc: auc_roc(&forged_scores(probabilities), &positive)?,
        recall: recall_per_class(&predictions, labels, classes)?,
        samples: labels.len(),
        per_class_samples,
        input_mode: ctx.input_mode.to_string(),
        depth_profile: ctx.depth_profile.to_string(),
        eval_mode: ctx.eval_mode,
        seed: ctx.seed,
        config_hash: ctx.config_hash.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn brute_auc(scores: &[f64], positive: &[bool]) -> f64 {
        let mut num = 0.0;
        let mut pairs = 0.0;
        for (i, &si) in scores.iter().enumerate() {
            for (j, &sj) in scores.iter().enumerate() {
                if positive[i] && !positive[j] {
                    pairs += 1.0;
                    num += if si > sj {
                        1.0
                    } else if si == sj {
                        0.5
                    } else {
                        0.0
                    };
                }
            }
        }
        num / pairs
    }

    #[test]
    fn auc_examples() {
        assert_eq!(auc_roc(&[0.9, 0.1], &[true, false]).unwrap(), 1.0);
        let auc = auc_roc(&[0.8, 0.4, 0.6, 0.2], &[true, true, false, false]).unwrap();
        assert_eq!(auc, 0.75);
        assert_eq!(
            auc_roc(&[0.3; 6], &[true, false, true, false, false, true]).unwrap(),
            0.5
        );
    }

    #[test]
    fn auc_single_class_is_undefined() {
        assert!(matches!(
            auc_roc(&[0.1, 0.2], &[true, true]),
            Err(Error::UndefinedMetric(_))
        ));
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[vec![0.9, 0.1], vec![0.2, 0.8]], &[0, 1]).unwrap(), 1.0);
        assert_eq!(accuracy(&[vec![0.1, 0.9], vec![0.8, 0.2]], &[0, 1]).unwrap(), 0.0);
        assert!(accuracy(&[], &[]).is_err());
    }

    #[test]
    fn recall_examples() {
        let r = recall_per_class(&[0, 1, 2], &[0, 1, 2], 5).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.values().all(|&v| v == 1.0));
        let r = recall_per_class(&[0, 0, 0], &[0, 1, 1], 2).unwrap();
        assert_eq!(r[&1], 0.0);
        assert!(!r.contains_key(&3));
    }

    fn scored_labels() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
        (2usize..50)
            .prop_flat_map(|n| {
                (
                    prop::collection::vec(0u8..12, n),
                    prop::collection::vec(any::<bool>(), n),
                )
            })
            .prop_filter("both classes", |(_, l)| l.iter().any(|&b| b) && l.iter().any(|&b| !b))
            .prop_map(|(s, l)| (s.into_iter().map(|v| v as f64 / 11.0).collect(), l))
    }

    proptest! {
        #[test]
        fn auc_matches_brute_force((scores, labels) in scored_labels()) {
            prop_assert_eq!(auc_roc(&scores, &labels).unwrap(), brute_auc(&scores, &labels));
        }

        #[test]
        fn auc_is_rank_invariant((scores, labels) in scored_labels()) {
            let warped: Vec<f64> = scores.iter().map(|s| (3.0 * s).exp() - 7.0).collect();
            prop_assert_eq!(auc_roc(&scores, &labels).unwrap(), auc_roc(&warped, &labels).unwrap());
        }

        #[test]
        fn auc_of_negated_scores_complements(labels in prop::collection::vec(any::<bool>(), 2..40)) {
            prop_assume!(labels.iter().any(|&b| b) && labels.iter().any(|&b| !b));
            let scores: Vec<f64> = (0..labels.len()).map(|i| ((i * 37) % 101) as f64).collect();
            let negated: Vec<f64> = scores.iter().map(|s| -s).collect();
            let sum = auc_roc(&scores, &labels).unwrap() + auc_roc(&negated, &labels).unwrap();
            prop_assert!((sum - 1.0).abs() < 1e-12);
        }

        #[test]
        fn balanced_recall_mean_is_accuracy(preds in prop::collection::vec(0usize..3, 12)) {
            let labels: Vec<usize> = (0..12).map(|i| i % 3).collect();
            let probs: Vec<Vec<f64>> = preds.iter().map(|&p| {
                let mut v = vec![0.0; 3];
                v[p] = 1.0;
                v
            }).collect();
            let recall = recall_per_class(&preds, &labels, 3).unwrap();
            let mean = recall.values().sum::<f64>() / 3.0;
            prop_assert!((mean - accuracy(&probs, &labels).unwrap()).abs() < 1e-12);
        }
    }
}
