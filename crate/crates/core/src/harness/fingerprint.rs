use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spectral::{phase_only_image, ImageGrid, PhaseMode};
use crate::synth::Corpus;

pub const MIN_GROUP_SIZE: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct GroupFingerprint {
    pub group: String,
    pub count: usize,
    /// Pixel-wise mean of the members' phase-only images.
    pub mean_phase: ImageGrid,
    /// Distance between the fingerprints of the group's even- and odd-indexed halves.
    pub intra_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FingerprintReport {
    pub phase_mode: PhaseMode,
    pub groups: Vec<String>,
    pub counts: Vec<usize>,
    pub mean_intra: f64,
    pub mean_inter: f64,
    /// `mean_inter / mean_intra`.
    pub distinguishability: f64,
    /// Half-fingerprint distances between groups, keyed `a|b`.
    pub inter: BTreeMap<String, f64>,
}

impl FingerprintReport {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["pair", "distance"])?;
        for (pair, d) in &self.inter {
            w.write_record([pair.clone(), d.to_string()])?;
        }
        w.write_record(["mean_intra".to_string(), self.mean_intra.to_string()])?;
        w.write_record(["mean_inter".to_string(), self.mean_inter.to_string()])?;
        w.write_record(["distinguishability".to_string(), self.distinguishability.to_string()])?;
        w.flush().map_err(|e| Error::io("<fingerprint>", e))?;
        Ok(())
    }
}

fn mean_image(maps: &[&ImageGrid]) -> Result<ImageGrid> {
    let first = maps.first().ok_or_else(|| invalid!("cannot average zero images"))?;
    let mut acc = vec![0.0; first.data().len()];
    for m in maps {
        if !m.same_shape(first) {
            return Err(invalid!("fingerprint group mixes image sizes"));
        }
        for (a, v) in acc.iter_mut().zip(m.data()) {
            *a += v;
        }
    }
    let n = maps.len() as f64;
    ImageGrid::from_clamped(
        first.height(),
        first.width(),
        1,
        acc.into_iter().map(|a| a / n).collect(),
    )
}

fn l2(a: &ImageGrid, b: &ImageGrid) -> f64 {
    a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Per-group mean phase images plus a separability score.
///
/// Each group is split into even- and odd-indexed halves. Intra-group distance
/// compares a group's two half-fingerprints; inter-group distance compares
/// half-fingerprints of different groups, so both use equally noisy means.
pub fn phase_fingerprint(
    groups: &BTreeMap<String, Vec<&ImageGrid>>,
    mode: PhaseMode,
) -> Result<(Vec<GroupFingerprint>, FingerprintReport)> {
    if groups.len() < 2 {
        return Err(invalid!("fingerprints need at least two groups"));
    }
    let mut fingerprints = Vec::new();
    let mut halves = Vec::new();
    for (name, images) in groups {
        if images.len() < MIN_GROUP_SIZE {
            return Err(invalid!(
                "group {name} has {} images, need at least {MIN_GROUP_SIZE}",
                images.len()
            ));
        }
        let maps: Vec<ImageGrid> = images.iter().map(|img| phase_only_image(img, mode)).collect();
        let refs: Vec<&ImageGrid> = maps.iter().collect();
        let even: Vec<&ImageGrid> = refs.iter().step_by(2).copied().collect();
        let odd: Vec<&ImageGrid> = refs.iter().skip(1).step_by(2).copied().collect();
        let (a, b) = (mean_image(&even)?, mean_image(&odd)?);
        fingerprints.push(GroupFingerprint {
            group: name.clone(),
            count: images.len(),
            mean_phase: mean_image(&refs)?,
            intra_distance: l2(&a, &b),
        });
        halves.push((a, b));
    }
    let mut inter = BTreeMap::new();
    for i in 0..halves.len() {
        for j in i + 1..halves.len() {
            let (gi, gj) = (&halves[i], &halves[j]);
            let d = (l2(&gi.0, &gj.0) + l2(&gi.0, &gj.1) + l2(&gi.1, &gj.0) + l2(&gi.1, &gj.1)) / 4.0;
            inter.insert(format!("{}|{}", fingerprints[i].group, fingerprints[j].group), d);
        }
    }
    let mean_intra = fingerprints.iter().map(|f| f.intra_distance).sum::<f64>() / fingerprints.len() as f64;
    let mean_inter = inter.values().sum::<f64>() / inter.len() as f64;
    let report = FingerprintReport {
        phase_mode: mode,
        groups: fingerprints.iter().map(|f| f.group.clone()).collect(),
        counts: fingerprints.iter().map(|f| f.count).collect(),
        mean_intra,
        mean_inter,
        distinguishability: mean_inter / mean_intra,
        inter,
    };
    Ok((fingerprints, report))
}

/// Images keyed by recipe group (`pristine` or the forging kernel).
pub fn group_by_recipe(corpus: &Corpus) -> BTreeMap<String, Vec<&ImageGrid>> {
    let mut groups: BTreeMap<String, Vec<&ImageGrid>> = BTreeMap::new();
    for (entry, image) in corpus.manifest.entries.iter().zip(&corpus.images) {
        groups.entry(entry.group().to_string()).or_default().push(image);
    }
    groups
}
