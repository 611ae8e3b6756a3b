use std::io::Write;

use serde::{Deserialize, Serialize};

use super::resample::{ResampleKind, ResampleOp};
use crate::error::{invalid, Error, Result};
use crate::spectral::{amplitude_only_raw, normalize_min_max, phase_only_raw, ImageGrid, PhaseMode};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub t: usize,
    pub phase_mean: f64,
    pub phase_var: f64,
    pub amp_mean: f64,
    pub amp_var: f64,
}

/// Per up-sampling count `t`, statistics of `|Δ|` between the normalized
/// phase-only (resp. amplitude-only) maps of the original and the `t`-times
/// resampled image, averaged over the corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDiffReport {
    pub kind: ResampleKind,
    pub phase_mode: PhaseMode,
    pub images: usize,
    pub rows: Vec<SweepRow>,
}

impl SpectralDiffReport {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "phase_mean", "phase_var", "amp_mean", "amp_var"])?;
        for r in &self.rows {
            w.write_record([
                r.t.to_string(),
                r.phase_mean.to_string(),
                r.phase_var.to_string(),
                r.amp_mean.to_string(),
                r.amp_var.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

fn spectral_maps(image: &ImageGrid, mode: PhaseMode) -> (Vec<f64>, Vec<f64>) {
    (
        normalize_min_max(&phase_only_raw(image, mode).values),
        normalize_min_max(&amplitude_only_raw(image).values),
    )
}

fn abs_diff_stats(a: &[f64], b: &[f64]) -> (f64, f64) {
    let n = a.len() as f64;
    let mean = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / n;
    let var = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            let d = (x - y).abs() - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    (mean, var)
}

/// One step up-samples by 2 with `kind` and decimates back to the original grid.
pub fn fig1_sweep(
    corpus: &[ImageGrid],
    kind: ResampleKind,
    max_t: usize,
    mode: PhaseMode,
) -> Result<SpectralDiffReport> {
    if corpus.is_empty() {
        return Err(invalid!("sweep corpus is empty"));
    }
    if !kind.is_upsampler() {
        return Err(invalid!("sweep kind must be an up-sampler, got {kind}"));
    }
    let up = ResampleOp::up(kind);
    let down = ResampleOp::decimate();
    let mut sums = vec![[0.0f64; 4]; max_t + 1];
    for image in corpus {
        let (p0, a0) = spectral_maps(image, mode);
        let mut current = image.clone();
        for sum in sums.iter_mut().skip(1) {
            current = down.apply(&up.apply(&current)?)?;
            let (p, a) = spectral_maps(&current, mode);
            let (pm, pv) = abs_diff_stats(&p0, &p);
            let (am, av) = abs_diff_stats(&a0, &a);
            sum[0] += pm;
            sum[1] += pv;
            sum[2] += am;
            sum[3] += av;
        }
    }
    let n = corpus.len() as f64;
    let rows = sums
        .iter()
        .enumerate()
        .map(|(t, s)| SweepRow {
            t,
            phase_mean: s[0] / n,
            phase_var: s[1] / n,
            amp_mean: s[2] / n,
            amp_var: s[3] / n,
        })
        .collect();
    Ok(SpectralDiffReport {
        kind,
        phase_mode: mode,
        images: corpus.len(),
        rows,
    })
}
