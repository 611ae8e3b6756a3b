use std::f64::consts::PI;
use std::path::Path;

use anyhow::Context;
use phasenet_core::spectral::{
    amplitude_only_raw, dft2_plane, luminance, normalize_min_max, phase_only_image, to_polar,
};
use phasenet_core::synth::texture_batch;
use phasenet_core::upsample::fig1_sweep;
use phasenet_core::{ImageGrid, PhaseMode, ResampleKind};

use crate::config::RunConfig;
use crate::output;

/// Moves the zero frequency to the centre of a row-major `h × w` map.
fn centered(h: usize, w: usize, values: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; h * w];
    for r in 0..h {
        for c in 0..w {
            out[((r + h / 2) % h) * w + (c + w / 2) % w] = values[r * w + c];
        }
    }
    out
}

fn save_map(out: &Path, name: &str, h: usize, w: usize, values: Vec<f64>) -> anyhow::Result<()> {
    let path = out.join(name);
    ImageGrid::new(h, w, 1, values)?.save_png(&path)?;
    output::announce(&path);
    Ok(())
}

pub fn decompose(image: &Path, mode: PhaseMode, out: &Path) -> anyhow::Result<()> {
    let img = ImageGrid::load_png(image).with_context(|| format!("cannot read image {}", image.display()))?;
    let stem = image.file_stem().and_then(|s| s.to_str()).unwrap_or("image");
    let (h, w) = (img.height(), img.width());
    let polar = to_polar(&dft2_plane(h, w, &luminance(&img)));

    let log_amp: Vec<f64> = polar.amplitude.iter().map(|a| a.ln_1p()).collect();
    save_map(
        out,
        &format!("{stem}_log_amplitude.png"),
        h,
        w,
        normalize_min_max(&centered(h, w, &log_amp)),
    )?;
    let phase: Vec<f64> = polar.phase.iter().map(|p| (p + PI) / (2.0 * PI)).collect();
    save_map(out, &format!("{stem}_phase.png"), h, w, centered(h, w, &phase))?;
    let amp_only = amplitude_only_raw(&img);
    save_map(
        out,
        &format!("{stem}_amplitude_only.png"),
        h,
        w,
        normalize_min_max(&amp_only.values),
    )?;
    let phase_only = phase_only_image(&img, mode);
    save_map(
        out,
        &format!("{stem}_phase_only_{mode}.png"),
        h,
        w,
        phase_only.into_data(),
    )?;

    let (path, writer) = output::create(out, &format!("{stem}_spectrum.csv"))?;
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(["row", "col", "amplitude", "phase"])?;
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            csv.write_record([
                r.to_string(),
                c.to_string(),
                polar.amplitude[i].to_string(),
                polar.phase[i].to_string(),
            ])?;
        }
    }
    csv.flush()?;
    output::announce(&path);
    Ok(())
}

pub fn fig1(
    config: &RunConfig,
    out: &Path,
    images: usize,
    size: usize,
    kind: ResampleKind,
    max_t: usize,
    mode: PhaseMode,
) -> anyhow::Result<()> {
    let corpus = texture_batch(images, size, config.corpus.seed).context("texture generation failed")?;
    let report = fig1_sweep(&corpus, kind, max_t, mode)?;
    println!("{:>2} {:>12} {:>12} {:>8}", "t", "phase_mean", "amp_mean", "ratio");
    for row in &report.rows {
        let ratio = if row.amp_mean > 0.0 {
            row.phase_mean / row.amp_mean
        } else {
            f64::NAN
        };
        println!(
            "{:>2} {:>12.6} {:>12.6} {:>8.3}",
            row.t, row.phase_mean, row.amp_mean, ratio
        );
    }
    let (path, writer) = output::create(out, &format!("fig1_{kind}_{mode}_seed{}.csv", config.corpus.seed))?;
    report.write_csv(writer)?;
    output::announce(&path);
    Ok(())
}
