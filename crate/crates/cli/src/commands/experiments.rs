use std::path::Path;

use phasenet_core::harness::{ablation_matrix, depth_sweep, group_by_recipe, phase_fingerprint};
use phasenet_core::{InputMode, PhaseMode};

use super::{corpus_for, cross_corpus_for};
use crate::config::RunConfig;
use crate::output;

pub fn ablate(config: &RunConfig, out: &Path, corpus_path: Option<&Path>) -> anyhow::Result<()> {
    let corpus = cross_corpus_for(config, corpus_path)?;
    let matrix = ablation_matrix(&corpus, &config.train, &config.seeds, &mut |r| {
        println!(
            "phase={} shallow={} seed={}: in-dist auc {:.4}, cross-dist auc {:.4}, best epoch {}",
            r.phase, r.shallow, r.seed, r.in_dist_auc, r.cross_dist_auc, r.best_epoch
        );
    })?;
    for cell in &matrix.cells {
        println!(
            "{:<16} cross-dist auc {:.4} ± {:.4}, in-dist auc {:.4} ± {:.4}",
            cell.label(),
            cell.cross_auc_mean,
            cell.cross_auc_std,
            cell.in_auc_mean,
            cell.in_auc_std
        );
    }
    let (path, writer) = output::create(out, "ablation_cells.csv")?;
    matrix.write_cells_csv(writer)?;
    output::announce(&path);
    let (path, writer) = output::create(out, "ablation_runs.csv")?;
    matrix.write_runs_csv(writer)?;
    output::announce(&path);
    Ok(())
}

pub fn depth(
    config: &RunConfig,
    out: &Path,
    corpus_path: Option<&Path>,
    mode: InputMode,
    depths: Option<Vec<usize>>,
) -> anyhow::Result<()> {
    let corpus = cross_corpus_for(config, corpus_path)?;
    let depths = depths.unwrap_or_else(|| config.depths.clone());
    let sweep = depth_sweep(&corpus, &depths, &config.seeds, mode, &config.train, &mut |row| {
        println!(
            "depth {} (rf {}) seed {}: in-dist auc {:.4}, cross-dist auc {:.4}",
            row.depth, row.rf, row.seed, row.in_dist_auc, row.cross_dist_auc
        );
    })?;
    let (path, writer) = output::create(out, &format!("depth_sweep_{}.csv", mode.name()))?;
    sweep.write_csv(writer)?;
    output::announce(&path);
    Ok(())
}

pub fn fingerprint(config: &RunConfig, out: &Path, corpus_path: Option<&Path>, mode: PhaseMode) -> anyhow::Result<()> {
    let corpus = corpus_for(&config.corpus, corpus_path)?;
    let groups = group_by_recipe(&corpus);
    let (fingerprints, report) = phase_fingerprint(&groups, mode)?;
    for f in &fingerprints {
        let path = out.join(format!("fingerprint_{}_{mode}.png", f.group));
        f.mean_phase.save_png(&path)?;
        output::announce(&path);
    }
    println!(
        "{} groups {:?}: mean inter {:.4}, mean intra {:.4}, ratio {:.3}",
        mode, report.groups, report.mean_inter, report.mean_intra, report.distinguishability
    );
    let (path, writer) = output::create(out, &format!("fingerprint_{mode}.csv"))?;
    report.write_csv(writer)?;
    output::announce(&path);
    Ok(())
}
