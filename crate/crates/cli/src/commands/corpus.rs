use std::path::Path;

use anyhow::Context;
use phasenet_core::synth::build_corpus;
use phasenet_core::{ResampleKind, Split};

use crate::config::RunConfig;
use crate::output;

pub fn build(
    config: &RunConfig,
    out: &Path,
    cross_distribution: bool,
    per_class: Option<usize>,
    size: Option<usize>,
) -> anyhow::Result<()> {
    let mut corpus = config.corpus.clone();
    if cross_distribution && corpus.held_out_kernels.is_none() {
        corpus.held_out_kernels = Some(vec![ResampleKind::Bicubic]);
    }
    corpus.per_class = per_class.unwrap_or(corpus.per_class);
    corpus.size = size.unwrap_or(corpus.size);
    corpus.validate().context("corpus configuration")?;
    let root = out.join("corpus");
    let manifest = build_corpus(&corpus, &root).context("corpus build failed")?;
    manifest.audit().context("corpus audit failed")?;
    for split in Split::ALL {
        let count = manifest.entries.iter().filter(|e| e.split == split).count();
        let kernels: Vec<&str> = manifest.kernels_in(split).iter().map(|k| k.name()).collect();
        println!("{:<5} {count:>6} images, forgery kernels {kernels:?}", split.name());
    }
    output::announce(&root.join("manifest.json"));
    Ok(())
}
