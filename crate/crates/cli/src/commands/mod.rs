pub mod corpus;
pub mod experiments;
pub mod spectrum;
pub mod train;
pub mod verify;

use std::path::Path;

use anyhow::Context;
use phasenet_core::synth::{generate_corpus, load_corpus};
use phasenet_core::{Corpus, CorpusConfig, ResampleKind};

use crate::config::RunConfig;

/// Loads `path` when given, otherwise generates the configured corpus.
pub fn corpus_for(corpus: &CorpusConfig, path: Option<&Path>) -> anyhow::Result<Corpus> {
    match path {
        Some(path) => load_corpus(path).with_context(|| format!("cannot load corpus {}", path.display())),
        None => generate_corpus(corpus).context("corpus generation failed"),
    }
}

/// Like [`corpus_for`], but a generated corpus withholds bicubic forgeries
/// from training unless the configuration names its own held-out kernels.
pub fn cross_corpus_for(config: &RunConfig, path: Option<&Path>) -> anyhow::Result<Corpus> {
    let mut corpus = config.corpus.clone();
    if path.is_none() && corpus.held_out_kernels.is_none() {
        eprintln!("note: holding out bicubic forgeries for the test split");
        corpus.held_out_kernels = Some(vec![ResampleKind::Bicubic]);
    }
    corpus_for(&corpus, path)
}
