use std::path::Path;

use anyhow::{bail, Context};
use phasenet_core::metrics::{metrics_report, ReportContext};
use phasenet_core::net::{load_checkpoint, save_checkpoint, train as fit, write_log_csv, Dataset};
use phasenet_core::{Corpus, DepthProfile, EvalMode, InputMode, MetricsReport, NetConfig, Network, Split};

use super::corpus_for;
use crate::config::RunConfig;
use crate::output;

pub fn parse_profile(s: &str) -> anyhow::Result<DepthProfile> {
    match s {
        "shallow" => Ok(DepthProfile::Shallow),
        "deep" => Ok(DepthProfile::Deep),
        n => n
            .parse()
            .map(DepthProfile::Custom)
            .map_err(|_| anyhow::anyhow!("profile must be `shallow`, `deep` or a block count, got `{s}`")),
    }
}

fn profile_name(profile: DepthProfile) -> String {
    match profile {
        DepthProfile::Shallow => "shallow".into(),
        DepthProfile::Deep => "deep".into(),
        DepthProfile::Custom(d) => format!("depth-{d}"),
    }
}

fn input_mode_for(channels: usize) -> anyhow::Result<InputMode> {
    match channels {
        3 => Ok(InputMode::Rgb),
        4 => Ok(InputMode::Rgbp),
        c => bail!("checkpoint expects {c} input channels; only RGB (3) and RGBP (4) are supported"),
    }
}

fn eval_mode(corpus: &Corpus, split: Split) -> EvalMode {
    let held_out = corpus.manifest.kernels_in(Split::Test);
    if split == Split::Test && held_out.is_disjoint(&corpus.manifest.kernels_in(Split::Train)) && !held_out.is_empty() {
        EvalMode::CrossDistribution
    } else {
        EvalMode::InDistribution
    }
}

fn report(
    network: &Network,
    data: &Dataset,
    mode: InputMode,
    eval: EvalMode,
    seed: u64,
) -> anyhow::Result<MetricsReport> {
    let probabilities = network.predict(&data.inputs)?;
    let config_hash = network.config().hash();
    let profile = profile_name(network.config().profile);
    let ctx = ReportContext {
        input_mode: mode.name(),
        depth_profile: &profile,
        eval_mode: eval,
        seed,
        config_hash: &config_hash,
    };
    Ok(metrics_report(&probabilities, &data.labels, &ctx)?)
}

fn print_report(split: Split, r: &MetricsReport) {
    println!(
        "{} ({:?}, {} samples): acc {:.4}, auc {:.4}, recall {:?}",
        split.name(),
        r.eval_mode,
        r.samples,
        r.accuracy,
        r.auc,
        r.recall
    );
}

pub fn train(
    config: &RunConfig,
    out: &Path,
    corpus_path: Option<&Path>,
    mode: InputMode,
    profile: &str,
) -> anyhow::Result<()> {
    let profile = parse_profile(profile)?;
    let corpus = corpus_for(&config.corpus, corpus_path)?;
    let net = NetConfig::with_profile(mode.channels(), profile, corpus.class_count())?;
    let phase_mode = config.train.phase_mode;
    let train_set = Dataset::from_split(&corpus, Split::Train, mode, phase_mode)?;
    let val_set = Dataset::from_split(&corpus, Split::Val, mode, phase_mode)?;
    println!(
        "training {} {} ({} params, config {}) on {} images, seed {}",
        mode.name(),
        profile_name(profile),
        net.param_count(),
        net.hash(),
        train_set.len(),
        config.train.seed
    );
    let outcome = fit(&net, &config.train, &train_set, &val_set).context("training failed")?;
    println!("best epoch {} of {}", outcome.best_epoch, outcome.log.len());

    let ckpt = out.join("model.ckpt");
    save_checkpoint(&ckpt, &outcome.network, config.train.seed)?;
    output::announce(&ckpt);
    let (path, writer) = output::create(out, "train_log.csv")?;
    write_log_csv(&outcome.log, writer)?;
    output::announce(&path);
    output::announce(&output::write_json(out, "run_config.json", config)?);

    let val = report(
        &outcome.network,
        &val_set,
        mode,
        EvalMode::InDistribution,
        config.train.seed,
    )?;
    print_report(Split::Val, &val);
    output::announce(&output::write_json(out, "metrics_val.json", &val)?);
    Ok(())
}

pub fn eval(
    config: &RunConfig,
    out: &Path,
    checkpoint: &Path,
    corpus_path: Option<&Path>,
    split: Split,
) -> anyhow::Result<()> {
    let (network, header) =
        load_checkpoint(checkpoint).with_context(|| format!("cannot load checkpoint {}", checkpoint.display()))?;
    let mode = input_mode_for(header.config.input_channels)?;
    let corpus = corpus_for(&config.corpus, corpus_path)?;
    if corpus.class_count() != header.config.classes {
        bail!(
            "checkpoint predicts {} classes but the corpus has {}",
            header.config.classes,
            corpus.class_count()
        );
    }
    let data = Dataset::from_split(&corpus, split, mode, config.train.phase_mode)?;
    if data.is_empty() {
        bail!("split {} is empty", split.name());
    }
    let r = report(&network, &data, mode, eval_mode(&corpus, split), header.seed)?;
    print_report(split, &r);
    output::announce(&output::write_json(out, &format!("metrics_{}.json", split.name()), &r)?);

    let (path, writer) = output::create(out, &format!("recall_{}.csv", split.name()))?;
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(["class", "samples", "recall"])?;
    for (class, recall) in &r.recall {
        let samples = r.per_class_samples.get(class).copied().unwrap_or(0);
        csv.write_record([class.to_string(), samples.to_string(), recall.to_string()])?;
    }
    csv.flush()?;
    output::announce(&path);
    Ok(())
}
