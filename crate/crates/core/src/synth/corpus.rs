use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::compress::CompressionLevel;
use super::forgery::{apply_forgery, EllipseMask, ForgeryRecipe, Label, RecipeDescriptor};
use super::texture::{gen_texture, random_texture, TextureSpec, SUPPORTED_SIZES};
use crate::error::{invalid, Error, Result};
use crate::spectral::ImageGrid;
use crate::upsample::ResampleKind;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Kernel order used for per-kernel class indices (class 0 is pristine).
pub const CLASS_KERNELS: [ResampleKind; 4] = [
    ResampleKind::Nearest,
    ResampleKind::Bilinear,
    ResampleKind::Bicubic,
    ResampleKind::ZeroInsert,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelScheme {
    /// 0 = pristine, 1 = forged.
    #[default]
    Binary,
    /// 0 = pristine, `1 + i` for the i-th entry of [`CLASS_KERNELS`].
    PerKernel,
}

impl LabelScheme {
    pub fn class_count(self) -> usize {
        match self {
            LabelScheme::Binary => 2,
            LabelScheme::PerKernel => 1 + CLASS_KERNELS.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusConfig {
    pub seed: u64,
    pub size: usize,
    /// Samples per class across all splits.
    pub per_class: usize,
    /// Train and val fractions; test takes the rest.
    pub train_fraction: f64,
    pub val_fraction: f64,
    pub train_kernels: Vec<ResampleKind>,
    /// When set, forged test samples use only these kernels.
    pub held_out_kernels: Option<Vec<ResampleKind>>,
    pub repeats: Vec<usize>,
    /// Levels cycled over samples of each class and split.
    pub compression: Vec<CompressionLevel>,
    pub labels: LabelScheme,
    /// Std of per-pixel Gaussian grain added to every source texture,
    /// standing in for camera noise that decoders do not reproduce.
    pub sensor_grain: f64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            size: 64,
            per_class: 2000,
            train_fraction: 0.7,
            val_fraction: 0.15,
            train_kernels: vec![ResampleKind::Bilinear, ResampleKind::Nearest],
            held_out_kernels: None,
            repeats: vec![1, 2, 3],
            compression: vec![CompressionLevel::Light],
            labels: LabelScheme::Binary,
            sensor_grain: 0.02,
        }
    }
}

impl CorpusConfig {
    /// Train on bilinear/nearest, test on bicubic only.
    pub fn cross_distribution(seed: u64, per_class: usize) -> Self {
        Self {
            seed,
            per_class,
            held_out_kernels: Some(vec![ResampleKind::Bicubic]),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !SUPPORTED_SIZES.contains(&self.size) {
            return Err(invalid!("corpus image size {} not supported", self.size));
        }
        if self.per_class < 3 {
            return Err(invalid!("need at least 3 samples per class"));
        }
        let f = (self.train_fraction, self.val_fraction);
        if !(f.0 > 0.0 && f.1 >= 0.0 && f.0 + f.1 < 1.0) {
            return Err(invalid!("invalid split fractions {f:?}"));
        }
        if self.train_kernels.is_empty() || self.repeats.is_empty() || self.compression.is_empty() {
            return Err(invalid!("kernels, repeats and compression levels must be non-empty"));
        }
        let all_kernels = self.train_kernels.iter().chain(self.held_out_kernels.iter().flatten());
        for k in all_kernels {
            if !k.is_upsampler() {
                return Err(invalid!("{k} is not an up-sampling kernel"));
            }
        }
        if self.held_out_kernels.as_ref().is_some_and(|k| k.is_empty()) {
            return Err(invalid!("held-out kernel list is empty"));
        }
        if !(0.0..=0.5).contains(&self.sensor_grain) {
            return Err(invalid!("sensor grain {} outside [0, 0.5]", self.sensor_grain));
        }
        if self.repeats.contains(&0) {
            return Err(invalid!("repeat counts must be positive"));
        }
        if self.repeats.iter().any(|&r| r >= 8 || self.size >> r < 4) {
            return Err(invalid!(
                "{}px images cannot be decimated {:?} times",
                self.size,
                self.repeats
            ));
        }
        Ok(())
    }

    pub fn split_sizes(&self) -> [usize; 3] {
        let train = (self.per_class as f64 * self.train_fraction).floor() as usize;
        let val = (self.per_class as f64 * self.val_fraction).floor() as usize;
        [train, val, self.per_class - train - val]
    }

    fn kernels_for(&self, split: Split) -> &[ResampleKind] {
        match (split, &self.held_out_kernels) {
            (Split::Test, Some(held)) => held,
            _ => &self.train_kernels,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: usize,
    /// Relative to the corpus root.
    pub path: String,
    pub label: Label,
    pub class: usize,
    pub split: Split,
    pub seed: u64,
    pub texture: TextureSpec,
    pub compression: CompressionLevel,
    pub recipe: Option<RecipeDescriptor>,
}

impl ManifestEntry {
    /// Grouping key: `pristine` or the forging kernel name.
    pub fn group(&self) -> &'static str {
        self.recipe.map_or("pristine", |r| r.kernel.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub seed: u64,
    pub config: CorpusConfig,
    pub entries: Vec<ManifestEntry>,
}

impl CorpusManifest {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Checks id uniqueness, recipe/label consistency and per-split balance.
    pub fn audit(&self) -> Result<()> {
        let mut ids = BTreeSet::new();
        for e in &self.entries {
            if !ids.insert(e.id) {
                return Err(invalid!("duplicate id {}", e.id));
            }
            if (e.label == Label::Forged) != e.recipe.is_some() {
                return Err(invalid!("entry {} label/recipe mismatch", e.id));
            }
        }
        for split in Split::ALL {
            let (p, f) = self
                .entries
                .iter()
                .filter(|e| e.split == split)
                .fold((0, 0), |(p, f), e| match e.label {
                    Label::Pristine => (p + 1, f),
                    Label::Forged => (p, f + 1),
                });
            let total = (p + f).max(1) as f64;
            if ((p as f64 - f as f64) / total).abs() > 0.01 {
                return Err(invalid!(
                    "split {} unbalanced: {p} pristine vs {f} forged",
                    split.name()
                ));
            }
        }
        Ok(())
    }

    pub fn kernels_in(&self, split: Split) -> BTreeSet<ResampleKind> {
        self.entries
            .iter()
            .filter(|e| e.split == split)
            .filter_map(|e| e.recipe.map(|r| r.kernel))
            .collect()
    }
}

/// Manifest plus decoded images (8-bit quantized), indexed like `manifest.entries`.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub manifest: CorpusManifest,
    pub images: Vec<ImageGrid>,
}

impl Corpus {
    pub fn split(&self, split: Split) -> impl Iterator<Item = (&ManifestEntry, &ImageGrid)> {
        self.manifest
            .entries
            .iter()
            .zip(&self.images)
            .filter(move |(e, _)| e.split == split)
    }

    pub fn class_count(&self) -> usize {
        self.manifest.config.labels.class_count()
    }
}

/// SplitMix64 finalizer, used to derive independent per-sample seeds.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn add_grain(image: &ImageGrid, sigma: f64, seed: u64) -> Result<ImageGrid> {
    if sigma == 0.0 {
        return Ok(image.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = image
        .data()
        .iter()
        .map(|&v| v + sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    ImageGrid::from_clamped(image.height(), image.width(), image.channels(), data)
}

fn class_of(labels: LabelScheme, recipe: Option<&RecipeDescriptor>) -> usize {
    match (labels, recipe) {
        (_, None) => 0,
        (LabelScheme::Binary, Some(_)) => 1,
        (LabelScheme::PerKernel, Some(r)) => 1 + CLASS_KERNELS.iter().position(|&k| k == r.kernel).unwrap_or(0),
    }
}

/// Builds the whole corpus in memory. Pure function of `config`.
pub fn generate_corpus(config: &CorpusConfig) -> Result<Corpus> {
    config.validate()?;
    let sizes = config.split_sizes();
    let mut entries = Vec::with_capacity(2 * config.per_class);
    let mut images = Vec::with_capacity(2 * config.per_class);
    for (split, &count) in Split::ALL.iter().zip(&sizes) {
        let kernels = config.kernels_for(*split);
        for label in [Label::Pristine, Label::Forged] {
            for j in 0..count {
                let id = entries.len();
                let seed = mix_seed(config.seed, id as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let texture = random_texture(config.size, mix_seed(seed, 1), &mut rng);
                let compression = config.compression[j % config.compression.len()];
                let recipe = (label == Label::Forged).then(|| RecipeDescriptor {
                    kernel: kernels[j % kernels.len()],
                    repeats: config.repeats[(j / kernels.len()) % config.repeats.len()],
                    mask: EllipseMask::random(&mut rng),
                    compression,
                });
                let base = add_grain(&gen_texture(&texture)?, config.sensor_grain, mix_seed(seed, 2))?;
                let forgery = match &recipe {
                    Some(r) => r.to_recipe(config.size, config.size)?,
                    None => ForgeryRecipe::pristine(config.size, config.size, compression),
                };
                let (image, produced) = apply_forgery(&base, &forgery)?;
                debug_assert_eq!(produced, label);
                entries.push(ManifestEntry {
                    id,
                    path: format!("{}/{}/{id:04}.png", split.name(), label_dir(label)),
                    label,
                    class: class_of(config.labels, recipe.as_ref()),
                    split: *split,
                    seed,
                    texture,
                    compression,
                    recipe,
                });
                images.push(image.quantize_8bit());
            }
        }
    }
    Ok(Corpus {
        manifest: CorpusManifest {
            seed: config.seed,
            config: config.clone(),
            entries,
        },
        images,
    })
}

fn label_dir(label: Label) -> &'static str {
    match label {
        Label::Pristine => "pristine",
        Label::Forged => "forged",
    }
}

/// Writes images and `manifest.json` under `root`.
pub fn write_corpus(corpus: &Corpus, root: &Path) -> Result<PathBuf> {
    for split in Split::ALL {
        for label in [Label::Pristine, Label::Forged] {
            let dir = root.join(split.name()).join(label_dir(label));
            fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        }
    }
    for (entry, image) in corpus.manifest.entries.iter().zip(&corpus.images) {
        image.save_png(root.join(&entry.path))?;
    }
    let manifest_path = root.join(MANIFEST_FILE);
    fs::write(&manifest_path, corpus.manifest.to_json()?).map_err(|e| Error::io(&manifest_path, e))?;
    Ok(manifest_path)
}

/// Generates and writes a corpus, returning its manifest.
pub fn build_corpus(config: &CorpusConfig, root: &Path) -> Result<CorpusManifest> {
    let corpus = generate_corpus(config)?;
    write_corpus(&corpus, root)?;
    Ok(corpus.manifest)
}

/// Loads a corpus from a manifest path or a directory containing one.
pub fn load_corpus(path: &Path) -> Result<Corpus> {
    let manifest_path = if path.is_dir() {
        path.join(MANIFEST_FILE)
    } else {
        path.to_path_buf()
    };
    let root = manifest_path.parent().unwrap_or(Path::new("."));
    let text = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let manifest: CorpusManifest = serde_json::from_str(&text)?;
    let images = manifest
        .entries
        .iter()
        .map(|e| ImageGrid::load_png(root.join(&e.path)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Corpus { manifest, images })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> CorpusConfig {
        CorpusConfig {
            seed,
            size: 32,
            per_class: 40,
            ..CorpusConfig::default()
        }
    }

    #[test]
    fn same_seed_same_manifest() {
        let a = generate_corpus(&small(3)).unwrap();
        let b = generate_corpus(&small(3)).unwrap();
        assert_eq!(a.manifest.to_json().unwrap(), b.manifest.to_json().unwrap());
        assert_eq!(a.images, b.images);
        let c = generate_corpus(&small(4)).unwrap();
        assert_ne!(a.images, c.images);
    }

    #[test]
    fn manifest_passes_audit() {
        let corpus = generate_corpus(&small(1)).unwrap();
        corpus.manifest.audit().unwrap();
        assert_eq!(corpus.manifest.entries.len(), 80);
        let sizes = small(1).split_sizes();
        assert_eq!(sizes, [28, 6, 6]);
    }

    #[test]
    fn forged_samples_are_stratified() {
        let corpus = generate_corpus(&small(2)).unwrap();
        let forged: Vec<_> = corpus
            .split(Split::Train)
            .filter(|(e, _)| e.label == Label::Forged)
            .collect();
        let kernels: BTreeSet<_> = forged.iter().map(|(e, _)| e.recipe.unwrap().kernel).collect();
        let repeats: BTreeSet<_> = forged.iter().map(|(e, _)| e.recipe.unwrap().repeats).collect();
        assert!(kernels.len() >= 2);
        assert_eq!(repeats, BTreeSet::from([1, 2, 3]));
    }

    #[test]
    fn cross_distribution_holds_out_kernel() {
        let mut cfg = CorpusConfig::cross_distribution(5, 40);
        cfg.size = 32;
        let corpus = generate_corpus(&cfg).unwrap();
        let train = corpus.manifest.kernels_in(Split::Train);
        let test = corpus.manifest.kernels_in(Split::Test);
        assert_eq!(train, BTreeSet::from([ResampleKind::Nearest, ResampleKind::Bilinear]));
        assert_eq!(test, BTreeSet::from([ResampleKind::Bicubic]));
    }

    #[test]
    fn per_kernel_labels() {
        let mut cfg = small(6);
        cfg.labels = LabelScheme::PerKernel;
        cfg.train_kernels = CLASS_KERNELS.to_vec();
        let corpus = generate_corpus(&cfg).unwrap();
        let classes: BTreeSet<_> = corpus.manifest.entries.iter().map(|e| e.class).collect();
        assert_eq!(classes, BTreeSet::from([0, 1, 2, 3, 4]));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = small(0);
        cfg.size = 40;
        assert!(generate_corpus(&cfg).is_err());
        let mut cfg = small(0);
        cfg.train_kernels = vec![ResampleKind::Decimate];
        assert!(generate_corpus(&cfg).is_err());
    }

    #[test]
    fn write_and_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small(8);
        cfg.per_class = 6;
        let corpus = generate_corpus(&cfg).unwrap();
        write_corpus(&corpus, dir.path()).unwrap();
        assert!(dir.path().join("train/pristine/0000.png").exists());
        let loaded = load_corpus(dir.path()).unwrap();
        assert_eq!(loaded.manifest, corpus.manifest);
        for (a, b) in loaded.images.iter().zip(&corpus.images) {
            for (x, y) in a.data().iter().zip(b.data()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
