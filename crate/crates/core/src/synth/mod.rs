//! Synthetic pristine textures, resampling forgeries and block compression.

mod compress;
mod corpus;
mod forgery;
mod texture;

pub use compress::{compress_block, CompressionLevel};
pub use corpus::{
    build_corpus, generate_corpus, load_corpus, mix_seed, write_corpus, Corpus, CorpusConfig, CorpusManifest,
    LabelScheme, ManifestEntry, Split, CLASS_KERNELS, MANIFEST_FILE,
};
pub use forgery::{apply_forgery, EllipseMask, ForgeryRecipe, Label, RecipeDescriptor};
pub use texture::{gen_texture, texture_batch, TextureKind, TextureSpec, SUPPORTED_SIZES};
