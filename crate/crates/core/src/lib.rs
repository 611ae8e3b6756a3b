//! Frequency-domain analysis of up-sampling traces and shallow
//! phase-augmented convolutional classifiers for resampling forgeries.

pub mod error;
pub mod harness;
pub mod metrics;
pub mod net;
pub mod spectral;
pub mod synth;
pub mod upsample;

pub use error::{Error, Result};
pub use metrics::{EvalMode, MetricsReport};
pub use net::{DepthProfile, InputMode, NetConfig, Network, TrainConfig};
pub use spectral::{ImageGrid, PhaseMode, RgbpImage, Signal1D, Spectrum1D};
pub use synth::{Corpus, CorpusConfig, CorpusManifest, Split};
pub use upsample::ResampleKind;
