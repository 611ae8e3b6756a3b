//! Plain convolutional classifiers with hand-written backpropagation.

mod checkpoint;
mod config;
mod model;
mod receptive;
mod train;

pub use checkpoint::{decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint, CheckpointHeader};
pub use config::{DepthProfile, LayerSpec, NetConfig, BODY_WIDTHS, DEEP_DEPTH, FINAL_WIDTH, SHALLOW_DEPTH};
pub use model::{softmax, Network, Planes};
pub use receptive::{receptive_field, ReceptiveField, RfEntry};
pub use train::{
    train, write_log_csv, Adam, Dataset, EpochLog, InputMode, PlateauScheduler, TrainConfig, TrainOutcome,
};
