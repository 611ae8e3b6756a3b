//! Up-sampling operators and the spectral effects they leave.

mod counts;
mod resample;
mod sweep;

pub use counts::{
    check_distributive, convolution_theorem_deviation, convolve_circular, count_significant, count_significant_coeffs,
    predicted_counts, verify_duplication, ComponentCountModel, PredictedCounts, UpsampledAmplitudeReading,
    DEFAULT_EPSILON,
};
pub use resample::{upsample_zero_insert, ResampleChain, ResampleKind, ResampleOp};
pub use sweep::{fig1_sweep, SpectralDiffReport, SweepRow};
