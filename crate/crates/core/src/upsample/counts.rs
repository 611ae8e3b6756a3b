//! Spectral duplication under zero-insertion, significant-component
//! counting, and the convolution identities the counting argument uses.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::resample::upsample_zero_insert;
use crate::error::{invalid, Result};
use crate::spectral::{dft1, Signal1D, Spectrum1D};

/// Default relative significance threshold.
pub const DEFAULT_EPSILON: f64 = 1e-3;

/// `max_u |X̂(u) − ½·X(u mod N)|` where `X̂` is the spectrum of the
/// zero-inserted (factor 2) signal.
pub fn verify_duplication(signal: &Signal1D) -> f64 {
    let n = signal.len();
    let original = dft1(signal);
    let up = upsample_zero_insert(signal, 2).expect("factor 2 is valid");
    let upsampled = dft1(&up);
    upsampled
        .coeffs()
        .iter()
        .enumerate()
        .map(|(u, x_hat)| (x_hat - original.coeffs()[u % n] * 0.5).norm())
        .fold(0.0, f64::max)
}

/// Number of coefficients whose modulus exceeds `epsilon · max modulus`.
pub fn count_significant_coeffs(coeffs: &[Complex64], epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0) {
        return Err(invalid!("epsilon must be positive, got {epsilon}"));
    }
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(0);
    }
    let threshold = epsilon * max;
    Ok(coeffs.iter().filter(|c| c.norm() > threshold).count())
}

pub fn count_significant(spectrum: &Spectrum1D, epsilon: f64) -> Result<usize> {
    count_significant_coeffs(spectrum.coeffs(), epsilon)
}

/// Signal length `N`, number of significant amplitude terms minus one `k`,
/// and the relative threshold that defines "significant".
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentCountModel {
    pub n: usize,
    pub k: usize,
    pub epsilon: f64,
}

impl ComponentCountModel {
    pub fn new(n: usize, k: usize, epsilon: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid!("N must be positive"));
        }
        if k > n - 1 {
            return Err(invalid!("k = {k} exceeds N - 1 = {}", n - 1));
        }
        if !(epsilon > 0.0) {
            return Err(invalid!("epsilon must be positive"));
        }
        Ok(Self { n, k, epsilon })
    }
}

/// The item count of the up-sampled amplitude-only conv output is stated
/// two ways: the brace label and the last term index disagree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpsampledAmplitudeReading {
    /// `2N`, as labeled.
    #[default]
    Labeled,
    /// `2N + k`, implied by the last index `2N + k − 1`.
    IndexImplied,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictedCounts {
    /// Amplitude terms of the original signal.
    pub x_a: usize,
    /// Phase terms of the original signal.
    pub x_p: usize,
    pub x_a_up: usize,
    pub x_p_up: usize,
    /// Conv output fed by the amplitude path only.
    pub y_a: usize,
    pub y_a_up: usize,
    /// Conv output fed by the concatenated image + phase.
    pub y_ap: usize,
    pub y_ap_up: usize,
}

pub fn predicted_counts(model: &ComponentCountModel, reading: UpsampledAmplitudeReading) -> PredictedCounts {
    let (n, k) = (model.n, model.k);
    PredictedCounts {
        x_a: k + 1,
        x_p: n,
        x_a_up: 2 * (k + 1),
        x_p_up: 2 * n,
        y_a: n + k,
        y_a_up: match reading {
            UpsampledAmplitudeReading::Labeled => 2 * n,
            UpsampledAmplitudeReading::IndexImplied => 2 * n + k,
        },
        y_ap: 2 * n - 1,
        y_ap_up: 3 * n - 1,
    }
}

/// Circular convolution; `kernel` is zero-padded to the signal length.
pub fn convolve_circular(signal: &Signal1D, kernel: &Signal1D) -> Result<Signal1D> {
    let n = signal.len();
    if kernel.len() > n {
        return Err(invalid!("kernel length {} exceeds signal length {n}", kernel.len()));
    }
    let x = signal.samples();
    let c = kernel.samples();
    let out = (0..n)
        .map(|i| c.iter().enumerate().map(|(j, &cj)| cj * x[(i + n - j) % n]).sum())
        .collect();
    Signal1D::new(out)
}

/// `max |(f + g) ⊛ h − (f ⊛ h + g ⊛ h)|`.
pub fn check_distributive(f: &Signal1D, g: &Signal1D, h: &Signal1D) -> Result<f64> {
    if f.len() != g.len() {
        return Err(invalid!("f and g differ in length ({} vs {})", f.len(), g.len()));
    }
    let sum = Signal1D::new(f.samples().iter().zip(g.samples()).map(|(a, b)| a + b).collect())?;
    let lhs = convolve_circular(&sum, h)?;
    let fh = convolve_circular(f, h)?;
    let gh = convolve_circular(g, h)?;
    Ok(lhs
        .samples()
        .iter()
        .zip(fh.samples().iter().zip(gh.samples()))
        .map(|(l, (a, b))| (l - (a + b)).abs())
        .fold(0.0, f64::max))
}

/// `max_u |DFT(x ⊛ c)(u) − N·X(u)·C(u)|` with `c` zero-padded.
pub fn convolution_theorem_deviation(signal: &Signal1D, kernel: &Signal1D) -> Result<f64> {
    let n = signal.len();
    let conv = dft1(&convolve_circular(signal, kernel)?);
    let mut padded = kernel.samples().to_vec();
    padded.resize(n, 0.0);
    let x = dft1(signal);
    let c = dft1(&Signal1D::new(padded)?);
    Ok(conv
        .coeffs()
        .iter()
        .zip(x.coeffs().iter().zip(c.coeffs()))
        .map(|(y, (a, b))| (y - a * b * n as f64).norm())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(v: &[f64]) -> Signal1D {
        Signal1D::new(v.to_vec()).unwrap()
    }

    #[test]
    fn duplication_on_trivial_signals() {
        assert!(verify_duplication(&sig(&[1.0; 4])) < 1e-12);
        assert!(verify_duplication(&sig(&[1.0, 0.0, 0.0, 0.0])) < 1e-12);
    }

    #[test]
    fn constant_and_impulse_counts() {
        assert_eq!(count_significant(&dft1(&sig(&[2.0; 8])), 1e-3).unwrap(), 1);
        let mut imp = vec![0.0; 8];
        imp[0] = 1.0;
        assert_eq!(count_significant(&dft1(&sig(&imp)), 1e-3).unwrap(), 8);
        assert_eq!(count_significant(&dft1(&sig(&[0.0; 8])), 1e-3).unwrap(), 0);
        assert!(count_significant(&dft1(&sig(&[1.0])), 0.0).is_err());
    }

    #[test]
    fn predicted_counts_by_substitution() {
        let m = ComponentCountModel::new(8, 0, 1e-3).unwrap();
        let p = predicted_counts(&m, UpsampledAmplitudeReading::Labeled);
        assert_eq!((p.x_a, p.x_p, p.y_a, p.y_ap, p.y_ap_up), (1, 8, 8, 15, 23));
        assert_eq!((p.x_a_up, p.x_p_up, p.y_a_up), (2, 16, 16));
        let q = predicted_counts(
            &ComponentCountModel::new(8, 3, 1e-3).unwrap(),
            UpsampledAmplitudeReading::IndexImplied,
        );
        assert_eq!(q.y_a_up, 19);

        let one = predicted_counts(&ComponentCountModel::new(1, 0, 1e-3).unwrap(), Default::default());
        assert_eq!((one.x_a, one.x_p), (1, 1));
    }

    #[test]
    fn model_rejects_large_k() {
        assert!(ComponentCountModel::new(4, 4, 1e-3).is_err());
        assert!(ComponentCountModel::new(4, 3, 0.0).is_err());
    }

    #[test]
    fn phase_minus_amplitude_difference() {
        for n in 1..40 {
            for k in 0..n {
                let p = predicted_counts(&ComponentCountModel::new(n, k, 1e-3).unwrap(), Default::default());
                assert_eq!(p.y_ap - p.y_a, n - 1 - k);
            }
        }
    }

    #[test]
    fn identity_and_shift_kernels() {
        let x = sig(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(convolve_circular(&x, &sig(&[1.0])).unwrap(), x);
        let shifted = convolve_circular(&x, &sig(&[0.0, 1.0])).unwrap();
        assert_eq!(shifted.samples(), &[5.0, 1.0, 2.0, 3.0, 4.0]);
        assert!(convolve_circular(&sig(&[1.0]), &sig(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn distributive_trivial_cases() {
        let f = sig(&[1.0, -2.0, 0.5]);
        let neg = sig(&[-1.0, 2.0, -0.5]);
        let h = sig(&[0.3, 0.7]);
        assert_eq!(check_distributive(&f, &neg, &h).unwrap(), 0.0);
        assert_eq!(check_distributive(&f, &sig(&[0.0; 3]), &h).unwrap(), 0.0);
    }
}
