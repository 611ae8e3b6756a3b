use std::f64::consts::PI;

use num_complex::Complex64;

use super::grid::{ComplexGrid, ImageGrid, RealGrid, Signal1D, Spectrum1D};
use crate::error::{invalid, Result};

/// Mixed-radix transform plan for one length.
///
/// Lengths are factored by their smallest prime; each stage is a
/// decimation-in-time split, and prime leaves fall back to a direct sum.
/// Twiddles come from a single table of `e^{-j2πk/N}` indexed modulo `N`,
/// so no phase is ever accumulated by repeated multiplication.
#[derive(Debug, Clone)]
pub struct FftPlan {
    len: usize,
    twiddles: Vec<Complex64>,
}

impl FftPlan {
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "transform length must be positive");
        let twiddles = (0..len)
            .map(|k| {
                let angle = -2.0 * PI * k as f64 / len as f64;
                Complex64::new(angle.cos(), angle.sin())
            })
            .collect();
        Self { len, twiddles }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Forward transform with the `1/N` scale.
    pub fn forward(&self, input: &[Complex64]) -> Vec<Complex64> {
        let mut out = self.unscaled(input, false);
        let scale = 1.0 / self.len as f64;
        for v in &mut out {
            *v *= scale;
        }
        out
    }

    /// Inverse transform, unscaled.
    pub fn inverse(&self, input: &[Complex64]) -> Vec<Complex64> {
        self.unscaled(input, true)
    }

    fn unscaled(&self, input: &[Complex64], inverse: bool) -> Vec<Complex64> {
        assert_eq!(input.len(), self.len, "input length does not match plan");
        let mut out = vec![Complex64::new(0.0, 0.0); self.len];
        self.recurse(input, 1, self.len, 1, inverse, &mut out);
        out
    }

    fn twiddle(&self, index: usize, inverse: bool) -> Complex64 {
        let w = self.twiddles[index];
        if inverse {
            w.conj()
        } else {
            w
        }
    }

    fn recurse(
        &self,
        input: &[Complex64],
        stride: usize,
        n: usize,
        tw_step: usize,
        inverse: bool,
        out: &mut [Complex64],
    ) {
        if n == 1 {
            out[0] = input[0];
            return;
        }
        let p = smallest_factor(n);
        if p == n {
            for (k, o) in out.iter_mut().enumerate().take(n) {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    acc += input[j * stride] * self.twiddle((j * k % n) * tw_step, inverse);
                }
                *o = acc;
            }
            return;
        }
        let m = n / p;
        let mut sub = vec![Complex64::new(0.0, 0.0); n];
        for r in 0..p {
            self.recurse(
                &input[r * stride..],
                stride * p,
                m,
                tw_step * p,
                inverse,
                &mut sub[r * m..(r + 1) * m],
            );
        }
        for q in 0..p {
            for k in 0..m {
                let idx = k + m * q;
                let mut acc = sub[k];
                for r in 1..p {
                    acc += sub[r * m + k] * self.twiddle((r * idx % n) * tw_step, inverse);
                }
                out[idx] = acc;
            }
        }
    }
}

fn smallest_factor(n: usize) -> usize {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut f = 3;
    while f * f <= n {
        if n.is_multiple_of(f) {
            return f;
        }
        f += 2;
    }
    n
}

pub fn dft1(signal: &Signal1D) -> Spectrum1D {
    let input: Vec<Complex64> = signal.samples().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let coeffs = FftPlan::new(input.len()).forward(&input);
    Spectrum1D::new(coeffs).expect("transform of a finite signal is finite")
}

/// Full complex inverse; its imaginary part is round-off for Hermitian spectra.
pub fn idft1_complex(spectrum: &Spectrum1D) -> Vec<Complex64> {
    FftPlan::new(spectrum.len()).inverse(spectrum.coeffs())
}

/// Real part of the inverse transform.
pub fn idft1(spectrum: &Spectrum1D) -> Signal1D {
    let samples = idft1_complex(spectrum).into_iter().map(|c| c.re).collect();
    Signal1D::new(samples).expect("inverse of a finite spectrum is finite")
}

fn transform_2d(height: usize, width: usize, values: &mut [Complex64], inverse: bool) {
    let row_plan = FftPlan::new(width);
    let col_plan = if height == width {
        row_plan.clone()
    } else {
        FftPlan::new(height)
    };
    let run = |plan: &FftPlan, buf: &[Complex64]| {
        if inverse {
            plan.inverse(buf)
        } else {
            plan.forward(buf)
        }
    };
    for row in values.chunks_exact_mut(width) {
        let t = run(&row_plan, row);
        row.copy_from_slice(&t);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); height];
    for c in 0..width {
        for r in 0..height {
            column[r] = values[r * width + c];
        }
        let t = run(&col_plan, &column);
        for r in 0..height {
            values[r * width + c] = t[r];
        }
    }
}

/// Forward 2D transform of a raw real plane (rows then columns).
pub fn dft2_plane(height: usize, width: usize, plane: &[f64]) -> ComplexGrid {
    assert_eq!(plane.len(), height * width, "plane does not match dimensions");
    let mut values: Vec<Complex64> = plane.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform_2d(height, width, &mut values, false);
    ComplexGrid::new(height, width, values).expect("dimensions checked")
}

/// Forward 2D transform of a single-channel image.
pub fn dft2(image: &ImageGrid) -> Result<ComplexGrid> {
    if image.channels() != 1 {
        return Err(invalid!(
            "dft2 expects a single-channel image, got {} channels",
            image.channels()
        ));
    }
    Ok(dft2_plane(image.height(), image.width(), image.data()))
}

pub fn idft2_complex(grid: &ComplexGrid) -> ComplexGrid {
    let mut values = grid.values().to_vec();
    transform_2d(grid.height(), grid.width(), &mut values, true);
    ComplexGrid::new(grid.height(), grid.width(), values).expect("dimensions preserved")
}

/// Real part of the inverse 2D transform.
pub fn idft2(grid: &ComplexGrid) -> RealGrid {
    let inv = idft2_complex(grid);
    RealGrid {
        height: inv.height(),
        width: inv.width(),
        values: inv.values().iter().map(|c| c.re).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_close(a: &[Complex64], b: &[Complex64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).norm() < tol, "{x} vs {y}");
        }
    }

    #[test]
    fn constant_signal_is_pure_dc() {
        let s = dft1(&Signal1D::new(vec![1.0; 4]).unwrap());
        assert_close(s.coeffs(), &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 1e-15);
    }

    #[test]
    fn impulse_has_flat_scaled_spectrum() {
        let s = dft1(&Signal1D::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap());
        assert_close(s.coeffs(), &[c(0.25, 0.0); 4], 1e-15);
    }

    #[test]
    fn inverse_of_dc_and_flat_spectra() {
        let dc = Spectrum1D::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(idft1(&dc).samples(), &[1.0, 1.0, 1.0, 1.0]);
        let flat = Spectrum1D::new(vec![c(1.0, 0.0); 4]).unwrap();
        let x = idft1(&flat);
        for (v, e) in x.samples().iter().zip([4.0, 0.0, 0.0, 0.0]) {
            assert!((v - e).abs() < 1e-14);
        }
    }

    #[test]
    fn odd_and_composite_lengths_round_trip() {
        for n in [1usize, 2, 3, 5, 6, 7, 9, 12, 15, 49, 60, 63] {
            let x: Vec<f64> = (0..n).map(|i| ((i * 7 + 3) % 11) as f64 - 4.5).collect();
            let back = idft1(&dft1(&Signal1D::new(x.clone()).unwrap()));
            for (a, b) in back.samples().iter().zip(&x) {
                assert!((a - b).abs() < 1e-12, "n={n}");
            }
        }
    }

    #[test]
    fn dft2_rejects_multichannel() {
        let img = ImageGrid::filled(4, 4, 3, 0.5).unwrap();
        assert!(dft2(&img).is_err());
    }

    #[test]
    fn constant_image_has_only_dc() {
        let img = ImageGrid::filled(6, 8, 1, 0.3).unwrap();
        let g = dft2(&img).unwrap();
        for r in 0..6 {
            for col in 0..8 {
                let expected = if r == 0 && col == 0 { 0.3 } else { 0.0 };
                assert!((g.get(r, col) - c(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn origin_impulse_has_flat_spectrum() {
        let mut data = vec![0.0; 5 * 8];
        data[0] = 1.0;
        let g = dft2(&ImageGrid::new(5, 8, 1, data).unwrap()).unwrap();
        for v in g.values() {
            assert!((v - c(1.0 / 40.0, 0.0)).norm() < 1e-15);
        }
    }
}
