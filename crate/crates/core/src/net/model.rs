use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::config::{LayerSpec, NetConfig};
use crate::error::{invalid, Error, Result};
use crate::spectral::{ImageGrid, RgbpImage};

/// Channel-major activation map for one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Planes {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    pub data: Vec<f64>,
}

impl Planes {
    pub fn new(channels: usize, height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != channels * height * width {
            return Err(invalid!("planes buffer does not match {channels}x{height}x{width}"));
        }
        Ok(Self {
            channels,
            height,
            width,
            data,
        })
    }

    pub fn zeros(channels: usize, height: usize, width: usize) -> Self {
        Self {
            channels,
            height,
            width,
            data: vec![0.0; channels * height * width],
        }
    }
}

impl From<&ImageGrid> for Planes {
    fn from(img: &ImageGrid) -> Self {
        Planes {
            channels: img.channels(),
            height: img.height(),
            width: img.width(),
            data: img.data().to_vec(),
        }
    }
}

impl From<&RgbpImage> for Planes {
    fn from(img: &RgbpImage) -> Self {
        Planes {
            channels: 4,
            height: img.height(),
            width: img.width(),
            data: img.data().to_vec(),
        }
    }
}

pub fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// `C = A·B + beta·C` over strided row/column views.
#[allow(clippy::too_many_arguments)]
fn gemm(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    (rsa, csa): (usize, usize),
    b: &[f64],
    (rsb, csb): (usize, usize),
    beta: f64,
    c: &mut [f64],
) {
    assert!(m == 0 || k == 0 || a.len() > (m - 1) * rsa + (k - 1) * csa);
    assert!(k == 0 || n == 0 || b.len() > (k - 1) * rsb + (n - 1) * csb);
    assert!(c.len() >= m * n);
    // SAFETY: the asserts above bound every index dgemm touches.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            rsa as isize,
            csa as isize,
            b.as_ptr(),
            rsb as isize,
            csb as isize,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

struct ConvGeom {
    cin: usize,
    h: usize,
    w: usize,
    k: usize,
    s: usize,
    p: usize,
    oh: usize,
    ow: usize,
}

impl ConvGeom {
    fn rows(&self) -> usize {
        self.cin * self.k * self.k
    }

    fn cols(&self) -> usize {
        self.oh * self.ow
    }

    /// Maps (row, col) of the unfolded matrix to an input index, if inside the image.
    fn source(&self, ci: usize, ky: usize, kx: usize, oy: usize, ox: usize) -> Option<usize> {
        let y = (oy * self.s + ky) as isize - self.p as isize;
        let x = (ox * self.s + kx) as isize - self.p as isize;
        if y < 0 || x < 0 || y >= self.h as isize || x >= self.w as isize {
            None
        } else {
            Some((ci * self.h + y as usize) * self.w + x as usize)
        }
    }

    fn im2col(&self, input: &[f64]) -> Vec<f64> {
        let p = self.cols();
        let mut cols = vec![0.0; self.rows() * p];
        for ci in 0..self.cin {
            for ky in 0..self.k {
                for kx in 0..self.k {
                    let row = (ci * self.k + ky) * self.k + kx;
                    let dst = &mut cols[row * p..(row + 1) * p];
                    for oy in 0..self.oh {
                        for ox in 0..self.ow {
                            if let Some(src) = self.source(ci, ky, kx, oy, ox) {
                                dst[oy * self.ow + ox] = input[src];
                            }
                        }
                    }
                }
            }
        }
        cols
    }

    fn col2im(&self, cols: &[f64]) -> Vec<f64> {
        let p = self.cols();
        let mut out = vec![0.0; self.cin * self.h * self.w];
        for ci in 0..self.cin {
            for ky in 0..self.k {
                for kx in 0..self.k {
                    let row = (ci * self.k + ky) * self.k + kx;
                    let src = &cols[row * p..(row + 1) * p];
                    for oy in 0..self.oh {
                        for ox in 0..self.ow {
                            if let Some(dst) = self.source(ci, ky, kx, oy, ox) {
                                out[dst] += src[oy * self.ow + ox];
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// What each layer keeps from the forward pass for backpropagation.
enum Cache {
    Conv {
        cols: Vec<f64>,
        input_shape: (usize, usize, usize),
    },
    Relu {
        output: Vec<f64>,
    },
    MaxPool {
        argmax: Vec<usize>,
        input_len: usize,
    },
    Gap {
        channels: usize,
        area: usize,
    },
    Dense {
        input: Vec<f64>,
    },
}

/// A [`NetConfig`] with a flat parameter vector.
///
/// Conv weights are laid out `[out][in][ky][kx]` followed by `[out]` biases;
/// dense weights `[out][in]` followed by biases.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    config: NetConfig,
    params: Vec<f64>,
    offsets: Vec<usize>,
}

impl Network {
    pub fn new(config: NetConfig, params: Vec<f64>) -> Result<Self> {
        config.validate()?;
        if params.len() != config.param_count() {
            return Err(invalid!(
                "expected {} parameters, got {}",
                config.param_count(),
                params.len()
            ));
        }
        let mut offsets = Vec::with_capacity(config.layers.len());
        let mut at = 0;
        for layer in &config.layers {
            offsets.push(at);
            at += layer.param_count();
        }
        Ok(Self {
            config,
            params,
            offsets,
        })
    }

    pub fn zeros(config: NetConfig) -> Result<Self> {
        let n = config.param_count();
        Self::new(config, vec![0.0; n])
    }

    /// Fan-in scaled normal weights (`std = sqrt(2 / fan_in)`), zero biases.
    /// Every input channel, including a phase channel, uses the same scheme.
    pub fn init(config: NetConfig, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = Vec::with_capacity(config.param_count());
        for layer in &config.layers {
            let count = layer.param_count();
            if count == 0 {
                continue;
            }
            let biases = match *layer {
                LayerSpec::Conv { out_channels, .. } => out_channels,
                LayerSpec::Dense { outputs, .. } => outputs,
                _ => 0,
            };
            let std = (2.0 / layer.fan_in() as f64).sqrt();
            let normal = Normal::new(0.0, std).expect("positive std");
            params.extend((0..count - biases).map(|_| normal.sample(&mut rng)));
            params.extend(std::iter::repeat_n(0.0, biases));
        }
        Self::new(config, params)
    }

    pub fn config(&self) -> &NetConfig {
        &self.config
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn check_input(&self, x: &Planes) -> Result<()> {
        if x.channels != self.config.input_channels {
            return Err(invalid!(
                "network expects {} input channels, got {}",
                self.config.input_channels,
                x.channels
            ));
        }
        if x.data.len() != x.channels * x.height * x.width {
            return Err(invalid!("input buffer does not match its shape"));
        }
        self.config.spatial_shapes(x.height, x.width)?;
        Ok(())
    }

    /// Runs every layer, returning each layer's output and the backprop caches.
    fn run(&self, x: &Planes, keep_cache: bool) -> Result<(Vec<Planes>, Vec<Cache>)> {
        self.check_input(x)?;
        let mut outputs: Vec<Planes> = Vec::with_capacity(self.config.layers.len());
        let mut caches = Vec::new();
        for (li, layer) in self.config.layers.iter().enumerate() {
            let input = outputs.last().unwrap_or(x);
            let (c, h, w) = (input.channels, input.height, input.width);
            let off = self.offsets[li];
            let (out, cache) = match *layer {
                LayerSpec::Conv {
                    kernel,
                    stride,
                    out_channels,
                    padding,
                    ..
                } => {
                    let geom = ConvGeom {
                        cin: c,
                        h,
                        w,
                        k: kernel,
                        s: stride,
                        p: padding,
                        oh: (h + 2 * padding - kernel) / stride + 1,
                        ow: (w + 2 * padding - kernel) / stride + 1,
                    };
                    let cols = geom.im2col(&input.data);
                    let (kk, p) = (geom.rows(), geom.cols());
                    let weights = &self.params[off..off + out_channels * kk];
                    let bias = &self.params[off + out_channels * kk..off + out_channels * kk + out_channels];
                    let mut data = vec![0.0; out_channels * p];
                    for (o, chunk) in data.chunks_exact_mut(p).enumerate() {
                        chunk.fill(bias[o]);
                    }
                    gemm(out_channels, kk, p, weights, (kk, 1), &cols, (p, 1), 1.0, &mut data);
                    let out = Planes::new(out_channels, geom.oh, geom.ow, data)?;
                    (
                        out,
                        Cache::Conv {
                            cols,
                            input_shape: (c, h, w),
                        },
                    )
                }
                LayerSpec::Relu => {
                    let data: Vec<f64> = input.data.iter().map(|&v| v.max(0.0)).collect();
                    let out = Planes::new(c, h, w, data)?;
                    let cache = Cache::Relu {
                        output: if keep_cache { out.data.clone() } else { Vec::new() },
                    };
                    (out, cache)
                }
                LayerSpec::MaxPool { size, stride } => {
                    let (oh, ow) = ((h - size) / stride + 1, (w - size) / stride + 1);
                    let mut data = Vec::with_capacity(c * oh * ow);
                    let mut argmax = Vec::with_capacity(c * oh * ow);
                    for ci in 0..c {
                        for oy in 0..oh {
                            for ox in 0..ow {
                                let mut best = (f64::NEG_INFINITY, 0usize);
                                for ky in 0..size {
                                    for kx in 0..size {
                                        let idx = (ci * h + oy * stride + ky) * w + ox * stride + kx;
                                        if input.data[idx] > best.0 {
                                            best = (input.data[idx], idx);
                                        }
                                    }
                                }
                                data.push(best.0);
                                argmax.push(best.1);
                            }
                        }
                    }
                    let out = Planes::new(c, oh, ow, data)?;
                    (
                        out,
                        Cache::MaxPool {
                            argmax,
                            input_len: c * h * w,
                        },
                    )
                }
                LayerSpec::GlobalAvgPool => {
                    let area = h * w;
                    let data = input
                        .data
                        .chunks_exact(area)
                        .map(|ch| ch.iter().sum::<f64>() / area as f64)
                        .collect();
                    (Planes::new(c, 1, 1, data)?, Cache::Gap { channels: c, area })
                }
                LayerSpec::Dense { inputs, outputs: n_out } => {
                    let weights = &self.params[off..off + n_out * inputs];
                    let bias = &self.params[off + n_out * inputs..off + n_out * inputs + n_out];
                    let data = (0..n_out)
                        .map(|o| {
                            bias[o]
                                + weights[o * inputs..(o + 1) * inputs]
                                    .iter()
                                    .zip(&input.data)
                                    .map(|(a, b)| a * b)
                                    .sum::<f64>()
                        })
                        .collect();
                    let cache = Cache::Dense {
                        input: if keep_cache { input.data.clone() } else { Vec::new() },
                    };
                    (Planes::new(n_out, 1, 1, data)?, cache)
                }
            };
            if matches!(layer, LayerSpec::Conv { .. }) && out.data.iter().any(|v| !v.is_finite()) {
                return Err(divergence());
            }
            if keep_cache {
                caches.push(cache);
            }
            outputs.push(out);
        }
        Ok((outputs, caches))
    }

    /// Class scores (logits) for one input.
    pub fn forward(&self, x: &Planes) -> Result<Vec<f64>> {
        let (mut outputs, _) = self.run(x, false)?;
        Ok(outputs.pop().expect("at least one layer").data)
    }

    /// Output of every layer, in order.
    pub fn forward_trace(&self, x: &Planes) -> Result<Vec<Planes>> {
        Ok(self.run(x, false)?.0)
    }

    /// Per-class probabilities for each input.
    pub fn predict(&self, inputs: &[Planes]) -> Result<Vec<Vec<f64>>> {
        inputs.iter().map(|x| Ok(softmax(&self.forward(x)?))).collect()
    }

    /// Mean cross-entropy over the batch.
    pub fn loss(&self, batch: &[&Planes], labels: &[usize]) -> Result<f64> {
        self.check_batch(batch, labels)?;
        let mut total = 0.0;
        for (x, &y) in batch.iter().zip(labels) {
            let scores = self.forward(x)?;
            total += cross_entropy(&scores, y);
        }
        let loss = total / batch.len() as f64;
        if !loss.is_finite() {
            return Err(divergence());
        }
        Ok(loss)
    }

    fn check_batch(&self, batch: &[&Planes], labels: &[usize]) -> Result<()> {
        if batch.is_empty() || batch.len() != labels.len() {
            return Err(invalid!("batch of {} inputs with {} labels", batch.len(), labels.len()));
        }
        if let Some(&y) = labels.iter().find(|&&y| y >= self.config.classes) {
            return Err(invalid!("label {y} out of range for {} classes", self.config.classes));
        }
        Ok(())
    }

    /// Mean cross-entropy and its gradient with respect to every parameter.
    pub fn loss_and_grad(&self, batch: &[&Planes], labels: &[usize]) -> Result<(f64, Vec<f64>)> {
        self.check_batch(batch, labels)?;
        let mut grad = vec![0.0; self.params.len()];
        let mut total = 0.0;
        let scale = 1.0 / batch.len() as f64;
        for (x, &y) in batch.iter().zip(labels) {
            let (outputs, caches) = self.run(x, true)?;
            let scores = &outputs.last().expect("at least one layer").data;
            if scores.iter().any(|s| !s.is_finite()) {
                return Err(divergence());
            }
            total += cross_entropy(scores, y);
            let mut upstream = softmax(scores);
            upstream[y] -= 1.0;
            for g in &mut upstream {
                *g *= scale;
            }
            self.backward(&caches, upstream, &mut grad);
        }
        let loss = total * scale;
        if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(divergence());
        }
        Ok((loss, grad))
    }

    fn backward(&self, caches: &[Cache], mut upstream: Vec<f64>, grad: &mut [f64]) {
        for (li, (layer, cache)) in self.config.layers.iter().zip(caches).enumerate().rev() {
            let off = self.offsets[li];
            upstream = match (*layer, cache) {
                (
                    LayerSpec::Conv {
                        kernel,
                        stride,
                        out_channels,
                        padding,
                        ..
                    },
                    Cache::Conv { cols, input_shape },
                ) => {
                    let (c, h, w) = *input_shape;
                    let geom = ConvGeom {
                        cin: c,
                        h,
                        w,
                        k: kernel,
                        s: stride,
                        p: padding,
                        oh: (h + 2 * padding - kernel) / stride + 1,
                        ow: (w + 2 * padding - kernel) / stride + 1,
                    };
                    let (kk, p) = (geom.rows(), geom.cols());
                    let nw = out_channels * kk;
                    let (gw, gb) = grad[off..off + nw + out_channels].split_at_mut(nw);
                    // dW += G · colsᵀ
                    gemm(out_channels, p, kk, &upstream, (p, 1), cols, (1, p), 1.0, gw);
                    for (o, g) in gb.iter_mut().enumerate() {
                        *g += upstream[o * p..(o + 1) * p].iter().sum::<f64>();
                    }
                    if li == 0 {
                        break;
                    }
                    // dcols = Wᵀ · G
                    let weights = &self.params[off..off + nw];
                    let mut dcols = vec![0.0; kk * p];
                    gemm(
                        kk,
                        out_channels,
                        p,
                        weights,
                        (1, kk),
                        &upstream,
                        (p, 1),
                        0.0,
                        &mut dcols,
                    );
                    geom.col2im(&dcols)
                }
                (LayerSpec::Relu, Cache::Relu { output }) => upstream
                    .iter()
                    .zip(output)
                    .map(|(g, &o)| if o > 0.0 { *g } else { 0.0 })
                    .collect(),
                (LayerSpec::MaxPool { .. }, Cache::MaxPool { argmax, input_len }) => {
                    let mut down = vec![0.0; *input_len];
                    for (g, &idx) in upstream.iter().zip(argmax) {
                        down[idx] += g;
                    }
                    down
                }
                (LayerSpec::GlobalAvgPool, Cache::Gap { channels, area }) => {
                    let mut down = Vec::with_capacity(channels * area);
                    for g in upstream.iter().take(*channels) {
                        down.extend(std::iter::repeat_n(g / *area as f64, *area));
                    }
                    down
                }
                (LayerSpec::Dense { inputs, outputs }, Cache::Dense { input }) => {
                    let nw = inputs * outputs;
                    for o in 0..outputs {
                        let g = upstream[o];
                        for (gw, x) in grad[off + o * inputs..off + (o + 1) * inputs].iter_mut().zip(input) {
                            *gw += g * x;
                        }
                        grad[off + nw + o] += g;
                    }
                    let weights = &self.params[off..off + nw];
                    (0..inputs)
                        .map(|i| (0..outputs).map(|o| weights[o * inputs + i] * upstream[o]).sum())
                        .collect()
                }
                _ => unreachable!("cache kind always matches its layer"),
            };
        }
    }
}

fn cross_entropy(scores: &[f64], label: usize) -> f64 {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_sum = scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln() + max;
    log_sum - scores[label]
}

fn divergence() -> Error {
    Error::TrainingDivergence {
        epoch: 0,
        last_good_epoch: None,
    }
}
