//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use phasenet_core::net::{receptive_field, DepthProfile, LayerSpec, NetConfig, Network, Planes};
use phasenet_core::spectral::{idft1_complex, Complex64, Signal1D, Spectrum1D};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_planes(rng: &mut ChaCha8Rng, c: usize, h: usize, w: usize) -> Planes {
    Planes::new(c, h, w, (0..c * h * w).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

pub fn random_net(config: NetConfig, rng: &mut ChaCha8Rng) -> Network {
    let n = config.param_count();
    Network::new(config, (0..n).map(|_| rng.random_range(-0.5..0.5)).collect()).unwrap()
}

pub fn conv(k: usize, s: usize, cin: usize, cout: usize, p: usize) -> LayerSpec {
    LayerSpec::Conv {
        kernel: k,
        stride: s,
        in_channels: cin,
        out_channels: cout,
        padding: p,
    }
}

pub fn config(input_channels: usize, layers: Vec<LayerSpec>, classes: usize) -> NetConfig {
    NetConfig {
        input_channels,
        layers,
        profile: DepthProfile::Custom(2),
        classes,
    }
}

/// Every layer kind: strided and padded conv, relu, max-pool, GAP, dense.
pub fn mixed_config() -> NetConfig {
    config(
        3,
        vec![
            conv(3, 1, 3, 4, 1),
            LayerSpec::Relu,
            LayerSpec::MaxPool { size: 2, stride: 2 },
            conv(3, 2, 4, 5, 0),
            LayerSpec::Relu,
            LayerSpec::GlobalAvgPool,
            LayerSpec::Dense { inputs: 5, outputs: 3 },
        ],
        3,
    )
}

/// Straight-line evaluation of the same arithmetic, one output value at a time.
pub fn naive_forward(net: &Network, x: &Planes) -> Vec<f64> {
    let params = net.params();
    let mut at = 0;
    let (mut c, mut h, mut w, mut v) = (x.channels, x.height, x.width, x.data.clone());
    for layer in &net.config().layers {
        match *layer {
            LayerSpec::Conv {
                kernel: k,
                stride: s,
                in_channels: cin,
                out_channels: cout,
                padding: p,
            } => {
                let oh = (h + 2 * p - k) / s + 1;
                let ow = (w + 2 * p - k) / s + 1;
                let weights = &params[at..at + cout * cin * k * k];
                let bias = &params[at + cout * cin * k * k..at + cout * cin * k * k + cout];
                let mut out = vec![0.0; cout * oh * ow];
                for o in 0..cout {
                    for oy in 0..oh {
                        for ox in 0..ow {
                            let mut acc = bias[o];
                            for i in 0..cin {
                                for ky in 0..k {
                                    for kx in 0..k {
                                        let y = (oy * s + ky) as i64 - p as i64;
                                        let xx = (ox * s + kx) as i64 - p as i64;
                                        if y >= 0 && xx >= 0 && (y as usize) < h && (xx as usize) < w {
                                            acc += weights[((o * cin + i) * k + ky) * k + kx]
                                                * v[(i * h + y as usize) * w + xx as usize];
                                        }
                                    }
                                }
                            }
                            out[(o * oh + oy) * ow + ox] = acc;
                        }
                    }
                }
                at += layer.param_count();
                (c, h, w, v) = (cout, oh, ow, out);
            }
            LayerSpec::Relu => v.iter_mut().for_each(|a| *a = a.max(0.0)),
            LayerSpec::MaxPool { size, stride } => {
                let oh = (h - size) / stride + 1;
                let ow = (w - size) / stride + 1;
                let mut out = vec![f64::NEG_INFINITY; c * oh * ow];
                for ch in 0..c {
                    for oy in 0..oh {
                        for ox in 0..ow {
                            for ky in 0..size {
                                for kx in 0..size {
                                    let val = v[(ch * h + oy * stride + ky) * w + ox * stride + kx];
                                    let slot = &mut out[(ch * oh + oy) * ow + ox];
                                    *slot = slot.max(val);
                                }
                            }
                        }
                    }
                }
                (h, w, v) = (oh, ow, out);
            }
            LayerSpec::GlobalAvgPool => {
                v = (0..c)
                    .map(|ch| v[ch * h * w..(ch + 1) * h * w].iter().sum::<f64>() / (h * w) as f64)
                    .collect();
                (h, w) = (1, 1);
            }
            LayerSpec::Dense { inputs, outputs } => {
                let mut out = Vec::with_capacity(outputs);
                for o in 0..outputs {
                    let mut acc = params[at + inputs * outputs + o];
                    for i in 0..inputs {
                        acc += params[at + o * inputs + i] * v[i];
                    }
                    out.push(acc);
                }
                at += layer.param_count();
                (c, v) = (outputs, out);
            }
        }
    }
    v
}

/// Central differences on sampled parameters; returns the worst relative error.
pub fn gradient_check(net: &Network, batch: &[&Planes], labels: &[usize], samples: usize, seed: u64) -> (f64, usize) {
    let h = 1e-4;
    let (_, grad) = net.loss_and_grad(batch, labels).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let n = net.params().len();
    let picks: Vec<usize> = if samples >= n {
        (0..n).collect()
    } else {
        (0..samples).map(|_| rng.random_range(0..n)).collect()
    };
    for &i in &picks {
        let mut plus = net.clone();
        plus.params_mut()[i] += h;
        let mut minus = net.clone();
        minus.params_mut()[i] -= h;
        let numeric = (plus.loss(batch, labels).unwrap() - minus.loss(batch, labels).unwrap()) / (2.0 * h);
        let rel = (numeric - grad[i]).abs() / numeric.abs().max(grad[i].abs()).max(1e-8);
        worst = worst.max(rel);
    }
    (worst, picks.len())
}

/// Input pixels whose large perturbation changes output unit `(oy, ox)` of
/// the last spatial layer, as an inclusive bounding box and a count.
pub fn influence(net: &Network, h: usize, w: usize, oy: usize, ox: usize) -> ((usize, usize, usize, usize), usize) {
    let spatial = net.config().layers.iter().take_while(|l| l.is_spatial()).count();
    let base = Planes::new(1, h, w, vec![1.0; h * w]).unwrap();
    let read = |x: &Planes| {
        let out = &net.forward_trace(x).unwrap()[spatial - 1];
        out.data[oy * out.width + ox]
    };
    let reference = read(&base);
    let (mut y0, mut y1, mut x0, mut x1, mut count) = (usize::MAX, 0, usize::MAX, 0, 0);
    for y in 0..h {
        for x in 0..w {
            let mut probe = base.clone();
            probe.data[y * w + x] += 1e6;
            if read(&probe) != reference {
                (y0, y1, x0, x1) = (y0.min(y), y1.max(y), x0.min(x), x1.max(x));
                count += 1;
            }
        }
    }
    ((y0, y1, x0, x1), count)
}

/// Random small single-channel config whose receptive field fits a test image.
pub fn random_rf_config(rng: &mut ChaCha8Rng) -> Option<NetConfig> {
    let mut layers = Vec::new();
    let blocks = rng.random_range(1..=3);
    for _ in 0..blocks {
        let k = [1, 3, 5][rng.random_range(0..3)];
        let s = rng.random_range(1..=2);
        layers.push(conv(k, s, 1, 1, k / 2));
        layers.push(LayerSpec::Relu);
        if rng.random_bool(0.5) {
            let size = rng.random_range(2..=3);
            layers.push(LayerSpec::MaxPool { size, stride: size });
        }
    }
    layers.push(LayerSpec::GlobalAvgPool);
    layers.push(LayerSpec::Dense { inputs: 1, outputs: 2 });
    let cfg = config(1, layers, 2);
    let rf = receptive_field(&cfg).unwrap().head();
    (3 * rf.size + 4 * rf.stride <= 72).then_some(cfg)
}

/// Compares the computed head receptive field with the pixels that actually
/// influence a central output unit under all-ones weights.
pub fn rf_matches_oracle(cfg: &NetConfig) -> Result<(), String> {
    let rf = receptive_field(cfg).map_err(|e| e.to_string())?.head();
    let params: Vec<f64> = cfg
        .layers
        .iter()
        .flat_map(|l| match *l {
            LayerSpec::Conv { kernel, .. } => {
                let mut p = vec![1.0; kernel * kernel];
                p.push(0.0);
                p
            }
            _ => vec![1.0; l.param_count()],
        })
        .collect();
    let net = Network::new(cfg.clone(), params).map_err(|e| e.to_string())?;
    let side = 3 * rf.size + 4 * rf.stride;
    let shapes = cfg.spatial_shapes(side, side).map_err(|e| e.to_string())?;
    let spatial = cfg.layers.iter().take_while(|l| l.is_spatial()).count();
    let o = shapes[spatial - 1].0 / 2;
    let ((y0, y1, x0, x1), count) = influence(&net, side, side, o, o);
    let centre = rf.offset + (o * rf.stride) as f64;
    let half = (rf.size as f64 - 1.0) / 2.0;
    // strided 1x1 layers sample the field sparsely; the extent is still exact
    let ok = y0 as f64 == centre - half
        && y1 as f64 == centre + half
        && (x0, x1) == (y0, y1)
        && count >= 1
        && count <= rf.size * rf.size;
    if ok {
        Ok(())
    } else {
        Err(format!(
            "rf {} at offset {} vs observed rows {y0}..={y1}",
            rf.size, rf.offset
        ))
    }
}

/// Pairwise Mann-Whitney count with ties worth one half.
pub fn brute_auc(scores: &[f64], positive: &[bool]) -> f64 {
    let mut num = 0.0;
    let mut pairs = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        for (j, &sj) in scores.iter().enumerate() {
            if positive[i] && !positive[j] {
                pairs += 1.0;
                num += if si > sj {
                    1.0
                } else if si == sj {
                    0.5
                } else {
                    0.0
                };
            }
        }
    }
    num / pairs
}

/// Direct `O(N²)` forward transform with the `1/N` convention.
pub fn naive_dft(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|u| {
            let s: Complex64 = x
                .iter()
                .enumerate()
                .map(|(t, &v)| v * Complex64::from_polar(1.0, -2.0 * PI * (u * t % n) as f64 / n as f64))
                .sum();
            s / n as f64
        })
        .collect()
}

/// Real signal whose spectrum is nonzero on exactly `k + 1` bins: DC, then
/// Nyquist, then conjugate pairs.
pub fn constructive_signal(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Signal1D {
    let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
    let mut remaining = k + 1;
    let take = |rng: &mut ChaCha8Rng| Complex64::from_polar(rng.random_range(0.5..1.0), rng.random_range(-PI..PI));
    spectrum[0] = Complex64::new(rng.random_range(0.5..1.0), 0.0);
    remaining -= 1;
    if remaining % 2 == 1 {
        spectrum[n / 2] = Complex64::new(-rng.random_range(0.5..1.0), 0.0);
        remaining -= 1;
    }
    let mut u = 1;
    while remaining > 0 {
        let z = take(rng);
        spectrum[u] = z;
        spectrum[n - u] = z.conj();
        remaining -= 2;
        u += 1;
    }
    let time = idft1_complex(&Spectrum1D::new(spectrum).unwrap());
    assert!(time.iter().all(|z| z.im.abs() < 1e-12));
    Signal1D::new(time.iter().map(|z| z.re).collect()).unwrap()
}
