use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::spectral::{ImageGrid, Signal1D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResampleKind {
    ZeroInsert,
    Nearest,
    Bilinear,
    Bicubic,
    Decimate,
}

impl ResampleKind {
    pub const UPSAMPLERS: [ResampleKind; 4] = [
        ResampleKind::ZeroInsert,
        ResampleKind::Nearest,
        ResampleKind::Bilinear,
        ResampleKind::Bicubic,
    ];

    pub fn is_upsampler(self) -> bool {
        self != ResampleKind::Decimate
    }

    pub fn name(self) -> &'static str {
        match self {
            ResampleKind::ZeroInsert => "zero-insert",
            ResampleKind::Nearest => "nearest",
            ResampleKind::Bilinear => "bilinear",
            ResampleKind::Bicubic => "bicubic",
            ResampleKind::Decimate => "decimate",
        }
    }
}

impl std::fmt::Display for ResampleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ResampleKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        [
            ResampleKind::ZeroInsert,
            ResampleKind::Nearest,
            ResampleKind::Bilinear,
            ResampleKind::Bicubic,
            ResampleKind::Decimate,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| format!("unknown resample kind `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResampleOp {
    pub kind: ResampleKind,
    pub factor: usize,
}

impl ResampleOp {
    pub fn new(kind: ResampleKind, factor: usize) -> Result<Self> {
        if factor < 2 {
            return Err(invalid!("{kind} needs factor >= 2, got {factor}"));
        }
        Ok(Self { kind, factor })
    }

    pub fn up(kind: ResampleKind) -> Self {
        Self { kind, factor: 2 }
    }

    pub fn decimate() -> Self {
        Self {
            kind: ResampleKind::Decimate,
            factor: 2,
        }
    }

    pub fn apply(&self, image: &ImageGrid) -> Result<ImageGrid> {
        if self.factor < 2 {
            return Err(invalid!("{} needs factor >= 2", self.kind));
        }
        let f = self.factor;
        let (h, w) = (image.height(), image.width());
        let (oh, ow) = match self.kind {
            ResampleKind::Decimate => {
                if h % f != 0 || w % f != 0 {
                    return Err(invalid!("cannot decimate {h}x{w} by {f}"));
                }
                (h / f, w / f)
            }
            _ => (h * f, w * f),
        };
        let mut data = Vec::with_capacity(oh * ow * image.channels());
        for c in 0..image.channels() {
            data.extend(resample_plane(image.plane(c), h, w, oh, ow, self.kind, f));
        }
        ImageGrid::from_clamped(oh, ow, image.channels(), data)
    }
}

/// Ordered resampling operations; empty means identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResampleChain {
    pub ops: Vec<ResampleOp>,
}

impl ResampleChain {
    pub fn new(ops: Vec<ResampleOp>) -> Self {
        Self { ops }
    }

    /// Decoder surrogate: `repeats` decimations by 2, then `repeats` successive
    /// `kind` up-samplings by 2 back to the original size.
    pub fn decoder(kind: ResampleKind, repeats: usize) -> Self {
        let down = std::iter::repeat_n(ResampleOp::decimate(), repeats);
        let up = std::iter::repeat_n(ResampleOp::up(kind), repeats);
        Self {
            ops: down.chain(up).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn apply(&self, image: &ImageGrid) -> Result<ImageGrid> {
        let mut current = image.clone();
        for op in &self.ops {
            current = op.apply(&current)?;
        }
        Ok(current)
    }
}

/// Length-`f·N` signal with the input at multiples of `factor` and zeros elsewhere.
pub fn upsample_zero_insert(signal: &Signal1D, factor: usize) -> Result<Signal1D> {
    if factor < 2 {
        return Err(invalid!("zero-insert factor must be >= 2, got {factor}"));
    }
    let mut out = vec![0.0; signal.len() * factor];
    for (i, &v) in signal.samples().iter().enumerate() {
        out[i * factor] = v;
    }
    Signal1D::new(out)
}

fn resample_plane(plane: &[f64], h: usize, w: usize, oh: usize, ow: usize, kind: ResampleKind, f: usize) -> Vec<f64> {
    let mut rows = Vec::with_capacity(h * ow);
    for r in plane.chunks_exact(w) {
        rows.extend(resample_line(r, ow, kind, f));
    }
    let mut out = vec![0.0; oh * ow];
    let mut column = vec![0.0; h];
    for c in 0..ow {
        for r in 0..h {
            column[r] = rows[r * ow + c];
        }
        for (r, v) in resample_line(&column, oh, kind, f).into_iter().enumerate() {
            out[r * ow + c] = v;
        }
    }
    out
}

fn cubic_weight(t: f64) -> f64 {
    // Keys kernel, a = -0.5
    const A: f64 = -0.5;
    let t = t.abs();
    if t <= 1.0 {
        (A + 2.0) * t * t * t - (A + 3.0) * t * t + 1.0
    } else if t < 2.0 {
        A * t * t * t - 5.0 * A * t * t + 8.0 * A * t - 4.0 * A
    } else {
        0.0
    }
}

/// Pixel-centre aligned 1D resampling with clamp-to-edge borders.
fn resample_line(input: &[f64], out_len: usize, kind: ResampleKind, f: usize) -> Vec<f64> {
    let n = input.len() as isize;
    let at = |i: isize| input[i.clamp(0, n - 1) as usize];
    let src = |j: usize| (j as f64 + 0.5) / f as f64 - 0.5;
    (0..out_len)
        .map(|j| match kind {
            ResampleKind::ZeroInsert => {
                if j % f == 0 {
                    input[j / f]
                } else {
                    0.0
                }
            }
            ResampleKind::Nearest => input[j / f],
            ResampleKind::Decimate => input[j * f],
            ResampleKind::Bilinear => {
                let s = src(j);
                let i0 = s.floor();
                let t = s - i0;
                let i0 = i0 as isize;
                (1.0 - t) * at(i0) + t * at(i0 + 1)
            }
            ResampleKind::Bicubic => {
                let s = src(j);
                let i0 = s.floor();
                let t = s - i0;
                let i0 = i0 as isize;
                (-1..=2).map(|k| cubic_weight(t - k as f64) * at(i0 + k as isize)).sum()
            }
        })
        .collect()
}
