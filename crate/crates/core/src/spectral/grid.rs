use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// A finite, non-empty 1D real signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal1D {
    samples: Vec<f64>,
}

impl Signal1D {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(invalid!("signal must have at least one sample"));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(invalid!("signal sample {i} is not finite"));
        }
        Ok(Self { samples })
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(vec![0.0; len])
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.samples
    }
}

/// Complex DFT coefficients of a [`Signal1D`] under the `1/N` forward scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum1D {
    coeffs: Vec<Complex64>,
}

impl Spectrum1D {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(invalid!("spectrum must have at least one coefficient"));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(invalid!("spectrum contains non-finite coefficients"));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.coeffs
    }
}

/// Planar image with values in `[0, 1]`.
///
/// Data is stored channel-major: `data[(c * height + y) * width + x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f64>,
}

impl ImageGrid {
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(invalid!("image dimensions must be positive, got {height}x{width}"));
        }
        if channels != 1 && channels != 3 {
            return Err(invalid!("image must have 1 or 3 channels, got {channels}"));
        }
        if data.len() != height * width * channels {
            return Err(invalid!(
                "image buffer has {} values, expected {}",
                data.len(),
                height * width * channels
            ));
        }
        if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(invalid!("image value {v} outside [0, 1]"));
        }
        Ok(Self {
            height,
            width,
            channels,
            data,
        })
    }

    /// Builds an image clamping every value into `[0, 1]`. NaN maps to 0.
    pub fn from_clamped(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        let data = data
            .into_iter()
            .map(|v| if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) })
            .collect();
        Self::new(height, width, channels, data)
    }

    pub fn filled(height: usize, width: usize, channels: usize, value: f64) -> Result<Self> {
        Self::new(height, width, channels, vec![value; height * width * channels])
    }

    pub fn from_planes(height: usize, width: usize, planes: &[Vec<f64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(height * width * planes.len());
        for p in planes {
            if p.len() != height * width {
                return Err(invalid!("plane has {} values, expected {}", p.len(), height * width));
            }
            data.extend_from_slice(p);
        }
        Self::new(height, width, planes.len(), data)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn plane(&self, c: usize) -> &[f64] {
        let n = self.height * self.width;
        &self.data[c * n..(c + 1) * n]
    }

    pub fn get(&self, c: usize, y: usize, x: usize) -> f64 {
        self.data[(c * self.height + y) * self.width + x]
    }

    pub fn same_shape(&self, other: &ImageGrid) -> bool {
        self.height == other.height && self.width == other.width && self.channels == other.channels
    }

    /// Rounds every value to the nearest `v / 255`.
    pub fn quantize_8bit(&self) -> ImageGrid {
        let data = self.data.iter().map(|v| (v * 255.0).round() / 255.0).collect();
        ImageGrid { data, ..*self }
    }

    pub fn load_png(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let img = image::open(path).map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })?;
        let (w, h) = (img.width() as usize, img.height() as usize);
        let n = w * h;
        if img.color().channel_count() == 1 {
            let luma = img.to_luma8();
            let data = luma.as_raw().iter().map(|&v| f64::from(v) / 255.0).collect();
            return Self::new(h, w, 1, data);
        }
        let rgb = img.to_rgb8();
        let raw = rgb.as_raw();
        let mut data = vec![0.0; 3 * n];
        for (i, px) in raw.chunks_exact(3).enumerate() {
            for c in 0..3 {
                data[c * n + i] = f64::from(px[c]) / 255.0;
            }
        }
        Self::new(h, w, 3, data)
    }

    pub fn save_png(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let n = self.height * self.width;
        let to_u8 = |v: f64| (v * 255.0).round().clamp(0.0, 255.0) as u8;
        let (w, h) = (self.width as u32, self.height as u32);
        let result = match self.channels {
            1 => {
                let buf: Vec<u8> = self.data.iter().map(|&v| to_u8(v)).collect();
                image::GrayImage::from_raw(w, h, buf).map(|im| im.save(path))
            }
            _ => {
                let mut buf = Vec::with_capacity(3 * n);
                for i in 0..n {
                    for c in 0..3 {
                        buf.push(to_u8(self.data[c * n + i]));
                    }
                }
                image::RgbImage::from_raw(w, h, buf).map(|im| im.save(path))
            }
        };
        match result {
            Some(Ok(())) => Ok(()),
            Some(Err(source)) => Err(Error::Image {
                path: path.to_path_buf(),
                source,
            }),
            None => Err(invalid!("image buffer does not match its dimensions")),
        }
    }
}

/// Unconstrained real-valued 2D field (e.g. the real part of an inverse transform).
#[derive(Debug, Clone, PartialEq)]
pub struct RealGrid {
    pub height: usize,
    pub width: usize,
    pub values: Vec<f64>,
}

impl RealGrid {
    pub fn new(height: usize, width: usize, values: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 || values.len() != height * width {
            return Err(invalid!("grid buffer does not match {height}x{width}"));
        }
        Ok(Self { height, width, values })
    }
}

/// Row-major complex 2D grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGrid {
    height: usize,
    width: usize,
    values: Vec<Complex64>,
}

impl ComplexGrid {
    pub fn new(height: usize, width: usize, values: Vec<Complex64>) -> Result<Self> {
        if height == 0 || width == 0 || values.len() != height * width {
            return Err(invalid!("complex grid buffer does not match {height}x{width}"));
        }
        Ok(Self { height, width, values })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.values[row * self.width + col]
    }

    /// Writes `row,col,re,im` rows with a header line.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["row", "col", "re", "im"])?;
        for r in 0..self.height {
            for c in 0..self.width {
                let v = self.get(r, c);
                w.write_record([r.to_string(), c.to_string(), v.re.to_string(), v.im.to_string()])?;
            }
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// RGB plus a spatial phase channel, all in `[0, 1]`, stored planar.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbpImage {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl RgbpImage {
    pub(crate) fn from_parts(rgb: &ImageGrid, phase: &[f64]) -> Self {
        let mut data = Vec::with_capacity(rgb.data().len() + phase.len());
        data.extend_from_slice(rgb.data());
        data.extend_from_slice(phase);
        Self {
            height: rgb.height(),
            width: rgb.width(),
            data,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        4
    }

    /// All four planes, channel-major.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn rgb(&self) -> &[f64] {
        &self.data[..3 * self.height * self.width]
    }

    pub fn phase(&self) -> &[f64] {
        &self.data[3 * self.height * self.width..]
    }
}
