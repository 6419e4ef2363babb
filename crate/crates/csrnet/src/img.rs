//! RGB images in `f32`, nominal range [0,1], plus 8-bit PNG exchange.
//!
//! Values outside [0,1] are legal mid-pipeline; clamping and 8-bit
//! quantization happen only at encode time (see [`ImageRGB::quantized`]).

use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Interleaved RGB image, `data[(y*width + x)*3 + c]`, channel order R,G,B.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageRGB {
    height: usize,
    width: usize,
    data: Vec<f32>,
}

impl ImageRGB {
    pub fn new(height: usize, width: usize, data: Vec<f32>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidArgument(format!(
                "image dimensions must be positive, got {height}x{width}"
            )));
        }
        if data.len() != height * width * 3 {
            return Err(Error::ShapeMismatch {
                context: "ImageRGB::new",
                expected: vec![height * width * 3],
                got: vec![data.len()],
            });
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            data: vec![0.0; height * width * 3],
        }
    }

    /// Build per pixel: `f(y, x) -> [r, g, b]`.
    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> [f32; 3]) -> Self {
        let mut data = Vec::with_capacity(height * width * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(y, x));
            }
        }
        Self {
            height,
            width,
            data,
        }
    }

    pub fn splat(height: usize, width: usize, rgb: [f32; 3]) -> Self {
        Self::from_fn(height, width, |_, _| rgb)
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    #[inline]
    pub fn data(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    #[inline]
    pub fn pixel(&self, y: usize, x: usize) -> [f32; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn set_pixel(&mut self, y: usize, x: usize, rgb: [f32; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn map(&self, f: impl Fn(f32) -> f32) -> Self {
        Self {
            height: self.height,
            width: self.width,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Planar `3 x H x W` tensor view of the image (model input layout).
    pub fn to_tensor(&self) -> Tensor<f32> {
        let (h, w) = (self.height, self.width);
        let mut data = vec![0.0f32; 3 * h * w];
        for c in 0..3 {
            let plane = &mut data[c * h * w..(c + 1) * h * w];
            for (p, px) in plane.iter_mut().zip(self.data.chunks_exact(3)) {
                *p = px[c];
            }
        }
        Tensor::new(vec![3, h, w], data).expect("consistent dims")
    }

    pub fn from_tensor(t: &Tensor<f32>) -> Result<Self> {
        if t.rank() != 3 || t.shape()[0] != 3 {
            return Err(Error::ShapeMismatch {
                context: "ImageRGB::from_tensor",
                expected: vec![3, 0, 0],
                got: t.shape().to_vec(),
            });
        }
        let (h, w) = (t.shape()[1], t.shape()[2]);
        let src = t.data();
        let mut data = vec![0.0f32; h * w * 3];
        for c in 0..3 {
            let plane = &src[c * h * w..(c + 1) * h * w];
            for (px, &p) in data.chunks_exact_mut(3).zip(plane) {
                px[c] = p;
            }
        }
        Self::new(h, w, data)
    }

    pub fn clamped(&self) -> Self {
        self.map(|v| v.clamp(0.0, 1.0))
    }

    /// Max |a - b| over all channel values; panics on dimension mismatch.
    pub fn max_diff(&self, other: &Self) -> f32 {
        assert_eq!(self.dims(), other.dims(), "max_diff dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f32::max)
    }

    /// Clamp to [0,1] and snap onto the 8-bit grid: exactly the values an
    /// encode/decode round trip through PNG produces.
    pub fn quantized(&self) -> Self {
        self.map(|v| (v.clamp(0.0, 1.0) * 255.0).round() / 255.0)
    }

    pub fn crop(&self, top: usize, left: usize, height: usize, width: usize) -> Result<Self> {
        if top + height > self.height || left + width > self.width {
            return Err(Error::InvalidArgument(format!(
                "crop {height}x{width}+{top}+{left} exceeds image {}x{}",
                self.height, self.width
            )));
        }
        let mut out = ImageRGB::zeros(height, width);
        for y in 0..height {
            let src = ((top + y) * self.width + left) * 3;
            let dst = y * width * 3;
            out.data[dst..dst + width * 3].copy_from_slice(&self.data[src..src + width * 3]);
        }
        Ok(out)
    }

    pub fn flip_horizontal(&self) -> Self {
        let mut out = self.clone();
        for y in 0..self.height {
            for x in 0..self.width {
                out.set_pixel(y, x, self.pixel(y, self.width - 1 - x));
            }
        }
        out
    }

    /// Decode an 8-bit RGB PNG into [0,1] floats. Anything that is not
    /// exactly 8-bit three-channel RGB is rejected.
    pub fn load_png(path: &Path) -> Result<Self> {
        let dynimg = image::open(path).map_err(|e| Error::UndecodableImage {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })?;
        let rgb = match dynimg {
            image::DynamicImage::ImageRgb8(img) => img,
            other => {
                return Err(Error::UnsupportedImage {
                    path: path.to_path_buf(),
                    detail: format!("expected 8-bit RGB, got {:?}", other.color()),
                })
            }
        };
        let (w, h) = (rgb.width() as usize, rgb.height() as usize);
        let data = rgb.into_raw().iter().map(|&b| b as f32 / 255.0).collect();
        Self::new(h, w, data)
    }

    /// Encode as 8-bit RGB PNG, clamping and quantizing on the way out.
    pub fn save_png(&self, path: &Path) -> Result<()> {
        let bytes: Vec<u8> = self
            .data
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
            .collect();
        let buf = image::RgbImage::from_raw(self.width as u32, self.height as u32, bytes)
            .expect("sized buffer");
        buf.save_with_format(path, image::ImageFormat::Png)
            .map_err(|e| Error::UndecodableImage {
                path: path.to_path_buf(),
                detail: e.to_string(),
            })
    }
}

/// Write a single-channel map as a min-max-scaled grayscale PNG. A constant
/// map has no range to scale; it is written as mid-gray.
pub fn save_grayscale_png(values: &[f32], height: usize, width: usize, path: &Path) -> Result<()> {
    if values.len() != height * width {
        return Err(Error::ShapeMismatch {
            context: "save_grayscale_png",
            expected: vec![height * width],
            got: vec![values.len()],
        });
    }
    let lo = values.iter().copied().fold(f32::INFINITY, f32::min);
    let hi = values.iter().copied().fold(f32::NEG_INFINITY, f32::max);
    let range = hi - lo;
    let bytes: Vec<u8> = if range <= 1e-12 {
        vec![128u8; values.len()]
    } else {
        values
            .iter()
            .map(|&v| (((v - lo) / range) * 255.0).round() as u8)
            .collect()
    };
    let buf = image::GrayImage::from_raw(width as u32, height as u32, bytes).expect("sized buffer");
    buf.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| Error::UndecodableImage {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })
}
