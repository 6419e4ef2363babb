//! Classical pixel-independent retouching operators.
//!
//! None of these clamp to [0,1]; clamping is an encode-time concern and
//! keeping the operators unclamped preserves their linear algebra (see
//! [`crate::mlp`] for the explicit MLP forms of brightness and contrast).

use std::fmt;

use crate::error::{Error, Result};
use crate::img::ImageRGB;
use crate::tensor::Tensor;

pub const LUMA_R: f32 = 0.299;
pub const LUMA_G: f32 = 0.587;
pub const LUMA_B: f32 = 0.114;

/// Per-pixel luminance map, `M x N`.
pub fn luminance(img: &ImageRGB) -> Tensor<f32> {
    let (h, w) = img.dims();
    let data = img
        .data()
        .chunks_exact(3)
        .map(|px| LUMA_R * px[0] + LUMA_G * px[1] + LUMA_B * px[2])
        .collect();
    Tensor::new(vec![h, w], data).expect("consistent dims")
}

/// Multiply every channel value by `alpha`.
pub fn brightness(img: &ImageRGB, alpha: f32) -> ImageRGB {
    img.map(|v| alpha * v)
}

/// Per channel: `alpha * v + (1 - alpha) * mean`, where the mean runs over
/// all pixels of that channel.
pub fn contrast(img: &ImageRGB, alpha: f32) -> ImageRGB {
    let means = channel_means(img);
    let mut out = img.clone();
    for px in out.data_mut().chunks_exact_mut(3) {
        for c in 0..3 {
            px[c] = alpha * px[c] + (1.0 - alpha) * means[c];
        }
    }
    out
}

pub fn channel_means(img: &ImageRGB) -> [f32; 3] {
    let mut sums = [0.0f64; 3];
    for px in img.data().chunks_exact(3) {
        for c in 0..3 {
            sums[c] += px[c] as f64;
        }
    }
    let n = (img.height() * img.width()) as f64;
    [
        (sums[0] / n) as f32,
        (sums[1] / n) as f32,
        (sums[2] / n) as f32,
    ]
}

/// Piecewise-linear tone curve with `L` segment weights summing to 1:
/// `f(v) = sum_k t_k * clip(L*v - k, 0, 1)` on inputs clipped to [0,1].
pub fn tone_curve(img: &ImageRGB, t: &[f32]) -> Result<ImageRGB> {
    validate_tone_params(t)?;
    Ok(img.map(|v| tone_value(v, t)))
}

pub fn validate_tone_params(t: &[f32]) -> Result<()> {
    if t.is_empty() {
        return Err(Error::InvalidArgument(
            "tone curve needs at least one segment".into(),
        ));
    }
    if t.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "tone weights must be non-negative and finite: {t:?}"
        )));
    }
    let sum: f32 = t.iter().sum();
    if (sum - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidArgument(format!(
            "tone weights must sum to 1 (got {sum})"
        )));
    }
    Ok(())
}

#[inline]
pub fn tone_value(v: f32, t: &[f32]) -> f32 {
    let l = t.len() as f32;
    let v = v.clamp(0.0, 1.0);
    let mut acc = 0.0f32;
    for (k, &tk) in t.iter().enumerate() {
        acc += tk * (l * v - k as f32).clamp(0.0, 1.0);
    }
    acc
}

/// Per-channel gains.
pub fn white_balance(img: &ImageRGB, gains: [f32; 3]) -> ImageRGB {
    let mut out = img.clone();
    for px in out.data_mut().chunks_exact_mut(3) {
        for c in 0..3 {
            px[c] *= gains[c];
        }
    }
    out
}

/// Luminance blend: `out_c = Y + alpha * (in_c - Y)`.
pub fn saturation(img: &ImageRGB, alpha: f32) -> ImageRGB {
    let mut out = img.clone();
    for px in out.data_mut().chunks_exact_mut(3) {
        let y = LUMA_R * px[0] + LUMA_G * px[1] + LUMA_B * px[2];
        for c in 0..3 {
            px[c] = y + alpha * (px[c] - y);
        }
    }
    out
}

/// A retouching operator with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum RetouchOp {
    Brightness { alpha: f32 },
    Contrast { alpha: f32 },
    ToneCurve { t: Vec<f32> },
    WhiteBalance { gains: [f32; 3] },
    Saturation { alpha: f32 },
}

impl RetouchOp {
    pub fn validate(&self) -> Result<()> {
        match self {
            RetouchOp::Brightness { alpha }
            | RetouchOp::Contrast { alpha }
            | RetouchOp::Saturation { alpha } => {
                if !alpha.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "operator strength must be finite, got {alpha}"
                    )));
                }
            }
            RetouchOp::ToneCurve { t } => validate_tone_params(t)?,
            RetouchOp::WhiteBalance { gains } => {
                if gains.iter().any(|g| !g.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "white-balance gains must be finite: {gains:?}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, img: &ImageRGB) -> Result<ImageRGB> {
        self.validate()?;
        Ok(match self {
            RetouchOp::Brightness { alpha } => brightness(img, *alpha),
            RetouchOp::Contrast { alpha } => contrast(img, *alpha),
            RetouchOp::ToneCurve { t } => tone_curve(img, t)?,
            RetouchOp::WhiteBalance { gains } => white_balance(img, *gains),
            RetouchOp::Saturation { alpha } => saturation(img, *alpha),
        })
    }
}

impl fmt::Display for RetouchOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RetouchOp::Brightness { alpha } => write!(f, "brightness(alpha={alpha})"),
            RetouchOp::Contrast { alpha } => write!(f, "contrast(alpha={alpha})"),
            RetouchOp::ToneCurve { t } => write!(f, "tone_curve(t={t:?})"),
            RetouchOp::WhiteBalance { gains } => write!(f, "white_balance(gains={gains:?})"),
            RetouchOp::Saturation { alpha } => write!(f, "saturation(alpha={alpha})"),
        }
    }
}
