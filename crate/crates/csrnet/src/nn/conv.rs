//! 2-D cross-correlation with zero padding, forward and backward.
//!
//! Kernels do not get flipped; learned weights make the convolution vs.
//! correlation distinction immaterial. The `K=1, stride=1, pad=0` case is a
//! per-pixel linear map and takes a dedicated matmul-style path since it
//! dominates training time.

use crate::error::{Error, Result};
use crate::tensor::{Scalar, Tensor};

/// Output length along one axis, or an error when the kernel overruns.
fn out_extent(input: usize, kernel: usize, stride: usize, padding: usize) -> Result<usize> {
    let span = input as isize + 2 * padding as isize - kernel as isize;
    if span < 0 || stride == 0 {
        return Err(Error::InvalidArgument(format!(
            "conv2d produces non-positive output: input {input}, kernel {kernel}, \
             stride {stride}, padding {padding}"
        )));
    }
    Ok(span as usize / stride + 1)
}

/// Range of output indices whose receptive position `t*stride + k - padding`
/// stays inside `[0, input)`.
#[inline]
fn valid_out_range(
    n_out: usize,
    stride: usize,
    k_off: usize,
    padding: usize,
    n_in: usize,
) -> (usize, usize) {
    let lo = if padding > k_off {
        (padding - k_off).div_ceil(stride)
    } else {
        0
    };
    let top = n_in as isize - 1 + padding as isize - k_off as isize;
    if top < 0 {
        return (0, 0);
    }
    let hi = (top as usize / stride + 1).min(n_out);
    (lo.min(hi), hi)
}

fn check_conv_shapes<E: Scalar>(
    input: &Tensor<E>,
    weight: &Tensor<E>,
    bias: &Tensor<E>,
) -> Result<(usize, usize, usize, usize, usize)> {
    if input.rank() != 3 {
        return Err(Error::ShapeMismatch {
            context: "conv2d input (C,H,W)",
            expected: vec![3],
            got: vec![input.rank()],
        });
    }
    if weight.rank() != 4 || weight.shape()[2] != weight.shape()[3] {
        return Err(Error::ShapeMismatch {
            context: "conv2d weight (O,C,K,K)",
            expected: vec![4],
            got: weight.shape().to_vec(),
        });
    }
    let (c_in, h, w) = (input.shape()[0], input.shape()[1], input.shape()[2]);
    let (c_out, k) = (weight.shape()[0], weight.shape()[2]);
    if weight.shape()[1] != c_in {
        return Err(Error::ShapeMismatch {
            context: "conv2d input channels vs weight channels",
            expected: vec![weight.shape()[1]],
            got: vec![c_in],
        });
    }
    if bias.rank() != 1 || bias.shape()[0] != c_out {
        return Err(Error::ShapeMismatch {
            context: "conv2d bias",
            expected: vec![c_out],
            got: bias.shape().to_vec(),
        });
    }
    if k % 2 == 0 {
        return Err(Error::InvalidArgument(format!("kernel size {k} must be odd")));
    }
    Ok((c_in, h, w, c_out, k))
}

/// Cross-correlation of a `C x H x W` input with `O x C x K x K` weights.
pub fn conv2d<E: Scalar>(
    input: &Tensor<E>,
    weight: &Tensor<E>,
    bias: &Tensor<E>,
    stride: usize,
    padding: usize,
) -> Result<Tensor<E>> {
    let (c_in, h, w, c_out, k) = check_conv_shapes(input, weight, bias)?;
    let oh = out_extent(h, k, stride, padding)?;
    let ow = out_extent(w, k, stride, padding)?;

    let x = input.data();
    let wt = weight.data();
    let b = bias.data();
    let mut out = vec![E::ZERO; c_out * oh * ow];

    if k == 1 && stride == 1 && padding == 0 {
        // Per-pixel linear map: out[o, p] = b[o] + sum_c w[o,c] * x[c, p].
        let px = h * w;
        for o in 0..c_out {
            let orow = &mut out[o * px..(o + 1) * px];
            orow.fill(b[o]);
            for c in 0..c_in {
                let wv = wt[o * c_in + c];
                let xrow = &x[c * px..(c + 1) * px];
                for (dst, &src) in orow.iter_mut().zip(xrow) {
                    *dst += wv * src;
                }
            }
        }
        return Tensor::new(vec![c_out, oh, ow], out);
    }

    for o in 0..c_out {
        let obase = o * oh * ow;
        out[obase..obase + oh * ow].fill(b[o]);
        for c in 0..c_in {
            let xbase = c * h * w;
            let wbase = (o * c_in + c) * k * k;
            for ki in 0..k {
                let (oy_lo, oy_hi) = valid_out_range(oh, stride, ki, padding, h);
                for kj in 0..k {
                    let wv = wt[wbase + ki * k + kj];
                    let (ox_lo, ox_hi) = valid_out_range(ow, stride, kj, padding, w);
                    if ox_lo >= ox_hi {
                        continue;
                    }
                    for oy in oy_lo..oy_hi {
                        let iy = oy * stride + ki - padding;
                        let orow = obase + oy * ow;
                        let irow = xbase + iy * w;
                        if stride == 1 {
                            let ix0 = irow + ox_lo + kj - padding;
                            let n = ox_hi - ox_lo;
                            let dst = &mut out[orow + ox_lo..orow + ox_lo + n];
                            let src = &x[ix0..ix0 + n];
                            for (d, &s) in dst.iter_mut().zip(src) {
                                *d += wv * s;
                            }
                        } else {
                            for ox in ox_lo..ox_hi {
                                let ix = ox * stride + kj - padding;
                                out[orow + ox] += wv * x[irow + ix];
                            }
                        }
                    }
                }
            }
        }
    }
    Tensor::new(vec![c_out, oh, ow], out)
}

/// Gradients of a conv2d w.r.t. its input, weight and bias.
pub struct Conv2dGrads<E: Scalar> {
    pub input: Tensor<E>,
    pub weight: Tensor<E>,
    pub bias: Tensor<E>,
}

pub fn conv2d_backward<E: Scalar>(
    input: &Tensor<E>,
    weight: &Tensor<E>,
    stride: usize,
    padding: usize,
    grad_out: &Tensor<E>,
) -> Result<Conv2dGrads<E>> {
    let (c_in, h, w, c_out, k) = {
        // bias shape is implied by the weight here
        let bias = Tensor::<E>::zeros(vec![weight.shape()[0]]);
        check_conv_shapes(input, weight, &bias)?
    };
    let oh = out_extent(h, k, stride, padding)?;
    let ow = out_extent(w, k, stride, padding)?;
    if grad_out.shape() != [c_out, oh, ow] {
        return Err(Error::ShapeMismatch {
            context: "conv2d_backward grad_out",
            expected: vec![c_out, oh, ow],
            got: grad_out.shape().to_vec(),
        });
    }

    let x = input.data();
    let wt = weight.data();
    let gy = grad_out.data();
    let mut dx = vec![E::ZERO; c_in * h * w];
    let mut dw = vec![E::ZERO; c_out * c_in * k * k];
    let mut db = vec![E::ZERO; c_out];

    for o in 0..c_out {
        db[o] = gy[o * oh * ow..(o + 1) * oh * ow].iter().copied().sum();
    }

    if k == 1 && stride == 1 && padding == 0 {
        let px = h * w;
        for o in 0..c_out {
            let grow = &gy[o * px..(o + 1) * px];
            for c in 0..c_in {
                let wv = wt[o * c_in + c];
                let xrow = &x[c * px..(c + 1) * px];
                let dxrow = &mut dx[c * px..(c + 1) * px];
                let mut acc = E::ZERO;
                for ((d, &g), &s) in dxrow.iter_mut().zip(grow).zip(xrow) {
                    *d += wv * g;
                    acc += g * s;
                }
                dw[o * c_in + c] = acc;
            }
        }
        return Ok(Conv2dGrads {
            input: Tensor::new(vec![c_in, h, w], dx)?,
            weight: Tensor::new(weight.shape().to_vec(), dw)?,
            bias: Tensor::new(vec![c_out], db)?,
        });
    }

    for o in 0..c_out {
        let obase = o * oh * ow;
        for c in 0..c_in {
            let xbase = c * h * w;
            let wbase = (o * c_in + c) * k * k;
            for ki in 0..k {
                let (oy_lo, oy_hi) = valid_out_range(oh, stride, ki, padding, h);
                for kj in 0..k {
                    let wv = wt[wbase + ki * k + kj];
                    let (ox_lo, ox_hi) = valid_out_range(ow, stride, kj, padding, w);
                    if ox_lo >= ox_hi {
                        continue;
                    }
                    let mut wacc = E::ZERO;
                    for oy in oy_lo..oy_hi {
                        let iy = oy * stride + ki - padding;
                        let orow = obase + oy * ow;
                        let irow = xbase + iy * w;
                        if stride == 1 {
                            let ix0 = irow + ox_lo + kj - padding;
                            let n = ox_hi - ox_lo;
                            let gyrow = &gy[orow + ox_lo..orow + ox_lo + n];
                            let xrow = &x[ix0..ix0 + n];
                            let dxrow = &mut dx[ix0..ix0 + n];
                            for ((d, &g), &s) in dxrow.iter_mut().zip(gyrow).zip(xrow) {
                                *d += wv * g;
                                wacc += g * s;
                            }
                        } else {
                            for ox in ox_lo..ox_hi {
                                let ix = irow + ox * stride + kj - padding;
                                let g = gy[orow + ox];
                                dx[ix] += wv * g;
                                wacc += g * x[ix];
                            }
                        }
                    }
                    dw[wbase + ki * k + kj] = wacc;
                }
            }
        }
    }

    Ok(Conv2dGrads {
        input: Tensor::new(vec![c_in, h, w], dx)?,
        weight: Tensor::new(weight.shape().to_vec(), dw)?,
        bias: Tensor::new(vec![c_out], db)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct-summation reference, kept deliberately naive and independent
    /// of the production loops above.
    pub fn conv2d_reference(
        input: &Tensor<f64>,
        weight: &Tensor<f64>,
        bias: &Tensor<f64>,
        stride: usize,
        padding: usize,
    ) -> Tensor<f64> {
        let (c_in, h, w) = (input.shape()[0], input.shape()[1], input.shape()[2]);
        let (c_out, k) = (weight.shape()[0], weight.shape()[2]);
        let oh = (h + 2 * padding - k) / stride + 1;
        let ow = (w + 2 * padding - k) / stride + 1;
        let mut out = Tensor::zeros(vec![c_out, oh, ow]);
        for o in 0..c_out {
            for oy in 0..oh {
                for ox in 0..ow {
                    let mut acc = bias.data()[o];
                    for c in 0..c_in {
                        for ki in 0..k {
                            for kj in 0..k {
                                let iy = oy * stride + ki;
                                let ix = ox * stride + kj;
                                if iy < padding || ix < padding {
                                    continue;
                                }
                                let (iy, ix) = (iy - padding, ix - padding);
                                if iy >= h || ix >= w {
                                    continue;
                                }
                                acc += weight.data()[((o * c_in + c) * k + ki) * k + kj]
                                    * input.data()[(c * h + iy) * w + ix];
                            }
                        }
                    }
                    out.data_mut()[(o * oh + oy) * ow + ox] = acc;
                }
            }
        }
        out
    }

    #[test]
    fn one_by_one_matches_hand_case() {
        // 1x1x2 input [2,3], weight 0.5, bias 0.25 -> [1.25, 1.75]
        let x = Tensor::new(vec![1, 1, 2], vec![2.0f32, 3.0]).unwrap();
        let w = Tensor::new(vec![1, 1, 1, 1], vec![0.5f32]).unwrap();
        let b = Tensor::new(vec![1], vec![0.25f32]).unwrap();
        let y = conv2d(&x, &w, &b, 1, 0).unwrap();
        assert_eq!(y.data(), &[1.25, 1.75]);
    }

    #[test]
    fn identity_kernel_reproduces_input() {
        let x = Tensor::from_fn(vec![2, 4, 5], |i| (i as f32 * 0.37).sin());
        // per-channel identity: 1 at the center tap for the matching channel
        let mut w = Tensor::zeros(vec![2, 2, 3, 3]);
        for c in 0..2 {
            w.data_mut()[((c * 2 + c) * 3 + 1) * 3 + 1] = 1.0;
        }
        let b = Tensor::zeros(vec![2]);
        let y = conv2d(&x, &w, &b, 1, 1).unwrap();
        assert_eq!(y.data(), x.data());
    }

    #[test]
    fn matches_direct_summation_on_random_shapes() {
        let mut rng = crate::rng::SeededRng::new(11);
        for &(c_in, h, w, c_out, k, stride, padding) in &[
            (2usize, 5usize, 6usize, 3usize, 3usize, 1usize, 1usize),
            (3, 7, 7, 2, 3, 2, 1),
            (1, 4, 4, 2, 1, 1, 0),
            (3, 9, 8, 4, 7, 2, 3),
            (2, 3, 3, 1, 3, 1, 0),
        ] {
            let x = Tensor::<f64>::from_fn(vec![c_in, h, w], |_| rng.uniform_in(-1.0, 1.0));
            let wt =
                Tensor::<f64>::from_fn(vec![c_out, c_in, k, k], |_| rng.uniform_in(-1.0, 1.0));
            let b = Tensor::<f64>::from_fn(vec![c_out], |_| rng.uniform_in(-1.0, 1.0));
            let got = conv2d(&x, &wt, &b, stride, padding).unwrap();
            let want = conv2d_reference(&x, &wt, &b, stride, padding);
            assert!(got.max_abs_diff(&want).unwrap() < 1e-12);
        }
    }

    #[test]
    fn rejects_channel_mismatch_and_empty_output() {
        let x = Tensor::<f32>::zeros(vec![2, 4, 4]);
        let w = Tensor::<f32>::zeros(vec![1, 3, 1, 1]);
        let b = Tensor::<f32>::zeros(vec![1]);
        assert!(matches!(
            conv2d(&x, &w, &b, 1, 0),
            Err(Error::ShapeMismatch { .. })
        ));

        let w = Tensor::<f32>::zeros(vec![1, 2, 7, 7]);
        assert!(matches!(
            conv2d(&x, &w, &b, 1, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn stride_two_output_is_ceil_half_with_same_padding() {
        for &(n, k) in &[(480usize, 7usize), (480, 3), (479, 7), (479, 3), (1, 3)] {
            assert_eq!(out_extent(n, k, 2, k / 2).unwrap(), n.div_ceil(2));
        }
    }
}
