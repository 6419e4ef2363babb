//! Global average pooling over the spatial extent of a feature map.

use crate::error::{Error, Result};
use crate::tensor::{Scalar, Tensor};

/// `C x H x W` -> `C` per-channel means.
pub fn global_avg_pool<E: Scalar>(input: &Tensor<E>) -> Result<Tensor<E>> {
    if input.rank() != 3 {
        return Err(Error::ShapeMismatch {
            context: "global_avg_pool input (C,H,W)",
            expected: vec![3],
            got: vec![input.rank()],
        });
    }
    let (c, h, w) = (input.shape()[0], input.shape()[1], input.shape()[2]);
    let inv = E::from_f64(1.0 / (h * w) as f64);
    let data = (0..c)
        .map(|i| {
            let plane = &input.data()[i * h * w..(i + 1) * h * w];
            plane.iter().copied().sum::<E>() * inv
        })
        .collect();
    Tensor::new(vec![c], data)
}

/// Spreads each channel gradient uniformly over its `H x W` plane.
pub fn global_avg_pool_backward<E: Scalar>(
    grad_out: &Tensor<E>,
    height: usize,
    width: usize,
) -> Result<Tensor<E>> {
    if grad_out.rank() != 1 {
        return Err(Error::ShapeMismatch {
            context: "global_avg_pool_backward grad (C)",
            expected: vec![1],
            got: vec![grad_out.rank()],
        });
    }
    let c = grad_out.shape()[0];
    let inv = E::from_f64(1.0 / (height * width) as f64);
    let mut data = vec![E::ZERO; c * height * width];
    for (i, plane) in data.chunks_exact_mut(height * width).enumerate() {
        plane.fill(grad_out.data()[i] * inv);
    }
    Tensor::new(vec![c, height, width], data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_mean() {
        let x = Tensor::new(vec![1, 2, 2], vec![1.0f32, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(global_avg_pool(&x).unwrap().data(), &[2.5]);
    }

    #[test]
    fn constant_map() {
        let x = Tensor::full(vec![3, 4, 5], 0.7f32);
        let y = global_avg_pool(&x).unwrap();
        for &v in y.data() {
            assert!((v - 0.7).abs() < 1e-6);
        }
    }

    #[test]
    fn backward_spreads_uniformly() {
        let g = Tensor::new(vec![2], vec![4.0f32, 8.0]).unwrap();
        let dx = global_avg_pool_backward(&g, 2, 2).unwrap();
        assert_eq!(dx.data(), &[1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 2.0]);
    }
}
