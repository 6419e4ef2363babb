//! Mean absolute error. The gradient at a tie is 0.

use crate::error::{Error, Result};
use crate::tensor::{Scalar, Tensor};

pub fn l1_loss<E: Scalar>(pred: &Tensor<E>, target: &Tensor<E>) -> Result<E> {
    if pred.shape() != target.shape() {
        return Err(Error::ShapeMismatch {
            context: "l1_loss",
            expected: pred.shape().to_vec(),
            got: target.shape().to_vec(),
        });
    }
    let sum: E = pred
        .data()
        .iter()
        .zip(target.data())
        .map(|(&p, &t)| (p - t).abs())
        .sum();
    Ok(sum * E::from_f64(1.0 / pred.len() as f64))
}

/// `d loss / d pred = sign(pred - target) / count`.
pub fn l1_loss_backward<E: Scalar>(pred: &Tensor<E>, target: &Tensor<E>) -> Result<Tensor<E>> {
    if pred.shape() != target.shape() {
        return Err(Error::ShapeMismatch {
            context: "l1_loss_backward",
            expected: pred.shape().to_vec(),
            got: target.shape().to_vec(),
        });
    }
    let inv = E::from_f64(1.0 / pred.len() as f64);
    let data = pred
        .data()
        .iter()
        .zip(target.data())
        .map(|(&p, &t)| {
            if p > t {
                inv
            } else if p < t {
                -inv
            } else {
                E::ZERO
            }
        })
        .collect();
    Tensor::new(pred.shape().to_vec(), data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_on_identical() {
        let a = Tensor::from_fn(vec![5], |i| i as f32);
        assert_eq!(l1_loss(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn hand_case() {
        let p = Tensor::new(vec![2], vec![0.0f32, 1.0]).unwrap();
        let t = Tensor::new(vec![2], vec![1.0f32, 1.0]).unwrap();
        assert_eq!(l1_loss(&p, &t).unwrap(), 0.5);
    }

    #[test]
    fn gradient_signs_and_tie() {
        let p = Tensor::new(vec![3], vec![2.0f32, 0.0, 1.0]).unwrap();
        let t = Tensor::new(vec![3], vec![1.0f32, 1.0, 1.0]).unwrap();
        let g = l1_loss_backward(&p, &t).unwrap();
        let third = 1.0 / 3.0f32;
        assert_eq!(g.data(), &[third, -third, 0.0]);
    }

    #[test]
    fn rejects_shape_mismatch() {
        let p = Tensor::<f32>::zeros(vec![2]);
        let t = Tensor::<f32>::zeros(vec![3]);
        assert!(l1_loss(&p, &t).is_err());
    }
}
