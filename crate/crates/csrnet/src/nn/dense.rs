//! Fully connected layer: `y = W x + b`.

use crate::error::{Error, Result};
use crate::tensor::{Scalar, Tensor};

fn check_fc_shapes<E: Scalar>(
    input: &Tensor<E>,
    weight: &Tensor<E>,
    bias: &Tensor<E>,
) -> Result<(usize, usize)> {
    if input.rank() != 1 || weight.rank() != 2 || bias.rank() != 1 {
        return Err(Error::ShapeMismatch {
            context: "fully_connected ranks (x:1, W:2, b:1)",
            expected: vec![1, 2, 1],
            got: vec![input.rank(), weight.rank(), bias.rank()],
        });
    }
    let (n_out, n_in) = (weight.shape()[0], weight.shape()[1]);
    if input.shape()[0] != n_in || bias.shape()[0] != n_out {
        return Err(Error::ShapeMismatch {
            context: "fully_connected dims",
            expected: vec![n_out, n_in],
            got: vec![bias.shape()[0], input.shape()[0]],
        });
    }
    Ok((n_out, n_in))
}

pub fn fully_connected<E: Scalar>(
    input: &Tensor<E>,
    weight: &Tensor<E>,
    bias: &Tensor<E>,
) -> Result<Tensor<E>> {
    let (n_out, n_in) = check_fc_shapes(input, weight, bias)?;
    let x = input.data();
    let data = (0..n_out)
        .map(|o| {
            let row = &weight.data()[o * n_in..(o + 1) * n_in];
            let mut acc = bias.data()[o];
            for (&w, &v) in row.iter().zip(x) {
                acc += w * v;
            }
            acc
        })
        .collect();
    Tensor::new(vec![n_out], data)
}

pub struct FcGrads<E: Scalar> {
    pub input: Tensor<E>,
    pub weight: Tensor<E>,
    pub bias: Tensor<E>,
}

pub fn fully_connected_backward<E: Scalar>(
    input: &Tensor<E>,
    weight: &Tensor<E>,
    grad_out: &Tensor<E>,
) -> Result<FcGrads<E>> {
    let bias = Tensor::<E>::zeros(vec![weight.shape()[0]]);
    let (n_out, n_in) = check_fc_shapes(input, weight, &bias)?;
    if grad_out.shape() != [n_out] {
        return Err(Error::ShapeMismatch {
            context: "fully_connected_backward grad_out",
            expected: vec![n_out],
            got: grad_out.shape().to_vec(),
        });
    }
    let x = input.data();
    let gy = grad_out.data();
    let mut dx = vec![E::ZERO; n_in];
    let mut dw = vec![E::ZERO; n_out * n_in];
    for o in 0..n_out {
        let g = gy[o];
        let wrow = &weight.data()[o * n_in..(o + 1) * n_in];
        let dwrow = &mut dw[o * n_in..(o + 1) * n_in];
        for i in 0..n_in {
            dx[i] += wrow[i] * g;
            dwrow[i] = g * x[i];
        }
    }
    Ok(FcGrads {
        input: Tensor::new(vec![n_in], dx)?,
        weight: Tensor::new(vec![n_out, n_in], dw)?,
        bias: Tensor::new(vec![n_out], gy.to_vec())?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_map() {
        let x = Tensor::new(vec![3], vec![0.5f32, -1.0, 2.0]).unwrap();
        let mut w = Tensor::zeros(vec![3, 3]);
        for i in 0..3 {
            w.data_mut()[i * 3 + i] = 1.0;
        }
        let b = Tensor::zeros(vec![3]);
        assert_eq!(fully_connected(&x, &w, &b).unwrap().data(), x.data());
    }

    #[test]
    fn zero_weight_gives_bias() {
        let x = Tensor::new(vec![4], vec![9.0f32, -3.0, 1.0, 7.0]).unwrap();
        let w = Tensor::zeros(vec![2, 4]);
        let b = Tensor::new(vec![2], vec![0.3f32, 0.7]).unwrap();
        assert_eq!(fully_connected(&x, &w, &b).unwrap().data(), &[0.3, 0.7]);
    }

    #[test]
    fn rejects_mismatched_dims() {
        let x = Tensor::<f32>::zeros(vec![3]);
        let w = Tensor::<f32>::zeros(vec![2, 4]);
        let b = Tensor::<f32>::zeros(vec![2]);
        assert!(fully_connected(&x, &w, &b).is_err());
    }
}
