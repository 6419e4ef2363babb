//! ReLU, elementwise. The subgradient at exactly 0 is 0.

use crate::error::{Error, Result};
use crate::tensor::{Scalar, Tensor};

pub fn relu<E: Scalar>(input: &Tensor<E>) -> Tensor<E> {
    input.map(|v| v.maxv(E::ZERO))
}

/// Masks the incoming gradient where the *pre-activation* input was <= 0.
pub fn relu_backward<E: Scalar>(input: &Tensor<E>, grad_out: &Tensor<E>) -> Result<Tensor<E>> {
    if input.shape() != grad_out.shape() {
        return Err(Error::ShapeMismatch {
            context: "relu_backward",
            expected: input.shape().to_vec(),
            got: grad_out.shape().to_vec(),
        });
    }
    let data = input
        .data()
        .iter()
        .zip(grad_out.data())
        .map(|(&x, &g)| if x > E::ZERO { g } else { E::ZERO })
        .collect();
    Tensor::new(input.shape().to_vec(), data)
}
