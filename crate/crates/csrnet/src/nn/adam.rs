//! Learnable parameters and the Adam update rule (bias-corrected).

use crate::error::{Error, Result};
use crate::tensor::{Scalar, Tensor};

/// A trainable tensor bundled with its gradient and Adam state.
#[derive(Clone, Debug)]
pub struct Parameter<E: Scalar = f32> {
    pub value: Tensor<E>,
    pub grad: Tensor<E>,
    pub adam_m: Tensor<E>,
    pub adam_v: Tensor<E>,
    pub step_count: u64,
}

impl<E: Scalar> Parameter<E> {
    pub fn new(value: Tensor<E>) -> Self {
        let shape = value.shape().to_vec();
        Self {
            value,
            grad: Tensor::zeros(shape.clone()),
            adam_m: Tensor::zeros(shape.clone()),
            adam_v: Tensor::zeros(shape),
            step_count: 0,
        }
    }

    pub fn zero_grad(&mut self) {
        self.grad.data_mut().fill(E::ZERO);
    }

    pub fn accumulate_grad(&mut self, g: &Tensor<E>) -> Result<()> {
        if g.shape() != self.grad.shape() {
            return Err(Error::ShapeMismatch {
                context: "Parameter::accumulate_grad",
                expected: self.grad.shape().to_vec(),
                got: g.shape().to_vec(),
            });
        }
        for (dst, &src) in self.grad.data_mut().iter_mut().zip(g.data()) {
            *dst += src;
        }
        Ok(())
    }

    /// Mirror this parameter into another element type (values only; fresh
    /// optimizer state).
    pub fn cast<F: Scalar>(&self) -> Parameter<F> {
        Parameter::new(self.value.cast())
    }
}

/// Adam hyperparameters. The betas must lie in (0,1).
#[derive(Clone, Copy, Debug)]
pub struct AdamParams {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamParams {
    pub fn with_lr(lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl Default for AdamParams {
    fn default() -> Self {
        Self::with_lr(1e-4)
    }
}

/// One bias-corrected Adam update on `param.value` from `param.grad`.
/// Rejects non-finite gradients and out-of-range hyperparameters.
pub fn adam_step<E: Scalar>(param: &mut Parameter<E>, hp: &AdamParams) -> Result<()> {
    if !(hp.beta1 > 0.0 && hp.beta1 < 1.0 && hp.beta2 > 0.0 && hp.beta2 < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "adam betas must lie in (0,1): beta1={}, beta2={}",
            hp.beta1, hp.beta2
        )));
    }
    if hp.lr <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "adam learning rate must be positive: {}",
            hp.lr
        )));
    }
    if !param.grad.all_finite() {
        return Err(Error::Divergence {
            iter: param.step_count,
            reason: "non-finite gradient in adam_step".into(),
        });
    }

    param.step_count += 1;
    let t = param.step_count as i32;
    let b1 = E::from_f64(hp.beta1);
    let b2 = E::from_f64(hp.beta2);
    let one_m_b1 = E::from_f64(1.0 - hp.beta1);
    let one_m_b2 = E::from_f64(1.0 - hp.beta2);
    let corr1 = E::from_f64(1.0 / (1.0 - hp.beta1.powi(t)));
    let corr2 = E::from_f64(1.0 / (1.0 - hp.beta2.powi(t)));
    let lr = E::from_f64(hp.lr);
    let eps = E::from_f64(hp.eps);

    let g = param.grad.data();
    let m = param.adam_m.data_mut();
    let v = param.adam_v.data_mut();
    let val = param.value.data_mut();
    for i in 0..g.len() {
        m[i] = b1 * m[i] + one_m_b1 * g[i];
        v[i] = b2 * v[i] + one_m_b2 * g[i] * g[i];
        let m_hat = m[i] * corr1;
        let v_hat = v[i] * corr2;
        val[i] -= lr * m_hat / (v_hat.sqrt() + eps);
    }
    Ok(())
}
