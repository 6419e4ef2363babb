//! Central-difference verification of hand-written backward passes.
//!
//! Runs in `f64` only; `f32` rounding would swamp the 1e-6 tolerance the
//! layers are held to.

use crate::tensor::Tensor;

/// Default central-difference step.
pub const DEFAULT_STEP: f64 = 1e-5;

/// Compare analytic gradients against central finite differences of a scalar
/// function, over every element of every input tensor.
///
/// `f` is evaluated at perturbed copies of `inputs`; `analytic[i]` must hold
/// the claimed gradient of `f` w.r.t. `inputs[i]`. Returns the maximum
/// relative error `|analytic - numeric| / max(1, |numeric|)`.
pub fn grad_check<F>(inputs: &[Tensor<f64>], analytic: &[Tensor<f64>], h: f64, f: F) -> f64
where
    F: Fn(&[Tensor<f64>]) -> f64,
{
    assert_eq!(
        inputs.len(),
        analytic.len(),
        "one analytic gradient per input tensor"
    );
    let mut work: Vec<Tensor<f64>> = inputs.to_vec();
    let mut worst = 0.0f64;
    for ti in 0..work.len() {
        assert_eq!(
            work[ti].shape(),
            analytic[ti].shape(),
            "gradient shape must match its input"
        );
        for ei in 0..work[ti].len() {
            let orig = work[ti].data()[ei];
            work[ti].data_mut()[ei] = orig + h;
            let up = f(&work);
            work[ti].data_mut()[ei] = orig - h;
            let down = f(&work);
            work[ti].data_mut()[ei] = orig;
            let numeric = (up - down) / (2.0 * h);
            let claimed = analytic[ti].data()[ei];
            let err = (claimed - numeric).abs() / numeric.abs().max(1.0);
            if err > worst {
                worst = err;
            }
        }
    }
    worst
}
