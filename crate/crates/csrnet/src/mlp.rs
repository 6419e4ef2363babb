//! Explicit MLP constructions for the pixel-independent operators.
//!
//! Brightness over a flattened single-channel image is one linear layer with
//! an alpha-scaled identity weight. Contrast needs one hidden layer of width
//! `MN + 1`: the extra unit computes the channel mean, and the output layer
//! adds `(1 - alpha) * mean` back onto the alpha-scaled pixels. A numerical
//! verifier below confirms the constructions against the analytic operators.

use crate::error::{Error, Result};
use crate::img::ImageRGB;
use crate::retouch::RetouchOp;
use crate::tensor::Tensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Identity,
    Relu,
}

#[derive(Clone, Debug)]
pub struct MlpLayer {
    /// Row-major `out x in` matrix: `y = W x + b`.
    pub weight: Tensor<f32>,
    pub bias: Tensor<f32>,
    pub activation: Activation,
}

/// A stack of dense layers acting on a flattened image channel.
#[derive(Clone, Debug)]
pub struct MlpEquivalent {
    pub layers: Vec<MlpLayer>,
}

impl MlpEquivalent {
    pub fn input_dim(&self) -> usize {
        self.layers[0].weight.shape()[1]
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().weight.shape()[0]
    }

    /// Run the stack; also returns every post-activation vector so callers
    /// can inspect hidden units.
    pub fn run_with_hidden(&self, x: &[f32]) -> Result<Vec<Vec<f32>>> {
        if x.len() != self.input_dim() {
            return Err(Error::ShapeMismatch {
                context: "MlpEquivalent::run input",
                expected: vec![self.input_dim()],
                got: vec![x.len()],
            });
        }
        let mut acts: Vec<Vec<f32>> = Vec::with_capacity(self.layers.len());
        let mut cur = x.to_vec();
        for layer in &self.layers {
            let (rows, cols) = (layer.weight.shape()[0], layer.weight.shape()[1]);
            let mut next = vec![0.0f32; rows];
            for (r, out) in next.iter_mut().enumerate() {
                let wrow = &layer.weight.data()[r * cols..(r + 1) * cols];
                let mut acc = layer.bias.data()[r];
                for (&w, &v) in wrow.iter().zip(&cur) {
                    acc += w * v;
                }
                *out = acc;
            }
            if layer.activation == Activation::Relu {
                for v in &mut next {
                    *v = v.max(0.0);
                }
            }
            acts.push(next.clone());
            cur = next;
        }
        Ok(acts)
    }

    pub fn run(&self, x: &[f32]) -> Result<Vec<f32>> {
        Ok(self.run_with_hidden(x)?.pop().unwrap())
    }
}

/// One-layer MLP with weight `diag(alpha)` and zero bias over the flattened
/// `M x N` channel.
pub fn build_mlp_brightness(alpha: f32, m: usize, n: usize) -> MlpEquivalent {
    let d = m * n;
    let mut weight = Tensor::zeros(vec![d, d]);
    for i in 0..d {
        weight.data_mut()[i * d + i] = alpha;
    }
    MlpEquivalent {
        layers: vec![MlpLayer {
            weight,
            bias: Tensor::zeros(vec![d]),
            activation: Activation::Identity,
        }],
    }
}

/// Two-layer MLP of widths `MN -> MN+1 -> MN`.
///
/// Hidden layer: rows 0..MN are `diag(alpha)`, row MN is the all-`1/MN`
/// averaging row. Output layer: columns 0..MN are the identity, the last
/// column is the constant `(1 - alpha)` fan-out of the mean unit.
pub fn build_mlp_contrast(alpha: f32, m: usize, n: usize) -> MlpEquivalent {
    let d = m * n;
    let mut w1 = Tensor::zeros(vec![d + 1, d]);
    for i in 0..d {
        w1.data_mut()[i * d + i] = alpha;
    }
    let inv = 1.0 / d as f32;
    for j in 0..d {
        w1.data_mut()[d * d + j] = inv;
    }

    let mut w2 = Tensor::zeros(vec![d, d + 1]);
    for i in 0..d {
        w2.data_mut()[i * (d + 1) + i] = 1.0;
        w2.data_mut()[i * (d + 1) + d] = 1.0 - alpha;
    }

    MlpEquivalent {
        layers: vec![
            MlpLayer {
                weight: w1,
                bias: Tensor::zeros(vec![d + 1]),
                activation: Activation::Identity,
            },
            MlpLayer {
                weight: w2,
                bias: Tensor::zeros(vec![d]),
                activation: Activation::Identity,
            },
        ],
    }
}

/// Run `mlp` over each flattened channel of `img` and compare with the
/// analytic operator. Returns the max |difference| over all pixels/channels.
pub fn verify_equivalence(op: &RetouchOp, mlp: &MlpEquivalent, img: &ImageRGB) -> Result<f32> {
    let (h, w) = img.dims();
    if mlp.input_dim() != h * w || mlp.output_dim() != h * w {
        return Err(Error::ShapeMismatch {
            context: "verify_equivalence mlp vs image",
            expected: vec![h * w],
            got: vec![mlp.input_dim(), mlp.output_dim()],
        });
    }
    let reference = op.apply(img)?;
    let mut worst = 0.0f32;
    let mut channel = vec![0.0f32; h * w];
    for c in 0..3 {
        for (i, px) in img.data().chunks_exact(3).enumerate() {
            channel[i] = px[c];
        }
        let out = mlp.run(&channel)?;
        for (i, &v) in out.iter().enumerate() {
            let want = reference.data()[i * 3 + c];
            worst = worst.max((v - want).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    fn random_image(h: usize, w: usize, seed: u64) -> ImageRGB {
        let mut rng = SeededRng::new(seed);
        ImageRGB::from_fn(h, w, |_, _| {
            [
                rng.uniform() as f32,
                rng.uniform() as f32,
                rng.uniform() as f32,
            ]
        })
    }

    #[test]
    fn brightness_weight_structure() {
        let mlp = build_mlp_brightness(1.0, 2, 2);
        let w = &mlp.layers[0].weight;
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_eq!(w.data()[i * 4 + j], want);
            }
        }

        let zero = build_mlp_brightness(0.0, 2, 3);
        let out = zero.run(&[0.4; 6]).unwrap();
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn brightness_equivalence() {
        let img = random_image(4, 4, 21);
        for alpha in [0.5f32, 1.5] {
            let mlp = build_mlp_brightness(alpha, 4, 4);
            let diff =
                verify_equivalence(&RetouchOp::Brightness { alpha }, &mlp, &img).unwrap();
            assert!(diff <= 1e-6, "alpha {alpha}: diff {diff}");
        }
    }

    #[test]
    fn contrast_alpha_one_is_identity() {
        let img = random_image(3, 3, 22);
        let mlp = build_mlp_contrast(1.0, 3, 3);
        let channel: Vec<f32> = img.data().chunks_exact(3).map(|px| px[0]).collect();
        let out = mlp.run(&channel).unwrap();
        for (a, b) in out.iter().zip(&channel) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn contrast_equivalence_and_mean_unit() {
        let img = random_image(2, 2, 23);
        let mlp = build_mlp_contrast(1.5, 2, 2);
        let diff =
            verify_equivalence(&RetouchOp::Contrast { alpha: 1.5 }, &mlp, &img).unwrap();
        assert!(diff <= 1e-6, "diff {diff}");

        // hidden unit MN carries the channel mean
        let channel: Vec<f32> = img.data().chunks_exact(3).map(|px| px[1]).collect();
        let acts = mlp.run_with_hidden(&channel).unwrap();
        let mean: f32 = channel.iter().sum::<f32>() / channel.len() as f32;
        assert!((acts[0][4] - mean).abs() < 1e-6);
    }

    #[test]
    fn perturbed_weight_is_detected() {
        let img = random_image(4, 4, 24);
        let mut mlp = build_mlp_brightness(1.5, 4, 4);
        mlp.layers[0].weight.data_mut()[3] += 0.01;
        let diff = verify_equivalence(&RetouchOp::Brightness { alpha: 1.5 }, &mlp, &img).unwrap();
        assert!(diff > 1e-3, "perturbation not detected: {diff}");
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let img = random_image(4, 4, 25);
        let mlp = build_mlp_brightness(1.0, 2, 2);
        assert!(verify_equivalence(&RetouchOp::Brightness { alpha: 1.0 }, &mlp, &img).is_err());
    }
}
