//! Vector normalization and scaling transforms for the condition vector,
//! all with full-Jacobian backward passes (the condition path sits inside
//! the training graph, so no stop-gradients).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tensor::{Scalar, Tensor};

/// Degeneracy threshold for norms and denominators.
pub const DEGENERACY_EPS: f64 = 1e-12;

fn check_vector<E: Scalar>(x: &Tensor<E>, context: &'static str) -> Result<usize> {
    if x.rank() != 1 {
        return Err(Error::ShapeMismatch {
            context,
            expected: vec![1],
            got: vec![x.rank()],
        });
    }
    Ok(x.shape()[0])
}

/// Rescale a vector onto the radius-sqrt(N) hypersphere:
/// `out = sqrt(N) * x / ||x||_2`.
pub fn unit_normalize<E: Scalar>(x: &Tensor<E>) -> Result<Tensor<E>> {
    let n = check_vector(x, "unit_normalize input")?;
    let norm = l2_norm(x);
    if norm <= DEGENERACY_EPS {
        return Err(Error::Degenerate(format!(
            "unit_normalize input norm {norm:.3e} below {DEGENERACY_EPS:.0e}"
        )));
    }
    let s = E::from_f64((n as f64).sqrt() / norm);
    Ok(x.scale(s))
}

/// Full Jacobian of unit normalization:
/// `dx = sqrt(N)/r * (g - x (g·x) / r^2)` with `r = ||x||`.
pub fn unit_normalize_backward<E: Scalar>(x: &Tensor<E>, grad_out: &Tensor<E>) -> Result<Tensor<E>> {
    let n = check_vector(x, "unit_normalize_backward input")?;
    if grad_out.shape() != x.shape() {
        return Err(Error::ShapeMismatch {
            context: "unit_normalize_backward grad_out",
            expected: x.shape().to_vec(),
            got: grad_out.shape().to_vec(),
        });
    }
    let r = l2_norm(x);
    if r <= DEGENERACY_EPS {
        return Err(Error::Degenerate(format!(
            "unit_normalize input norm {r:.3e} below {DEGENERACY_EPS:.0e}"
        )));
    }
    let dot: f64 = x
        .data()
        .iter()
        .zip(grad_out.data())
        .map(|(&a, &g)| a.to_f64() * g.to_f64())
        .sum();
    let scale = (n as f64).sqrt() / r;
    let proj = dot / (r * r);
    let data = x
        .data()
        .iter()
        .zip(grad_out.data())
        .map(|(&a, &g)| E::from_f64(scale * (g.to_f64() - a.to_f64() * proj)))
        .collect();
    Tensor::new(x.shape().to_vec(), data)
}

fn l2_norm<E: Scalar>(x: &Tensor<E>) -> f64 {
    x.data()
        .iter()
        .map(|&v| v.to_f64() * v.to_f64())
        .sum::<f64>()
        .sqrt()
}

/// The explored condition-vector transforms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalizer {
    None,
    Softmax,
    Sigmoid,
    SoftmaxScaling,
    SigmoidScaling,
    Zscore,
    Minmax,
    Un,
}

impl Normalizer {
    pub const ALL: [Normalizer; 8] = [
        Normalizer::None,
        Normalizer::Softmax,
        Normalizer::Sigmoid,
        Normalizer::SoftmaxScaling,
        Normalizer::SigmoidScaling,
        Normalizer::Zscore,
        Normalizer::Minmax,
        Normalizer::Un,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Normalizer::None => "none",
            Normalizer::Softmax => "softmax",
            Normalizer::Sigmoid => "sigmoid",
            Normalizer::SoftmaxScaling => "softmax_scaling",
            Normalizer::SigmoidScaling => "sigmoid_scaling",
            Normalizer::Zscore => "zscore",
            Normalizer::Minmax => "minmax",
            Normalizer::Un => "un",
        }
    }
}

impl fmt::Display for Normalizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Normalizer {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Normalizer::ALL
            .into_iter()
            .find(|n| n.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown normalizer '{s}'")))
    }
}

fn softmax<E: Scalar>(x: &Tensor<E>) -> Vec<E> {
    let max = x
        .data()
        .iter()
        .fold(f64::NEG_INFINITY, |m, &v| m.max(v.to_f64()));
    let exps: Vec<f64> = x.data().iter().map(|&v| (v.to_f64() - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| E::from_f64(e / sum)).collect()
}

#[inline]
fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

fn mean_std<E: Scalar>(x: &Tensor<E>) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.data().iter().map(|&v| v.to_f64()).sum::<f64>() / n;
    // population standard deviation (divide by N)
    let var = x
        .data()
        .iter()
        .map(|&v| {
            let d = v.to_f64() - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    (mean, var.sqrt())
}

fn min_max<E: Scalar>(x: &Tensor<E>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in x.data() {
        lo = lo.min(v.to_f64());
        hi = hi.max(v.to_f64());
    }
    (lo, hi)
}

/// Apply one of the eight transforms to a vector.
pub fn apply_normalizer<E: Scalar>(kind: Normalizer, x: &Tensor<E>) -> Result<Tensor<E>> {
    check_vector(x, "apply_normalizer input")?;
    match kind {
        Normalizer::None => Ok(x.clone()),
        Normalizer::Softmax => Tensor::new(x.shape().to_vec(), softmax(x)),
        Normalizer::Sigmoid => Ok(x.map(|v| E::from_f64(sigmoid(v.to_f64())))),
        Normalizer::SoftmaxScaling => {
            let s = softmax(x);
            let data = x
                .data()
                .iter()
                .zip(&s)
                .map(|(&v, &si)| v * si)
                .collect();
            Tensor::new(x.shape().to_vec(), data)
        }
        Normalizer::SigmoidScaling => {
            Ok(x.map(|v| v * E::from_f64(sigmoid(v.to_f64()))))
        }
        Normalizer::Zscore => {
            let (mean, std) = mean_std(x);
            if std <= DEGENERACY_EPS {
                return Err(Error::Degenerate(
                    "zscore of a constant vector (zero standard deviation)".into(),
                ));
            }
            Ok(x.map(|v| E::from_f64((v.to_f64() - mean) / std)))
        }
        Normalizer::Minmax => {
            let (lo, hi) = min_max(x);
            if hi - lo <= DEGENERACY_EPS {
                return Err(Error::Degenerate(
                    "minmax of a constant vector (zero range)".into(),
                ));
            }
            Ok(x.map(|v| E::from_f64((v.to_f64() - lo) / (hi - lo))))
        }
        Normalizer::Un => unit_normalize(x),
    }
}

/// Backward pass for [`apply_normalizer`], full Jacobians throughout. For
/// minmax the subgradient routes through the first occurrence of the min and
/// max elements.
pub fn apply_normalizer_backward<E: Scalar>(
    kind: Normalizer,
    x: &Tensor<E>,
    grad_out: &Tensor<E>,
) -> Result<Tensor<E>> {
    let n = check_vector(x, "apply_normalizer_backward input")?;
    if grad_out.shape() != x.shape() {
        return Err(Error::ShapeMismatch {
            context: "apply_normalizer_backward grad_out",
            expected: x.shape().to_vec(),
            got: grad_out.shape().to_vec(),
        });
    }
    let g: Vec<f64> = grad_out.data().iter().map(|&v| v.to_f64()).collect();
    let xv: Vec<f64> = x.data().iter().map(|&v| v.to_f64()).collect();
    let dx: Vec<f64> = match kind {
        Normalizer::None => g,
        Normalizer::Softmax => {
            let s: Vec<f64> = softmax(x).iter().map(|v: &E| v.to_f64()).collect();
            let dot: f64 = g.iter().zip(&s).map(|(gi, si)| gi * si).sum();
            s.iter().zip(&g).map(|(si, gi)| si * (gi - dot)).collect()
        }
        Normalizer::Sigmoid => xv
            .iter()
            .zip(&g)
            .map(|(&v, gi)| {
                let s = sigmoid(v);
                gi * s * (1.0 - s)
            })
            .collect(),
        Normalizer::SoftmaxScaling => {
            // y_i = s_i x_i with s = softmax(x):
            // dL/dx_j = s_j (g_j (1 + x_j) - sum_i g_i x_i s_i)
            let s: Vec<f64> = softmax(x).iter().map(|v: &E| v.to_f64()).collect();
            let dot: f64 = (0..n).map(|i| g[i] * xv[i] * s[i]).sum();
            (0..n).map(|j| s[j] * (g[j] * (1.0 + xv[j]) - dot)).collect()
        }
        Normalizer::SigmoidScaling => xv
            .iter()
            .zip(&g)
            .map(|(&v, gi)| {
                let s = sigmoid(v);
                gi * (s + v * s * (1.0 - s))
            })
            .collect(),
        Normalizer::Zscore => {
            let (mean, std) = mean_std(x);
            if std <= DEGENERACY_EPS {
                return Err(Error::Degenerate(
                    "zscore of a constant vector (zero standard deviation)".into(),
                ));
            }
            let y: Vec<f64> = xv.iter().map(|&v| (v - mean) / std).collect();
            let g_mean = g.iter().sum::<f64>() / n as f64;
            let gy_mean = (0..n).map(|i| g[i] * y[i]).sum::<f64>() / n as f64;
            (0..n)
                .map(|j| (g[j] - g_mean - y[j] * gy_mean) / std)
                .collect()
        }
        Normalizer::Minmax => {
            let (lo, hi) = min_max(x);
            let range = hi - lo;
            if range <= DEGENERACY_EPS {
                return Err(Error::Degenerate(
                    "minmax of a constant vector (zero range)".into(),
                ));
            }
            let imin = xv.iter().position(|&v| v == lo).unwrap();
            let imax = xv.iter().position(|&v| v == hi).unwrap();
            let mut dx = vec![0.0f64; n];
            let gsum: f64 = g.iter().sum();
            let gy: f64 = (0..n).map(|i| g[i] * (xv[i] - lo) / range).sum();
            for j in 0..n {
                dx[j] = g[j] / range;
            }
            dx[imin] -= gsum / range;
            // d(range)/dx_max = 1, d(range)/dx_min = -1
            dx[imax] -= gy / range;
            dx[imin] += gy / range;
            dx
        }
        Normalizer::Un => {
            return unit_normalize_backward(x, grad_out);
        }
    };
    Tensor::new(
        x.shape().to_vec(),
        dx.into_iter().map(E::from_f64).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn un_fixed_points_and_hand_case() {
        for n in [1usize, 4, 32] {
            let ones = Tensor::full(vec![n], 1.0f32);
            let out = unit_normalize(&ones).unwrap();
            for &v in out.data() {
                assert!((v - 1.0).abs() < 1e-6);
            }
        }
        let x = Tensor::new(vec![2], vec![3.0f32, 4.0]).unwrap();
        let out = unit_normalize(&x).unwrap();
        let sqrt2 = std::f32::consts::SQRT_2;
        assert!((out.data()[0] - 3.0 * sqrt2 / 5.0).abs() < 1e-6);
        assert!((out.data()[1] - 4.0 * sqrt2 / 5.0).abs() < 1e-6);
        assert!((out.data()[0] - 0.84853).abs() < 1e-4);
        assert!((out.data()[1] - 1.13137).abs() < 1e-4);
    }

    #[test]
    fn un_positive_scale_invariance() {
        let x = Tensor::new(vec![5], vec![0.3f32, -1.2, 4.0, 0.01, -0.5]).unwrap();
        let base = unit_normalize(&x).unwrap();
        for c in [0.5f32, 2.0, 10.0] {
            let scaled = unit_normalize(&x.scale(c)).unwrap();
            assert!(base.max_abs_diff(&scaled).unwrap() < 1e-6);
        }
    }

    #[test]
    fn un_output_norm_is_sqrt_n() {
        let x = Tensor::new(vec![7], vec![0.1f32, 2.0, -3.0, 0.4, 1.1, -0.2, 5.0]).unwrap();
        let out = unit_normalize(&x).unwrap();
        let norm = out.data().iter().map(|v| (v * v) as f64).sum::<f64>().sqrt();
        assert!((norm - (7.0f64).sqrt()).abs() < 1e-4);
    }

    #[test]
    fn un_rejects_near_zero_norm() {
        let x = Tensor::new(vec![3], vec![0.0f32, 0.0, 0.0]).unwrap();
        assert!(matches!(unit_normalize(&x), Err(Error::Degenerate(_))));
    }

    #[test]
    fn softmax_symmetry_and_simplex() {
        let x = Tensor::new(vec![2], vec![0.0f32, 0.0]).unwrap();
        let y = apply_normalizer(Normalizer::Softmax, &x).unwrap();
        assert_eq!(y.data(), &[0.5, 0.5]);

        let x = Tensor::new(vec![4], vec![-3.0f32, 0.5, 2.0, 1.0]).unwrap();
        let y = apply_normalizer(Normalizer::Softmax, &x).unwrap();
        let sum: f32 = y.data().iter().sum();
        assert!((sum - 1.0).abs() < 1e-6);
        assert!(y.data().iter().all(|&v| v > 0.0 && v < 1.0));
    }

    #[test]
    fn minmax_endpoints() {
        let x = Tensor::new(vec![3], vec![2.0f32, 4.0, 6.0]).unwrap();
        let y = apply_normalizer(Normalizer::Minmax, &x).unwrap();
        assert_eq!(y.data(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn zscore_hand_case() {
        let x = Tensor::new(vec![2], vec![1.0f32, 3.0]).unwrap();
        let y = apply_normalizer(Normalizer::Zscore, &x).unwrap();
        assert!((y.data()[0] + 1.0).abs() < 1e-6);
        assert!((y.data()[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn degenerate_constant_vectors_rejected() {
        let x = Tensor::full(vec![4], 0.7f32);
        assert!(matches!(
            apply_normalizer(Normalizer::Minmax, &x),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            apply_normalizer(Normalizer::Zscore, &x),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn none_is_identity_and_un_delegates() {
        let x = Tensor::new(vec![3], vec![0.5f32, -2.0, 1.5]).unwrap();
        assert_eq!(apply_normalizer(Normalizer::None, &x).unwrap().data(), x.data());
        let a = apply_normalizer(Normalizer::Un, &x).unwrap();
        let b = unit_normalize(&x).unwrap();
        assert_eq!(a.data(), b.data());
    }

    #[test]
    fn name_round_trip() {
        for kind in Normalizer::ALL {
            assert_eq!(kind.name().parse::<Normalizer>().unwrap(), kind);
        }
        assert!("banana".parse::<Normalizer>().is_err());
    }
}
