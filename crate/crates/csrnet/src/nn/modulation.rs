//! Feature modulation: `gamma * x + beta`.
//!
//! The global form broadcasts per-channel scalars over each feature plane;
//! the spatial form modulates every element with full-resolution maps.

use crate::error::{Error, Result};
use crate::tensor::{Scalar, Tensor};

/// Affine modulation parameters. Rank-1 `gamma`/`beta` (length C) drive the
/// global form; rank-3 maps (C x H x W) drive the spatial form.
#[derive(Clone, Debug)]
pub struct ModulationParams<E: Scalar = f32> {
    pub gamma: Tensor<E>,
    pub beta: Tensor<E>,
}

impl<E: Scalar> ModulationParams<E> {
    pub fn new(gamma: Tensor<E>, beta: Tensor<E>) -> Result<Self> {
        if gamma.shape() != beta.shape() {
            return Err(Error::ShapeMismatch {
                context: "ModulationParams gamma vs beta",
                expected: gamma.shape().to_vec(),
                got: beta.shape().to_vec(),
            });
        }
        if gamma.rank() != 1 && gamma.rank() != 3 {
            return Err(Error::ShapeMismatch {
                context: "ModulationParams rank (1 for global, 3 for spatial)",
                expected: vec![1],
                got: vec![gamma.rank()],
            });
        }
        Ok(Self { gamma, beta })
    }

    /// Identity modulation (gamma = 1, beta = 0) matching `shape`.
    pub fn identity(shape: Vec<usize>) -> Self {
        Self {
            gamma: Tensor::full(shape.clone(), E::ONE),
            beta: Tensor::zeros(shape),
        }
    }
}

fn check_feature<E: Scalar>(x: &Tensor<E>) -> Result<(usize, usize, usize)> {
    if x.rank() != 3 {
        return Err(Error::ShapeMismatch {
            context: "modulation feature (C,H,W)",
            expected: vec![3],
            got: vec![x.rank()],
        });
    }
    Ok((x.shape()[0], x.shape()[1], x.shape()[2]))
}

/// Global feature modulation: per-channel `gamma[c] * x[c,·,·] + beta[c]`.
pub fn gfm<E: Scalar>(x: &Tensor<E>, params: &ModulationParams<E>) -> Result<Tensor<E>> {
    let (c, h, w) = check_feature(x)?;
    if params.gamma.rank() != 1 || params.gamma.shape()[0] != c {
        return Err(Error::ShapeMismatch {
            context: "gfm params",
            expected: vec![c],
            got: params.gamma.shape().to_vec(),
        });
    }
    let mut out = x.clone();
    for (i, plane) in out.data_mut().chunks_exact_mut(h * w).enumerate() {
        let (g, b) = (params.gamma.data()[i], params.beta.data()[i]);
        for v in plane {
            *v = g * *v + b;
        }
    }
    Ok(out)
}

pub struct ModulationGrads<E: Scalar> {
    pub input: Tensor<E>,
    pub gamma: Tensor<E>,
    pub beta: Tensor<E>,
}

pub fn gfm_backward<E: Scalar>(
    x: &Tensor<E>,
    params: &ModulationParams<E>,
    grad_out: &Tensor<E>,
) -> Result<ModulationGrads<E>> {
    let (c, h, w) = check_feature(x)?;
    if grad_out.shape() != x.shape() {
        return Err(Error::ShapeMismatch {
            context: "gfm_backward grad_out",
            expected: x.shape().to_vec(),
            got: grad_out.shape().to_vec(),
        });
    }
    if params.gamma.rank() != 1 || params.gamma.shape()[0] != c {
        return Err(Error::ShapeMismatch {
            context: "gfm_backward params",
            expected: vec![c],
            got: params.gamma.shape().to_vec(),
        });
    }
    let mut dx = vec![E::ZERO; c * h * w];
    let mut dgamma = vec![E::ZERO; c];
    let mut dbeta = vec![E::ZERO; c];
    for i in 0..c {
        let g = params.gamma.data()[i];
        let xp = &x.data()[i * h * w..(i + 1) * h * w];
        let gp = &grad_out.data()[i * h * w..(i + 1) * h * w];
        let dp = &mut dx[i * h * w..(i + 1) * h * w];
        let mut dg = E::ZERO;
        let mut db = E::ZERO;
        for ((d, &go), &xv) in dp.iter_mut().zip(gp).zip(xp) {
            *d = g * go;
            dg += go * xv;
            db += go;
        }
        dgamma[i] = dg;
        dbeta[i] = db;
    }
    Ok(ModulationGrads {
        input: Tensor::new(x.shape().to_vec(), dx)?,
        gamma: Tensor::new(vec![c], dgamma)?,
        beta: Tensor::new(vec![c], dbeta)?,
    })
}

/// Spatial feature modulation: elementwise `gamma ⊙ x + beta` with
/// full-resolution parameter maps.
pub fn sfm<E: Scalar>(x: &Tensor<E>, params: &ModulationParams<E>) -> Result<Tensor<E>> {
    check_feature(x)?;
    if params.gamma.shape() != x.shape() {
        return Err(Error::ShapeMismatch {
            context: "sfm params",
            expected: x.shape().to_vec(),
            got: params.gamma.shape().to_vec(),
        });
    }
    let data = x
        .data()
        .iter()
        .zip(params.gamma.data())
        .zip(params.beta.data())
        .map(|((&v, &g), &b)| g * v + b)
        .collect();
    Tensor::new(x.shape().to_vec(), data)
}

pub fn sfm_backward<E: Scalar>(
    x: &Tensor<E>,
    params: &ModulationParams<E>,
    grad_out: &Tensor<E>,
) -> Result<ModulationGrads<E>> {
    check_feature(x)?;
    if params.gamma.shape() != x.shape() || grad_out.shape() != x.shape() {
        return Err(Error::ShapeMismatch {
            context: "sfm_backward shapes",
            expected: x.shape().to_vec(),
            got: grad_out.shape().to_vec(),
        });
    }
    let n = x.len();
    let mut dx = vec![E::ZERO; n];
    let mut dgamma = vec![E::ZERO; n];
    for i in 0..n {
        let go = grad_out.data()[i];
        dx[i] = params.gamma.data()[i] * go;
        dgamma[i] = x.data()[i] * go;
    }
    Ok(ModulationGrads {
        input: Tensor::new(x.shape().to_vec(), dx)?,
        gamma: Tensor::new(x.shape().to_vec(), dgamma)?,
        beta: grad_out.clone(),
    })
}
