//! Hand-written forward/backward passes for every layer the models use,
//! plus the Adam optimizer and a finite-difference gradient checker. There
//! is no autodiff tape: the architecture set is closed, so each backward
//! pass is written and verified per layer.

pub mod activation;
pub mod adam;
pub mod conv;
pub mod dense;
pub mod gradcheck;
pub mod loss;
pub mod modulation;
pub mod norm;
pub mod pool;

pub use activation::{relu, relu_backward};
pub use adam::{adam_step, AdamParams, Parameter};
pub use conv::{conv2d, conv2d_backward, Conv2dGrads};
pub use dense::{fully_connected, fully_connected_backward, FcGrads};
pub use gradcheck::grad_check;
pub use loss::{l1_loss, l1_loss_backward};
pub use modulation::{
    gfm, gfm_backward, sfm, sfm_backward, ModulationGrads, ModulationParams,
};
pub use norm::{
    apply_normalizer, apply_normalizer_backward, unit_normalize, unit_normalize_backward,
    Normalizer,
};
pub use pool::{global_avg_pool, global_avg_pool_backward};
