//! Dense feed-forward networks with reverse-mode gradients, the two
//! optimizers used in training, and the learning-rate schedule.

mod matrix;
mod mlp;
mod optim;
mod params;
mod schedule;
mod tape;

pub use matrix::Matrix;
pub use mlp::{apply_head, forward_mlp, mlp_forward, Head};
pub use optim::{Adam, SgdMomentum};
pub use params::{Binding, Gradients, GroupId, ParamGroup, ParamStore, Tensor};
pub use schedule::{lr_schedule, ScheduleForm};
pub use tape::{Tape, Var};

pub(crate) use tape::{sigmoid, softplus};

use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NnError {
    #[error("shape mismatch: expected {expected} input columns, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("gradient requested of a non-scalar {rows}x{cols} output")]
    NonScalar { rows: usize, cols: usize },
    #[error("non-finite gradient in parameter group `{group}`")]
    NonFiniteGradient { group: String },
}
