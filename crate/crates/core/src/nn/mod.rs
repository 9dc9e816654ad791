//! Small feedforward backbone, reverse-mode gradients and the optimizer.

mod matrix;
mod network;
mod optim;

pub use matrix::Matrix;
pub use network::{Dense, Network, NetworkGrads};
pub use optim::{Adam, AdamConfig, ParamGroup, StepContext};
