//! Dense feed-forward networks with hand-derived backpropagation and Adam.

mod activation;
mod adam;
mod init;
mod loss;
mod matrix;
mod network;
mod train;

pub use activation::ActivationKind;
pub use adam::{adam_update, AdamConfig, AdamState};
pub use init::{init_params, InitScheme};
pub use loss::softmax_cross_entropy;
pub use matrix::Matrix;
pub use network::{argmax_rows, DenseLayer, ForwardCache, Gradients, LayerGrads, Network, OutputHead};
pub use train::{evaluate, train, EpochRecord, Evaluation, TrainConfig, TrainingHistory};
