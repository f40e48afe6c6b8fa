//! An RBF network whose hidden layer fuses a Gaussian (Euclidean-distance)
//! kernel with a cosine-similarity kernel under adaptively learned mixing
//! weights.
//!
//! The mixing weights are stored raw and normalized by absolute value on
//! every evaluation, so the effective kernel is always a convex combination
//! of the two components. Online gradient descent updates the mixing
//! weights, the synaptic weights and the bias from each sample's
//! instantaneous squared error; freezing the mixing reproduces a
//! fixed-weight kernel (pure cosine, pure Gaussian, or any hand-chosen
//! blend) inside the same code path.
//!
//! Modules:
//! - [`kernel`]: the component kernels, their fusion, and the mixing-weight
//!   gradient.
//! - [`net`]: the trainable network, online training loop and trace.
//! - [`centers`]: uniform-grid and subtractive-clustering center selection.
//! - [`data`]: synthetic generators, CSV ingestion, metrics.
//! - [`snapshot`]: lossless text serialization of a trained model.
//! - [`rng`]: the seeded random stream behind every stochastic choice.

pub mod centers;
pub mod data;
pub mod error;
pub mod kernel;
pub mod net;
pub mod rng;
pub mod snapshot;

pub use error::{Error, Result};
pub use kernel::{KernelConfig, KernelVector, MixingState};
pub use net::{RbfNetwork, TrainConfig, TrainTrace};
