//! The trainable network: forward mapping through the fused kernel layer,
//! online gradient-descent training (per-sample updates of the mixing
//! weights, synaptic weights and bias), and per-epoch trace recording.

use rand::seq::SliceRandom;

use crate::data::{db_from_mean_square, Dataset};
use crate::error::{Error, Result};
use crate::kernel::{self, KernelConfig, KernelVector, MixingState};
use crate::rng::seeded_rng;

/// Training hyperparameters.
///
/// `freeze_mixing` skips the mixing-weight updates so the network behaves
/// as a fixed-weight kernel combination; the comparison arms with a single
/// kernel or a hand-chosen fusion are exactly this with the matching raw
/// mixing state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub eta: f64,
    pub epochs: usize,
    pub shuffle: bool,
    pub seed: u64,
    pub freeze_mixing: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            eta: 1e-3,
            epochs: 1,
            shuffle: false,
            seed: 42,
            freeze_mixing: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.eta.is_finite() || self.eta < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "learning rate must be finite and >= 0, got {}",
                self.eta
            )));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidArgument("epochs must be >= 1".to_string()));
        }
        Ok(())
    }
}

/// Per-epoch record of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainTrace {
    /// 10·log₁₀ of the mean squared error accumulated over each pass.
    pub mse_db: Vec<f64>,
    /// Normalized cosine-side mixing weight after each epoch.
    pub alpha1: Vec<f64>,
    /// Normalized Gaussian-side mixing weight after each epoch.
    pub alpha2: Vec<f64>,
    /// 0-based index of the first epoch attaining the minimum MSE.
    pub best_epoch: usize,
    pub best_mse_db: f64,
}

/// An RBF network with fixed centers, a fused cosine/Gaussian hidden
/// layer, linear output weights and a bias.
#[derive(Debug, Clone, PartialEq)]
pub struct RbfNetwork {
    centers: Vec<Vec<f64>>,
    weights: Vec<f64>,
    bias: f64,
    kernel: KernelConfig,
    mixing: MixingState,
}

impl RbfNetwork {
    /// Builds a network with zero-initialized weights and bias.
    pub fn new(
        centers: Vec<Vec<f64>>,
        kernel: KernelConfig,
        mixing: MixingState,
    ) -> Result<Self> {
        let m1 = centers.len();
        Self::with_parameters(centers, vec![0.0; m1], 0.0, kernel, mixing)
    }

    /// Builds a network with explicit weights and bias.
    pub fn with_parameters(
        centers: Vec<Vec<f64>>,
        weights: Vec<f64>,
        bias: f64,
        kernel: KernelConfig,
        mixing: MixingState,
    ) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::EmptyInput("network centers"));
        }
        let dim = centers[0].len();
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "network centers must have at least one coordinate".to_string(),
            ));
        }
        for (i, c) in centers.iter().enumerate() {
            if c.len() != dim {
                return Err(Error::DimensionMismatch {
                    context: "network center width",
                    expected: dim,
                    actual: c.len(),
                });
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "non-finite value in center {i}"
                )));
            }
        }
        if weights.len() != centers.len() {
            return Err(Error::DimensionMismatch {
                context: "network weights vs centers",
                expected: centers.len(),
                actual: weights.len(),
            });
        }
        if weights.iter().any(|w| !w.is_finite()) || !bias.is_finite() {
            return Err(Error::InvalidArgument(
                "network weights and bias must be finite".to_string(),
            ));
        }
        Ok(Self {
            centers,
            weights,
            bias,
            kernel,
            mixing,
        })
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn kernel_config(&self) -> &KernelConfig {
        &self.kernel
    }

    pub fn mixing(&self) -> &MixingState {
        &self.mixing
    }

    /// Hidden-layer size m₁.
    pub fn hidden_size(&self) -> usize {
        self.centers.len()
    }

    /// Input dimension m₀.
    pub fn input_dim(&self) -> usize {
        self.centers[0].len()
    }

    /// Output y = Σᵢ wᵢ·fusedᵢ + b together with the kernel responses, so a
    /// caller that needs both does one kernel pass.
    pub fn forward(&self, x: &[f64]) -> Result<(f64, KernelVector)> {
        let kv = kernel::fused(x, &self.centers, &self.mixing, &self.kernel)?;
        let mut acc = 0.0;
        for (w, f) in self.weights.iter().zip(&kv.fused) {
            acc += w * f;
        }
        Ok((acc + self.bias, kv))
    }

    /// One online update from a single (input, target) pair; returns the
    /// pre-update error e = target − y.
    ///
    /// All update terms are evaluated on the same pre-update snapshot
    /// (output, error, kernel responses, synaptic weights); then the
    /// mixing weights are committed (unless frozen), then the synaptic
    /// weights, then the bias. Any non-finite result aborts with a
    /// divergence error naming the offending quantity.
    pub fn train_step(
        &mut self,
        x: &[f64],
        target: f64,
        eta: f64,
        freeze_mixing: bool,
    ) -> Result<f64> {
        let (y, kv) = self.forward(x)?;
        if !y.is_finite() {
            return Err(Error::Divergence("output y became non-finite".to_string()));
        }
        let error = target - y;
        if !error.is_finite() {
            return Err(Error::Divergence("error e became non-finite".to_string()));
        }

        if !freeze_mixing {
            let (g1, g2) = kernel::alpha_gradient(error, &self.weights, &self.mixing, &kv);
            let a1 = self.mixing.a1_raw() - eta * g1;
            let a2 = self.mixing.a2_raw() - eta * g2;
            if !a1.is_finite() {
                return Err(Error::Divergence(
                    "raw mixing weight a1 became non-finite".to_string(),
                ));
            }
            if !a2.is_finite() {
                return Err(Error::Divergence(
                    "raw mixing weight a2 became non-finite".to_string(),
                ));
            }
            self.mixing.set_raw(a1, a2);
        }

        let scale = eta * error;
        for (i, (w, f)) in self.weights.iter_mut().zip(&kv.fused).enumerate() {
            *w += scale * f;
            if !w.is_finite() {
                return Err(Error::Divergence(format!(
                    "weight[{i}] became non-finite"
                )));
            }
        }
        self.bias += scale;
        if !self.bias.is_finite() {
            return Err(Error::Divergence("bias became non-finite".to_string()));
        }
        Ok(error)
    }

    /// Runs `cfg.epochs` passes over the dataset's training rows, applying
    /// [`RbfNetwork::train_step`] to each sample. Epoch MSE is accumulated
    /// from the errors observed during the pass (not re-evaluated after
    /// it); the normalized mixing weights are recorded after each epoch.
    ///
    /// Sample order is the dataset order unless `cfg.shuffle` is set, in
    /// which case each epoch is a fresh seeded permutation.
    pub fn train(&mut self, data: &Dataset, cfg: &TrainConfig) -> Result<TrainTrace> {
        cfg.validate()?;
        data.validate()?;
        let mut order = data.train_indices();
        if order.is_empty() {
            return Err(Error::EmptyInput("training rows"));
        }
        if data.input_dim() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                context: "dataset input dim vs network",
                expected: self.input_dim(),
                actual: data.input_dim(),
            });
        }

        let mut rng = seeded_rng(cfg.seed);
        let mut trace = TrainTrace {
            mse_db: Vec::with_capacity(cfg.epochs),
            alpha1: Vec::with_capacity(cfg.epochs),
            alpha2: Vec::with_capacity(cfg.epochs),
            best_epoch: 0,
            best_mse_db: f64::INFINITY,
        };
        for epoch in 0..cfg.epochs {
            if cfg.shuffle {
                order.shuffle(&mut rng);
            }
            let mut sq_sum = 0.0;
            for (pos, &row) in order.iter().enumerate() {
                let e = self
                    .train_step(&data.inputs[row], data.targets[row], cfg.eta, cfg.freeze_mixing)
                    .map_err(|err| match err {
                        Error::Divergence(msg) => Error::Divergence(format!(
                            "epoch {}, sample {} (row {row}): {msg}",
                            epoch + 1,
                            pos + 1
                        )),
                        other => other,
                    })?;
                sq_sum += e * e;
            }
            let mse = db_from_mean_square(sq_sum / order.len() as f64);
            let (n1, n2) = self.mixing.normalized()?;
            trace.mse_db.push(mse);
            trace.alpha1.push(n1);
            trace.alpha2.push(n2);
            if mse < trace.best_mse_db {
                trace.best_mse_db = mse;
                trace.best_epoch = epoch;
            }
        }
        Ok(trace)
    }

    /// Forward pass over each row; the network is not mutated.
    pub fn predict_batch(&self, inputs: &[Vec<f64>]) -> Result<Vec<f64>> {
        inputs
            .iter()
            .map(|x| self.forward(x).map(|(y, _)| y))
            .collect()
    }
}
