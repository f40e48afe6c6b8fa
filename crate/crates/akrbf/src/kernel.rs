//! Hidden-layer kernel primitives: the Gaussian (Euclidean-distance) kernel,
//! the cosine-similarity kernel, their convex fusion under a pair of raw
//! mixing weights, and the analytical gradient of the instantaneous
//! squared-error cost with respect to those raw weights.
//!
//! The fusion weights are stored unconstrained ([`MixingState`]) and
//! normalized by absolute value on every evaluation, so the effective
//! weights always sum to one regardless of sign or scale of the raw values.
//! All functions here are pure; nothing is cached between calls.

use crate::error::{Error, Result};

/// Raw mixing weights with magnitude below this threshold are treated as
/// zero: the corresponding gradient component is reported as 0 and the
/// weight is left untouched by a training step. The gradient expression
/// divides by the raw weight, so updates arbitrarily close to zero would
/// otherwise be numerically meaningless.
pub const MIXING_ZERO_GUARD: f64 = 1e-12;

/// Fixed hyperparameters of the two component kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    sigma: f64,
    gamma: f64,
}

impl KernelConfig {
    /// Default guard constant for the cosine denominator.
    pub const DEFAULT_GAMMA: f64 = 1e-50;

    /// Creates a config with Gaussian spread `sigma` and cosine denominator
    /// guard `gamma`. Both must be finite and strictly positive.
    pub fn new(sigma: f64, gamma: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "kernel spread sigma must be finite and > 0, got {sigma}"
            )));
        }
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "cosine guard gamma must be finite and > 0, got {gamma}"
            )));
        }
        Ok(Self { sigma, gamma })
    }

    /// Gaussian spread σ.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Cosine denominator guard γ.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// The pair of raw (unconstrained) kernel mixing weights.
///
/// The raw values may be any sign and scale; the effective weights are
/// obtained via [`normalized_weights`], which is insensitive to a common
/// scale factor and to sign. The only forbidden state is both raw values
/// sitting inside [`MIXING_ZERO_GUARD`] at once, where normalization is
/// undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingState {
    a1_raw: f64,
    a2_raw: f64,
}

impl MixingState {
    /// Creates a mixing state from raw weights for the cosine (`a1_raw`)
    /// and Gaussian (`a2_raw`) components.
    pub fn new(a1_raw: f64, a2_raw: f64) -> Result<Self> {
        if !a1_raw.is_finite() || !a2_raw.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "raw mixing weights must be finite, got ({a1_raw}, {a2_raw})"
            )));
        }
        if a1_raw.abs() < MIXING_ZERO_GUARD && a2_raw.abs() < MIXING_ZERO_GUARD {
            return Err(Error::DegenerateMixing(MIXING_ZERO_GUARD));
        }
        Ok(Self { a1_raw, a2_raw })
    }

    /// Raw cosine-side weight.
    pub fn a1_raw(&self) -> f64 {
        self.a1_raw
    }

    /// Raw Gaussian-side weight.
    pub fn a2_raw(&self) -> f64 {
        self.a2_raw
    }

    /// Normalized view; see [`normalized_weights`].
    pub fn normalized(&self) -> Result<(f64, f64)> {
        normalized_weights(self)
    }

    /// Replaces the raw values. Used by the training step after an update;
    /// the caller must have verified finiteness.
    pub(crate) fn set_raw(&mut self, a1_raw: f64, a2_raw: f64) {
        self.a1_raw = a1_raw;
        self.a2_raw = a2_raw;
    }
}

/// Per-center kernel responses for one input vector.
///
/// The training step needs both component responses to form the mixing
/// gradient, so the fused evaluation returns all three vectors rather than
/// forcing a second kernel pass.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelVector {
    /// Cosine kernel response per center.
    pub cosine: Vec<f64>,
    /// Gaussian kernel response per center; each entry lies in (0, 1].
    pub gaussian: Vec<f64>,
    /// Convex combination of the two under the normalized mixing weights.
    pub fused: Vec<f64>,
}

fn check_dims(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            actual,
        });
    }
    Ok(())
}

/// Gaussian kernel response exp(−‖x−center‖²/σ²).
///
/// The result lies in (0, 1]; it is exactly 1 when `x == center`. For
/// squared distances beyond roughly 745·σ² the exponential underflows to
/// +0.0, the closest representable value.
pub fn gaussian(x: &[f64], center: &[f64], config: &KernelConfig) -> Result<f64> {
    check_dims("gaussian kernel", x.len(), center.len())?;
    let mut sq_dist = 0.0;
    for (xi, ci) in x.iter().zip(center) {
        let d = xi - ci;
        sq_dist += d * d;
    }
    Ok((-sq_dist / (config.sigma * config.sigma)).exp())
}

/// Cosine kernel response (x·center)/(‖x‖‖center‖ + γ).
///
/// γ > 0 keeps the denominator positive even when either vector is zero,
/// so the result is always finite and lies strictly inside (−1, 1),
/// approaching ±1 for (anti)parallel vectors as γ → 0.
pub fn cosine(x: &[f64], center: &[f64], config: &KernelConfig) -> Result<f64> {
    check_dims("cosine kernel", x.len(), center.len())?;
    let mut dot = 0.0;
    let mut sq_x = 0.0;
    let mut sq_c = 0.0;
    for (xi, ci) in x.iter().zip(center) {
        dot += xi * ci;
        sq_x += xi * xi;
        sq_c += ci * ci;
    }
    Ok(dot / (sq_x.sqrt() * sq_c.sqrt() + config.gamma))
}

/// Normalizes the raw mixing weights by absolute value:
/// (|a1|, |a2|) / (|a1| + |a2|).
///
/// The components are each in [0, 1] and sum to 1 up to one unit of
/// rounding. Multiplying both raw weights by any nonzero factor leaves the
/// result unchanged, as does flipping either sign.
pub fn normalized_weights(state: &MixingState) -> Result<(f64, f64)> {
    let m1 = state.a1_raw.abs();
    let m2 = state.a2_raw.abs();
    if m1 < MIXING_ZERO_GUARD && m2 < MIXING_ZERO_GUARD {
        return Err(Error::DegenerateMixing(MIXING_ZERO_GUARD));
    }
    let total = m1 + m2;
    Ok((m1 / total, m2 / total))
}

/// Evaluates both component kernels against every center and fuses them
/// under the normalized mixing weights:
/// `fused[i] = n1·cosine[i] + n2·gaussian[i]`.
///
/// Every fused entry is a convex combination of the two component
/// responses, so it lies between them. With raw state `(c, 0)` the fused
/// vector equals the cosine response exactly; with `(0, c)` it equals the
/// Gaussian response exactly.
pub fn fused(
    x: &[f64],
    centers: &[Vec<f64>],
    state: &MixingState,
    config: &KernelConfig,
) -> Result<KernelVector> {
    let (n1, n2) = normalized_weights(state)?;
    let m1 = centers.len();
    let mut kv = KernelVector {
        cosine: Vec::with_capacity(m1),
        gaussian: Vec::with_capacity(m1),
        fused: Vec::with_capacity(m1),
    };
    for center in centers {
        let c = cosine(x, center, config)?;
        let g = gaussian(x, center, config)?;
        kv.cosine.push(c);
        kv.gaussian.push(g);
        kv.fused.push(n1 * c + n2 * g);
    }
    Ok(kv)
}

/// Gradient of the instantaneous cost E = ½e² with respect to the raw
/// mixing weights (a1_raw, a2_raw), evaluated at the current sample.
///
/// `error` is e = target − output, `weights` the synaptic weights, and
/// `kv` the kernel responses of the current input. Writing
/// s = |a1| + |a2| and t = Σᵢ wᵢ·(cosine[i] − gaussian[i]), the components
/// are
///
/// ```text
/// ∂E/∂a1 = −e · sign(a1) · |a2| · t / s²
/// ∂E/∂a2 = +e · sign(a2) · |a1| · t / s²
/// ```
///
/// (the factor |a1||a2|/(a1·s²) collapses to sign(a1)·|a2|/s², which avoids
/// the explicit division by a raw weight). A component whose raw weight is
/// inside [`MIXING_ZERO_GUARD`] reports a zero gradient so the training
/// step leaves it unchanged.
pub fn alpha_gradient(
    error: f64,
    weights: &[f64],
    state: &MixingState,
    kv: &KernelVector,
) -> (f64, f64) {
    debug_assert_eq!(weights.len(), kv.cosine.len());
    debug_assert_eq!(weights.len(), kv.gaussian.len());
    let mut t = 0.0;
    for (w, (c, g)) in weights.iter().zip(kv.cosine.iter().zip(&kv.gaussian)) {
        t += w * (c - g);
    }
    let m1 = state.a1_raw.abs();
    let m2 = state.a2_raw.abs();
    let s = m1 + m2;
    let s2 = s * s;
    let g1 = if m1 < MIXING_ZERO_GUARD {
        0.0
    } else {
        -error * state.a1_raw.signum() * m2 * t / s2
    };
    let g2 = if m2 < MIXING_ZERO_GUARD {
        0.0
    } else {
        error * state.a2_raw.signum() * m1 * t / s2
    };
    (g1, g2)
}
