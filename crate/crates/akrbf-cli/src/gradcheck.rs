//! Numerical verification of the analytical mixing-weight gradient.
//!
//! Each trial draws a small random network and input, computes the
//! analytical gradient of the instantaneous cost ½e² with respect to the
//! raw mixing weights, and compares it against a central finite difference
//! of an independent, straight-line transcription of the forward map
//! (cosine and Gaussian responses fused as (|a1|φc + |a2|φg)/(|a1|+|a2|)).
//! The transcription shares no code with the library path it checks.

use rand::Rng;

use akrbf::kernel;
use akrbf::rng::{seeded_rng, ChaCha20Rng};
use akrbf::{KernelConfig, MixingState};

/// Finite-difference step on the raw mixing weights.
pub const FD_STEP: f64 = 1e-6;

/// Largest acceptable relative disagreement between the analytical and
/// numerical gradients.
pub const REL_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct GradcheckReport {
    pub trials: usize,
    pub max_rel_error: f64,
    /// Trial index attaining `max_rel_error`.
    pub worst_trial: usize,
    pub failures: usize,
}

impl GradcheckReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

struct Instance {
    centers: Vec<Vec<f64>>,
    weights: Vec<f64>,
    bias: f64,
    x: Vec<f64>,
    target: f64,
    sigma: f64,
    gamma: f64,
    a1: f64,
    a2: f64,
}

/// Straight-line transcription of the forward map, written from the
/// component formulas rather than the library kernels.
fn forward_reference(inst: &Instance, a1: f64, a2: f64) -> f64 {
    let s = a1.abs() + a2.abs();
    let mut y = inst.bias;
    for (center, w) in inst.centers.iter().zip(&inst.weights) {
        let mut dot = 0.0;
        let mut nx = 0.0;
        let mut nc = 0.0;
        let mut sq = 0.0;
        for (xi, ci) in inst.x.iter().zip(center) {
            dot += xi * ci;
            nx += xi * xi;
            nc += ci * ci;
            let d = xi - ci;
            sq += d * d;
        }
        let phi_cos = dot / (nx.sqrt() * nc.sqrt() + inst.gamma);
        let phi_gauss = (-sq / (inst.sigma * inst.sigma)).exp();
        y += w * ((a1.abs() * phi_cos + a2.abs() * phi_gauss) / s);
    }
    y
}

/// Central difference of the cost E(a) = ½(d − y(a))² along one raw
/// weight, computed in the product form
/// E(a+h) − E(a−h) = ½·(2d − y⁺ − y⁻)·(y⁻ − y⁺)
/// which avoids the cancellation of squaring nearly equal costs.
fn fd_component(inst: &Instance, h: f64, first: bool) -> f64 {
    let (a1p, a2p, a1m, a2m) = if first {
        (inst.a1 + h, inst.a2, inst.a1 - h, inst.a2)
    } else {
        (inst.a1, inst.a2 + h, inst.a1, inst.a2 - h)
    };
    let y_plus = forward_reference(inst, a1p, a2p);
    let y_minus = forward_reference(inst, a1m, a2m);
    0.5 * (2.0 * inst.target - y_plus - y_minus) * (y_minus - y_plus) / (2.0 * h)
}

fn sample_signed(rng: &mut ChaCha20Rng, lo: f64, hi: f64) -> f64 {
    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
    sign * rng.random_range(lo..hi)
}

fn sample_instance(rng: &mut ChaCha20Rng) -> Instance {
    loop {
        let m0 = rng.random_range(1..=4usize);
        let m1 = rng.random_range(1..=8usize);
        let centers: Vec<Vec<f64>> = (0..m1)
            .map(|_| (0..m0).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let x: Vec<f64> = (0..m0).map(|_| rng.random_range(-1.0..1.0)).collect();
        let weights: Vec<f64> = (0..m1).map(|_| rng.random_range(-1.0..1.0)).collect();
        let inst = Instance {
            centers,
            weights,
            bias: rng.random_range(-1.0..1.0),
            x,
            target: 0.0,
            sigma: rng.random_range(0.3..1.5),
            gamma: 1e-50,
            a1: sample_signed(rng, 0.05, 2.0),
            a2: sample_signed(rng, 0.05, 2.0),
        };

        // A relative comparison is only meaningful where the derivative of
        // the output w.r.t. the raw weights is not vanishingly small: the
        // difference quotient carries an absolute rounding error of a few
        // ulps of the output, so |dy/da| must stay well above
        // ulp/(2h) ≈ 1e-10 for the quotient to resolve the gradient to
        // 1e-6. Reject states whose kernel-difference response nearly
        // cancels; the gradient there is correct but unverifiable by
        // finite differences at this step size.
        let s = inst.a1.abs() + inst.a2.abs();
        let mut t = 0.0;
        for (center, w) in inst.centers.iter().zip(&inst.weights) {
            let mut dot = 0.0;
            let mut nx = 0.0;
            let mut nc = 0.0;
            let mut sq = 0.0;
            for (xi, ci) in inst.x.iter().zip(center) {
                dot += xi * ci;
                nx += xi * xi;
                nc += ci * ci;
                let d = xi - ci;
                sq += d * d;
            }
            let phi_cos = dot / (nx.sqrt() * nc.sqrt() + inst.gamma);
            let phi_gauss = (-sq / (inst.sigma * inst.sigma)).exp();
            t += w * (phi_cos - phi_gauss);
        }
        let dy1 = inst.a2.abs() * t / (s * s);
        let dy2 = inst.a1.abs() * t / (s * s);
        if dy1.abs() < 5e-3 || dy2.abs() < 5e-3 {
            continue;
        }

        // Fix the target so the error at the sampled state is well away
        // from zero (the gradient carries the error as a factor).
        let y = forward_reference(&inst, inst.a1, inst.a2);
        let error = sample_signed(rng, 0.5, 2.0);
        return Instance {
            target: y + error,
            ..inst
        };
    }
}

/// Runs `trials` randomized comparisons; `max_rel_error` is the largest
/// per-component relative disagreement observed.
pub fn gradcheck(seed: u64, trials: usize) -> GradcheckReport {
    let mut rng = seeded_rng(seed);
    let mut report = GradcheckReport {
        trials,
        max_rel_error: 0.0,
        worst_trial: 0,
        failures: 0,
    };
    for trial in 0..trials {
        let inst = sample_instance(&mut rng);

        let config = KernelConfig::new(inst.sigma, inst.gamma).expect("sampled config is valid");
        let state = MixingState::new(inst.a1, inst.a2).expect("sampled mixing is valid");
        let kv = kernel::fused(&inst.x, &inst.centers, &state, &config)
            .expect("sampled instance evaluates");
        let mut y = inst.bias;
        for (w, f) in inst.weights.iter().zip(&kv.fused) {
            y += w * f;
        }
        let error = inst.target - y;
        let (g1, g2) = kernel::alpha_gradient(error, &inst.weights, &state, &kv);

        let f1 = fd_component(&inst, FD_STEP, true);
        let f2 = fd_component(&inst, FD_STEP, false);

        let rel = |analytic: f64, numeric: f64| -> f64 {
            (analytic - numeric).abs() / analytic.abs().max(numeric.abs())
        };
        let worst = rel(g1, f1).max(rel(g2, f2));
        if worst > report.max_rel_error {
            report.max_rel_error = worst;
            report.worst_trial = trial;
        }
        if worst > REL_TOLERANCE {
            report.failures += 1;
        }
    }
    report
}
