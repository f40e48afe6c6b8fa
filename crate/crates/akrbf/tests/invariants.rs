//! Randomized invariants of the kernel fusion, training loop, center
//! selection and metrics.

use proptest::prelude::*;

use akrbf::centers::{subtractive_clustering, SubtractiveSpec};
use akrbf::data::{mse_db, Dataset};
use akrbf::kernel::{self, KernelConfig, MixingState};
use akrbf::{RbfNetwork, TrainConfig};

fn raw_weight() -> impl Strategy<Value = f64> {
    // Either side of the zero guard, any sign, wide scale range.
    prop_oneof![(0.05f64..100.0), (-100.0f64..-0.05)]
}

fn small_vec(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn normalized_weights_sum_to_one(a1 in raw_weight(), a2 in raw_weight()) {
        let state = MixingState::new(a1, a2).unwrap();
        let (n1, n2) = state.normalized().unwrap();
        prop_assert!((0.0..=1.0).contains(&n1));
        prop_assert!((0.0..=1.0).contains(&n2));
        prop_assert!((n1 + n2 - 1.0).abs() <= f64::EPSILON);
    }

    #[test]
    fn normalization_is_scale_invariant(a1 in raw_weight(), a2 in raw_weight(), k in 1e-3f64..1e3) {
        let base = MixingState::new(a1, a2).unwrap().normalized().unwrap();
        let scaled = MixingState::new(k * a1, k * a2).unwrap().normalized().unwrap();
        prop_assert!((base.0 - scaled.0).abs() < 1e-12);
        prop_assert!((base.1 - scaled.1).abs() < 1e-12);
        // Powers of two rescale mantissas exactly.
        let pow2 = MixingState::new(8.0 * a1, 8.0 * a2).unwrap().normalized().unwrap();
        prop_assert_eq!(base, pow2);
    }

    #[test]
    fn fused_is_convex_combination(
        x in small_vec(3),
        centers in prop::collection::vec(small_vec(3), 1..6),
        a1 in raw_weight(),
        a2 in raw_weight(),
        sigma in 0.5f64..2.0,
    ) {
        let config = KernelConfig::new(sigma, KernelConfig::DEFAULT_GAMMA).unwrap();
        let state = MixingState::new(a1, a2).unwrap();
        let kv = kernel::fused(&x, &centers, &state, &config).unwrap();
        for i in 0..centers.len() {
            let lo = kv.cosine[i].min(kv.gaussian[i]);
            let hi = kv.cosine[i].max(kv.gaussian[i]);
            // Normalization rounds to within one ulp of 1, so the convex
            // bound holds up to a few ulps of the response magnitude.
            let slack = 4.0 * f64::EPSILON * kv.cosine[i].abs().max(kv.gaussian[i].abs()).max(1.0);
            prop_assert!(kv.fused[i] >= lo - slack, "fused {} below [{lo}, {hi}]", kv.fused[i]);
            prop_assert!(kv.fused[i] <= hi + slack, "fused {} above [{lo}, {hi}]", kv.fused[i]);
        }
    }

    #[test]
    fn fused_reduces_exactly_to_each_component(
        x in small_vec(2),
        centers in prop::collection::vec(small_vec(2), 1..6),
        c in prop_oneof![(0.05f64..50.0), (-50.0f64..-0.05)],
        sigma in 0.5f64..2.0,
    ) {
        let config = KernelConfig::new(sigma, KernelConfig::DEFAULT_GAMMA).unwrap();
        let gauss_only = kernel::fused(&x, &centers, &MixingState::new(0.0, c).unwrap(), &config).unwrap();
        prop_assert_eq!(&gauss_only.fused, &gauss_only.gaussian);
        let cos_only = kernel::fused(&x, &centers, &MixingState::new(c, 0.0).unwrap(), &config).unwrap();
        prop_assert_eq!(&cos_only.fused, &cos_only.cosine);
    }

    #[test]
    fn gaussian_response_lies_in_unit_interval(
        x in small_vec(4),
        center in small_vec(4),
        sigma in 0.5f64..2.0,
    ) {
        // Bounded inputs and spreads keep the exponent above the underflow
        // threshold, where the mathematical range (0, 1] is exact.
        let config = KernelConfig::new(sigma, KernelConfig::DEFAULT_GAMMA).unwrap();
        let v = kernel::gaussian(&x, &center, &config).unwrap();
        prop_assert!(v > 0.0 && v <= 1.0, "gaussian response {v}");
    }

    #[test]
    fn gradient_components_oppose_for_positive_weights(
        a1 in 0.05f64..2.0,
        a2 in 0.05f64..2.0,
        weights in prop::collection::vec(-1.0f64..1.0, 3),
        cos in prop::collection::vec(-0.99f64..0.99, 3),
        gauss in prop::collection::vec(0.01f64..1.0, 3),
        error in prop_oneof![(0.1f64..2.0), (-2.0f64..-0.1)],
    ) {
        let state = MixingState::new(a1, a2).unwrap();
        let kv = kernel::KernelVector {
            cosine: cos.clone(),
            gaussian: gauss.clone(),
            fused: vec![0.0; 3],
        };
        let (g1, g2) = kernel::alpha_gradient(error, &weights, &state, &kv);
        let t: f64 = weights.iter().zip(cos.iter().zip(&gauss)).map(|(w, (c, g))| w * (c - g)).sum();
        if (error * t).abs() > 1e-12 {
            prop_assert!(g1 * g2 < 0.0, "g1 {g1} g2 {g2}");
        }
    }

    #[test]
    fn subtractive_centers_are_distinct_data_points(
        data in prop::collection::vec(small_vec(2), 1..25),
        influence in 0.1f64..0.9,
        limit in 1usize..10,
    ) {
        let spec = SubtractiveSpec {
            influence,
            max_centers: Some(limit),
            ..SubtractiveSpec::default()
        };
        let centers = subtractive_clustering(&data, &spec).unwrap();
        prop_assert!(!centers.is_empty());
        prop_assert!(centers.len() <= limit.min(data.len()));
        for c in &centers {
            prop_assert!(data.iter().any(|row| row == c));
        }
        for i in 0..centers.len() {
            for j in i + 1..centers.len() {
                prop_assert_ne!(&centers[i], &centers[j]);
            }
        }
    }

    #[test]
    fn mse_db_shifts_by_20log10_under_scaling(
        errors in prop::collection::vec(prop_oneof![(1e-3f64..10.0), (-10.0f64..-1e-3)], 1..20),
        k in 1.0f64..100.0,
    ) {
        let base = mse_db(&errors).unwrap();
        let scaled: Vec<f64> = errors.iter().map(|e| k * e).collect();
        let shifted = mse_db(&scaled).unwrap();
        prop_assert!((shifted - base - 20.0 * k.log10()).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn zero_error_dataset_is_a_training_fixed_point(
        centers in prop::collection::vec(small_vec(2), 1..4),
        weights_seed in prop::collection::vec(-1.0f64..1.0, 4),
        inputs in prop::collection::vec(small_vec(2), 1..6),
        a1 in 0.05f64..2.0,
        a2 in 0.05f64..2.0,
    ) {
        let m1 = centers.len();
        let net = RbfNetwork::with_parameters(
            centers,
            weights_seed[..m1].to_vec(),
            weights_seed[3],
            KernelConfig::new(0.8, KernelConfig::DEFAULT_GAMMA).unwrap(),
            MixingState::new(a1, a2).unwrap(),
        )
        .unwrap();
        // Targets produced by the network itself: every error is zero and
        // one epoch must leave all parameters untouched.
        let targets: Vec<f64> = inputs.iter().map(|x| net.forward(x).unwrap().0).collect();
        let data = Dataset::new(inputs, targets).unwrap();
        let mut trained = net.clone();
        let trace = trained
            .train(&data, &TrainConfig { eta: 0.05, epochs: 1, ..TrainConfig::default() })
            .unwrap();
        prop_assert_eq!(net, trained);
        prop_assert_eq!(trace.mse_db[0], akrbf::data::MSE_DB_FLOOR);
    }

    #[test]
    fn training_trace_conserves_alpha_sum(
        seed in 0u64..1000,
        eta in 1e-3f64..0.2,
    ) {
        let centers = vec![vec![-0.5], vec![0.0], vec![0.5]];
        let inputs: Vec<Vec<f64>> = (0..10).map(|i| vec![-0.9 + 0.2 * i as f64]).collect();
        let targets: Vec<f64> = inputs.iter().map(|x| (3.0 * x[0]).sin()).collect();
        let data = Dataset::new(inputs, targets).unwrap();
        let mut net = RbfNetwork::new(
            centers,
            KernelConfig::new(0.5, KernelConfig::DEFAULT_GAMMA).unwrap(),
            MixingState::new(0.5, 0.5).unwrap(),
        )
        .unwrap();
        let trace = net
            .train(&data, &TrainConfig { eta, epochs: 15, shuffle: true, seed, freeze_mixing: false })
            .unwrap();
        for (a1, a2) in trace.alpha1.iter().zip(&trace.alpha2) {
            prop_assert!((a1 + a2 - 1.0).abs() <= f64::EPSILON);
            prop_assert!((0.0..=1.0).contains(a1));
        }
        prop_assert_eq!(trace.mse_db.len(), 15);
    }

    #[test]
    fn snapshot_round_trip_preserves_network(
        centers in prop::collection::vec(small_vec(2), 1..5),
        bias in -2.0f64..2.0,
        a1 in 0.05f64..2.0,
        a2 in 0.05f64..2.0,
        w_scale in -2.0f64..2.0,
    ) {
        let weights: Vec<f64> = (0..centers.len()).map(|i| w_scale * (i as f64 + 0.1)).collect();
        let net = RbfNetwork::with_parameters(
            centers,
            weights,
            bias,
            KernelConfig::new(0.37, KernelConfig::DEFAULT_GAMMA).unwrap(),
            MixingState::new(a1, a2).unwrap(),
        )
        .unwrap();
        let restored = akrbf::snapshot::from_str(&akrbf::snapshot::to_string(&net), "prop").unwrap();
        prop_assert_eq!(net, restored);
    }
}
