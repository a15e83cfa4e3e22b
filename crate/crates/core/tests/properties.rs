use clusterbell::experiment::{
    damped_correlator, estimate_chsh, joint_detection_probability, side_probabilities, DetectorStrategy,
    ExperimentConfig,
};
use clusterbell::spin_chsh::{
    chsh_value, lhv_chsh_value, pauli_observable, singlet_state, spin_correlator, ChshSetting, LhvModel,
    LocalAssignment, SpinDirection,
};
use clusterbell::wavepacket::{detection_probability_closed, DetectorWindow, GaussianPacket};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::SQRT_2;

fn direction() -> impl Strategy<Value = SpinDirection> {
    (-1.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(z, phi)| {
        let r = (1.0 - z * z).sqrt();
        SpinDirection::normalized(r * phi.cos(), r * phi.sin(), z).unwrap()
    })
}

fn setting() -> impl Strategy<Value = ChshSetting> {
    (direction(), direction(), direction(), direction()).prop_map(|(a1, a2, b1, b2)| ChshSetting::new(a1, a2, b1, b2))
}

/// Tr[ρ (A ⊗ B)] computed entry by entry.
fn trace_correlator(a: &SpinDirection, b: &SpinDirection) -> f64 {
    let rho = singlet_state();
    let (pa, pb) = (pauli_observable(a), pauli_observable(b));
    let mut tr = Complex64::new(0.0, 0.0);
    for r in 0..4 {
        for c in 0..4 {
            let op = pa[(c / 2, r / 2)] * pb[(c % 2, r % 2)];
            tr += rho.matrix()[(r, c)] * op;
        }
    }
    tr.re
}

proptest! {
    #[test]
    fn singlet_correlator_is_minus_dot(a in direction(), b in direction()) {
        let e = spin_correlator(&singlet_state(), &a, &b);
        prop_assert!((e + a.dot(&b)).abs() < 1e-12);
        prop_assert!((e - trace_correlator(&a, &b)).abs() < 1e-12);
    }

    #[test]
    fn tsirelson_bound(s in setting()) {
        prop_assert!(chsh_value(&singlet_state(), &s).abs() <= 2.0 * SQRT_2 + 1e-12);
    }

    #[test]
    fn classical_bound(weights in prop::collection::vec(0.01f64..1.0, 1..12), patterns in prop::collection::vec(0u8..16, 12)) {
        let total: f64 = weights.iter().sum();
        let w: Vec<f64> = weights.iter().map(|x| x / total).collect();
        let a: Vec<LocalAssignment> = patterns[..w.len()].iter().map(|p| LocalAssignment::from_pattern(*p)).collect();
        let model = LhvModel::new(w, a).unwrap();
        prop_assert!(lhv_chsh_value(&model).abs() <= 2.0 + 1e-12);
    }

    #[test]
    fn detection_probability_is_a_probability(
        p0 in -4.0f64..4.0, sigma in 0.2f64..3.0, delta in 0.1f64..3.0, eta in -20.0f64..20.0, t in 0.0f64..200.0,
    ) {
        let packet = GaussianPacket::new(0.0, p0, sigma, 1.0, 1.0).unwrap();
        let p = detection_probability_closed(&packet, &DetectorWindow::new(eta, delta).unwrap(), t).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&p));
        let mirrored = detection_probability_closed(&packet.mirrored(), &DetectorWindow::new(-eta, delta).unwrap(), t).unwrap();
        prop_assert!((p - mirrored).abs() <= 1e-14 + 1e-12 * p);
    }

    #[test]
    fn translation_covariance(x0 in -10.0f64..10.0, p0 in -2.0f64..2.0, eta in -5.0f64..5.0, t in 0.0f64..50.0) {
        let at_origin = GaussianPacket::new(0.0, p0, 1.0, 1.0, 1.0).unwrap();
        let shifted = GaussianPacket::new(x0, p0, 1.0, 1.0, 1.0).unwrap();
        let a = detection_probability_closed(&at_origin, &DetectorWindow::new(eta, 0.7).unwrap(), t).unwrap();
        let b = detection_probability_closed(&shifted, &DetectorWindow::new(eta + x0, 0.7).unwrap(), t).unwrap();
        prop_assert!((a - b).abs() <= 1e-14 + 1e-10 * a);
    }

    #[test]
    fn factorization(a in direction(), b in direction(), p0 in 0.0f64..3.0, t in 0.0f64..100.0, eta in -5.0f64..5.0) {
        for strategy in [DetectorStrategy::Adaptive, DetectorStrategy::Static { eta }] {
            let cfg = ExperimentConfig { p0, strategy, ..Default::default() };
            let lhs = damped_correlator(&cfg, t, &a, &b).unwrap();
            let rhs = joint_detection_probability(&cfg, t).unwrap() * spin_correlator(&singlet_state(), &a, &b);
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    /// With c = p0 t/m and a static window at η ≤ c, the ballistic window wins
    /// exactly when η ≤ c(σ² − Δ²)/(σ² + Δ²).
    #[test]
    fn adaptive_versus_static(
        sigma in 0.3f64..2.0, delta in 0.1f64..2.0, p0 in 0.5f64..3.0, t in 20.0f64..1000.0, frac in 0.0f64..1.0,
    ) {
        let c = p0 * t;
        let eta = sigma + frac * (c - sigma).max(0.0);
        prop_assume!(c >= eta);
        let threshold = c * (sigma * sigma - delta * delta) / (sigma * sigma + delta * delta);
        prop_assume!((eta - threshold).abs() > 1e-3 * c);
        let base = ExperimentConfig { sigma, delta, p0, ..Default::default() };
        let adaptive = joint_detection_probability(&base, t).unwrap();
        let fixed = joint_detection_probability(&base.with_strategy(DetectorStrategy::Static { eta }), t).unwrap();
        prop_assert_eq!(adaptive >= fixed, eta <= threshold, "eta {} threshold {} adaptive {} static {}", eta, threshold, adaptive, fixed);
    }

    #[test]
    fn sides_are_symmetric(p0 in -3.0f64..3.0, t in 0.0f64..100.0, eta in -10.0f64..10.0) {
        let cfg = ExperimentConfig { p0, strategy: DetectorStrategy::Static { eta }, ..Default::default() };
        let (a, b) = side_probabilities(&cfg, t).unwrap();
        prop_assert!((a - b).abs() <= 1e-14 + 1e-12 * a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn seeded_runs_are_identical(seed in any::<u64>(), t in 0.0f64..5.0) {
        let cfg = ExperimentConfig { trials: 20_000, seed, ..Default::default() };
        prop_assert_eq!(estimate_chsh(&cfg, t).unwrap(), estimate_chsh(&cfg, t).unwrap());
    }
}

#[test]
fn static_window_can_beat_adaptive() {
    // σ = Δ: the optimum static position is c/2, not c
    let base = ExperimentConfig::default();
    let adaptive = joint_detection_probability(&base, 100.0).unwrap();
    let fixed = joint_detection_probability(&base.with_strategy(DetectorStrategy::Static { eta: 50.0 }), 100.0).unwrap();
    assert!(fixed > 2.5 * adaptive, "{fixed} vs {adaptive}");
}
