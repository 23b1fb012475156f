use proptest::prelude::*;
use qalife_core::analysis::{
    causal_correlation_discriminator, classical_fidelity, scale_prediction, sigma_z_from_counts,
};
use qalife_core::gates;
use qalife_core::noise::{distance_to_uniform, simulate_noisy, NoiseParams};
use qalife_core::protocol::{build_experiment, ideal_distribution, ExperimentId, MixtureWeights};
use qalife_core::sim::{sample_counts, Distribution, Pauli, PauliString, StateVector};

fn distribution(len: usize) -> impl Strategy<Value = Distribution> {
    proptest::collection::vec(0.0..1.0f64, len)
        .prop_filter("nonzero", |w| w.iter().sum::<f64>() > 1e-6)
        .prop_map(|w| Distribution::from_weights(&w).unwrap())
}

proptest! {
    #[test]
    fn fidelity_symmetric_and_permutation_invariant(
        p in distribution(16),
        q in distribution(16),
        perm in Just((0..16usize).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let f = classical_fidelity(&p, &q).unwrap();
        prop_assert!((f - classical_fidelity(&q, &p).unwrap()).abs() < 1e-15);
        prop_assert!((0.0..=1.0).contains(&f));
        let shuffle = |d: &Distribution| {
            Distribution::new(perm.iter().map(|&i| d.probabilities()[i]).collect()).unwrap()
        };
        let g = classical_fidelity(&shuffle(&p), &shuffle(&q)).unwrap();
        prop_assert!((f - g).abs() < 1e-12);
    }

    #[test]
    fn rounding_residue_bounded(p in distribution(16), total in 1u64..100_000) {
        let s = scale_prediction(&p, total).unwrap();
        prop_assert!(s.residue.abs() <= 8);
    }

    #[test]
    fn connected_dominates_independent(a in 0.0..=1.0f64) {
        let (c, i) = causal_correlation_discriminator(a).unwrap();
        let alpha = 2.0 * (a * (1.0 - a)).sqrt();
        prop_assert!((c - alpha).abs() < 1e-10);
        prop_assert!((i - alpha * alpha).abs() < 1e-10);
        prop_assert!(c >= i - 1e-12);
        if alpha > 1e-6 && alpha < 1.0 - 1e-6 {
            prop_assert!(c > i);
        }
    }
}

#[test]
fn sampled_sigma_z_converges() {
    let psi = StateVector::zero(4)
        .apply_gate(&gates::u3(1.1, 0.0, 0.0), &[0])
        .unwrap()
        .apply_gate(&gates::cnot(), &[0, 3])
        .unwrap();
    let exact = psi
        .expectation_pauli(&PauliString::single(4, 3, Pauli::Z))
        .unwrap();
    let mut previous = f64::INFINITY;
    for shots in [1_000u64, 100_000, 10_000_000] {
        let counts = sample_counts(&psi.probabilities(), shots, 11).unwrap();
        let err = (sigma_z_from_counts(&counts, 3).unwrap() - exact).abs();
        assert!(err < 5.0 / (shots as f64).sqrt(), "{shots}: {err}");
        previous = previous.min(err);
    }
    assert!(previous < 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn depolarizing_monotone_towards_uniform(
        id in prop_oneof![Just(ExperimentId::I), Just(ExperimentId::II), Just(ExperimentId::V)],
        p in 0.0..0.9f64,
        dp in 0.01..0.1f64,
    ) {
        let circuit = &build_experiment(id).variants[0].circuit;
        let uniform = Distribution::uniform(16);
        let f = |p: f64| {
            let d = simulate_noisy(circuit, &NoiseParams::symmetric(4, p, 0.0).unwrap()).unwrap();
            classical_fidelity(&d, &uniform).unwrap()
        };
        prop_assert!(f(p + dp) >= f(p) - 1e-12);
    }
}

#[test]
fn mutations_move_experiment_v_towards_uniform() {
    let spec = build_experiment(ExperimentId::V);
    let mut clean = spec.clone();
    clean.variants.retain(|v| v.mutations.is_empty());
    let with = ideal_distribution(&spec, &MixtureWeights::Nominal).unwrap();
    let without = ideal_distribution(&clean, &MixtureWeights::Nominal).unwrap();
    assert!(distance_to_uniform(&with) < distance_to_uniform(&without));
}
