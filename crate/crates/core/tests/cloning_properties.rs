use std::f64::consts::PI;

use proptest::prelude::*;
use qalife_core::gates;
use qalife_core::protocol::{CircuitProgram, DeviceLayout, GateOp, Role};
use qalife_core::sim::{Pauli, PauliString, StateVector};
use qalife_core::CountsTable;

fn cloned(theta: f64) -> StateVector {
    StateVector::zero(2)
        .apply_gate(&gates::u3(theta, 0.0, 0.0), &[0])
        .unwrap()
        .apply_gate(&gates::cnot(), &[0, 1])
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn copy_has_source_sigma_z(theta in 0.0..PI) {
        let s = cloned(theta);
        let zs = s.expectation_pauli(&PauliString::single(2, 0, Pauli::Z)).unwrap();
        let zc = s.expectation_pauli(&PauliString::single(2, 1, Pauli::Z)).unwrap();
        prop_assert!((zs - zc).abs() < 1e-12);
        prop_assert!((zs - theta.cos()).abs() < 1e-12);
    }

    #[test]
    fn pair_carries_precursor_sigma_x(theta in 0.0..PI) {
        let precursor = StateVector::zero(1)
            .apply_gate(&gates::u3(theta, 0.0, 0.0), &[0])
            .unwrap()
            .expectation_pauli(&PauliString::single(1, 0, Pauli::X))
            .unwrap();
        let xx = cloned(theta).expectation_pauli(&"XX".parse().unwrap()).unwrap();
        prop_assert!((xx - precursor).abs() < 1e-12);
        prop_assert!((precursor - theta.sin()).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn interaction_exchanges_phenotypes(t1 in 0.0..PI, t2 in 0.0..PI) {
        let mut c = CircuitProgram::new(4);
        c.push(Role::Prepare, GateOp::u3(0, t1 / PI)).unwrap()
            .push(Role::Prepare, GateOp::u3(2, t2 / PI)).unwrap()
            .push(Role::Clone, GateOp::Cnot { control: 0, target: 1 }).unwrap()
            .push(Role::Clone, GateOp::Cnot { control: 2, target: 3 }).unwrap();
        let before = c.simulate().unwrap();
        c.push(Role::Interact, GateOp::Interaction { qubits: [0, 1, 2, 3] }).unwrap();
        let after = c.simulate().unwrap();
        let z = |s: &StateVector, q| s.expectation_pauli(&PauliString::single(4, q, Pauli::Z)).unwrap();
        prop_assert!((z(&after, 1) - z(&before, 2)).abs() < 1e-10);
        prop_assert!((z(&after, 3) - z(&before, 0)).abs() < 1e-10);
        prop_assert!((z(&after, 0) - z(&before, 0)).abs() < 1e-10);
        prop_assert!((z(&after, 2) - z(&before, 2)).abs() < 1e-10);
    }

    #[test]
    fn gates_preserve_norm(
        ops in proptest::collection::vec((0usize..4, 0usize..4, 0.0..2.0 * PI, 0.0..2.0 * PI), 1..30)
    ) {
        let mut s = StateVector::zero(4);
        for (a, b, th, ph) in ops {
            s.apply_gate_mut(&gates::u3(th, ph, 0.3), &[a]).unwrap();
            if a != b {
                s.apply_gate_mut(&gates::cnot(), &[a, b]).unwrap();
            }
        }
        prop_assert!((s.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn layout_round_trip(
        perm in Just((0..5usize).collect::<Vec<_>>()).prop_shuffle(),
        bins in proptest::collection::vec(0u64..1000, 16),
    ) {
        prop_assume!(bins.iter().sum::<u64>() > 0);
        let layout = DeviceLayout::new(perm[..4].to_vec()).unwrap();
        let t = CountsTable::new(bins).unwrap();
        let back = layout.counts_to_logical(&layout.counts_to_device(&t).unwrap()).unwrap();
        prop_assert_eq!(back, t);
    }
}
