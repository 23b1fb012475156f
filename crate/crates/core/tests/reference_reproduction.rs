use num_rational::Ratio;
use qalife_core::analysis::{
    classical_fidelity, compare, joint_parity_expectation, mixture, scale_prediction,
    sigma_z_tuple, Component,
};
use qalife_core::protocol::{
    build_experiment, ideal_distribution, ExperimentId, Mutation, MixtureWeights,
};
use qalife_core::reference::ReferenceDataset;
use qalife_core::CountsTable;

fn measured_weights(d: &ReferenceDataset, id: ExperimentId) -> MixtureWeights {
    MixtureWeights::Totals(d.variant_totals(&build_experiment(id)).unwrap())
}

#[test]
fn table_i_predicted_row() {
    let d = ReferenceDataset::embedded();
    let ideal = ideal_distribution(&build_experiment(ExperimentId::I), &MixtureWeights::Nominal).unwrap();
    let scaled = scale_prediction(&ideal, 8093).unwrap();
    let published = d.predicted(ExperimentId::I).unwrap();
    for (ours, theirs) in scaled.counts.iter().zip(published.bins()) {
        assert!(ours.abs_diff(*theirs) <= 1, "{:?} vs {:?}", scaled.counts, published.bins());
    }
}

#[test]
fn table_ii_predicted_row() {
    let d = ReferenceDataset::embedded();
    let ideal = ideal_distribution(&build_experiment(ExperimentId::II), &MixtureWeights::Nominal).unwrap();
    let scaled = scale_prediction(&ideal, 8192).unwrap();
    assert!(scaled.counts[15].abs_diff(5045) <= 1);
    for (ours, theirs) in scaled.counts.iter().zip(d.predicted(ExperimentId::II).unwrap().bins()) {
        assert!(ours.abs_diff(*theirs) <= 3);
    }
}

#[test]
fn measured_tuples_match_captions() {
    let d = ReferenceDataset::embedded();
    for id in [ExperimentId::I, ExperimentId::II, ExperimentId::IV, ExperimentId::V] {
        let quoted = d.quoted(id).unwrap();
        let ours = sigma_z_tuple(d.measured(id).unwrap()).unwrap();
        for (a, b) in ours.iter().zip(&quoted.measured) {
            assert!((a - b).abs() <= 0.005 + 1e-12, "{id}: {ours:?} vs {:?}", quoted.measured);
        }
    }
    let x = joint_parity_expectation(d.measured(ExperimentId::III).unwrap()).unwrap();
    assert!((x - 0.22).abs() < 0.005);
}

#[test]
fn quoted_fidelities_reproduce() {
    let d = ReferenceDataset::embedded();
    for id in ExperimentId::ALL {
        let spec = build_experiment(id);
        let r = compare(&spec, d.measured(id).unwrap(), &measured_weights(&d, id)).unwrap();
        let quoted = d.quoted(id).unwrap().fidelity;
        assert!((r.fidelity - quoted).abs() <= 1e-3, "{id}: {} vs {quoted}", r.fidelity);
    }
}

#[test]
fn measured_weights_reproduce_table_v_prediction() {
    let d = ReferenceDataset::embedded();
    let spec = build_experiment(ExperimentId::V);
    let ideal = ideal_distribution(&spec, &measured_weights(&d, ExperimentId::V)).unwrap();
    let scaled = scale_prediction(&ideal, 26217).unwrap();
    for (ours, theirs) in scaled.counts.iter().zip(d.predicted(ExperimentId::V).unwrap().bins()) {
        assert!(ours.abs_diff(*theirs) <= 1, "{:?}", scaled.counts);
    }
}

#[test]
fn group_rows_aggregate_exactly() {
    let d = ReferenceDataset::embedded();
    let iv = ["IVa", "II", "IVb", "IVc", "IVd"].map(|g| d.group(g).unwrap());
    let agg = CountsTable::aggregate(iv).unwrap();
    assert_eq!(agg.total(), 19321);
    assert_eq!(&agg, d.measured(ExperimentId::IV).unwrap());

    let v = ["Va", "Vb", "Vc", "Vd", "Ve", "Vf"].map(|g| d.group(g).unwrap());
    let agg = CountsTable::aggregate(v).unwrap();
    assert_eq!(agg.total(), 26217);
    assert_eq!(&agg, d.measured(ExperimentId::V).unwrap());

    // the same through the weighted mixture with totals as weights
    let parts: Vec<_> = v.iter().map(|t| (Component::Counts(t), t.total() as f64)).collect();
    let mixed = mixture(&parts).unwrap();
    assert!(mixed.max_abs_diff(&agg.to_distribution()).unwrap() < 1e-15);
}

#[test]
fn mutation_rates_are_exact() {
    let expected = [
        (ExperimentId::I, Ratio::new(0, 1)),
        (ExperimentId::II, Ratio::new(0, 1)),
        (ExperimentId::III, Ratio::new(0, 1)),
        (ExperimentId::IV, Ratio::new(2, 19)),
        (ExperimentId::V, Ratio::new(2, 27)),
    ];
    for (id, rate) in expected {
        let spec = build_experiment(id);
        assert_eq!(spec.mutation_rate, rate);
        for m in [Mutation::Genotype1, Mutation::Genotype2] {
            assert_eq!(spec.mutation_rate_of(m), rate);
        }
    }
}

#[test]
fn predicted_rows_are_close_to_ideal() {
    // the printed predictions themselves, as a check on the table transcription
    let d = ReferenceDataset::embedded();
    for id in ExperimentId::ALL {
        let ideal = ideal_distribution(&build_experiment(id), &measured_weights(&d, id)).unwrap();
        let f = classical_fidelity(&d.predicted(id).unwrap().to_distribution(), &ideal).unwrap();
        assert!(f > 0.9999, "{id}: {f}");
    }
}
