//! Circuit programs and the five experiment builders.

mod circuit;
mod document;
mod experiments;

pub use circuit::{CircuitProgram, DeviceLayout, GateOp, MeasurementBasis, Role, Step};
pub use document::{ExperimentDocument, DOCUMENT_VERSION};
pub use experiments::{
    build_experiment, build_experiment_i, build_experiment_ii, build_experiment_iii,
    build_experiment_iv, build_experiment_v, ideal_distribution, variant_distributions,
    ExperimentId, ExperimentSpec, Individual, Mutation, MixtureWeights, Variant, FIRST, G1, G2,
    P1, P2, SECOND,
};
