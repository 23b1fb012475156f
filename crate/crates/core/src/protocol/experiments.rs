use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::circuit::{CircuitProgram, DeviceLayout, GateOp, MeasurementBasis, Role};
use crate::analysis::{mixture, Component};
use crate::error::{Error, Result};
use crate::sim::Distribution;

/// A genotype/phenotype pair of logical qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Individual {
    pub genotype: usize,
    pub phenotype: usize,
}

impl Individual {
    pub fn new(genotype: usize, phenotype: usize) -> Result<Self> {
        if genotype == phenotype {
            return Err(Error::SameQubit(genotype));
        }
        Ok(Self {
            genotype,
            phenotype,
        })
    }
}

pub const G1: usize = 0;
pub const P1: usize = 1;
pub const G2: usize = 2;
pub const P2: usize = 3;

pub const FIRST: Individual = Individual {
    genotype: G1,
    phenotype: P1,
};
pub const SECOND: Individual = Individual {
    genotype: G2,
    phenotype: P2,
};

const NO_MUTATION_SHOTS: u64 = 8192;
const MUTATION_SHOTS: u64 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ExperimentId {
    I,
    II,
    III,
    IV,
    V,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 5] = [
        ExperimentId::I,
        ExperimentId::II,
        ExperimentId::III,
        ExperimentId::IV,
        ExperimentId::V,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentId::I => "I",
            ExperimentId::II => "II",
            ExperimentId::III => "III",
            ExperimentId::IV => "IV",
            ExperimentId::V => "V",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(ExperimentId::I),
            "II" | "2" => Ok(ExperimentId::II),
            "III" | "3" => Ok(ExperimentId::III),
            "IV" | "4" => Ok(ExperimentId::IV),
            "V" | "5" => Ok(ExperimentId::V),
            _ => Err(Error::UnknownExperiment(s.to_string())),
        }
    }
}

/// A `σx` flip on one of the two genotypes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    Genotype1,
    Genotype2,
}

impl Mutation {
    pub fn qubit(&self) -> usize {
        match self {
            Mutation::Genotype1 => G1,
            Mutation::Genotype2 => G2,
        }
    }
}

/// One circuit design and its share of the runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Variant {
    pub name: String,
    /// Row of the per-run data table holding this variant's measured counts.
    pub reference_group: String,
    pub nominal_shots: u64,
    pub mutations: Vec<Mutation>,
    pub circuit: CircuitProgram,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub id: ExperimentId,
    pub reference_table: String,
    #[serde(with = "ratio_string")]
    pub mutation_rate: Ratio<u64>,
    pub variants: Vec<Variant>,
}

pub(crate) mod ratio_string {
    use num_rational::Ratio;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<u64>, D::Error> {
        let s = String::deserialize(d)?;
        let (n, m) = s
            .split_once('/')
            .ok_or_else(|| D::Error::custom(format!("expected 'n/d', got '{s}'")))?;
        let n: u64 = n.trim().parse().map_err(D::Error::custom)?;
        let m: u64 = m.trim().parse().map_err(D::Error::custom)?;
        if m == 0 {
            return Err(D::Error::custom("zero denominator"));
        }
        Ok(Ratio::new(n, m))
    }
}

impl ExperimentSpec {
    pub fn nominal_total(&self) -> u64 {
        self.variants.iter().map(|v| v.nominal_shots).sum()
    }

    /// Fraction of nominal runs in which `mutation` is applied.
    pub fn mutation_rate_of(&self, mutation: Mutation) -> Ratio<u64> {
        let hit: u64 = self
            .variants
            .iter()
            .filter(|v| v.mutations.contains(&mutation))
            .map(|v| v.nominal_shots)
            .sum();
        Ratio::new(hit, self.nominal_total())
    }

    pub fn basis(&self) -> MeasurementBasis {
        self.variants[0].circuit.basis()
    }

    /// Device layout shared by all variants, if there is one.
    pub fn device_layout(&self) -> Option<&DeviceLayout> {
        let first = self.variants.first()?.circuit.device_layout()?;
        self.variants
            .iter()
            .all(|v| v.circuit.device_layout() == Some(first))
            .then_some(first)
    }

    pub fn validate(&self) -> Result<()> {
        if self.variants.is_empty() {
            return Err(Error::InvalidParameter("experiment has no variants".into()));
        }
        for v in &self.variants {
            if v.nominal_shots == 0 {
                return Err(Error::InvalidParameter(format!("variant {} has no shots", v.name)));
            }
            v.circuit.validate()?;
        }
        let basis = self.basis();
        if self.variants.iter().any(|v| v.circuit.basis() != basis) {
            return Err(Error::InvalidParameter("variants disagree on measurement basis".into()));
        }
        for m in [Mutation::Genotype1, Mutation::Genotype2] {
            if self.mutation_rate_of(m) != self.mutation_rate {
                return Err(Error::InvalidParameter(format!(
                    "declared mutation rate {} does not match {:?} rate {}",
                    self.mutation_rate,
                    m,
                    self.mutation_rate_of(m)
                )));
            }
        }
        Ok(())
    }
}

/// How variants are weighted when forming the ideal mixture.
#[derive(Clone, Debug, PartialEq)]
pub enum MixtureWeights {
    /// Nominal shot counts of the experiment design.
    Nominal,
    /// Explicit per-variant totals, in variant order.
    Totals(Vec<u64>),
}

/// Logical-order probabilities of each variant circuit.
pub fn variant_distributions(spec: &ExperimentSpec) -> Result<Vec<Distribution>> {
    spec.variants
        .iter()
        .map(|v| v.circuit.logical_probabilities())
        .collect()
}

/// Ideal outcome distribution of the whole experiment in `|g1 p1 g2 p2>` order.
pub fn ideal_distribution(spec: &ExperimentSpec, weights: &MixtureWeights) -> Result<Distribution> {
    let dists = variant_distributions(spec)?;
    let w: Vec<f64> = match weights {
        MixtureWeights::Nominal => spec.variants.iter().map(|v| v.nominal_shots as f64).collect(),
        MixtureWeights::Totals(t) => {
            if t.len() != dists.len() {
                return Err(Error::DimensionMismatch(t.len(), dists.len()));
            }
            t.iter().map(|&x| x as f64).collect()
        }
    };
    let parts: Vec<(Component, f64)> = dists
        .iter()
        .zip(w)
        .map(|(d, w)| (Component::Distribution(d), w))
        .collect();
    mixture(&parts)
}

pub fn build_experiment(id: ExperimentId) -> ExperimentSpec {
    match id {
        ExperimentId::I => build_experiment_i(),
        ExperimentId::II => build_experiment_ii(),
        ExperimentId::III => build_experiment_iii(),
        ExperimentId::IV => build_experiment_iv(),
        ExperimentId::V => build_experiment_v(),
    }
}

/// `|g1 p1 g2 p2>` read out as `|Q3 Q2 Q1 Q0>`.
fn layout_interaction() -> DeviceLayout {
    DeviceLayout::new(vec![3, 2, 1, 0]).expect("valid layout")
}

/// `|Q0 Q1 Q2 Q4> -> |p2 g2 g1 p1>`.
fn layout_replication() -> DeviceLayout {
    DeviceLayout::new(vec![2, 4, 1, 0]).expect("valid layout")
}

fn variant(name: &str, group: &str, shots: u64, mutations: &[Mutation], circuit: CircuitProgram) -> Variant {
    Variant {
        name: name.to_string(),
        reference_group: group.to_string(),
        nominal_shots: shots,
        mutations: mutations.to_vec(),
        circuit,
    }
}

/// Two precursor genotypes, cloned into their phenotypes, optionally
/// mutated and dissipated, then interacting.
fn interaction_circuit(mutations: &[Mutation], dissipation_pi: Option<f64>) -> CircuitProgram {
    let build = || -> Result<CircuitProgram> {
        let mut c = CircuitProgram::new(4);
        // amplitudes (cos π/8, sin π/8) and (cos 3π/8, sin 3π/8)
        c.push(Role::Prepare, GateOp::u3(G1, 0.25))?
            .push(Role::Prepare, GateOp::u3(G2, 0.75))?
            .push(Role::Clone, GateOp::Cnot { control: G1, target: P1 })?
            .push(Role::Clone, GateOp::Cnot { control: G2, target: P2 })?;
        for m in mutations {
            c.push(Role::Mutate, GateOp::X { qubit: m.qubit() })?;
        }
        if let Some(theta) = dissipation_pi {
            c.push(Role::Dissipate, GateOp::u3(P1, theta))?
                .push(Role::Dissipate, GateOp::u3(P2, theta))?;
        }
        c.push(Role::Interact, GateOp::Interaction { qubits: [G1, P1, G2, P2] })?;
        if let Some(theta) = dissipation_pi {
            c.push(Role::Dissipate, GateOp::u3(P1, theta))?
                .push(Role::Dissipate, GateOp::u3(P2, theta))?;
        }
        c.with_layout(layout_interaction())
    };
    build().expect("static circuit is valid")
}

/// Precursor `cos(π/3)|0> + sin(π/3)|1>`, first individual, one dissipation
/// step, replication into the second individual, a second dissipation step
/// on both phenotypes.
fn replication_circuit(mutate_before: bool, mutate_after: bool, basis: MeasurementBasis) -> CircuitProgram {
    let build = || -> Result<CircuitProgram> {
        let mut c = CircuitProgram::new(4);
        c.push(Role::Prepare, GateOp::u3(G1, 2.0 / 3.0))?
            .push(Role::Clone, GateOp::Cnot { control: G1, target: P1 })?
            .push(Role::Dissipate, GateOp::u3(P1, 0.125))?;
        if mutate_before {
            c.push(Role::Mutate, GateOp::X { qubit: G1 })?;
        }
        c.push(Role::Clone, GateOp::Cnot { control: G1, target: G2 })?
            .push(Role::Clone, GateOp::Cnot { control: G2, target: P2 })?;
        if mutate_after {
            c.push(Role::Mutate, GateOp::X { qubit: G2 })?;
        }
        c.push(Role::Dissipate, GateOp::u3(P1, 0.125))?
            .push(Role::Dissipate, GateOp::u3(P2, 0.125))?;
        Ok(c.with_layout(layout_replication())?.with_basis(basis))
    };
    build().expect("static circuit is valid")
}

/// Interaction between two individuals.
pub fn build_experiment_i() -> ExperimentSpec {
    ExperimentSpec {
        id: ExperimentId::I,
        reference_table: "I".into(),
        mutation_rate: Ratio::new(0, 1),
        variants: vec![variant("I", "I", NO_MUTATION_SHOTS, &[], interaction_circuit(&[], None))],
    }
}

/// Self-replication with rotation-based dissipation, `σz` readout.
pub fn build_experiment_ii() -> ExperimentSpec {
    ExperimentSpec {
        id: ExperimentId::II,
        reference_table: "II".into(),
        mutation_rate: Ratio::new(0, 1),
        variants: vec![variant(
            "II",
            "II",
            NO_MUTATION_SHOTS,
            &[],
            replication_circuit(false, false, MeasurementBasis::Z),
        )],
    }
}

/// Experiment II read out in the `σx` basis.
pub fn build_experiment_iii() -> ExperimentSpec {
    ExperimentSpec {
        id: ExperimentId::III,
        reference_table: "III".into(),
        mutation_rate: Ratio::new(0, 1),
        variants: vec![variant(
            "III",
            "III",
            NO_MUTATION_SHOTS,
            &[],
            replication_circuit(false, false, MeasurementBasis::X),
        )],
    }
}

/// Experiment II plus mutation variants.
///
/// IVb flips `g1` before the replication (the copy inherits it), IVc flips
/// `g2` after `p2` is created, IVd does both. The second no-mutation group
/// is the Experiment II run itself.
pub fn build_experiment_iv() -> ExperimentSpec {
    use Mutation::*;
    let z = MeasurementBasis::Z;
    ExperimentSpec {
        id: ExperimentId::IV,
        reference_table: "IV".into(),
        mutation_rate: Ratio::new(2, 19),
        variants: vec![
            variant("IVa", "IVa", NO_MUTATION_SHOTS, &[], replication_circuit(false, false, z)),
            variant("II", "II", NO_MUTATION_SHOTS, &[], replication_circuit(false, false, z)),
            variant("IVb", "IVb", MUTATION_SHOTS, &[Genotype1], replication_circuit(true, false, z)),
            variant("IVc", "IVc", MUTATION_SHOTS, &[Genotype2], replication_circuit(false, true, z)),
            variant(
                "IVd",
                "IVd",
                MUTATION_SHOTS,
                &[Genotype1, Genotype2],
                replication_circuit(true, true, z),
            ),
        ],
    }
}

/// The complete model: interaction with mutations and two dissipation steps
/// (one before and one after the interaction).
pub fn build_experiment_v() -> ExperimentSpec {
    use Mutation::*;
    let d = Some(0.125);
    let mut variants: Vec<Variant> = ["Va", "Vb", "Vc"]
        .iter()
        .map(|n| variant(n, n, NO_MUTATION_SHOTS, &[], interaction_circuit(&[], d)))
        .collect();
    for (name, muts) in [
        ("Vd", vec![Genotype1]),
        ("Ve", vec![Genotype2]),
        ("Vf", vec![Genotype1, Genotype2]),
    ] {
        variants.push(variant(name, name, MUTATION_SHOTS, &muts, interaction_circuit(&muts, d)));
    }
    ExperimentSpec {
        id: ExperimentId::V,
        reference_table: "V".into(),
        mutation_rate: Ratio::new(2, 27),
        variants,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_parse() {
        assert_eq!("iv".parse::<ExperimentId>().unwrap(), ExperimentId::IV);
        assert_eq!("3".parse::<ExperimentId>().unwrap(), ExperimentId::III);
        assert!("VI".parse::<ExperimentId>().is_err());
        for id in ExperimentId::ALL {
            assert_eq!(id.to_string().parse::<ExperimentId>().unwrap(), id);
        }
    }

    #[test]
    fn all_specs_validate() {
        for id in ExperimentId::ALL {
            build_experiment(id).validate().unwrap();
        }
    }

    #[test]
    fn nominal_totals() {
        assert_eq!(build_experiment_iv().nominal_total(), 19456);
        assert_eq!(build_experiment_v().nominal_total(), 27648);
    }

    #[test]
    fn individual_requires_distinct_qubits() {
        assert!(Individual::new(1, 1).is_err());
        assert_eq!(Individual::new(G1, P1).unwrap(), FIRST);
    }

    #[test]
    fn shared_layouts() {
        assert!(build_experiment_iv().device_layout().is_some());
        assert_eq!(
            build_experiment_v().device_layout().unwrap().device_header(),
            "Q3 Q2 Q1 Q0"
        );
    }

    #[test]
    fn weights_length_checked() {
        let spec = build_experiment_iv();
        assert!(ideal_distribution(&spec, &MixtureWeights::Totals(vec![1, 2])).is_err());
    }
}
