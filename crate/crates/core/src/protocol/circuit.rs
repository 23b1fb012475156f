use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::counts::{BasisOrder, CountsTable};
use crate::error::{Error, Result};
use crate::gates::{self, GateRecipe};
use crate::sim::{qubit_mask, Distribution, GateMatrix, StateVector};

/// What a step does in the life-cycle model. Purely descriptive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Prepare,
    Clone,
    Dissipate,
    Mutate,
    Interact,
}

/// A gate with logical-qubit targets. Angles are in units of π.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum GateOp {
    U3 {
        qubit: usize,
        theta_pi: f64,
        #[serde(default)]
        phi_pi: f64,
        #[serde(default)]
        lambda_pi: f64,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    X {
        qubit: usize,
    },
    H {
        qubit: usize,
    },
    /// Phenotype exchange on `(g1, p1, g2, p2)`.
    Interaction {
        qubits: [usize; 4],
    },
}

fn interaction_recipe() -> &'static GateRecipe {
    static RECIPE: OnceLock<GateRecipe> = OnceLock::new();
    RECIPE.get_or_init(|| gates::interaction_gate().expect("interaction recipe builds"))
}

impl GateOp {
    pub fn u3(qubit: usize, theta_pi: f64) -> Self {
        GateOp::U3 {
            qubit,
            theta_pi,
            phi_pi: 0.0,
            lambda_pi: 0.0,
        }
    }

    pub fn targets(&self) -> Vec<usize> {
        match *self {
            GateOp::U3 { qubit, .. } | GateOp::X { qubit } | GateOp::H { qubit } => vec![qubit],
            GateOp::Cnot { control, target } => vec![control, target],
            GateOp::Interaction { qubits } => qubits.to_vec(),
        }
    }

    /// Relabels every target `q` as `map[q]`.
    pub fn remap(&self, map: &[usize]) -> Self {
        match *self {
            GateOp::U3 {
                qubit,
                theta_pi,
                phi_pi,
                lambda_pi,
            } => GateOp::U3 {
                qubit: map[qubit],
                theta_pi,
                phi_pi,
                lambda_pi,
            },
            GateOp::Cnot { control, target } => GateOp::Cnot {
                control: map[control],
                target: map[target],
            },
            GateOp::X { qubit } => GateOp::X { qubit: map[qubit] },
            GateOp::H { qubit } => GateOp::H { qubit: map[qubit] },
            GateOp::Interaction { qubits } => GateOp::Interaction {
                qubits: qubits.map(|q| map[q]),
            },
        }
    }

    /// Hardware-level gates, with the interaction expanded into its
    /// CNOT-level recipe.
    pub fn primitives(&self) -> Vec<(GateMatrix, Vec<usize>)> {
        match *self {
            GateOp::U3 {
                qubit,
                theta_pi,
                phi_pi,
                lambda_pi,
            } => vec![(gates::u3(theta_pi * PI, phi_pi * PI, lambda_pi * PI), vec![qubit])],
            GateOp::Cnot { control, target } => vec![(gates::cnot(), vec![control, target])],
            GateOp::X { qubit } => vec![(gates::pauli_x(), vec![qubit])],
            GateOp::H { qubit } => vec![(gates::hadamard(), vec![qubit])],
            GateOp::Interaction { qubits } => interaction_recipe()
                .factors()
                .iter()
                .map(|f| (f.gate.clone(), f.targets.iter().map(|&q| qubits[q]).collect()))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub role: Role,
    #[serde(flatten)]
    pub op: GateOp,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementBasis {
    #[default]
    Z,
    /// A Hadamard on every qubit before the computational-basis readout.
    X,
}

/// Assignment of logical qubits to device qubits `Q_k`.
///
/// The device readout string lists the used device qubits from the highest
/// label to the lowest, so a bin index in device order has the highest
/// device qubit as its most significant bit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct DeviceLayout {
    logical_to_device: Vec<usize>,
}

impl TryFrom<Vec<usize>> for DeviceLayout {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<DeviceLayout> for Vec<usize> {
    fn from(l: DeviceLayout) -> Self {
        l.logical_to_device
    }
}

impl DeviceLayout {
    pub fn new(logical_to_device: Vec<usize>) -> Result<Self> {
        for (i, d) in logical_to_device.iter().enumerate() {
            if logical_to_device[..i].contains(d) {
                return Err(Error::InvalidParameter(format!(
                    "device qubit Q{d} assigned twice"
                )));
            }
        }
        if logical_to_device.is_empty() {
            return Err(Error::InvalidParameter("empty layout".into()));
        }
        Ok(Self { logical_to_device })
    }

    pub fn num_qubits(&self) -> usize {
        self.logical_to_device.len()
    }

    pub fn device_qubit(&self, logical: usize) -> usize {
        self.logical_to_device[logical]
    }

    pub fn logical_to_device(&self) -> &[usize] {
        &self.logical_to_device
    }

    /// Position of each logical qubit in the device readout string.
    pub fn positions(&self) -> Vec<usize> {
        self.logical_to_device
            .iter()
            .map(|d| self.logical_to_device.iter().filter(|&&o| o > *d).count())
            .collect()
    }

    /// Device readout header, e.g. `"Q4 Q2 Q1 Q0"`.
    pub fn device_header(&self) -> String {
        let mut labels = self.logical_to_device.clone();
        labels.sort_unstable_by(|a, b| b.cmp(a));
        labels.iter().map(|d| format!("Q{d}")).collect::<Vec<_>>().join(" ")
    }

    pub fn logical_to_device_index(&self, logical_index: usize) -> usize {
        let n = self.num_qubits();
        self.positions()
            .iter()
            .enumerate()
            .filter(|(q, _)| logical_index & qubit_mask(n, *q) != 0)
            .map(|(_, &pos)| qubit_mask(n, pos))
            .sum()
    }

    pub fn device_to_logical_index(&self, device_index: usize) -> usize {
        let n = self.num_qubits();
        self.positions()
            .iter()
            .enumerate()
            .filter(|(_, &pos)| device_index & qubit_mask(n, pos) != 0)
            .map(|(q, _)| qubit_mask(n, q))
            .sum()
    }

    pub fn counts_to_device(&self, counts: &CountsTable) -> Result<CountsTable> {
        self.check_len(counts.len())?;
        if counts.order() != BasisOrder::Logical {
            return Err(Error::BasisOrderMismatch);
        }
        Ok(counts.reindexed(BasisOrder::Device, |d| self.device_to_logical_index(d)))
    }

    pub fn counts_to_logical(&self, counts: &CountsTable) -> Result<CountsTable> {
        self.check_len(counts.len())?;
        if counts.order() != BasisOrder::Device {
            return Err(Error::BasisOrderMismatch);
        }
        Ok(counts.reindexed(BasisOrder::Logical, |l| self.logical_to_device_index(l)))
    }

    pub fn distribution_to_logical(&self, device: &Distribution) -> Result<Distribution> {
        self.check_len(device.len())?;
        Ok(device.reindex(|l| self.logical_to_device_index(l)))
    }

    fn check_len(&self, len: usize) -> Result<()> {
        let expected = 1 << self.num_qubits();
        if len != expected {
            return Err(Error::DimensionMismatch(len, expected));
        }
        Ok(())
    }
}

/// An ordered gate list on logical qubits plus readout metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitProgram {
    num_qubits: usize,
    steps: Vec<Step>,
    #[serde(default)]
    basis: MeasurementBasis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    device_layout: Option<DeviceLayout>,
}

impl CircuitProgram {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            steps: Vec::new(),
            basis: MeasurementBasis::Z,
            device_layout: None,
        }
    }

    pub fn push(&mut self, role: Role, op: GateOp) -> Result<&mut Self> {
        self.check_op(&op)?;
        self.steps.push(Step { role, op });
        Ok(self)
    }

    pub fn with_layout(mut self, layout: DeviceLayout) -> Result<Self> {
        if layout.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch(layout.num_qubits(), self.num_qubits));
        }
        self.device_layout = Some(layout);
        Ok(self)
    }

    pub fn with_basis(mut self, basis: MeasurementBasis) -> Self {
        self.basis = basis;
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn basis(&self) -> MeasurementBasis {
        self.basis
    }

    pub fn device_layout(&self) -> Option<&DeviceLayout> {
        self.device_layout.as_ref()
    }

    /// Re-checks every step and the layout, e.g. after deserialization.
    pub fn validate(&self) -> Result<()> {
        for s in &self.steps {
            self.check_op(&s.op)?;
        }
        if let Some(l) = &self.device_layout {
            if l.num_qubits() != self.num_qubits {
                return Err(Error::DimensionMismatch(l.num_qubits(), self.num_qubits));
            }
        }
        Ok(())
    }

    fn check_op(&self, op: &GateOp) -> Result<()> {
        let targets = op.targets();
        crate::sim::embed(&GateMatrix::identity(targets.len()), &targets, self.num_qubits)
            .map(|_| ())
    }

    /// All hardware-level gates in order, including the basis change.
    pub fn primitive_ops(&self) -> Vec<(GateMatrix, Vec<usize>)> {
        let mut ops: Vec<_> = self.steps.iter().flat_map(|s| s.op.primitives()).collect();
        if self.basis == MeasurementBasis::X {
            ops.extend((0..self.num_qubits).map(|q| (gates::hadamard(), vec![q])));
        }
        ops
    }

    /// Final state in the logical register, before readout.
    pub fn simulate(&self) -> Result<StateVector> {
        let mut state = StateVector::zero(self.num_qubits);
        for (gate, targets) in self.primitive_ops() {
            state.apply_gate_mut(&gate, &targets)?;
        }
        Ok(state)
    }

    /// The same circuit with targets moved to device readout positions.
    pub fn on_device(&self) -> Result<CircuitProgram> {
        let layout = self.device_layout.as_ref().ok_or(Error::BasisOrderMismatch)?;
        let map = layout.positions();
        let mut out = CircuitProgram::new(self.num_qubits).with_basis(self.basis);
        for s in &self.steps {
            out.push(s.role, s.op.remap(&map))?;
        }
        Ok(out)
    }

    /// Outcome probabilities in the logical `|g1 p1 g2 p2>` order.
    ///
    /// With a layout the circuit runs in device order and the readout is
    /// mapped back, so a layout bug shows up as a wrong distribution.
    pub fn logical_probabilities(&self) -> Result<Distribution> {
        match &self.device_layout {
            Some(layout) => {
                let device = self.on_device()?.simulate()?.probabilities();
                layout.distribution_to_logical(&device)
            }
            None => Ok(self.simulate()?.probabilities()),
        }
    }

    pub fn two_qubit_gate_count(&self) -> usize {
        self.primitive_ops().iter().filter(|(g, _)| g.arity() == 2).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_positions_and_header() {
        // |Q0 Q1 Q2 Q4> -> |p2 g2 g1 p1>
        let l = DeviceLayout::new(vec![2, 4, 1, 0]).unwrap();
        assert_eq!(l.device_header(), "Q4 Q2 Q1 Q0");
        assert_eq!(l.positions(), vec![1, 0, 2, 3]);
        // logical |g1=1 p1=0 g2=0 p2=0> reads as device "0100"
        assert_eq!(l.logical_to_device_index(0b1000), 0b0100);
        assert_eq!(l.device_to_logical_index(0b0100), 0b1000);
        assert!(DeviceLayout::new(vec![1, 1]).is_err());
    }

    #[test]
    fn identity_like_layout() {
        let l = DeviceLayout::new(vec![3, 2, 1, 0]).unwrap();
        for i in 0..16 {
            assert_eq!(l.logical_to_device_index(i), i);
        }
    }

    #[test]
    fn counts_order_guard() {
        let l = DeviceLayout::new(vec![2, 4, 1, 0]).unwrap();
        let logical = CountsTable::new((1..=16).collect()).unwrap();
        let device = l.counts_to_device(&logical).unwrap();
        assert_eq!(device.order(), BasisOrder::Device);
        assert_eq!(l.counts_to_device(&device), Err(Error::BasisOrderMismatch));
        assert_eq!(l.counts_to_logical(&device).unwrap(), logical);
    }

    #[test]
    fn push_validates_targets() {
        let mut c = CircuitProgram::new(4);
        assert!(c.push(Role::Clone, GateOp::Cnot { control: 1, target: 1 }).is_err());
        assert!(c.push(Role::Prepare, GateOp::u3(4, 0.25)).is_err());
        assert!(c.push(Role::Interact, GateOp::Interaction { qubits: [0, 1, 2, 3] }).is_ok());
        assert_eq!(c.two_qubit_gate_count(), interaction_recipe().two_qubit_gate_count());
    }

    #[test]
    fn x_basis_appends_hadamards() {
        let c = CircuitProgram::new(2).with_basis(MeasurementBasis::X);
        let p = c.simulate().unwrap().probabilities();
        for v in p.probabilities() {
            assert!((v - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn step_json_shape() {
        let s = Step {
            role: Role::Dissipate,
            op: GateOp::u3(1, 0.125),
        };
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(
            json,
            r#"{"role":"dissipate","gate":"u3","qubit":1,"theta_pi":0.125,"phi_pi":0.0,"lambda_pi":0.0}"#
        );
        let back: Step = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
