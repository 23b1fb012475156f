use num_complex::Complex64;

use super::gate::{apply_in_place, GateMatrix, MAX_QUBITS};
use super::pauli::PauliString;
use super::{Distribution, DensityMatrix};
use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-10;

/// Phase `i^k`.
pub(crate) fn i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// A normalized pure state on `num_qubits` qubits.
///
/// Amplitude `j` belongs to the basis ket whose label, read left to right,
/// is the binary expansion of `j`; qubit 0 is the most significant bit.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>`.
    pub fn zero(num_qubits: usize) -> Self {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Self {
        assert!(num_qubits <= MAX_QUBITS, "register too large");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self {
            num_qubits,
            amplitudes,
        }
    }

    /// Parses a basis label such as `"0110"`.
    pub fn from_label(label: &str) -> Result<Self> {
        let index = usize::from_str_radix(label, 2)
            .map_err(|_| Error::InvalidState(format!("bad basis label '{label}'")))?;
        Ok(Self::basis(label.len(), index))
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidState(format!("length {len} is not 2^n")));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(Error::InvalidState(format!("{num_qubits} qubits exceeds {MAX_QUBITS}")));
        }
        let state = Self {
            num_qubits,
            amplitudes,
        };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm {norm}")));
        }
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch(self.num_qubits, other.num_qubits));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Returns the state with `gate` applied on `targets`.
    pub fn apply_gate(&self, gate: &GateMatrix, targets: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        out.apply_gate_mut(gate, targets)?;
        Ok(out)
    }

    pub fn apply_gate_mut(&mut self, gate: &GateMatrix, targets: &[usize]) -> Result<()> {
        apply_in_place(&mut self.amplitudes, self.num_qubits, gate, targets)
    }

    pub fn probabilities(&self) -> Distribution {
        let probs = self.amplitudes.iter().map(|a| a.norm_sqr()).collect();
        Distribution::new(probs).expect("normalized state yields a distribution")
    }

    /// `<ψ|P|ψ>` for a Pauli string with one label per qubit.
    pub fn expectation_pauli(&self, pauli: &PauliString) -> Result<f64> {
        if pauli.len() != self.num_qubits {
            return Err(Error::DimensionMismatch(pauli.len(), self.num_qubits));
        }
        let (x, z, ys) = pauli.masks();
        let phase = i_pow(ys);
        let value: Complex64 = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(j, a)| {
                let sign = if (j & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                self.amplitudes[j ^ x].conj() * a * sign
            })
            .sum::<Complex64>()
            * phase;
        Ok(value.re)
    }

    /// `|ψ><ψ|`.
    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> Self {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Self {
            num_qubits: self.num_qubits + other.num_qubits,
            amplitudes,
        }
    }
}
