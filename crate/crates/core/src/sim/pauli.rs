use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl TryFrom<char> for Pauli {
    type Error = Error;

    fn try_from(c: char) -> Result<Self> {
        match c {
            'I' | 'i' => Ok(Pauli::I),
            'X' | 'x' => Ok(Pauli::X),
            'Y' | 'y' => Ok(Pauli::Y),
            'Z' | 'z' => Ok(Pauli::Z),
            other => Err(Error::UnknownPauli(other)),
        }
    }
}

/// One Pauli label per qubit, qubit 0 first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(labels: Vec<Pauli>) -> Self {
        Self(labels)
    }

    /// `Z` on `qubit`, identity elsewhere.
    pub fn single(num_qubits: usize, qubit: usize, pauli: Pauli) -> Self {
        let mut labels = vec![Pauli::I; num_qubits];
        labels[qubit] = pauli;
        Self(labels)
    }

    pub fn uniform(num_qubits: usize, pauli: Pauli) -> Self {
        Self(vec![pauli; num_qubits])
    }

    pub fn labels(&self) -> &[Pauli] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Bit masks `(x_mask, z_mask)` in basis-index convention (qubit 0 = MSB)
    /// together with the number of `Y` factors.
    pub(crate) fn masks(&self) -> (usize, usize, usize) {
        let n = self.0.len();
        let mut x = 0;
        let mut z = 0;
        let mut ys = 0;
        for (q, p) in self.0.iter().enumerate() {
            let bit = 1 << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => x |= bit,
                Pauli::Z => z |= bit,
                Pauli::Y => {
                    x |= bit;
                    z |= bit;
                    ys += 1;
                }
            }
        }
        (x, z, ys)
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars().map(Pauli::try_from).collect::<Result<Vec<_>>>().map(Self)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{p:?}")?;
        }
        Ok(())
    }
}
