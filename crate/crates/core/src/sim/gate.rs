use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest register the dense engine is meant for.
pub const MAX_QUBITS: usize = 5;

const UNITARY_TOL: f64 = 1e-10;

/// A unitary acting on `arity` qubits.
///
/// Row/column indices follow the same convention as the register: the first
/// target qubit is the most significant bit of the local index.
#[derive(Clone, Debug, PartialEq)]
pub struct GateMatrix {
    arity: usize,
    matrix: DMatrix<Complex64>,
}

impl GateMatrix {
    /// Wraps a square matrix, checking its size and unitarity.
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let gate = Self::from_matrix_unchecked(matrix)?;
        let dev = gate.unitarity_deviation();
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(gate)
    }

    /// Wraps a square power-of-two matrix without the unitarity check.
    ///
    /// Used for test hooks that need a deliberately broken gate.
    pub fn from_matrix_unchecked(matrix: DMatrix<Complex64>) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(Error::DimensionMismatch(rows, cols));
        }
        if rows < 2 || !rows.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "gate dimension {rows} is not a power of two"
            )));
        }
        let arity = rows.trailing_zeros() as usize;
        Ok(Self { arity, matrix })
    }

    pub(crate) fn from_rows(rows: &[&[Complex64]]) -> Self {
        let n = rows.len();
        let matrix = DMatrix::from_fn(n, n, |r, c| rows[r][c]);
        Self::new(matrix).expect("built-in gate must be unitary")
    }

    pub fn identity(arity: usize) -> Self {
        let d = 1 << arity;
        Self {
            arity,
            matrix: DMatrix::identity(d, d),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        1 << self.arity
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    pub fn dagger(&self) -> Self {
        Self {
            arity: self.arity,
            matrix: self.matrix.adjoint(),
        }
    }

    /// Matrix product `self · rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &GateMatrix) -> Result<Self> {
        if self.arity != rhs.arity {
            return Err(Error::DimensionMismatch(self.dim(), rhs.dim()));
        }
        Ok(Self {
            arity: self.arity,
            matrix: &self.matrix * &rhs.matrix,
        })
    }

    /// Tensor product `self ⊗ rhs`; `self` occupies the leading qubits.
    pub fn kron(&self, rhs: &GateMatrix) -> Self {
        Self {
            arity: self.arity + rhs.arity,
            matrix: self.matrix.kronecker(&rhs.matrix),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            arity: self.arity,
            matrix: self.matrix.map(|z| z * factor),
        }
    }

    /// `max |(U†U − 1)_ij|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.dim();
        let prod = self.matrix.adjoint() * &self.matrix;
        let mut dev = 0.0_f64;
        for r in 0..d {
            for c in 0..d {
                let expect = if r == c { 1.0 } else { 0.0 };
                dev = dev.max((prod[(r, c)] - Complex64::new(expect, 0.0)).norm());
            }
        }
        dev
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() < tol
    }

    /// Entry-wise max-norm distance.
    pub fn max_deviation(&self, other: &GateMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self
            .matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Checks that `targets` are distinct, in range and match the gate arity.
pub(crate) fn check_targets(num_qubits: usize, arity: usize, targets: &[usize]) -> Result<()> {
    if targets.len() != arity {
        return Err(Error::ArityMismatch {
            arity,
            targets: targets.len(),
        });
    }
    for (i, &t) in targets.iter().enumerate() {
        if t >= num_qubits {
            return Err(Error::TargetOutOfRange {
                qubit: t,
                num_qubits,
            });
        }
        if targets[..i].contains(&t) {
            return Err(Error::DuplicateTarget(t));
        }
    }
    Ok(())
}

/// Bit mask of qubit `q` in an `n`-qubit basis index (qubit 0 is the MSB).
#[inline]
pub(crate) fn qubit_mask(num_qubits: usize, q: usize) -> usize {
    1 << (num_qubits - 1 - q)
}

/// Applies `gate` on `targets` to a raw amplitude buffer of length `2^num_qubits`.
///
/// The buffer need not be normalized, so this also serves for building
/// composed matrices column by column.
pub(crate) fn apply_in_place(
    amps: &mut [Complex64],
    num_qubits: usize,
    gate: &GateMatrix,
    targets: &[usize],
) -> Result<()> {
    check_targets(num_qubits, gate.arity(), targets)?;
    debug_assert_eq!(amps.len(), 1 << num_qubits);

    let k = targets.len();
    let masks: Vec<usize> = targets.iter().map(|&t| qubit_mask(num_qubits, t)).collect();
    let target_mask = masks.iter().fold(0, |acc, m| acc | m);
    let offsets: Vec<usize> = (0..1usize << k)
        .map(|local| {
            (0..k)
                .filter(|&b| (local >> (k - 1 - b)) & 1 == 1)
                .map(|b| masks[b])
                .sum()
        })
        .collect();

    let m = gate.matrix();
    let mut buf = vec![Complex64::new(0.0, 0.0); offsets.len()];
    for base in 0..amps.len() {
        if base & target_mask != 0 {
            continue;
        }
        for (slot, &off) in buf.iter_mut().zip(&offsets) {
            *slot = amps[base | off];
        }
        for (row, &off) in offsets.iter().enumerate() {
            amps[base | off] = buf
                .iter()
                .enumerate()
                .map(|(col, a)| m[(row, col)] * a)
                .sum();
        }
    }
    Ok(())
}

/// Lifts `gate` on `targets` to the full `2^num_qubits` unitary.
pub fn embed(gate: &GateMatrix, targets: &[usize], num_qubits: usize) -> Result<GateMatrix> {
    check_targets(num_qubits, gate.arity(), targets)?;
    let d = 1 << num_qubits;
    let mut full = DMatrix::zeros(d, d);
    let mut col = vec![Complex64::new(0.0, 0.0); d];
    for j in 0..d {
        col.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        col[j] = Complex64::new(1.0, 0.0);
        apply_in_place(&mut col, num_qubits, gate, targets)?;
        full.set_column(j, &nalgebra::DVector::from_column_slice(&col));
    }
    Ok(GateMatrix {
        arity: num_qubits,
        matrix: full,
    })
}
