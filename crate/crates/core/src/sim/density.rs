use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::gate::{apply_in_place, GateMatrix, MAX_QUBITS};
use super::pauli::PauliString;
use super::state::{i_pow, StateVector};
use super::Distribution;
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const EIGEN_TOL: f64 = -1e-9;

/// A mixed state on `num_qubits` qubits, same basis ordering as [`StateVector`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols || rows < 2 || !rows.is_power_of_two() {
            return Err(Error::InvalidState(format!("{rows}x{cols} is not a 2^n square")));
        }
        let num_qubits = rows.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(Error::InvalidState(format!("{num_qubits} qubits exceeds {MAX_QUBITS}")));
        }
        let herm = (&entries - entries.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {trace}")));
        }
        let rho = Self {
            num_qubits,
            entries,
        };
        let min_eig = rho.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < EIGEN_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig}")));
        }
        Ok(rho)
    }

    /// Row-major entries of a `dim × dim` matrix, validated as in [`Self::new`].
    pub fn from_row_slice(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(entries.len(), dim * dim));
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_pure(state: &StateVector) -> Self {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Self {
            num_qubits: state.num_qubits(),
            entries: &v * v.adjoint(),
        }
    }

    /// Diagonal state `Σ p_j |j><j|`.
    pub fn diagonal(dist: &Distribution) -> Self {
        let d = dist.len();
        let mut entries = DMatrix::zeros(d, d);
        for (j, p) in dist.probabilities().iter().enumerate() {
            entries[(j, j)] = Complex64::new(*p, 0.0);
        }
        Self {
            num_qubits: dist.num_qubits(),
            entries,
        }
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        Self::diagonal(&Distribution::uniform(1 << num_qubits))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub(crate) fn from_entries_unchecked(entries: DMatrix<Complex64>) -> Self {
        let num_qubits = entries.nrows().trailing_zeros() as usize;
        Self {
            num_qubits,
            entries,
        }
    }

    /// Eigenvalues of the Hermitian part, ascending order not guaranteed.
    pub fn eigenvalues(&self) -> Vec<f64> {
        SymmetricEigen::new(hermitize(&self.entries))
            .eigenvalues
            .iter()
            .copied()
            .collect()
    }

    /// `ρ → U ρ U†` with `U` acting on `targets`.
    pub fn evolve(&self, gate: &GateMatrix, targets: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        out.evolve_mut(gate, targets)?;
        Ok(out)
    }

    pub fn evolve_mut(&mut self, gate: &GateMatrix, targets: &[usize]) -> Result<()> {
        let n = self.num_qubits;
        // U ρ, column by column; then U (U ρ)† = U ρ U† since ρ is Hermitian.
        left_apply(&mut self.entries, n, gate, targets)?;
        self.entries.adjoint_mut();
        left_apply(&mut self.entries, n, gate, targets)?;
        Ok(())
    }

    pub fn probabilities(&self) -> Distribution {
        let probs: Vec<f64> = (0..self.dim()).map(|j| self.entries[(j, j)].re.max(0.0)).collect();
        let total: f64 = probs.iter().sum();
        Distribution::new(probs.iter().map(|p| p / total).collect())
            .expect("diagonal of a density matrix is a distribution")
    }

    /// `Tr[P ρ]`.
    pub fn expectation_pauli(&self, pauli: &PauliString) -> Result<f64> {
        if pauli.len() != self.num_qubits {
            return Err(Error::DimensionMismatch(pauli.len(), self.num_qubits));
        }
        let (x, z, ys) = pauli.masks();
        // P|k> = i^ys (-1)^{|k & z|} |k ^ x>
        let sum: Complex64 = (0..self.dim())
            .map(|k| {
                let sign = if (k & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                self.entries[(k, k ^ x)] * sign
            })
            .sum();
        Ok((sum * i_pow(ys)).re)
    }

    /// Frobenius-norm-free max-entry distance.
    pub fn max_deviation(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

fn left_apply(
    m: &mut DMatrix<Complex64>,
    num_qubits: usize,
    gate: &GateMatrix,
    targets: &[usize],
) -> Result<()> {
    for mut col in m.column_iter_mut() {
        let slice = col
            .as_mut_slice();
        apply_in_place(slice, num_qubits, gate, targets)?;
    }
    Ok(())
}

fn hermitize(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()).map(|z| z * 0.5)
}

/// Principal square root of a positive semidefinite Hermitian matrix, with
/// negative round-off eigenvalues clamped to zero.
fn psd_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = SymmetricEigen::new(hermitize(m));
    let roots = eig
        .eigenvalues
        .map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0));
    let v = &eig.eigenvectors;
    v * DMatrix::from_diagonal(&roots) * v.adjoint()
}

/// Uhlmann fidelity `Tr sqrt(sqrt(ρ1) ρ2 sqrt(ρ1))`, clamped to `[0, 1]`.
pub fn state_fidelity(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch(rho1.dim(), rho2.dim()));
    }
    let s = psd_sqrt(&rho1.entries);
    let inner = &s * &rho2.entries * &s;
    let fid: f64 = SymmetricEigen::new(hermitize(&inner))
        .eigenvalues
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .sum();
    Ok(fid.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;

    fn mixture(a: f64) -> DensityMatrix {
        DensityMatrix::diagonal(&Distribution::new(vec![a, 1.0 - a]).unwrap())
    }

    #[test]
    fn identity_evolution_is_noop() {
        let rho = StateVector::zero(2)
            .apply_gate(&gates::u3(1.1, 0.3, 0.2), &[1])
            .unwrap()
            .to_density();
        let out = rho.evolve(&GateMatrix::identity(1), &[0]).unwrap();
        assert!(rho.max_deviation(&out).unwrap() < 1e-15);
    }

    #[test]
    fn x_swaps_populations() {
        let out = mixture(0.3).evolve(&gates::pauli_x(), &[0]).unwrap();
        assert!((out.get(0, 0).re - 0.7).abs() < 1e-15);
        assert!((out.get(1, 1).re - 0.3).abs() < 1e-15);
    }

    #[test]
    fn pure_evolution_matches_statevector() {
        let psi = StateVector::zero(3)
            .apply_gate(&gates::u3(0.4, 1.0, -0.5), &[0])
            .unwrap()
            .apply_gate(&gates::hadamard(), &[2])
            .unwrap();
        let rho = psi.to_density().evolve(&gates::cnot(), &[2, 1]).unwrap();
        let expected = psi.apply_gate(&gates::cnot(), &[2, 1]).unwrap().to_density();
        assert!(rho.max_deviation(&expected).unwrap() < 1e-10);
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let mut m = DMatrix::<Complex64>::identity(2, 2);
        assert!(DensityMatrix::new(m.clone()).is_err()); // trace 2
        m[(1, 1)] = Complex64::new(0.0, 0.0);
        assert!(DensityMatrix::new(m.clone()).is_ok());
        m[(0, 1)] = Complex64::new(0.0, 0.3);
        assert!(DensityMatrix::new(m).is_err()); // not Hermitian
        let neg = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(1.2, 0.0),
            Complex64::new(-0.2, 0.0),
        ]));
        assert!(DensityMatrix::new(neg).is_err());
    }

    #[test]
    fn fidelity_cases() {
        let zero = mixture(1.0);
        let one = mixture(0.0);
        let mixed = DensityMatrix::maximally_mixed(1);
        assert!((state_fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-12);
        assert!(state_fidelity(&zero, &one).unwrap().abs() < 1e-12);
        assert!((state_fidelity(&zero, &mixed).unwrap() - 0.5_f64.sqrt()).abs() < 1e-12);
        assert!(state_fidelity(&zero, &DensityMatrix::maximally_mixed(2)).is_err());
    }

    #[test]
    fn fidelity_of_pure_states_is_overlap() {
        let a = StateVector::zero(1).apply_gate(&gates::u3(0.8, 0.0, 0.0), &[0]).unwrap();
        let b = StateVector::zero(1).apply_gate(&gates::u3(0.2, 0.5, 0.0), &[0]).unwrap();
        let overlap = a.inner(&b).unwrap().norm();
        let f = state_fidelity(&a.to_density(), &b.to_density()).unwrap();
        assert!((f - overlap).abs() < 1e-7, "{f} vs {overlap}");
    }

    #[test]
    fn pauli_expectation_on_density_matches_pure() {
        let psi = StateVector::zero(2)
            .apply_gate(&gates::u3(1.3, 0.4, 0.9), &[0])
            .unwrap()
            .apply_gate(&gates::cnot(), &[0, 1])
            .unwrap();
        let rho = psi.to_density();
        for label in ["XX", "YY", "XY", "ZI", "IZ", "YZ"] {
            let p: PauliString = label.parse().unwrap();
            let a = psi.expectation_pauli(&p).unwrap();
            let b = rho.expectation_pauli(&p).unwrap();
            assert!((a - b).abs() < 1e-12, "{label}: {a} vs {b}");
        }
    }
}
