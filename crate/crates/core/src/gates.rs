//! Gate constructors and the CNOT-level decompositions used on hardware.
//!
//! Decompositions are kept symbolic as [`GateRecipe`]s: an ordered list of
//! factors, each a small gate on explicit register qubits, applied first to
//! last. [`GateRecipe::compose`] multiplies them out for verification.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sim::{embed, GateMatrix, StateVector};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cis(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

/// `u2(φ, λ) = 1/√2 [[1, -e^{iλ}], [e^{iφ}, e^{i(φ+λ)}]]`.
pub fn u2(phi: f64, lambda: f64) -> GateMatrix {
    let s = FRAC_1_SQRT_2;
    GateMatrix::from_rows(&[
        &[c(s, 0.0), -cis(lambda) * s],
        &[cis(phi) * s, cis(phi + lambda) * s],
    ])
}

/// `u3(θ, φ, λ) = [[cos θ/2, -e^{iλ} sin θ/2], [e^{iφ} sin θ/2, e^{i(φ+λ)} cos θ/2]]`.
pub fn u3(theta: f64, phi: f64, lambda: f64) -> GateMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    GateMatrix::from_rows(&[
        &[c(co, 0.0), -cis(lambda) * s],
        &[cis(phi) * s, cis(phi + lambda) * co],
    ])
}

pub fn pauli_x() -> GateMatrix {
    GateMatrix::from_rows(&[&[c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]])
}

pub fn sigma_y() -> GateMatrix {
    GateMatrix::from_rows(&[&[c(0.0, 0.0), c(0.0, -1.0)], &[c(0.0, 1.0), c(0.0, 0.0)]])
}

pub fn sigma_z() -> GateMatrix {
    diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)])
}

pub fn hadamard() -> GateMatrix {
    let s = FRAC_1_SQRT_2;
    GateMatrix::from_rows(&[&[c(s, 0.0), c(s, 0.0)], &[c(s, 0.0), c(-s, 0.0)]])
}

/// `P = √σz = diag(1, i)`.
pub fn phase_p() -> GateMatrix {
    diagonal(&[c(1.0, 0.0), c(0.0, 1.0)])
}

pub fn phase_p_dagger() -> GateMatrix {
    phase_p().dagger()
}

/// `T = √P = diag(1, e^{iπ/4})`.
pub fn phase_t() -> GateMatrix {
    diagonal(&[c(1.0, 0.0), cis(PI / 4.0)])
}

/// CNOT with the first target as control.
pub fn cnot() -> GateMatrix {
    permutation(&[0, 1, 3, 2])
}

pub fn swap() -> GateMatrix {
    permutation(&[0, 2, 1, 3])
}

/// `√X = ½ [[1+i, 1−i], [1−i, 1+i]]`.
pub fn sqrt_x() -> GateMatrix {
    GateMatrix::from_rows(&[
        &[c(0.5, 0.5), c(0.5, -0.5)],
        &[c(0.5, -0.5), c(0.5, 0.5)],
    ])
}

/// `diag(1, 1, √X)`: ideal controlled-√X, control first.
pub fn controlled_sqrt_x_ideal() -> GateMatrix {
    let sx = sqrt_x();
    let zero = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    GateMatrix::from_rows(&[
        &[one, zero, zero, zero],
        &[zero, one, zero, zero],
        &[zero, zero, sx.get(0, 0), sx.get(0, 1)],
        &[zero, zero, sx.get(1, 0), sx.get(1, 1)],
    ])
}

/// The four-qubit permutation `|xxyy> <-> |xyyx>`, identity elsewhere.
pub fn interaction_ideal() -> GateMatrix {
    let mut image: Vec<usize> = (0..16).collect();
    for x in 0..2usize {
        for y in 0..2usize {
            let xxyy = (x << 3) | (x << 2) | (y << 1) | y;
            let xyyx = (x << 3) | (y << 2) | (y << 1) | x;
            image[xxyy] = xyyx;
            image[xyyx] = xxyy;
        }
    }
    permutation(&image)
}

fn diagonal(entries: &[Complex64]) -> GateMatrix {
    let d = entries.len();
    let m = nalgebra::DMatrix::from_fn(d, d, |r, col| if r == col { entries[r] } else { c(0.0, 0.0) });
    GateMatrix::new(m).expect("unit-modulus diagonal")
}

/// Permutation matrix sending basis state `j` to `image[j]`.
fn permutation(image: &[usize]) -> GateMatrix {
    let d = image.len();
    let mut m = nalgebra::DMatrix::zeros(d, d);
    for (j, &i) in image.iter().enumerate() {
        m[(i, j)] = c(1.0, 0.0);
    }
    GateMatrix::new(m).expect("permutation is unitary")
}

/// The named single- and two-qubit gates of the protocol.
#[derive(Clone, Debug)]
pub struct StandardGates {
    pub x: GateMatrix,
    pub h: GateMatrix,
    pub cnot: GateMatrix,
    pub p: GateMatrix,
    pub t: GateMatrix,
    pub p_dagger: GateMatrix,
    pub sigma_z: GateMatrix,
    pub sigma_y: GateMatrix,
}

pub fn standard_gates() -> StandardGates {
    StandardGates {
        x: pauli_x(),
        h: hadamard(),
        cnot: cnot(),
        p: phase_p(),
        t: phase_t(),
        p_dagger: phase_p_dagger(),
        sigma_z: sigma_z(),
        sigma_y: sigma_y(),
    }
}

/// One step of a recipe.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub label: String,
    pub gate: GateMatrix,
    pub targets: Vec<usize>,
}

/// A named product of gates on a fixed register, applied in list order.
#[derive(Clone, Debug, PartialEq)]
pub struct GateRecipe {
    name: String,
    num_qubits: usize,
    factors: Vec<Factor>,
}

impl GateRecipe {
    pub fn new(name: impl Into<String>, num_qubits: usize) -> Self {
        Self {
            name: name.into(),
            num_qubits,
            factors: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn push(&mut self, label: &str, gate: GateMatrix, targets: &[usize]) -> Result<&mut Self> {
        crate::sim::embed(&gate, targets, self.num_qubits)?;
        self.factors.push(Factor {
            label: label.to_string(),
            gate,
            targets: targets.to_vec(),
        });
        Ok(self)
    }

    /// Appends every factor of `other` with its qubit `q` relabelled `map[q]`.
    pub fn append(&mut self, other: &GateRecipe, map: &[usize]) -> Result<&mut Self> {
        if map.len() != other.num_qubits {
            return Err(Error::ArityMismatch {
                arity: other.num_qubits,
                targets: map.len(),
            });
        }
        for f in &other.factors {
            let targets: Vec<usize> = f.targets.iter().map(|&q| map[q]).collect();
            self.push(&f.label, f.gate.clone(), &targets)?;
        }
        Ok(self)
    }

    /// Inverse recipe: reversed order, each factor daggered.
    pub fn dagger(&self) -> Self {
        Self {
            name: format!("{}†", self.name),
            num_qubits: self.num_qubits,
            factors: self
                .factors
                .iter()
                .rev()
                .map(|f| Factor {
                    label: format!("{}†", f.label),
                    gate: f.gate.dagger(),
                    targets: f.targets.clone(),
                })
                .collect(),
        }
    }

    /// Full register unitary, last factor leftmost.
    pub fn compose(&self) -> GateMatrix {
        let mut total = GateMatrix::identity(self.num_qubits);
        for f in &self.factors {
            let full = embed(&f.gate, &f.targets, self.num_qubits).expect("validated on push");
            total = full.compose(&total).expect("same register");
        }
        total
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch(state.num_qubits(), self.num_qubits));
        }
        let mut out = state.clone();
        for f in &self.factors {
            out.apply_gate_mut(&f.gate, &f.targets)?;
        }
        Ok(out)
    }

    pub fn two_qubit_gate_count(&self) -> usize {
        self.factors.iter().filter(|f| f.gate.arity() == 2).count()
    }

    pub fn single_qubit_gate_count(&self) -> usize {
        self.factors.iter().filter(|f| f.gate.arity() == 1).count()
    }

    /// Replaces factor `index` by `gate`. Test hook for corrupting recipes.
    pub fn replace_factor(&mut self, index: usize, gate: GateMatrix) -> Result<()> {
        let f = self
            .factors
            .get_mut(index)
            .ok_or_else(|| Error::InvalidParameter(format!("no factor {index}")))?;
        if f.gate.arity() != gate.arity() {
            return Err(Error::ArityMismatch {
                arity: gate.arity(),
                targets: f.targets.len(),
            });
        }
        f.gate = gate;
        Ok(())
    }
}

fn pair_register(i: usize, j: usize) -> Result<usize> {
    if i == j {
        return Err(Error::SameQubit(i));
    }
    Ok(i.max(j) + 1)
}

/// `S_ij = U_ij U_ji U_ij` on a register of `max(i, j) + 1` qubits.
pub fn swap_from_cnots(i: usize, j: usize) -> Result<GateRecipe> {
    let n = pair_register(i, j)?;
    let mut r = GateRecipe::new(format!("S[{i},{j}]"), n);
    r.push("CNOT", cnot(), &[i, j])?
        .push("CNOT", cnot(), &[j, i])?
        .push("CNOT", cnot(), &[i, j])?;
    Ok(r)
}

/// Controlled-√X with control `control`:
/// `(T ⊗ P·u3(−π/4,0,0)) U (1 ⊗ u3(π/4,0,0)) U (1 ⊗ P†)`.
pub fn controlled_sqrt_not(control: usize, target: usize) -> Result<GateRecipe> {
    let n = pair_register(control, target)?;
    let mut r = GateRecipe::new(format!("C[{control},{target}]"), n);
    let p_u3 = phase_p().compose(&u3(-PI / 4.0, 0.0, 0.0))?;
    r.push("P†", phase_p_dagger(), &[target])?
        .push("CNOT", cnot(), &[control, target])?
        .push("u3(π/4,0,0)", u3(PI / 4.0, 0.0, 0.0), &[target])?
        .push("CNOT", cnot(), &[control, target])?
        .push("T", phase_t(), &[control])?
        .push("P·u3(-π/4,0,0)", p_u3, &[target])?;
    Ok(r)
}

/// `U_ji = (H ⊗ H) U_ij (H ⊗ H)`: a CNOT controlled by `j` built from one
/// controlled by `i`.
pub fn reversed_cnot(i: usize, j: usize) -> Result<GateRecipe> {
    let n = pair_register(i, j)?;
    let mut r = GateRecipe::new(format!("U[{j},{i}] via H"), n);
    r.push("H", hadamard(), &[i])?
        .push("H", hadamard(), &[j])?
        .push("CNOT", cnot(), &[i, j])?
        .push("H", hadamard(), &[i])?
        .push("H", hadamard(), &[j])?;
    Ok(r)
}

/// The three-qubit block `F = U_43 C_34 C_24 U_23 C†_34 U_43 U_23` acting on
/// register qubits 1..=3 of a 4-qubit register (1-based labels 2..=4).
pub fn exchange_block() -> Result<GateRecipe> {
    // 1-based label k -> register qubit k - 1
    let mut r = GateRecipe::new("F", 4);
    let c34 = controlled_sqrt_not(0, 1)?;
    let c24 = controlled_sqrt_not(0, 1)?;
    r.push("CNOT", cnot(), &[1, 2])?
        .push("CNOT", cnot(), &[3, 2])?
        .append(&c34.dagger(), &[2, 3])?
        .push("CNOT", cnot(), &[1, 2])?
        .append(&c24, &[1, 3])?
        .append(&c34, &[2, 3])?
        .push("CNOT", cnot(), &[3, 2])?;
    Ok(r)
}

/// `U_I = S_23 U_12 (1 ⊗ F) U_12 S_23` on `|g1 p1 g2 p2>`.
pub fn interaction_gate() -> Result<GateRecipe> {
    let s23 = swap_from_cnots(0, 1)?;
    let mut r = GateRecipe::new("U_I", 4);
    r.append(&s23, &[1, 2])?
        .push("CNOT", cnot(), &[0, 1])?
        .append(&exchange_block()?, &[0, 1, 2, 3])?
        .push("CNOT", cnot(), &[0, 1])?
        .append(&s23, &[1, 2])?;
    Ok(r)
}

/// Max-entry deviation `‖A − cB‖` with the unit phase `c` taken from the
/// largest-magnitude entry of `B`.
pub fn global_phase_deviation(a: &GateMatrix, b: &GateMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let (idx, pivot) = b
        .matrix()
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .expect("nonempty matrix");
    let ratio = a.matrix()[idx] / pivot;
    let phase = if ratio.norm() > 0.0 {
        ratio / ratio.norm()
    } else {
        c(1.0, 0.0)
    };
    a.max_deviation(&b.scale(phase))
}

pub fn equal_up_to_global_phase(a: &GateMatrix, b: &GateMatrix, tol: f64) -> Result<bool> {
    Ok(global_phase_deviation(a, b)? < tol)
}
