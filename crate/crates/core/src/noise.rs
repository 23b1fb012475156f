//! Depolarizing + readout-confusion noise model and a grid fit against counts.

use serde::{Deserialize, Serialize};

use crate::analysis::{classical_fidelity, mixture, Component};
use crate::counts::{BasisOrder, CountsTable};
use crate::error::{Error, Result};
use crate::protocol::{ideal_distribution, CircuitProgram, ExperimentSpec, MixtureWeights};
use crate::sim::{qubit_mask, DensityMatrix, Distribution};

/// Row-stochastic `P(read | true)` for one qubit.
pub type Confusion = [[f64; 2]; 2];

pub const IDENTITY_CONFUSION: Confusion = [[1.0, 0.0], [0.0, 1.0]];

const STOCHASTIC_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub depolarizing_p: f64,
    /// One confusion matrix per logical qubit.
    pub readout: Vec<Confusion>,
}

impl NoiseParams {
    pub fn new(depolarizing_p: f64, readout: Vec<Confusion>) -> Result<Self> {
        if !(0.0..=1.0).contains(&depolarizing_p) {
            return Err(Error::InvalidParameter(format!(
                "depolarizing probability {depolarizing_p} outside [0, 1]"
            )));
        }
        for (q, m) in readout.iter().enumerate() {
            for row in m {
                if row.iter().any(|x| !(0.0..=1.0).contains(x))
                    || (row[0] + row[1] - 1.0).abs() > STOCHASTIC_TOL
                {
                    return Err(Error::InvalidParameter(format!(
                        "confusion matrix of qubit {q} is not row-stochastic"
                    )));
                }
            }
        }
        Ok(Self {
            depolarizing_p,
            readout,
        })
    }

    pub fn noiseless(num_qubits: usize) -> Self {
        Self {
            depolarizing_p: 0.0,
            readout: vec![IDENTITY_CONFUSION; num_qubits],
        }
    }

    /// Same depolarizing rate and a symmetric bit-flip readout on every qubit.
    pub fn symmetric(num_qubits: usize, depolarizing_p: f64, flip: f64) -> Result<Self> {
        Self::new(depolarizing_p, vec![[[1.0 - flip, flip], [flip, 1.0 - flip]]; num_qubits])
    }
}

/// `ρ -> (1-p) ρ + p (I/2 ⊗ Tr_q ρ)` on qubit `q`.
fn depolarize(rho: &DensityMatrix, q: usize, p: f64) -> DensityMatrix {
    let n = rho.num_qubits();
    let m = qubit_mask(n, q);
    let d = rho.dim();
    let e = rho.entries();
    let out = nalgebra::DMatrix::from_fn(d, d, |r, c| {
        let mut v = e[(r, c)] * (1.0 - p);
        if r & m == c & m {
            v += (e[(r & !m, c & !m)] + e[(r | m, c | m)]) * (0.5 * p);
        }
        v
    });
    DensityMatrix::from_entries_unchecked(out)
}

fn apply_confusion(dist: &Distribution, readout: &[Confusion]) -> Result<Distribution> {
    let n = dist.num_qubits();
    if readout.len() != n {
        return Err(Error::DimensionMismatch(readout.len(), n));
    }
    let mut probs = dist.probabilities().to_vec();
    for (q, conf) in readout.iter().enumerate() {
        if *conf == IDENTITY_CONFUSION {
            continue;
        }
        let m = qubit_mask(n, q);
        let mut next = vec![0.0; probs.len()];
        for (j, p) in probs.iter().enumerate() {
            let truth = usize::from(j & m != 0);
            next[j & !m] += p * conf[truth][0];
            next[j | m] += p * conf[truth][1];
        }
        probs = next;
    }
    Distribution::new(probs)
}

/// Noisy outcome distribution of one circuit in logical order.
///
/// Every primitive gate is followed by depolarizing on each qubit it touches;
/// the readout confusion is applied to the final distribution.
pub fn simulate_noisy(circuit: &CircuitProgram, params: &NoiseParams) -> Result<Distribution> {
    let n = circuit.num_qubits();
    let mut rho = DensityMatrix::diagonal(&Distribution::delta(1 << n, 0));
    for (gate, targets) in circuit.primitive_ops() {
        rho.evolve_mut(&gate, &targets)?;
        if params.depolarizing_p > 0.0 {
            for &q in &targets {
                rho = depolarize(&rho, q, params.depolarizing_p);
            }
        }
    }
    apply_confusion(&rho.probabilities(), &params.readout)
}

/// Weighted mixture of the noisy variant distributions.
pub fn simulate_noisy_experiment(
    spec: &ExperimentSpec,
    params: &NoiseParams,
    weights: &MixtureWeights,
) -> Result<Distribution> {
    let dists: Vec<Distribution> = spec
        .variants
        .iter()
        .map(|v| simulate_noisy(&v.circuit, params))
        .collect::<Result<_>>()?;
    let w: Vec<f64> = match weights {
        MixtureWeights::Nominal => spec.variants.iter().map(|v| v.nominal_shots as f64).collect(),
        MixtureWeights::Totals(t) if t.len() == dists.len() => t.iter().map(|&x| x as f64).collect(),
        MixtureWeights::Totals(t) => return Err(Error::DimensionMismatch(t.len(), dists.len())),
    };
    let parts: Vec<_> = dists
        .iter()
        .zip(w)
        .map(|(d, w)| (Component::Distribution(d), w))
        .collect();
    mixture(&parts)
}

/// Candidate values for the grid search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseGrid {
    pub depolarizing: Vec<f64>,
    /// Symmetric readout flip probabilities.
    pub readout_flip: Vec<f64>,
}

impl Default for NoiseGrid {
    fn default() -> Self {
        Self {
            depolarizing: (0..=20).map(|k| k as f64 * 0.01).collect(),
            readout_flip: (0..=10).map(|k| k as f64 * 0.01).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseFit {
    pub params: NoiseParams,
    pub fidelity: f64,
    /// Fidelity of the noiseless prediction.
    pub baseline_fidelity: f64,
}

/// Grid search maximizing the classical fidelity to `measured`.
///
/// Candidates are visited in increasing `(p, flip)` order and only a strict
/// improvement replaces the incumbent.
pub fn fit_noise(
    spec: &ExperimentSpec,
    measured: &CountsTable,
    grid: &NoiseGrid,
    weights: &MixtureWeights,
) -> Result<NoiseFit> {
    if grid.depolarizing.is_empty() || grid.readout_flip.is_empty() {
        return Err(Error::InvalidParameter("empty noise grid".into()));
    }
    let logical = match measured.order() {
        BasisOrder::Logical => measured.clone(),
        BasisOrder::Device => spec
            .device_layout()
            .ok_or(Error::BasisOrderMismatch)?
            .counts_to_logical(measured)?,
    };
    let target = logical.to_distribution();
    let n = logical.num_qubits();
    let baseline = classical_fidelity(&target, &ideal_distribution(spec, weights)?)?;

    let mut ps = grid.depolarizing.clone();
    let mut flips = grid.readout_flip.clone();
    ps.sort_by(f64::total_cmp);
    flips.sort_by(f64::total_cmp);

    let mut best: Option<NoiseFit> = None;
    for &p in &ps {
        for &f in &flips {
            let params = NoiseParams::symmetric(n, p, f)?;
            let fid = classical_fidelity(&target, &simulate_noisy_experiment(spec, &params, weights)?)?;
            if best.as_ref().is_none_or(|b| fid > b.fidelity) {
                best = Some(NoiseFit {
                    params,
                    fidelity: fid,
                    baseline_fidelity: baseline,
                });
            }
        }
    }
    Ok(best.expect("grid is nonempty"))
}

/// `max_j |p_j - 1/d|`.
pub fn distance_to_uniform(dist: &Distribution) -> f64 {
    let u = 1.0 / dist.len() as f64;
    dist.probabilities()
        .iter()
        .map(|p| (p - u).abs())
        .fold(0.0, f64::max)
}
