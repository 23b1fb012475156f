//! Post-processing of counts tables and comparison against ideal predictions.

use serde::{Deserialize, Serialize};

use crate::counts::{bin_label, BasisOrder, CountsTable};
use crate::error::{Error, Result};
use crate::gates;
use crate::protocol::{ideal_distribution, ExperimentSpec, MeasurementBasis, MixtureWeights};
use crate::sim::{Distribution, Pauli, PauliString, StateVector};

/// Bhattacharyya coefficient `Σ sqrt(p_j q_j)`.
pub fn classical_fidelity(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(p.len(), q.len()));
    }
    let f: f64 = p
        .probabilities()
        .iter()
        .zip(q.probabilities())
        .map(|(a, b)| (a * b).sqrt())
        .sum();
    Ok(f.clamp(0.0, 1.0))
}

fn require_logical(counts: &CountsTable) -> Result<()> {
    match counts.order() {
        BasisOrder::Logical => Ok(()),
        BasisOrder::Device => Err(Error::BasisOrderMismatch),
    }
}

/// `(N[bit=0] - N[bit=1]) / N` for the qubit at label position `qubit`.
pub fn sigma_z_from_counts(counts: &CountsTable, qubit: usize) -> Result<f64> {
    require_logical(counts)?;
    let n = counts.num_qubits();
    if qubit >= n {
        return Err(Error::TargetOutOfRange {
            qubit,
            num_qubits: n,
        });
    }
    let mask = 1usize << (n - 1 - qubit);
    let signed: i64 = counts
        .bins()
        .iter()
        .enumerate()
        .map(|(j, &c)| if j & mask == 0 { c as i64 } else { -(c as i64) })
        .sum();
    Ok(signed as f64 / counts.total() as f64)
}

/// `<σz>` of every qubit, in label order.
pub fn sigma_z_tuple(counts: &CountsTable) -> Result<Vec<f64>> {
    (0..counts.num_qubits())
        .map(|q| sigma_z_from_counts(counts, q))
        .collect()
}

/// `Σ_j (-1)^{popcount j} N_j / N`.
pub fn joint_parity_expectation(counts: &CountsTable) -> Result<f64> {
    require_logical(counts)?;
    let signed: i64 = counts
        .bins()
        .iter()
        .enumerate()
        .map(|(j, &c)| if j.count_ones() % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum();
    Ok(signed as f64 / counts.total() as f64)
}

pub fn sigma_z_from_distribution(dist: &Distribution, qubit: usize) -> Result<f64> {
    let n = dist.num_qubits();
    if qubit >= n {
        return Err(Error::TargetOutOfRange {
            qubit,
            num_qubits: n,
        });
    }
    let mask = 1usize << (n - 1 - qubit);
    Ok(dist
        .probabilities()
        .iter()
        .enumerate()
        .map(|(j, p)| if j & mask == 0 { *p } else { -p })
        .sum())
}

pub fn parity_from_distribution(dist: &Distribution) -> f64 {
    dist.probabilities()
        .iter()
        .enumerate()
        .map(|(j, p)| if j.count_ones() % 2 == 0 { *p } else { -p })
        .sum()
}

/// Rounded prediction and how far its total is from the target.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledPrediction {
    pub counts: Vec<u64>,
    /// `Σ counts - total`.
    pub residue: i64,
}

/// `round(p_j · total)` per bin, half away from zero.
pub fn scale_prediction(ideal: &Distribution, total: u64) -> Result<ScaledPrediction> {
    if total == 0 {
        return Err(Error::EmptyCounts);
    }
    let counts: Vec<u64> = ideal
        .probabilities()
        .iter()
        .map(|p| (p * total as f64).round() as u64)
        .collect();
    let residue = counts.iter().sum::<u64>() as i64 - total as i64;
    Ok(ScaledPrediction { counts, residue })
}

/// One term of a [`mixture`].
#[derive(Clone, Copy, Debug)]
pub enum Component<'a> {
    Counts(&'a CountsTable),
    Distribution(&'a Distribution),
}

impl Component<'_> {
    fn distribution(&self) -> Result<Distribution> {
        match self {
            Component::Counts(c) => {
                require_logical(c)?;
                Ok(c.to_distribution())
            }
            Component::Distribution(d) => Ok((*d).clone()),
        }
    }
}

/// Weighted, normalized sum of normalized components.
///
/// Passing each measured table's own total as its weight reproduces plain
/// bin-wise aggregation.
pub fn mixture(parts: &[(Component<'_>, f64)]) -> Result<Distribution> {
    let first = parts.first().ok_or(Error::ZeroWeights)?;
    let len = first.0.distribution()?.len();
    let mut acc = vec![0.0; len];
    let mut total_weight = 0.0;
    for (component, w) in parts {
        if !w.is_finite() || *w < 0.0 {
            return Err(Error::InvalidParameter(format!("mixture weight {w}")));
        }
        let d = component.distribution()?;
        if d.len() != len {
            return Err(Error::DimensionMismatch(len, d.len()));
        }
        acc.iter_mut()
            .zip(d.probabilities())
            .for_each(|(a, p)| *a += w * p);
        total_weight += w;
    }
    if total_weight <= 0.0 {
        return Err(Error::ZeroWeights);
    }
    Distribution::new(acc.into_iter().map(|a| a / total_weight).collect())
}

fn check_population(a: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::InvalidParameter(format!("population {a} outside [0, 1]")));
    }
    Ok(())
}

fn precursor(a: f64) -> crate::sim::GateMatrix {
    // u3(θ) with cos²(θ/2) = a
    gates::u3(2.0 * a.sqrt().clamp(0.0, 1.0).acos(), 0.0, 0.0)
}

/// `<σx⊗4>` for two individuals descending from one precursor, and for two
/// independently prepared individuals with the same `<σz>`.
///
/// `a` is the `|0>` population of the precursor. Returns `(α, α²)` with
/// `α = 2 sqrt(a(1-a))`.
pub fn causal_correlation_discriminator(a: f64) -> Result<(f64, f64)> {
    check_population(a)?;
    let xxxx = PauliString::uniform(4, Pauli::X);
    let cx = gates::cnot();

    let mut connected = StateVector::zero(4);
    connected.apply_gate_mut(&precursor(a), &[0])?;
    connected.apply_gate_mut(&cx, &[0, 1])?;
    connected.apply_gate_mut(&cx, &[0, 2])?;
    connected.apply_gate_mut(&cx, &[2, 3])?;

    let mut independent = StateVector::zero(4);
    for (g, p) in [(0, 1), (2, 3)] {
        independent.apply_gate_mut(&precursor(a), &[g])?;
        independent.apply_gate_mut(&cx, &[g, p])?;
    }

    Ok((
        connected.expectation_pauli(&xxxx)?,
        independent.expectation_pauli(&xxxx)?,
    ))
}

/// Same scenarios starting from the incoherent precursor
/// `a|0><0| + (1-a)|1><1|`.
pub fn incoherent_discriminator(a: f64) -> Result<(f64, f64)> {
    check_population(a)?;
    let xxxx = PauliString::uniform(4, Pauli::X);
    let cx = gates::cnot();
    let mut start = vec![0.0; 16];
    start[0] = a;
    start[0b1000] = 1.0 - a;
    let mut connected = crate::sim::DensityMatrix::diagonal(&Distribution::new(start)?);
    connected.evolve_mut(&cx, &[0, 1])?;
    connected.evolve_mut(&cx, &[0, 2])?;
    connected.evolve_mut(&cx, &[2, 3])?;

    let mut start = vec![0.0; 16];
    for (g1, w1) in [(0usize, a), (1, 1.0 - a)] {
        for (g2, w2) in [(0usize, a), (1, 1.0 - a)] {
            start[(g1 << 3) | (g2 << 1)] += w1 * w2;
        }
    }
    let mut independent = crate::sim::DensityMatrix::diagonal(&Distribution::new(start)?);
    independent.evolve_mut(&cx, &[0, 1])?;
    independent.evolve_mut(&cx, &[2, 3])?;

    Ok((
        connected.expectation_pauli(&xxxx)?,
        independent.expectation_pauli(&xxxx)?,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinComparison {
    pub label: String,
    /// Label of the same outcome in device readout order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub device_label: Option<String>,
    pub measured: u64,
    pub predicted: u64,
    pub deviation: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// `<σz>` of `(g1, p1, g2, p2)`.
    SigmaZ,
    /// `<σx⊗σx⊗σx⊗σx>`.
    JointX,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expectations {
    pub observable: Observable,
    pub measured: Vec<f64>,
    pub ideal: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub experiment: String,
    pub reference: String,
    pub mutation_rate: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub device_header: Option<String>,
    pub measured_total: u64,
    pub predicted_total: u64,
    pub rounding_residue: i64,
    pub fidelity: f64,
    pub expectations: Expectations,
    pub bins: Vec<BinComparison>,
}

/// Compares measured counts with the ideal mixture scaled to the measured total.
///
/// Device-ordered tables are mapped back through the experiment's layout;
/// without one the ordering cannot be trusted and the call fails.
pub fn compare(
    spec: &ExperimentSpec,
    measured: &CountsTable,
    weights: &MixtureWeights,
) -> Result<ComparisonReport> {
    let layout = spec.device_layout();
    let logical = match measured.order() {
        BasisOrder::Logical => measured.clone(),
        BasisOrder::Device => layout.ok_or(Error::BasisOrderMismatch)?.counts_to_logical(measured)?,
    };
    let ideal = ideal_distribution(spec, weights)?;
    if ideal.len() != logical.len() {
        return Err(Error::DimensionMismatch(ideal.len(), logical.len()));
    }
    let total = logical.total();
    let predicted = scale_prediction(&ideal, total)?;
    let fidelity = classical_fidelity(&logical.to_distribution(), &ideal)?;

    let expectations = match spec.basis() {
        MeasurementBasis::Z => Expectations {
            observable: Observable::SigmaZ,
            measured: sigma_z_tuple(&logical)?,
            ideal: (0..ideal.num_qubits())
                .map(|q| sigma_z_from_distribution(&ideal, q))
                .collect::<Result<_>>()?,
        },
        MeasurementBasis::X => Expectations {
            observable: Observable::JointX,
            measured: vec![joint_parity_expectation(&logical)?],
            ideal: vec![parity_from_distribution(&ideal)],
        },
    };

    let n = logical.num_qubits();
    let bins = (0..logical.len())
        .map(|j| {
            let m = logical.bins()[j];
            let p = predicted.counts[j];
            BinComparison {
                label: bin_label(j, n),
                device_label: layout.map(|l| bin_label(l.logical_to_device_index(j), n)),
                measured: m,
                predicted: p,
                deviation: m as i64 - p as i64,
            }
        })
        .collect();

    Ok(ComparisonReport {
        experiment: spec.id.to_string(),
        reference: spec.reference_table.clone(),
        mutation_rate: format!("{}/{}", spec.mutation_rate.numer(), spec.mutation_rate.denom()),
        device_header: layout.map(|l| l.device_header()),
        measured_total: total,
        predicted_total: predicted.counts.iter().sum(),
        rounding_residue: predicted.residue,
        fidelity,
        expectations,
        bins,
    })
}

impl ComparisonReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidParameter(e.to_string()))
    }

    /// One row per bin: `label,measured,predicted,deviation`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::InvalidParameter(e.to_string());
        w.write_record(["label", "measured", "predicted", "deviation"])
            .map_err(io)?;
        for b in &self.bins {
            w.write_record([
                b.label.clone(),
                b.measured.to_string(),
                b.predicted.to_string(),
                b.deviation.to_string(),
            ])
            .map_err(io)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::InvalidParameter(e.to_string()))
    }
}
