//! `qalife` command-line front end.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qalife_core::analysis::{compare, ComparisonReport};
use qalife_core::gates::{self, GateRecipe};
use qalife_core::lindblad::{
    closed_form_sigma_z, integrate_master_equation, no_universal_solution_report,
    UniversalityReport,
};
use qalife_core::noise::{fit_noise, NoiseFit, NoiseGrid};
use qalife_core::protocol::{build_experiment, ExperimentId, ExperimentSpec, MixtureWeights};
use qalife_core::reference::{QuotedValues, ReferenceDataset};
use qalife_core::sim::{embed, sample_counts, DensityMatrix, GateMatrix};
use qalife_core::{Complex64, CountsTable};

pub const GATE_TOLERANCE: f64 = 1e-9;
/// Allowed gap between recomputed and quoted fidelities.
pub const FIDELITY_TOLERANCE: f64 = 1e-3;

#[derive(Parser, Debug)]
#[command(name = "qalife", version, about = "Quantum artificial life experiments on a simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check every gate decomposition against its ideal unitary.
    VerifyGates {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replace one factor of the interaction recipe by the identity.
        #[arg(long, hide = true)]
        corrupt: bool,
    },
    /// Sample an experiment and compare the counts with the ideal prediction.
    Run {
        experiment: ExperimentId,
        #[arg(long, default_value_t = 8192)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the published measured table with a fresh ideal prediction.
    Compare {
        experiment: ExperimentId,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Amplitude-damping trajectory and the rotation-angle consistency report.
    LindbladDemo {
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// `|0>` population of the precursor.
        #[arg(long, default_value_t = 0.3)]
        a: f64,
        #[arg(long, default_value_t = 3.0)]
        t_max: f64,
        #[arg(long, default_value_t = 30)]
        points: usize,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 1.0)]
        t1: f64,
        #[arg(long, default_value_t = 1.0)]
        t2: f64,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.3, 0.7])]
        a_list: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid-fit the depolarizing/readout noise model to a published table.
    FitNoise {
        experiment: ExperimentId,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct GateCheck {
    pub name: String,
    pub max_deviation: f64,
    pub two_qubit_gates: usize,
    pub single_qubit_gates: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GateVerification {
    pub tolerance: f64,
    pub checks: Vec<GateCheck>,
    pub all_pass: bool,
}

fn check(recipe: &GateRecipe, ideal: &GateMatrix) -> anyhow::Result<GateCheck> {
    let dev = gates::global_phase_deviation(&recipe.compose(), ideal)?;
    Ok(GateCheck {
        name: recipe.name().to_string(),
        max_deviation: dev,
        two_qubit_gates: recipe.two_qubit_gate_count(),
        single_qubit_gates: recipe.single_qubit_gate_count(),
        pass: dev < GATE_TOLERANCE,
    })
}

/// SWAP, controlled-√X, reversed CNOT and `U_I` against their ideals.
pub fn verify_gates(corrupt: bool) -> anyhow::Result<GateVerification> {
    let mut interaction = gates::interaction_gate()?;
    if corrupt {
        let idx = interaction
            .factors()
            .iter()
            .position(|f| f.gate.arity() == 1)
            .context("interaction recipe has no single-qubit factor")?;
        interaction.replace_factor(idx, GateMatrix::identity(1))?;
    }
    let checks = vec![
        check(&gates::swap_from_cnots(0, 1)?, &gates::swap())?,
        check(&gates::controlled_sqrt_not(0, 1)?, &gates::controlled_sqrt_x_ideal())?,
        check(&gates::reversed_cnot(0, 1)?, &embed(&gates::cnot(), &[1, 0], 2)?)?,
        check(&interaction, &gates::interaction_ideal())?,
    ];
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(GateVerification {
        tolerance: GATE_TOLERANCE,
        checks,
        all_pass,
    })
}

impl GateVerification {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&format!(
                "{} {:<14} max deviation {:.3e}  two-qubit gates {:>2}  single-qubit gates {:>2}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.max_deviation,
                c.two_qubit_gates,
                c.single_qubit_gates
            ));
        }
        s
    }
}

/// Largest-remainder split of `shots` proportional to `weights`; ties go to
/// the earlier entry.
pub fn apportion(shots: u64, weights: &[u64]) -> Vec<u64> {
    let total: u128 = weights.iter().map(|&w| w as u128).sum();
    if total == 0 {
        return vec![0; weights.len()];
    }
    let mut out: Vec<u64> = Vec::with_capacity(weights.len());
    let mut rems: Vec<(u128, usize)> = Vec::with_capacity(weights.len());
    for (i, &w) in weights.iter().enumerate() {
        let num = shots as u128 * w as u128;
        out.push((num / total) as u64);
        rems.push((num % total, i));
    }
    let left = shots - out.iter().sum::<u64>();
    rems.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, i) in rems.iter().take(left as usize) {
        out[i] += 1;
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    #[serde(flatten)]
    pub comparison: ComparisonReport,
    pub shots: u64,
    pub seed: u64,
    pub variant_shots: Vec<(String, u64)>,
    /// Fidelity of the published measured table to its own ideal mixture.
    pub published_fidelity: f64,
}

/// Samples every variant with its share of `shots` (seed `seed + index`) and
/// compares the aggregate with the ideal mixture.
pub fn run_experiment(id: ExperimentId, shots: u64, seed: u64) -> anyhow::Result<RunReport> {
    if shots == 0 {
        bail!("--shots must be positive");
    }
    let spec = build_experiment(id);
    let nominal: Vec<u64> = spec.variants.iter().map(|v| v.nominal_shots).collect();
    let alloc = apportion(shots, &nominal);
    let mut tables = Vec::new();
    for (i, (v, &n)) in spec.variants.iter().zip(&alloc).enumerate() {
        if n == 0 {
            continue;
        }
        let dist = v.circuit.logical_probabilities()?;
        tables.push(sample_counts(&dist, n, seed.wrapping_add(i as u64))?);
    }
    let sampled = CountsTable::aggregate(&tables)?;
    let weights = MixtureWeights::Totals(alloc.clone());
    let comparison = compare(&spec, &sampled, &weights)?;

    let reference = ReferenceDataset::embedded();
    let published = compare(&spec, reference.measured(id)?, &measured_weights(&reference, &spec)?)?;
    Ok(RunReport {
        comparison,
        shots,
        seed,
        variant_shots: spec
            .variants
            .iter()
            .map(|v| v.name.clone())
            .zip(alloc)
            .collect(),
        published_fidelity: published.fidelity,
    })
}

fn measured_weights(d: &ReferenceDataset, spec: &ExperimentSpec) -> anyhow::Result<MixtureWeights> {
    Ok(MixtureWeights::Totals(d.variant_totals(spec)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareReport {
    #[serde(flatten)]
    pub comparison: ComparisonReport,
    pub quoted: QuotedValues,
    /// `fidelity - quoted.fidelity`.
    pub fidelity_discrepancy: f64,
    pub within_tolerance: bool,
}

/// Published measured table against the ideal mixture weighted by the
/// measured per-variant totals.
pub fn compare_experiment(id: ExperimentId) -> anyhow::Result<CompareReport> {
    let reference = ReferenceDataset::embedded();
    let spec = build_experiment(id);
    let comparison = compare(&spec, reference.measured(id)?, &measured_weights(&reference, &spec)?)?;
    let quoted = reference.quoted(id)?.clone();
    let discrepancy = comparison.fidelity - quoted.fidelity;
    Ok(CompareReport {
        comparison,
        quoted,
        fidelity_discrepancy: discrepancy,
        within_tolerance: discrepancy.abs() <= FIDELITY_TOLERANCE,
    })
}

fn fmt_tuple(v: &[f64], digits: usize) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.digits$}")).collect();
    format!("({})", parts.join(", "))
}

impl CompareReport {
    pub fn to_text(&self) -> String {
        let c = &self.comparison;
        let observable = match c.expectations.observable {
            qalife_core::analysis::Observable::SigmaZ => "<σz> (g1, p1, g2, p2)",
            qalife_core::analysis::Observable::JointX => "<σx⊗σx⊗σx⊗σx>",
        };
        let mut s = format!("experiment {}  (table {}, {} shots)\n", c.experiment, c.reference, c.measured_total);
        s.push_str(&format!(
            "fidelity          {:.4}   quoted {:.4}   difference {:+.4}{}\n",
            c.fidelity,
            self.quoted.fidelity,
            self.fidelity_discrepancy,
            if self.within_tolerance { "" } else { "   DISCREPANCY" }
        ));
        s.push_str(&format!("{observable}\n"));
        s.push_str(&format!(
            "  measured        {}   quoted {}\n",
            fmt_tuple(&c.expectations.measured, 3),
            fmt_tuple(&self.quoted.measured, 2)
        ));
        s.push_str(&format!(
            "  ideal           {}   quoted {}\n",
            fmt_tuple(&c.expectations.ideal, 3),
            fmt_tuple(&self.quoted.ideal, 2)
        ));
        s.push_str("label  measured  predicted  deviation\n");
        for b in &c.bins {
            s.push_str(&format!(
                "{}  {:>8}  {:>9}  {:>9}\n",
                b.label, b.measured, b.predicted, b.deviation
            ));
        }
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub sigma_z_closed: f64,
    pub sigma_z_integrated: f64,
    pub coherence: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LindbladDemo {
    pub gamma: f64,
    pub a: f64,
    pub dt: f64,
    pub trajectory: Vec<TrajectoryPoint>,
    pub universality: UniversalityReport,
}

#[allow(clippy::too_many_arguments)]
pub fn lindblad_demo(
    gamma: f64,
    a: f64,
    t_max: f64,
    points: usize,
    dt: f64,
    t1: f64,
    t2: f64,
    a_list: &[f64],
) -> anyhow::Result<LindbladDemo> {
    if !(0.0..=1.0).contains(&a) {
        bail!("--a must lie in [0, 1]");
    }
    if points < 2 || t_max.is_nan() || t_max <= 0.0 {
        bail!("need at least two points and a positive --t-max");
    }
    let c = (a * (1.0 - a)).sqrt();
    let rho0 = DensityMatrix::from_row_slice(2, &[a, c, c, 1.0 - a].map(|x| Complex64::new(x, 0.0)))?;
    let mut trajectory = Vec::with_capacity(points);
    for k in 0..points {
        let t = t_max * k as f64 / (points - 1) as f64;
        let rho = integrate_master_equation(&rho0, gamma, t, dt)?;
        trajectory.push(TrajectoryPoint {
            t,
            sigma_z_closed: closed_form_sigma_z(a, gamma, t),
            sigma_z_integrated: (rho.get(0, 0) - rho.get(1, 1)).re,
            coherence: rho.get(0, 1).norm(),
        });
    }
    Ok(LindbladDemo {
        gamma,
        a,
        dt,
        trajectory,
        universality: no_universal_solution_report(gamma, t1, t2, a_list)?,
    })
}

impl LindbladDemo {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,sigma_z_closed,sigma_z_integrated,coherence\n");
        for p in &self.trajectory {
            s.push_str(&format!(
                "{},{},{},{}\n",
                p.t, p.sigma_z_closed, p.sigma_z_integrated, p.coherence
            ));
        }
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FitReport {
    pub experiment: String,
    #[serde(flatten)]
    pub fit: NoiseFit,
    pub grid: NoiseGrid,
}

pub fn fit_experiment(id: ExperimentId) -> anyhow::Result<FitReport> {
    let reference = ReferenceDataset::embedded();
    let spec = build_experiment(id);
    let grid = NoiseGrid::default();
    let fit = fit_noise(&spec, reference.measured(id)?, &grid, &measured_weights(&reference, &spec)?)?;
    Ok(FitReport {
        experiment: id.to_string(),
        fit,
        grid,
    })
}

fn json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn emit(text: &str, out: &Option<PathBuf>, stdout: &mut dyn Write) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Executes `cli`, writing to `stdout` unless `--out` is given. Returns the
/// process exit code.
pub fn execute(cli: Cli, stdout: &mut dyn Write) -> anyhow::Result<i32> {
    match cli.command {
        Command::VerifyGates {
            format,
            out,
            corrupt,
        } => {
            let v = verify_gates(corrupt)?;
            let text = match format {
                Format::Json => json(&v)?,
                _ => v.to_text(),
            };
            emit(&text, &out, stdout)?;
            Ok(if v.all_pass { 0 } else { 1 })
        }
        Command::Run {
            experiment,
            shots,
            seed,
            format,
            out,
        } => {
            let r = run_experiment(experiment, shots, seed)?;
            let text = match format {
                Format::Csv => r.comparison.to_csv()?,
                _ => json(&r)?,
            };
            emit(&text, &out, stdout)?;
            Ok(0)
        }
        Command::Compare {
            experiment,
            format,
            out,
        } => {
            let r = compare_experiment(experiment)?;
            let text = match format {
                Format::Text => r.to_text(),
                Format::Json => json(&r)?,
                Format::Csv => r.comparison.to_csv()?,
            };
            emit(&text, &out, stdout)?;
            Ok(0)
        }
        Command::LindbladDemo {
            gamma,
            a,
            t_max,
            points,
            dt,
            t1,
            t2,
            a_list,
            format,
            out,
        } => {
            let d = lindblad_demo(gamma, a, t_max, points, dt, t1, t2, &a_list)?;
            let text = match format {
                Format::Csv => d.to_csv(),
                _ => json(&d)?,
            };
            emit(&text, &out, stdout)?;
            Ok(0)
        }
        Command::FitNoise { experiment, out } => {
            let r = fit_experiment(experiment)?;
            emit(&json(&r)?, &out, stdout)?;
            Ok(0)
        }
    }
}
