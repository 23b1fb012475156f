//! Environment interaction for a single phenotype qubit.
//!
//! The bath acts through the jump operator `σ = |0><1|`, so `|0>` is the dark
//! state. For a diagonal initial state with `|0><0|` population `a` the
//! closed form is `<σz>(t) = 1 − 2 e^{−γt} (1 − a)`, and coherences decay as
//! `e^{−γt/2}`.
//!
//! The hardware runs replace this channel by `u3(θ, 0, 0)` rotations; the
//! [`consistency_residual`] / [`no_universal_solution_report`] pair checks
//! whether one set of rotation angles can mimic the channel independently
//! of the genotype population `a`.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sim::DensityMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DissipationParams {
    pub gamma: f64,
    pub a: f64,
    pub epsilon: f64,
    pub t1: f64,
    pub t2: f64,
}

impl DissipationParams {
    pub fn new(gamma: f64, a: f64, epsilon: f64, t1: f64, t2: f64) -> Result<Self> {
        if gamma.is_nan() || gamma <= 0.0 {
            return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
        }
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::InvalidParameter(format!("a must lie in [0, 1], got {a}")));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        if !(t1 >= 0.0 && t2 >= 0.0) {
            return Err(Error::InvalidParameter("durations must be nonnegative".into()));
        }
        Ok(Self {
            gamma,
            a,
            epsilon,
            t1,
            t2,
        })
    }
}

pub fn closed_form_sigma_z(a: f64, gamma: f64, t: f64) -> f64 {
    1.0 - 2.0 * (-gamma * t).exp() * (1.0 - a)
}

/// `<σx>` of a precursor genotype `√a|0> + √(1−a)|1>`.
pub fn precursor_sigma_x(a: f64) -> f64 {
    2.0 * (a * (1.0 - a)).max(0.0).sqrt()
}

type M2 = Matrix2<Complex64>;

fn dissipator(gamma: f64, rho: &M2) -> M2 {
    // σ = |0><1|, σ†σ = |1><1|
    let zero = Complex64::new(0.0, 0.0);
    let sigma = M2::new(zero, Complex64::new(1.0, 0.0), zero, zero);
    let sd = sigma.adjoint();
    let n = sd * sigma;
    (sigma * rho * sd - (n * rho + rho * n) * Complex64::new(0.5, 0.0)) * Complex64::new(gamma, 0.0)
}

/// Fixed-step RK4 on `dρ/dt = γ(σρσ† − ½{σ†σ, ρ})`.
///
/// The step count is `ceil(t / dt)` and the step is shrunk so the last one
/// lands on `t` exactly.
pub fn integrate_master_equation(
    rho0: &DensityMatrix,
    gamma: f64,
    t: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    if dt.is_nan() || dt <= 0.0 {
        return Err(Error::NonPositiveStep(dt));
    }
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidParameter(format!("t must be nonnegative, got {t}")));
    }
    if rho0.num_qubits() != 1 {
        return Err(Error::DimensionMismatch(rho0.num_qubits(), 1));
    }
    let steps = (t / dt - 1e-9).ceil().max(0.0) as usize;
    let mut rho = M2::from_fn(|r, c| rho0.get(r, c));
    if steps > 0 {
        let h = Complex64::new(t / steps as f64, 0.0);
        let half = Complex64::new(0.5, 0.0);
        let sixth = Complex64::new(1.0 / 6.0, 0.0);
        let two = Complex64::new(2.0, 0.0);
        for _ in 0..steps {
            let k1 = dissipator(gamma, &rho);
            let k2 = dissipator(gamma, &(rho + k1 * h * half));
            let k3 = dissipator(gamma, &(rho + k2 * h * half));
            let k4 = dissipator(gamma, &(rho + k3 * h));
            rho += (k1 + k2 * two + k3 * two + k4) * h * sixth;
        }
    }
    let entries = nalgebra::DMatrix::from_fn(2, 2, |r, c| rho[(r, c)]);
    Ok(DensityMatrix::from_entries_unchecked(entries))
}

/// Time for `1 − <σz>` to fall to `2ε`: `ln((1 − a)/ε)/γ`, or zero when the
/// state already starts within tolerance.
pub fn effective_lifetime(a: f64, gamma: f64, epsilon: f64) -> f64 {
    let excited = 1.0 - a;
    if excited <= epsilon {
        0.0
    } else {
        (excited / epsilon).ln() / gamma
    }
}

/// Left-minus-right residuals of the three matching conditions
///
/// ```text
/// e^{−γ(t1+t2)/2} <σx>       = cos θ1 cos θ2 <σx>
/// 1 − 2 e^{−γ(t1+t2)} (1−a)  = (2a − 1) cos θ1
/// 1 − 2 e^{−γ t2} (1−a)      = (2a − 1) cos θ2
/// ```
///
/// with `<σx> = 2√(a(1−a))` for the precursor genotype.
pub fn consistency_residual(theta1: f64, theta2: f64, params: &DissipationParams) -> [f64; 3] {
    let DissipationParams { gamma, a, t1, t2, .. } = *params;
    let sx = precursor_sigma_x(a);
    let total = t1 + t2;
    [
        (-gamma * total / 2.0).exp() * sx - theta1.cos() * theta2.cos() * sx,
        closed_form_sigma_z(a, gamma, total) - (2.0 * a - 1.0) * theta1.cos(),
        closed_form_sigma_z(a, gamma, t2) - (2.0 * a - 1.0) * theta2.cos(),
    ]
}

/// Result of solving `(2a − 1) cos θ = target` on `[0, π]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum AngleSolution {
    Solved { theta: f64 },
    /// `cos θ` would have to equal `required_cos`, outside `[−1, 1]` (or the
    /// coefficient `2a − 1` vanishes).
    NoSolution { required_cos: f64 },
}

impl AngleSolution {
    pub fn theta(&self) -> Option<f64> {
        match self {
            AngleSolution::Solved { theta } => Some(*theta),
            AngleSolution::NoSolution { .. } => None,
        }
    }
}

/// Bisection on `[0, π]`, where `cos` is monotone.
fn solve_angle(coefficient: f64, target: f64) -> AngleSolution {
    let f = |theta: f64| coefficient * theta.cos() - target;
    let (mut lo, mut hi) = (0.0_f64, std::f64::consts::PI);
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return AngleSolution::Solved { theta: lo };
    }
    if fhi == 0.0 {
        return AngleSolution::Solved { theta: hi };
    }
    if coefficient.abs() < 1e-15 || flo.signum() == fhi.signum() {
        let required_cos = if coefficient.abs() < 1e-15 {
            f64::INFINITY.copysign(target)
        } else {
            target / coefficient
        };
        return AngleSolution::NoSolution { required_cos };
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || hi - lo < 1e-15 {
            return AngleSolution::Solved { theta: mid };
        }
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    AngleSolution::Solved {
        theta: 0.5 * (lo + hi),
    }
}

/// Rotation angles matching the population lines of the consistency system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AngleSolutions {
    pub theta1: AngleSolution,
    pub theta2: AngleSolution,
}

pub fn solve_rotation_angles(params: &DissipationParams) -> AngleSolutions {
    let DissipationParams { gamma, a, t1, t2, .. } = *params;
    let coefficient = 2.0 * a - 1.0;
    AngleSolutions {
        theta1: solve_angle(coefficient, closed_form_sigma_z(a, gamma, t1 + t2)),
        theta2: solve_angle(coefficient, closed_form_sigma_z(a, gamma, t2)),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniversalityEntry {
    pub a: f64,
    pub theta1: AngleSolution,
    pub theta2: AngleSolution,
    /// Coherence-line residual at the solved angles, when both exist.
    pub coherence_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniversalityReport {
    pub gamma: f64,
    pub t1: f64,
    pub t2: f64,
    pub resolution: f64,
    pub entries: Vec<UniversalityEntry>,
    /// Largest angle difference between any two fully solved entries.
    pub max_spread: Option<f64>,
    /// True when some entry has no solution, or solved entries disagree by
    /// more than `resolution`.
    pub genotype_dependent: bool,
}

/// Angle resolution used to call two solutions different.
pub const ANGLE_RESOLUTION: f64 = 1e-3;

/// Solves the population lines for each `a` and reports how the angles move.
pub fn no_universal_solution_report(
    gamma: f64,
    t1: f64,
    t2: f64,
    a_list: &[f64],
) -> Result<UniversalityReport> {
    if a_list.len() < 2 {
        return Err(Error::InvalidParameter("need at least two genotype populations".into()));
    }
    let mut entries = Vec::with_capacity(a_list.len());
    for &a in a_list {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::InvalidParameter(format!("a = {a} is not interior to (0, 1)")));
        }
        let params = DissipationParams::new(gamma, a, 0.5, t1, t2)?;
        let sol = solve_rotation_angles(&params);
        let coherence_residual = match (sol.theta1.theta(), sol.theta2.theta()) {
            (Some(th1), Some(th2)) => Some(consistency_residual(th1, th2, &params)[0]),
            _ => None,
        };
        entries.push(UniversalityEntry {
            a,
            theta1: sol.theta1,
            theta2: sol.theta2,
            coherence_residual,
        });
    }

    let solved: Vec<(f64, f64)> = entries
        .iter()
        .filter_map(|e| Some((e.theta1.theta()?, e.theta2.theta()?)))
        .collect();
    let max_spread = if solved.len() >= 2 {
        let mut spread = 0.0_f64;
        for (i, x) in solved.iter().enumerate() {
            for y in &solved[i + 1..] {
                spread = spread.max((x.0 - y.0).abs()).max((x.1 - y.1).abs());
            }
        }
        Some(spread)
    } else {
        None
    };
    let any_unsolved = solved.len() < entries.len();
    let genotype_dependent = any_unsolved || max_spread.is_some_and(|s| s > ANGLE_RESOLUTION);
    Ok(UniversalityReport {
        gamma,
        t1,
        t2,
        resolution: ANGLE_RESOLUTION,
        entries,
        max_spread,
        genotype_dependent,
    })
}

/// `<σz>` and `|ρ01|` of a single-qubit density matrix.
pub fn bloch_summary(rho: &DensityMatrix) -> (f64, f64) {
    ((rho.get(0, 0) - rho.get(1, 1)).re, rho.get(0, 1).norm())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{LN_2, PI};

    use super::*;
    use crate::sim::{Distribution, StateVector};

    fn diag(a: f64) -> DensityMatrix {
        DensityMatrix::diagonal(&Distribution::new(vec![a, 1.0 - a]).unwrap())
    }

    #[test]
    fn closed_form_cases() {
        for t in [0.0, 0.5, 3.0] {
            assert_eq!(closed_form_sigma_z(1.0, 2.0, t), 1.0);
        }
        assert!((closed_form_sigma_z(0.3, 1.0, 0.0) - (2.0 * 0.3 - 1.0)).abs() < 1e-15);
        assert!((closed_form_sigma_z(0.25, 1.0, LN_2) - 0.25).abs() < 1e-15);
        assert!((closed_form_sigma_z(0.1, 1.0, 60.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn params_validation() {
        assert!(DissipationParams::new(0.0, 0.5, 0.1, 1.0, 1.0).is_err());
        assert!(DissipationParams::new(1.0, 1.5, 0.1, 1.0, 1.0).is_err());
        assert!(DissipationParams::new(1.0, 0.5, 1.0, 1.0, 1.0).is_err());
        assert!(DissipationParams::new(1.0, 0.5, 0.1, -1.0, 1.0).is_err());
        assert!(DissipationParams::new(1.0, 0.5, 0.1, 0.0, 1.0).is_ok());
    }

    #[test]
    fn dark_state_is_stationary() {
        let out = integrate_master_equation(&diag(1.0), 1.3, 4.0, 0.01).unwrap();
        assert!((out.get(0, 0).re - 1.0).abs() < 1e-15);
        assert!(out.get(1, 1).norm() < 1e-15);
    }

    #[test]
    fn integrator_matches_closed_form() {
        let out = integrate_master_equation(&diag(0.25), 1.0, LN_2, 1e-3).unwrap();
        let (z, _) = bloch_summary(&out);
        assert!((z - 0.25).abs() < 1e-6, "{z}");
        assert!((out.trace().re - 1.0).abs() < 1e-8);
    }

    #[test]
    fn coherence_decays_at_half_rate() {
        let psi = StateVector::zero(1)
            .apply_gate(&crate::gates::u3(1.2, 0.0, 0.0), &[0])
            .unwrap();
        let rho0 = psi.to_density();
        let (gamma, t) = (0.7, 2.0);
        let out = integrate_master_equation(&rho0, gamma, t, 1e-3).unwrap();
        let expected = rho0.get(0, 1).norm() * (-gamma * t / 2.0).exp();
        assert!((out.get(0, 1).norm() - expected).abs() < 1e-6);
    }

    #[test]
    fn integrator_errors() {
        assert_eq!(
            integrate_master_equation(&diag(0.5), 1.0, 1.0, 0.0),
            Err(Error::NonPositiveStep(0.0))
        );
        assert!(integrate_master_equation(&DensityMatrix::maximally_mixed(2), 1.0, 1.0, 0.1).is_err());
        let same = integrate_master_equation(&diag(0.4), 1.0, 0.0, 0.1).unwrap();
        assert_eq!(same, diag(0.4));
    }

    #[test]
    fn lifetime_cases() {
        assert_eq!(effective_lifetime(1.0, 1.0, 0.1), 0.0);
        let t = effective_lifetime(0.5, 1.0, 0.5 * (-1.0_f64).exp());
        assert!((t - 1.0).abs() < 1e-12);
        let slow = effective_lifetime(0.2, 1.0, 0.01);
        let fast = effective_lifetime(0.2, 2.0, 0.01);
        assert!((slow - 2.0 * fast).abs() < 1e-12);
        assert!(effective_lifetime(0.1, 1.0, 0.01) >= effective_lifetime(0.6, 1.0, 0.01));
        // the lifetime hits the threshold exactly
        let (a, g, e) = (0.3, 1.5, 0.02);
        let t = effective_lifetime(a, g, e);
        assert!((1.0 - closed_form_sigma_z(a, g, t) - 2.0 * e).abs() < 1e-12);
    }

    #[test]
    fn residual_degenerate_genotype() {
        // a = 1: <σx> = 0 and the population lines are solved by θ = 0
        let p = DissipationParams::new(1.0, 1.0, 0.1, 0.4, 0.6).unwrap();
        let r = consistency_residual(0.0, 0.0, &p);
        assert!(r.iter().all(|x| x.abs() < 1e-15), "{r:?}");
    }

    #[test]
    fn residual_at_long_times_shows_tension() {
        let a = 0.25;
        let p = DissipationParams::new(1.0, a, 0.1, 50.0, 50.0).unwrap();
        let r = consistency_residual(0.0, 0.0, &p);
        let sx = precursor_sigma_x(a);
        assert!((r[0] + sx).abs() < 1e-12);
        assert!(r[0].abs() > 0.1);
    }

    #[test]
    fn solved_angles_leave_coherence_residual() {
        // θ1 exists only while γ(t1+t2) ≤ ln((1−a)/a); for a = 0.3 that is 0.847.
        let p = DissipationParams::new(1.0, 0.3, 0.1, 0.2, 0.2).unwrap();
        let sol = solve_rotation_angles(&p);
        let (th1, th2) = (sol.theta1.theta().unwrap(), sol.theta2.theta().unwrap());
        let r = consistency_residual(th1, th2, &p);
        assert!(r[1].abs() < 1e-12 && r[2].abs() < 1e-12);
        assert!(r[0].abs() > 1e-3, "{r:?}");
        // independent check via arccos
        let cos1 = closed_form_sigma_z(0.3, 1.0, 0.4) / (2.0 * 0.3 - 1.0);
        assert!((th1 - cos1.acos()).abs() < 1e-12);
    }

    #[test]
    fn angle_solver_reports_missing_roots() {
        // a > 1/2: the rotation can only shrink |<σz>| while decay raises it
        let p = DissipationParams::new(1.0, 0.7, 0.1, 0.5, 0.5).unwrap();
        let sol = solve_rotation_angles(&p);
        assert!(matches!(sol.theta1, AngleSolution::NoSolution { required_cos } if required_cos > 1.0));
        assert!(matches!(sol.theta2, AngleSolution::NoSolution { .. }));
    }

    #[test]
    fn universality_report() {
        let r = no_universal_solution_report(1.0, 0.2, 0.2, &[0.3, 0.4]).unwrap();
        assert!(r.genotype_dependent);
        assert!(r.max_spread.unwrap() > 1e-2);

        let same = no_universal_solution_report(1.0, 0.2, 0.2, &[0.3, 0.3]).unwrap();
        assert_eq!(same.entries[0], same.entries[1]);
        assert_eq!(same.max_spread, Some(0.0));
        assert!(!same.genotype_dependent);

        let half = no_universal_solution_report(1.0, 1.0, 1.0, &[0.5, 0.5]).unwrap();
        assert_eq!(half.entries[0], half.entries[1]);

        assert!(no_universal_solution_report(1.0, 1.0, 1.0, &[0.3]).is_err());
        assert!(no_universal_solution_report(1.0, 1.0, 1.0, &[0.0, 0.3]).is_err());
    }

    #[test]
    fn theta2_vanishes_for_dark_genotype() {
        let p = DissipationParams::new(1.0, 1.0, 0.1, 0.5, 0.5).unwrap();
        let sol = solve_rotation_angles(&p);
        assert_eq!(sol.theta1, AngleSolution::Solved { theta: 0.0 });
        assert_eq!(sol.theta2, AngleSolution::Solved { theta: 0.0 });
        let sol = solve_angle(1.0, 1.0);
        assert_eq!(sol, AngleSolution::Solved { theta: 0.0 });
        let sol = solve_angle(-1.0, 1.0);
        assert_eq!(sol, AngleSolution::Solved { theta: PI });
    }
}
