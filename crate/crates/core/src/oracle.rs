//! Closed-form optimum of the obstacle-free rest-to-rest slice, and a
//! free-final-time optimality probe for solved slices.
//!
//! For a straight slice of length `L` and fixed duration `t_f` the
//! minimum-effort control is linear in time, `u(t) = (6L/t_f²)(1 − 2t/t_f)`,
//! with effort `12L²/t_f³`. Minimizing
//! `C(t_f) = (1 − w)·12L²/t_f³ + w·t_f` then gives
//! `t_f* = (36(1 − w)L²/w)^{1/4}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nlp_solver::{solve, SolveStatus, SolverOptions};
use crate::planner::{slice_nlp, PlannerOptions, Scene};
use crate::scalar::Scalar;
use crate::transcription::{SliceNlp, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSolution<S> {
    pub length: S,
    pub weight: S,
    pub final_time: S,
    pub energy: S,
    pub cost: S,
}

impl<S: Scalar> AnalyticSolution<S> {
    /// Acceleration along the travel axis at time `t`.
    pub fn control(&self, t: S) -> S {
        if self.final_time == S::zero() {
            return S::zero();
        }
        let tf = self.final_time;
        S::lit(6.0) * self.length / (tf * tf) * (S::one() - S::lit(2.0) * t / tf)
    }

    /// Speed along the travel axis at time `t`.
    pub fn velocity(&self, t: S) -> S {
        if self.final_time == S::zero() {
            return S::zero();
        }
        let s = t / self.final_time;
        S::lit(6.0) * self.length / self.final_time * s * (S::one() - s)
    }

    /// Distance travelled at time `t`.
    pub fn position(&self, t: S) -> S {
        if self.final_time == S::zero() {
            return S::zero();
        }
        let s = t / self.final_time;
        self.length * s * s * (S::lit(3.0) - S::lit(2.0) * s)
    }
}

/// `(36(1 − w)L²/w)^{1/4}`; zero for a zero-length slice.
pub fn optimal_final_time<S: Scalar>(length: S, weight: S) -> S {
    (S::lit(36.0) * (S::one() - weight) * length * length / weight).sqrt().sqrt()
}

/// Optimal duration, effort and cost of the obstacle-free rest-to-rest slice.
pub fn analytic_rest_to_rest<S: Scalar>(length: S, weight: S) -> Result<AnalyticSolution<S>> {
    if !(weight > S::zero() && weight < S::one()) {
        return Err(Error::InvalidWeight(weight.to_f64_lossy()));
    }
    if !(length >= S::zero()) {
        return Err(Error::DegenerateInput(format!("slice length must be non-negative, got {length}")));
    }
    if length == S::zero() {
        return Ok(AnalyticSolution { length, weight, final_time: S::zero(), energy: S::zero(), cost: S::zero() });
    }
    let final_time = optimal_final_time(length, weight);
    let energy = S::lit(12.0) * length * length / final_time.powi(3);
    let cost = (S::one() - weight) * energy + weight * final_time;
    Ok(AnalyticSolution { length, weight, final_time, energy, cost })
}

/// Relative amount by which re-solving with `t_f` frozen at
/// `t_f·(1 ± epsilon)` beats the cost of `solved`. Near zero when the solved
/// final time is locally optimal.
pub fn transversality_residual<S: Scalar>(
    nlp: &SliceNlp<S>,
    solved: &Trajectory<S>,
    epsilon: S,
    opts: &SolverOptions,
) -> Result<S> {
    if !(epsilon > S::zero() && epsilon <= S::lit(0.1)) {
        return Err(Error::DegenerateInput(format!("epsilon must lie in (0, 0.1], got {epsilon}")));
    }
    if nlp.problem().chord_length() == S::zero() {
        return Ok(S::zero());
    }
    let base = solved.cost;
    let mut best = base;
    for factor in [S::one() - epsilon, S::one() + epsilon] {
        let tf = solved.final_time * factor;
        let frozen = nlp.with_fixed_final_time(tf);
        let mut guess = solved.pack();
        let last = guess.len() - 1;
        guess[last] = tf;
        let report = solve(&frozen, &guess, opts)?;
        if report.status != SolveStatus::Converged {
            return Err(Error::Numerical(format!(
                "re-solve with t_f frozen at {tf} ended {:?} (violation {})",
                report.status, report.constraint_violation
            )));
        }
        best = best.min(report.objective);
    }
    Ok((base - best).max(S::zero()) / base)
}

/// [`transversality_residual`] for slice `slice_index` of the plan for `scene`.
pub fn transversality_check(
    scene: &Scene<f64>,
    slice_index: usize,
    solved: &Trajectory<f64>,
    epsilon: f64,
) -> Result<f64> {
    let nlp = slice_nlp(scene, slice_index)?;
    let (sweep, _) = scene.sweep();
    let local = solved.to_local(sweep);
    transversality_residual(&nlp, &local, epsilon, &PlannerOptions::default().solver)
}
