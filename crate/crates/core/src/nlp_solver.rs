//! Augmented-Lagrangian solver for smooth nonlinear programs
//!
//! ```text
//! minimize f(z)  subject to  c(z) = 0,  g(z) ≥ 0,  lo ≤ z ≤ hi
//! ```
//!
//! Equalities enter through the classical multiplier/penalty terms and
//! inequalities through a squared hinge on `min(g − μ/ρ, 0)`. Box bounds are
//! never penalized; the inner loop keeps iterates feasible by projection.
//!
//! The inner minimization is a projected quasi-Newton method. Its model
//! Hessian is a damped-BFGS estimate of the Lagrangian Hessian plus the exact
//! Gauss–Newton curvature of the penalty terms (`ρ JᵀJ`), which keeps the
//! subproblems well scaled as the penalty grows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, cholesky, cholesky_solve, dot, norm_inf, DenseMatrix};
use crate::scalar::Scalar;

/// Armijo sufficient-decrease parameter.
pub const ARMIJO: f64 = 1e-4;

/// A smooth NLP with dense derivatives.
pub trait Nlp<S: Scalar> {
    fn dim(&self) -> usize;
    fn num_eq(&self) -> usize;
    fn num_ineq(&self) -> usize;

    fn lower_bounds(&self) -> Vec<S> {
        vec![S::neg_infinity(); self.dim()]
    }

    fn upper_bounds(&self) -> Vec<S> {
        vec![S::infinity(); self.dim()]
    }

    fn objective(&self, z: &[S]) -> S;
    fn objective_gradient(&self, z: &[S]) -> Vec<S>;

    /// `c(z)`, to be driven to zero.
    fn eq_constraints(&self, z: &[S]) -> Vec<S>;
    fn eq_jacobian(&self, z: &[S]) -> DenseMatrix<S>;

    /// `g(z)`, required to be non-negative.
    fn ineq_constraints(&self, z: &[S]) -> Vec<S>;
    fn ineq_jacobian(&self, z: &[S]) -> DenseMatrix<S>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub stationarity_tol: f64,
    pub feasibility_tol: f64,
    pub max_outer_iterations: usize,
    pub max_inner_iterations: usize,
    pub initial_penalty: f64,
    pub penalty_growth: f64,
    pub max_penalty: f64,
    /// Keep the merit value of every accepted inner step in the report.
    pub record_trace: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            stationarity_tol: 1e-6,
            feasibility_tol: 1e-8,
            max_outer_iterations: 50,
            max_inner_iterations: 500,
            initial_penalty: 10.0,
            penalty_growth: 10.0,
            max_penalty: 1e8,
            record_trace: false,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = self.stationarity_tol > 0.0
            && self.feasibility_tol > 0.0
            && self.initial_penalty > 0.0
            && self.penalty_growth > 1.0
            && self.max_penalty >= self.initial_penalty;
        if ok {
            Ok(())
        } else {
            Err(Error::Numerical(format!("invalid solver options: {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Infeasible,
}

/// Merit value after an accepted inner step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry<S> {
    pub outer: usize,
    pub merit: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport<S> {
    pub solution: Vec<S>,
    pub objective: S,
    pub kkt_residual: S,
    pub constraint_violation: S,
    /// Equality multipliers followed by inequality multipliers.
    pub multipliers: Vec<S>,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub status: SolveStatus,
    pub trace: Vec<TraceEntry<S>>,
}

/// Largest equality residual or inequality shortfall at `z`.
pub fn constraint_violation<S: Scalar, P: Nlp<S> + ?Sized>(nlp: &P, z: &[S]) -> S {
    let eq = norm_inf(&nlp.eq_constraints(z));
    let ineq = nlp.ineq_constraints(z).iter().fold(S::zero(), |m, &g| m.max(-g));
    let lo = nlp.lower_bounds();
    let hi = nlp.upper_bounds();
    let bound = z
        .iter()
        .zip(lo.iter().zip(&hi))
        .fold(S::zero(), |m, (&v, (&l, &h))| m.max(l - v).max(v - h));
    eq.max(ineq).max(bound)
}

/// First-order optimality residual at `point` for the given multipliers
/// (equalities first, then inequalities): the infinity norm of the
/// bound-projected Lagrangian gradient, combined with the complementarity
/// residual `|min(μ_i, g_i)|`.
pub fn kkt_residual<S: Scalar, P: Nlp<S> + ?Sized>(nlp: &P, point: &[S], multipliers: &[S]) -> Result<S> {
    check_dim(nlp.dim(), point.len())?;
    let (m_eq, m_in) = (nlp.num_eq(), nlp.num_ineq());
    check_dim(m_eq + m_in, multipliers.len())?;
    let (lambda, mu) = multipliers.split_at(m_eq);

    let mut grad = nlp.objective_gradient(point);
    if m_eq > 0 {
        let jt = nlp.eq_jacobian(point).tr_mul_vec(lambda);
        axpy(-S::one(), &jt, &mut grad);
    }
    let mut comp = S::zero();
    if m_in > 0 {
        let jt = nlp.ineq_jacobian(point).tr_mul_vec(mu);
        axpy(-S::one(), &jt, &mut grad);
        let g = nlp.ineq_constraints(point);
        comp = g.iter().zip(mu).fold(S::zero(), |m, (&gi, &mi)| m.max(gi.min(mi).abs()));
    }
    let lo = nlp.lower_bounds();
    let hi = nlp.upper_bounds();
    let stat = projected_gradient_norm(point, &grad, &lo, &hi);
    Ok(stat.max(comp))
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

#[inline]
fn clamp<S: Scalar>(v: S, lo: S, hi: S) -> S {
    v.max(lo).min(hi)
}

fn projected_gradient_norm<S: Scalar>(z: &[S], grad: &[S], lo: &[S], hi: &[S]) -> S {
    (0..z.len()).fold(S::zero(), |m, i| m.max((clamp(z[i] - grad[i], lo[i], hi[i]) - z[i]).abs()))
}

/// Everything the inner loop needs at one point.
struct Eval<S> {
    merit: S,
    grad: Vec<S>,
    obj_grad: Vec<S>,
    eq: Vec<S>,
    eq_jac: DenseMatrix<S>,
    ineq: Vec<S>,
    ineq_jac: DenseMatrix<S>,
    /// `λ − ρ c`
    lambda_est: Vec<S>,
    /// `max(0, μ − ρ g)`
    mu_est: Vec<S>,
}

struct Multipliers<S> {
    lambda: Vec<S>,
    mu: Vec<S>,
    rho: S,
}

fn evaluate<S: Scalar, P: Nlp<S> + ?Sized>(nlp: &P, z: &[S], m: &Multipliers<S>) -> Eval<S> {
    let f = nlp.objective(z);
    let obj_grad = nlp.objective_gradient(z);
    let eq = nlp.eq_constraints(z);
    let eq_jac = nlp.eq_jacobian(z);
    let ineq = nlp.ineq_constraints(z);
    let ineq_jac = nlp.ineq_jacobian(z);
    let rho = m.rho;
    let half = S::lit(0.5);

    let lambda_est: Vec<S> = m.lambda.iter().zip(&eq).map(|(&l, &c)| l - rho * c).collect();
    let mu_est: Vec<S> = m.mu.iter().zip(&ineq).map(|(&u, &g)| (u - rho * g).max(S::zero())).collect();

    let mut merit = f;
    for (&l, &c) in m.lambda.iter().zip(&eq) {
        merit = merit - l * c + half * rho * c * c;
    }
    for (&u, &ue) in m.mu.iter().zip(&mu_est) {
        merit = merit + half * (ue * ue - u * u) / rho;
    }

    let mut grad = obj_grad.clone();
    if !eq.is_empty() {
        axpy(-S::one(), &eq_jac.tr_mul_vec(&lambda_est), &mut grad);
    }
    if !ineq.is_empty() {
        axpy(-S::one(), &ineq_jac.tr_mul_vec(&mu_est), &mut grad);
    }
    Eval { merit, grad, obj_grad, eq, eq_jac, ineq, ineq_jac, lambda_est, mu_est }
}

fn violation_of<S: Scalar>(e: &Eval<S>) -> S {
    let eq = norm_inf(&e.eq);
    let ineq = e.ineq.iter().fold(S::zero(), |m, &g| m.max(-g));
    eq.max(ineq)
}

/// Damped BFGS approximation of the Lagrangian Hessian.
struct QuasiNewton<S> {
    hessian: DenseMatrix<S>,
    scaled: bool,
}

impl<S: Scalar> QuasiNewton<S> {
    fn new(n: usize) -> Self {
        Self { hessian: DenseMatrix::identity(n), scaled: false }
    }

    fn update(&mut self, s: &[S], y: &[S]) {
        let n = s.len();
        let ss = dot(s, s);
        if !(ss > S::zero()) {
            return;
        }
        let sy = dot(s, y);
        if !self.scaled {
            // Shanno–Phua initial scaling.
            let yy = dot(y, y);
            if sy > S::zero() && yy > S::zero() {
                let gamma = yy / sy;
                self.hessian = DenseMatrix::identity(n);
                for i in 0..n {
                    self.hessian[(i, i)] = gamma;
                }
            }
            self.scaled = true;
        }
        let bs = self.hessian.mul_vec(s);
        let sbs = dot(s, &bs);
        if !(sbs > S::zero()) {
            return;
        }
        // Powell damping keeps the update positive definite.
        let r: Vec<S> = if sy >= S::lit(0.2) * sbs {
            y.to_vec()
        } else {
            let theta = S::lit(0.8) * sbs / (sbs - sy);
            y.iter().zip(&bs).map(|(&yi, &bi)| theta * yi + (S::one() - theta) * bi).collect()
        };
        let sr = dot(s, &r);
        if !(sr > S::zero()) || !sr.is_finite() {
            return;
        }
        for i in 0..n {
            let row = self.hessian.row_mut(i);
            for j in 0..n {
                row[j] = row[j] - bs[i] * bs[j] / sbs + r[i] * r[j] / sr;
            }
        }
    }
}

struct Problem<'a, S, P: ?Sized> {
    nlp: &'a P,
    lo: Vec<S>,
    hi: Vec<S>,
}

impl<S: Scalar, P: Nlp<S> + ?Sized> Problem<'_, S, P> {
    fn project(&self, z: &mut [S]) {
        for i in 0..z.len() {
            z[i] = clamp(z[i], self.lo[i], self.hi[i]);
        }
    }
}

enum InnerExit {
    Stationary,
    Stalled,
    Exhausted,
}

/// Approximately minimizes the augmented Lagrangian over the box.
#[allow(clippy::too_many_arguments)]
const MAX_HALVINGS: usize = 40;
const NOISE_FLOOR: f64 = 1e-13;
const STALL_STEPS: usize = 5;
const MAX_IDLE_OUTER: usize = 8;

#[allow(clippy::too_many_arguments)]
fn minimize_inner<S: Scalar, P: Nlp<S> + ?Sized>(
    prob: &Problem<'_, S, P>,
    z: &mut Vec<S>,
    mult: &Multipliers<S>,
    qn: &mut QuasiNewton<S>,
    tolerance: S,
    max_iterations: usize,
    outer: usize,
    trace: Option<&mut Vec<TraceEntry<S>>>,
    iterations: &mut usize,
) -> (Eval<S>, InnerExit) {
    let n = z.len();
    let mut trace = trace;
    let mut cur = evaluate(prob.nlp, z, mult);
    let armijo = S::lit(ARMIJO);
    // Steps whose merit change sits at roundoff level; a run of them means
    // the iterate is at the noise floor and further work is wasted.
    let mut negligible = 0usize;
    for _ in 0..max_iterations {
        let pg = projected_gradient_norm(z, &cur.grad, &prob.lo, &prob.hi);
        if pg <= tolerance {
            return (cur, InnerExit::Stationary);
        }
        *iterations += 1;

        // Variables held at a bound this step.
        let free: Vec<usize> = (0..n)
            .filter(|&i| {
                let fixed = prob.lo[i] == prob.hi[i];
                let at_lo = z[i] <= prob.lo[i] && cur.grad[i] > S::zero();
                let at_hi = z[i] >= prob.hi[i] && cur.grad[i] < S::zero();
                !(fixed || at_lo || at_hi)
            })
            .collect();

        let mut dir = vec![S::zero(); n];
        if !free.is_empty() {
            let mut h = qn.hessian.clone();
            if !cur.eq.is_empty() {
                let ones = vec![S::one(); cur.eq.len()];
                h.add_weighted_gram(&cur.eq_jac, &ones, mult.rho);
            }
            if !cur.ineq.is_empty() {
                let active: Vec<S> =
                    cur.mu_est.iter().map(|&m| if m > S::zero() { S::one() } else { S::zero() }).collect();
                h.add_weighted_gram(&cur.ineq_jac, &active, mult.rho);
            }
            let m = free.len();
            let mut reduced = DenseMatrix::from_fn(m, m, |a, b| h[(free[a], free[b])]);
            let rhs: Vec<S> = free.iter().map(|&i| -cur.grad[i]).collect();
            let scale = (0..m).fold(S::zero(), |acc, i| acc.max(reduced[(i, i)].abs())).max(S::one());
            let mut shift = S::zero();
            let step = loop {
                if let Some(l) = cholesky(&reduced) {
                    break Some(cholesky_solve(&l, &rhs));
                }
                let next = if shift == S::zero() { scale * S::lit(1e-10) } else { shift * S::lit(10.0) };
                if next > scale * S::lit(1e6) {
                    break None;
                }
                for i in 0..m {
                    reduced[(i, i)] = reduced[(i, i)] - shift + next;
                }
                shift = next;
            };
            if let Some(step) = step {
                for (k, &i) in free.iter().enumerate() {
                    dir[i] = step[k];
                }
            }
        }
        if !(dot(&dir, &cur.grad) < S::zero()) {
            // Fall back to projected steepest descent.
            dir = cur.grad.iter().map(|&g| -g).collect();
        }

        let line_search = |dir: &[S]| {
            let mut alpha = S::one();
            for _ in 0..MAX_HALVINGS {
                let mut trial: Vec<S> = z.iter().zip(dir).map(|(&zi, &di)| zi + alpha * di).collect();
                prob.project(&mut trial);
                let delta: Vec<S> = trial.iter().zip(z.iter()).map(|(&a, &b)| a - b).collect();
                let decrease = dot(&cur.grad, &delta);
                if decrease < S::zero() {
                    let next = evaluate(prob.nlp, &trial, mult);
                    if next.merit.is_finite() && next.merit <= cur.merit + armijo * decrease {
                        return Some((trial, delta, next));
                    }
                }
                alpha = alpha * S::lit(0.5);
            }
            None
        };
        let mut accepted = line_search(&dir);
        if accepted.is_none() {
            // The quasi-Newton model is stale: restart it from steepest descent.
            *qn = QuasiNewton::new(n);
            let steepest: Vec<S> = cur.grad.iter().map(|&g| -g).collect();
            accepted = line_search(&steepest);
        }
        let Some((trial, s, next)) = accepted else {
            return (cur, InnerExit::Stalled);
        };

        // y = ∇ℓ(z⁺) − ∇ℓ(z), both at the new multiplier estimates.
        let mut y: Vec<S> = next.obj_grad.iter().zip(&cur.obj_grad).map(|(&a, &b)| a - b).collect();
        if !next.eq.is_empty() {
            let a = next.eq_jac.tr_mul_vec(&next.lambda_est);
            let b = cur.eq_jac.tr_mul_vec(&next.lambda_est);
            for i in 0..n {
                y[i] = y[i] - (a[i] - b[i]);
            }
        }
        if !next.ineq.is_empty() {
            let a = next.ineq_jac.tr_mul_vec(&next.mu_est);
            let b = cur.ineq_jac.tr_mul_vec(&next.mu_est);
            for i in 0..n {
                y[i] = y[i] - (a[i] - b[i]);
            }
        }
        qn.update(&s, &y);

        let floor = S::lit(NOISE_FLOOR) * cur.merit.abs().max(S::one());
        if cur.merit - next.merit <= floor {
            negligible += 1;
        } else {
            negligible = 0;
        }

        if let Some(t) = trace.as_deref_mut() {
            t.push(TraceEntry { outer, merit: next.merit });
        }
        *z = trial;
        cur = next;
        if negligible >= STALL_STEPS {
            return (cur, InnerExit::Stalled);
        }
    }
    (cur, InnerExit::Exhausted)
}

/// Solves `nlp` from `guess`.
///
/// Returns the final iterate when it converges, otherwise the least-violating
/// iterate seen, tagged `MaxIterations` or `Infeasible`. `Infeasible` means
/// the violation stalled above tolerance for 5 consecutive outer iterations
/// at the maximal penalty.
pub fn solve<S: Scalar, P: Nlp<S> + ?Sized>(nlp: &P, guess: &[S], opts: &SolverOptions) -> Result<SolveReport<S>> {
    check_dim(nlp.dim(), guess.len())?;
    opts.validate()?;
    let lo = nlp.lower_bounds();
    let hi = nlp.upper_bounds();
    check_dim(nlp.dim(), lo.len())?;
    check_dim(nlp.dim(), hi.len())?;
    let prob = Problem { nlp, lo, hi };

    let stat_tol = S::lit(opts.stationarity_tol);
    let feas_tol = S::lit(opts.feasibility_tol);
    let growth = S::lit(opts.penalty_growth);
    let max_rho = S::lit(opts.max_penalty);

    let mut z = guess.to_vec();
    prob.project(&mut z);
    let mut mult = Multipliers {
        lambda: vec![S::zero(); nlp.num_eq()],
        mu: vec![S::zero(); nlp.num_ineq()],
        rho: S::lit(opts.initial_penalty),
    };
    let mut qn = QuasiNewton::new(z.len());
    let mut trace = Vec::new();
    let mut inner_iterations = 0;

    let mut prev_violation = S::infinity();
    let mut stalls = 0;
    // Feasible outer iterations that failed to improve stationarity.
    let mut idle = 0;
    let mut best: Option<(S, Vec<S>, Vec<S>, S)> = None;
    let mut status = SolveStatus::MaxIterations;
    let mut outer = 0;

    while outer < opts.max_outer_iterations {
        outer += 1;
        let tol = stat_tol * S::lit(0.1);
        let tol = tol.max(S::lit(10.0).powi(-(outer as i32 + 1)));
        let (eval, _exit) = minimize_inner(
            &prob,
            &mut z,
            &mult,
            &mut qn,
            tol,
            opts.max_inner_iterations,
            outer,
            opts.record_trace.then_some(&mut trace),
            &mut inner_iterations,
        );
        let violation = violation_of(&eval);
        mult.lambda = eval.lambda_est.clone();
        mult.mu = eval.mu_est.clone();
        let all: Vec<S> = mult.lambda.iter().chain(&mult.mu).copied().collect();
        let kkt = kkt_residual(nlp, &z, &all)?;

        let feasible = violation <= feas_tol;
        let better = match &best {
            None => true,
            Some((v, .., k)) if feasible && *v <= feas_tol => kkt < *k,
            Some((v, ..)) => violation <= *v,
        };
        if feasible && !better {
            idle += 1;
            if idle >= MAX_IDLE_OUTER {
                break;
            }
        } else {
            idle = 0;
        }
        if better {
            best = Some((violation, z.clone(), all.clone(), kkt));
        }
        if violation <= feas_tol && kkt <= stat_tol {
            best = Some((violation, z.clone(), all, kkt));
            status = SolveStatus::Converged;
            break;
        }

        if violation > feas_tol {
            // Stuck at a local minimiser of the violation: raising the
            // penalty no longer moves it.
            let at_max = mult.rho >= max_rho;
            let frozen = violation > S::lit(0.99) * prev_violation;
            if (at_max && violation > S::lit(0.5) * prev_violation) || frozen {
                stalls += 1;
                if stalls >= 5 || (frozen && stalls >= 3) {
                    status = SolveStatus::Infeasible;
                    break;
                }
            } else {
                stalls = 0;
            }
            if violation > S::lit(0.25) * prev_violation {
                mult.rho = (mult.rho * growth).min(max_rho);
            }
        } else {
            stalls = 0;
        }
        prev_violation = violation;
    }

    let (violation, solution, multipliers, kkt) = best.expect("at least one outer iteration");
    Ok(SolveReport {
        objective: nlp.objective(&solution),
        solution,
        kkt_residual: kkt,
        constraint_violation: violation,
        multipliers,
        outer_iterations: outer,
        inner_iterations,
        status,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `‖z − 1‖²` in `n` unknowns, no constraints.
    struct Bowl(usize);

    impl Nlp<f64> for Bowl {
        fn dim(&self) -> usize {
            self.0
        }
        fn num_eq(&self) -> usize {
            0
        }
        fn num_ineq(&self) -> usize {
            0
        }
        fn objective(&self, z: &[f64]) -> f64 {
            z.iter().map(|v| (v - 1.0).powi(2)).sum()
        }
        fn objective_gradient(&self, z: &[f64]) -> Vec<f64> {
            z.iter().map(|v| 2.0 * (v - 1.0)).collect()
        }
        fn eq_constraints(&self, _: &[f64]) -> Vec<f64> {
            vec![]
        }
        fn eq_jacobian(&self, _: &[f64]) -> DenseMatrix<f64> {
            DenseMatrix::zeros(0, self.0)
        }
        fn ineq_constraints(&self, _: &[f64]) -> Vec<f64> {
            vec![]
        }
        fn ineq_jacobian(&self, _: &[f64]) -> DenseMatrix<f64> {
            DenseMatrix::zeros(0, self.0)
        }
    }

    /// `z²` subject to `z − 1 ≥ 0`.
    struct LowerBounded;

    impl Nlp<f64> for LowerBounded {
        fn dim(&self) -> usize {
            1
        }
        fn num_eq(&self) -> usize {
            0
        }
        fn num_ineq(&self) -> usize {
            1
        }
        fn objective(&self, z: &[f64]) -> f64 {
            z[0] * z[0]
        }
        fn objective_gradient(&self, z: &[f64]) -> Vec<f64> {
            vec![2.0 * z[0]]
        }
        fn eq_constraints(&self, _: &[f64]) -> Vec<f64> {
            vec![]
        }
        fn eq_jacobian(&self, _: &[f64]) -> DenseMatrix<f64> {
            DenseMatrix::zeros(0, 1)
        }
        fn ineq_constraints(&self, z: &[f64]) -> Vec<f64> {
            vec![z[0] - 1.0]
        }
        fn ineq_jacobian(&self, _: &[f64]) -> DenseMatrix<f64> {
            DenseMatrix::from_fn(1, 1, |_, _| 1.0)
        }
    }

    /// `z1² + z2²` subject to `z1 + z2 = 2`.
    struct OnLine;

    impl Nlp<f64> for OnLine {
        fn dim(&self) -> usize {
            2
        }
        fn num_eq(&self) -> usize {
            1
        }
        fn num_ineq(&self) -> usize {
            0
        }
        fn objective(&self, z: &[f64]) -> f64 {
            z[0] * z[0] + z[1] * z[1]
        }
        fn objective_gradient(&self, z: &[f64]) -> Vec<f64> {
            vec![2.0 * z[0], 2.0 * z[1]]
        }
        fn eq_constraints(&self, z: &[f64]) -> Vec<f64> {
            vec![z[0] + z[1] - 2.0]
        }
        fn eq_jacobian(&self, _: &[f64]) -> DenseMatrix<f64> {
            DenseMatrix::from_fn(1, 2, |_, _| 1.0)
        }
        fn ineq_constraints(&self, _: &[f64]) -> Vec<f64> {
            vec![]
        }
        fn ineq_jacobian(&self, _: &[f64]) -> DenseMatrix<f64> {
            DenseMatrix::zeros(0, 2)
        }
    }

    /// Rosenbrock on a box, with the unconstrained minimizer outside it.
    struct BoxedRosenbrock;

    impl Nlp<f64> for BoxedRosenbrock {
        fn dim(&self) -> usize {
            2
        }
        fn num_eq(&self) -> usize {
            0
        }
        fn num_ineq(&self) -> usize {
            0
        }
        fn lower_bounds(&self) -> Vec<f64> {
            vec![-2.0, -2.0]
        }
        fn upper_bounds(&self) -> Vec<f64> {
            vec![0.5, 2.0]
        }
        fn objective(&self, z: &[f64]) -> f64 {
            (1.0 - z[0]).powi(2) + 100.0 * (z[1] - z[0] * z[0]).powi(2)
        }
        fn objective_gradient(&self, z: &[f64]) -> Vec<f64> {
            let t = z[1] - z[0] * z[0];
            vec![-2.0 * (1.0 - z[0]) - 400.0 * z[0] * t, 200.0 * t]
        }
        fn eq_constraints(&self, _: &[f64]) -> Vec<f64> {
            vec![]
        }
        fn eq_jacobian(&self, _: &[f64]) -> DenseMatrix<f64> {
            DenseMatrix::zeros(0, 2)
        }
        fn ineq_constraints(&self, _: &[f64]) -> Vec<f64> {
            vec![]
        }
        fn ineq_jacobian(&self, _: &[f64]) -> DenseMatrix<f64> {
            DenseMatrix::zeros(0, 2)
        }
    }

    /// `z²` subject to `z = 1` and `z = 2`: no feasible point.
    struct Contradictory;

    impl Nlp<f64> for Contradictory {
        fn dim(&self) -> usize {
            1
        }
        fn num_eq(&self) -> usize {
            2
        }
        fn num_ineq(&self) -> usize {
            0
        }
        fn objective(&self, z: &[f64]) -> f64 {
            z[0] * z[0]
        }
        fn objective_gradient(&self, z: &[f64]) -> Vec<f64> {
            vec![2.0 * z[0]]
        }
        fn eq_constraints(&self, z: &[f64]) -> Vec<f64> {
            vec![z[0] - 1.0, z[0] - 2.0]
        }
        fn eq_jacobian(&self, _: &[f64]) -> DenseMatrix<f64> {
            DenseMatrix::from_fn(2, 1, |_, _| 1.0)
        }
        fn ineq_constraints(&self, _: &[f64]) -> Vec<f64> {
            vec![]
        }
        fn ineq_jacobian(&self, _: &[f64]) -> DenseMatrix<f64> {
            DenseMatrix::zeros(0, 1)
        }
    }

    fn solve_default<P: Nlp<f64>>(nlp: &P, guess: &[f64]) -> SolveReport<f64> {
        solve(nlp, guess, &SolverOptions::default()).unwrap()
    }

    #[test]
    fn unconstrained_bowl() {
        let r = solve_default(&Bowl(5), &[0.0; 5]);
        assert_eq!(r.status, SolveStatus::Converged);
        assert!(r.solution.iter().all(|v| (v - 1.0).abs() < 1e-8));
        assert!(r.objective < 1e-14);
    }

    #[test]
    fn active_lower_bound() {
        let r = solve_default(&LowerBounded, &[5.0]);
        assert_eq!(r.status, SolveStatus::Converged);
        assert!((r.solution[0] - 1.0).abs() < 1e-7);
        assert!((r.multipliers[0] - 2.0).abs() < 1e-5);
    }

    #[test]
    fn equality_on_a_line() {
        let r = solve_default(&OnLine, &[0.0, 0.0]);
        assert_eq!(r.status, SolveStatus::Converged);
        assert!((r.solution[0] - 1.0).abs() < 1e-7 && (r.solution[1] - 1.0).abs() < 1e-7);
        assert!((r.objective - 2.0).abs() < 1e-7);
        // Lagrange condition 2z = λ
        assert!((r.multipliers[0] - 2.0).abs() < 1e-5);
        assert!(constraint_violation(&OnLine, &r.solution) <= 1e-8);
    }

    #[test]
    fn box_bounds_by_projection() {
        let r = solve_default(&BoxedRosenbrock, &[-1.5, 1.5]);
        assert_eq!(r.status, SolveStatus::Converged);
        assert!((r.solution[0] - 0.5).abs() < 1e-9);
        assert!((r.solution[1] - 0.25).abs() < 1e-6);
    }

    #[test]
    fn contradictory_equalities_are_infeasible() {
        let r = solve_default(&Contradictory, &[0.0]);
        assert_eq!(r.status, SolveStatus::Infeasible);
        assert!(r.constraint_violation > 0.4);
    }

    #[test]
    fn kkt_residual_examples() {
        let k = kkt_residual(&Bowl(3), &[1.0, 1.0, 1.0], &[]).unwrap();
        assert!(k.abs() < 1e-12);
        assert!(kkt_residual(&LowerBounded, &[1.0], &[2.0]).unwrap().abs() < 1e-12);
        assert!((kkt_residual(&LowerBounded, &[1.0], &[0.0]).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        assert_eq!(
            solve(&Bowl(3), &[0.0; 2], &SolverOptions::default()).unwrap_err(),
            Error::DimensionMismatch { expected: 3, actual: 2 }
        );
        assert!(matches!(kkt_residual(&LowerBounded, &[1.0], &[]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn merit_never_increases_within_an_outer_iteration() {
        let opts = SolverOptions { record_trace: true, ..SolverOptions::default() };
        let r = solve(&OnLine, &[-3.0, 7.0], &opts).unwrap();
        assert!(!r.trace.is_empty());
        for w in r.trace.windows(2) {
            if w[0].outer == w[1].outer {
                assert!(w[1].merit <= w[0].merit);
            }
        }
    }

    #[test]
    fn solves_are_deterministic() {
        let a = solve_default(&BoxedRosenbrock, &[-1.2, 1.0]);
        let b = solve_default(&BoxedRosenbrock, &[-1.2, 1.0]);
        assert_eq!(a, b);
    }
}
