//! Legendre–Gauss–Lobatto collocation: nodes, quadrature weights, the
//! differentiation matrix, and Lagrange interpolation on `[-1, 1]`.
//!
//! Physical time on a slice is `t = t_f (τ + 1) / 2`, so integrals pick up a
//! factor `t_f / 2` and derivatives a factor `2 / t_f`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;

const NEWTON_MAX_ITERATIONS: usize = 100;

/// LGL grid of order `N` (`N + 1` nodes).
#[derive(Debug, Clone, PartialEq)]
pub struct LglGrid<S> {
    order: usize,
    nodes: Vec<S>,
    weights: Vec<S>,
    diff: DenseMatrix<S>,
    barycentric: Vec<S>,
}

/// Affine map between `τ ∈ [-1, 1]` and `t ∈ [0, t_f]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeMap<S> {
    pub final_time: S,
}

impl<S: Scalar> TimeMap<S> {
    pub fn new(final_time: S) -> Self {
        Self { final_time }
    }

    #[inline]
    pub fn time(self, tau: S) -> S {
        self.final_time * (tau + S::one()) / S::lit(2.0)
    }

    #[inline]
    pub fn tau(self, t: S) -> S {
        S::lit(2.0) * t / self.final_time - S::one()
    }

    /// `dτ/dt = 2 / t_f`.
    #[inline]
    pub fn rate(self) -> S {
        S::lit(2.0) / self.final_time
    }
}

/// Legendre polynomial `P_n(x)` and its derivative by the three-term recurrence.
pub fn legendre<S: Scalar>(n: usize, x: S) -> (S, S) {
    if n == 0 {
        return (S::one(), S::zero());
    }
    let mut p_prev = S::one();
    let mut p = x;
    let mut dp_prev = S::zero();
    let mut dp = S::one();
    for k in 1..n {
        let kf = S::from_count(k);
        let two_k1 = S::from_count(2 * k + 1);
        let p_next = (two_k1 * x * p - kf * p_prev) / (kf + S::one());
        // P'_{k+1} = P'_{k-1} + (2k+1) P_k
        let dp_next = dp_prev + two_k1 * p;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
    }
    (p, dp)
}

impl<S: Scalar> LglGrid<S> {
    pub fn new(order: usize) -> Result<Self> {
        lgl_grid(order)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of nodes, `N + 1`.
    #[inline]
    pub fn len(&self) -> usize {
        self.order + 1
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn nodes(&self) -> &[S] {
        &self.nodes
    }

    #[inline]
    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    #[inline]
    pub fn diff_matrix(&self) -> &DenseMatrix<S> {
        &self.diff
    }

    /// Row of Lagrange basis values `ℓ_j(τ)` for `j = 0..=N`.
    pub fn basis(&self, tau: S) -> Vec<S> {
        let n = self.len();
        if let Some(k) = self.nodes.iter().position(|&t| t == tau) {
            let mut row = vec![S::zero(); n];
            row[k] = S::one();
            return row;
        }
        let terms: Vec<S> = (0..n).map(|j| self.barycentric[j] / (tau - self.nodes[j])).collect();
        let denom: S = terms.iter().copied().sum();
        terms.into_iter().map(|t| t / denom).collect()
    }

    /// Lagrange basis rows for each of `taus`, as a `taus.len() × (N+1)` matrix.
    pub fn interpolation_matrix(&self, taus: &[S]) -> DenseMatrix<S> {
        let mut m = DenseMatrix::zeros(taus.len(), self.len());
        for (i, &tau) in taus.iter().enumerate() {
            m.row_mut(i).copy_from_slice(&self.basis(tau));
        }
        m
    }

    pub fn interpolate(&self, values: &[S], tau: S) -> S {
        interpolate(self, values, tau)
    }
}

/// Builds the order-`N` LGL grid.
///
/// Interior nodes are the roots of `P_N'`, found by Newton iteration from the
/// Chebyshev–Gauss–Lobatto points. Diagonal entries of `D` use the
/// negative-row-sum identity, which reproduces the corner values `∓N(N+1)/4`.
pub fn lgl_grid<S: Scalar>(order: usize) -> Result<LglGrid<S>> {
    if order < 1 {
        return Err(Error::InvalidOrder(order));
    }
    let n = order;
    let nf = S::from_count(n);
    let nn1 = nf * (nf + S::one());
    let tol = S::lit(1e-14).max(S::epsilon() * S::lit(4.0));

    let mut nodes = vec![S::zero(); n + 1];
    nodes[0] = -S::one();
    nodes[n] = S::one();
    // Roots are symmetric; solve the lower half and mirror.
    for j in 1..=(n / 2) {
        if 2 * j == n {
            // P_N' is odd for even N: τ = 0 is an exact root.
            nodes[j] = S::zero();
            continue;
        }
        let mut x = -(S::PI() * S::from_count(j) / nf).cos();
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITERATIONS {
            let (p, dp) = legendre(n, x);
            // Legendre ODE: (1 − x²) P'' = 2x P' − N(N+1) P
            let d2p = (S::lit(2.0) * x * dp - nn1 * p) / (S::one() - x * x);
            let step = dp / d2p;
            x = x - step;
            if step.abs() <= tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numerical(format!("LGL node {j} of order {n} did not converge")));
        }
        nodes[j] = x;
        nodes[n - j] = -x;
    }

    let pn: Vec<S> = nodes.iter().map(|&x| legendre(n, x).0).collect();
    let weights: Vec<S> = pn.iter().map(|&p| S::lit(2.0) / (nn1 * p * p)).collect();

    let mut diff = DenseMatrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        let mut row_sum = S::zero();
        for j in 0..=n {
            if i != j {
                let d = pn[i] / (pn[j] * (nodes[i] - nodes[j]));
                diff[(i, j)] = d;
                row_sum = row_sum + d;
            }
        }
        diff[(i, i)] = -row_sum;
    }

    let barycentric = (0..=n)
        .map(|j| {
            let prod = (0..=n).filter(|&k| k != j).fold(S::one(), |acc, k| acc * (nodes[j] - nodes[k]));
            S::one() / prod
        })
        .collect();

    Ok(LglGrid { order: n, nodes, weights, diff, barycentric })
}

/// Value at `tau` of the degree-`≤ N` polynomial through `(τ_j, values_j)`,
/// in barycentric form.
pub fn interpolate<S: Scalar>(grid: &LglGrid<S>, values: &[S], tau: S) -> S {
    assert_eq!(values.len(), grid.len(), "one value per node");
    if let Some(k) = grid.nodes.iter().position(|&t| t == tau) {
        return values[k];
    }
    let mut num = S::zero();
    let mut den = S::zero();
    for j in 0..grid.len() {
        let c = grid.barycentric[j] / (tau - grid.nodes[j]);
        num = num + c * values[j];
        den = den + c;
    }
    num / den
}

/// `(t_f / 2) Σ_j w_j f_j`, approximating `∫_0^{t_f} f dt`.
pub fn quadrature<S: Scalar>(grid: &LglGrid<S>, values: &[S], final_time: S) -> S {
    assert_eq!(values.len(), grid.len(), "one value per node");
    let sum: S = grid.weights.iter().zip(values).map(|(&w, &f)| w * f).sum();
    final_time / S::lit(2.0) * sum
}

/// `(2 / t_f) D f`: derivative with respect to physical time at each node.
pub fn differentiate<S: Scalar>(grid: &LglGrid<S>, values: &[S], final_time: S) -> Vec<S> {
    assert_eq!(values.len(), grid.len(), "one value per node");
    let rate = TimeMap::new(final_time).rate();
    grid.diff.mul_vec(values).into_iter().map(|d| d * rate).collect()
}

/// `count` equally spaced values of `τ` covering `[-1, 1]` inclusive.
pub fn uniform_taus<S: Scalar>(count: usize) -> Vec<S> {
    match count {
        0 => Vec::new(),
        1 => vec![S::zero()],
        _ => {
            let step = S::lit(2.0) / S::from_count(count - 1);
            (0..count)
                .map(|i| if i + 1 == count { S::one() } else { -S::one() + step * S::from_count(i) })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(n: usize) -> LglGrid<f64> {
        lgl_grid(n).unwrap()
    }

    #[test]
    fn order_zero_is_rejected() {
        assert_eq!(lgl_grid::<f64>(0).unwrap_err(), Error::InvalidOrder(0));
    }

    #[test]
    fn order_one_is_the_linear_element() {
        let g = grid(1);
        assert_eq!(g.nodes(), &[-1.0, 1.0]);
        assert_eq!(g.weights(), &[1.0, 1.0]);
        let d = g.diff_matrix();
        assert_eq!([d[(0, 0)], d[(0, 1)], d[(1, 0)], d[(1, 1)]], [-0.5, 0.5, -0.5, 0.5]);
    }

    #[test]
    fn order_two_weights() {
        let g = grid(2);
        assert_eq!(g.nodes(), &[-1.0, 0.0, 1.0]);
        let expected = [1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0];
        for (w, e) in g.weights().iter().zip(expected) {
            assert!((w - e).abs() < 1e-15);
        }
    }

    #[test]
    fn order_four_interior_nodes() {
        let g = grid(4);
        let a = (3.0f64 / 7.0).sqrt();
        let expected = [-1.0, -a, 0.0, a, 1.0];
        for (x, e) in g.nodes().iter().zip(expected) {
            assert!((x - e).abs() < 1e-14, "{x} vs {e}");
        }
    }

    #[test]
    fn grid_invariants_hold_up_to_high_order() {
        for n in [1, 2, 3, 7, 20, 64, 200] {
            let g = grid(n);
            assert_eq!(g.nodes()[0], -1.0);
            assert_eq!(g.nodes()[n], 1.0);
            assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
            let total: f64 = g.weights().iter().sum();
            assert!((total - 2.0).abs() < 1e-12, "N={n}: Σw = {total}");
            assert!(g.weights().iter().all(|&w| w > 0.0));
            for j in 0..=n {
                assert!((g.nodes()[j] + g.nodes()[n - j]).abs() < 1e-12);
                assert!((g.weights()[j] - g.weights()[n - j]).abs() < 1e-12);
                let row_sum: f64 = g.diff_matrix().row(j).iter().sum();
                assert!(row_sum.abs() < 1e-10, "N={n} row {j}: {row_sum}");
            }
            let corner = (n * (n + 1)) as f64 / 4.0;
            let d = g.diff_matrix();
            assert!((d[(0, 0)] + corner).abs() < 1e-9 * corner.max(1.0));
            assert!((d[(n, n)] - corner).abs() < 1e-9 * corner.max(1.0));
        }
    }

    #[test]
    fn interpolation_examples() {
        let g = grid(6);
        let c = vec![2.5; 7];
        assert!((interpolate(&g, &c, 0.123) - 2.5).abs() < 1e-14);
        let ident: Vec<f64> = g.nodes().to_vec();
        assert!((interpolate(&g, &ident, 0.3) - 0.3).abs() < 1e-14);
        let g2 = grid(2);
        let sq: Vec<f64> = g2.nodes().iter().map(|t| t * t).collect();
        assert!((interpolate(&g2, &sq, 0.5) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn quadrature_examples() {
        let g = grid(5);
        assert!((quadrature(&g, &[1.0; 6], 7.0) - 7.0).abs() < 1e-13);
        let g2 = grid(2);
        let sq: Vec<f64> = g2.nodes().iter().map(|t| t * t).collect();
        assert!((quadrature(&g2, &sq, 2.0) - 2.0 / 3.0).abs() < 1e-15);
        let g3 = grid(3);
        let odd: Vec<f64> = g3.nodes().iter().map(|t| t.powi(5)).collect();
        assert!(quadrature(&g3, &odd, 2.0).abs() < 1e-15);
    }

    #[test]
    fn differentiation_examples() {
        let g = grid(3);
        assert!(differentiate(&g, &[4.0; 4], 3.0).iter().all(|d| d.abs() < 1e-13));
        let tf = 5.5;
        let times: Vec<f64> = g.nodes().iter().map(|&t| TimeMap::new(tf).time(t)).collect();
        assert!(differentiate(&g, &times, tf).iter().all(|d| (d - 1.0).abs() < 1e-13));
        let cubes: Vec<f64> = g.nodes().iter().map(|t| t.powi(3)).collect();
        for (d, t) in differentiate(&g, &cubes, 2.0).iter().zip(g.nodes()) {
            assert!((d - 3.0 * t * t).abs() < 1e-13);
        }
    }

    #[test]
    fn time_map_round_trips() {
        let m = TimeMap::new(4.0f64);
        assert_eq!(m.time(-1.0), 0.0);
        assert_eq!(m.time(1.0), 4.0);
        assert!((m.tau(m.time(0.37)) - 0.37).abs() < 1e-15);
        assert_eq!(m.rate(), 0.5);
    }

    #[test]
    fn uniform_taus_cover_interval() {
        let t: Vec<f64> = uniform_taus(5);
        assert_eq!(t, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn f32_grid_is_usable() {
        let g: LglGrid<f32> = lgl_grid(5).unwrap();
        let total: f32 = g.weights().iter().sum();
        assert!((total - 2.0).abs() < 1e-5);
        let cubes: Vec<f32> = g.nodes().iter().map(|t| t.powi(3)).collect();
        for (d, t) in differentiate(&g, &cubes, 2.0).iter().zip(g.nodes()) {
            assert!((d - 3.0 * t * t).abs() < 1e-3);
        }
    }

    proptest! {
        #[test]
        fn interpolation_is_cardinal(n in 1usize..30, seed in 0u64..1000) {
            let g = grid(n);
            let values: Vec<f64> = (0..=n).map(|j| ((j as u64 * 7919 + seed) % 101) as f64 - 50.0).collect();
            for k in 0..=n {
                prop_assert_eq!(interpolate(&g, &values, g.nodes()[k]), values[k]);
            }
        }

        #[test]
        fn basis_rows_partition_unity(n in 1usize..40, tau in -1.0f64..1.0) {
            let g = grid(n);
            let s: f64 = g.basis(tau).iter().sum();
            prop_assert!((s - 1.0).abs() < 1e-10);
        }
    }
}
