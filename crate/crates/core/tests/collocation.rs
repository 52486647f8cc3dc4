use proptest::prelude::*;
use sweepopt::collocation::{differentiate, interpolate, lgl_grid, quadrature, uniform_taus, LglGrid};

fn monomial(grid: &LglGrid<f64>, k: i32) -> Vec<f64> {
    grid.nodes().iter().map(|t| t.powi(k)).collect()
}

#[test]
fn quadrature_is_exact_through_degree_2n_minus_1() {
    for n in [2usize, 5, 10, 20] {
        let g = lgl_grid::<f64>(n).unwrap();
        for k in 0..2 * n as i32 {
            // On [-1, 1] with t_f = 2 the time map is the identity shift.
            let got = quadrature(&g, &monomial(&g, k), 2.0);
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((got - exact).abs() <= 1e-10, "N={n} k={k}: {got} vs {exact}");
        }
    }
}

#[test]
fn differentiation_is_exact_through_degree_n() {
    for n in [2usize, 5, 10, 20] {
        let g = lgl_grid::<f64>(n).unwrap();
        for k in 0..=n as i32 {
            let got = differentiate(&g, &monomial(&g, k), 2.0);
            for (j, &t) in g.nodes().iter().enumerate() {
                let exact = if k == 0 { 0.0 } else { k as f64 * t.powi(k - 1) };
                assert!((got[j] - exact).abs() <= 1e-9, "N={n} k={k} node {j}: {} vs {exact}", got[j]);
            }
        }
    }
}

#[test]
fn single_precision_grid_matches_double() {
    let g32 = lgl_grid::<f32>(10).unwrap();
    let g64 = lgl_grid::<f64>(10).unwrap();
    for (a, b) in g32.nodes().iter().zip(g64.nodes()) {
        assert!((*a as f64 - b).abs() < 1e-6);
    }
    for (a, b) in g32.weights().iter().zip(g64.weights()) {
        assert!((*a as f64 - b).abs() < 1e-6);
    }
}

#[test]
fn uniform_taus_span_the_interval() {
    let t: Vec<f64> = uniform_taus(5);
    assert_eq!(t, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
}

proptest! {
    #[test]
    fn interpolation_reproduces_polynomials_of_degree_n(n in 1usize..25, tau in -1.0f64..1.0, c in -3.0f64..3.0) {
        let g = lgl_grid::<f64>(n).unwrap();
        let p = |t: f64| (0..=n).map(|k| (c + k as f64).sin() * t.powi(k as i32)).sum::<f64>();
        let values: Vec<f64> = g.nodes().iter().map(|&t| p(t)).collect();
        prop_assert!((interpolate(&g, &values, tau) - p(tau)).abs() < 1e-9);
    }

    #[test]
    fn quadrature_scales_linearly_with_final_time(n in 1usize..20, tf in 0.01f64..100.0) {
        let g = lgl_grid::<f64>(n).unwrap();
        let f: Vec<f64> = g.nodes().iter().map(|t| 1.0 + t * t).collect();
        let a = quadrature(&g, &f, tf);
        let b = quadrature(&g, &f, 2.0);
        prop_assert!((a - b * tf / 2.0).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn derivative_of_a_constant_vanishes(n in 1usize..40, c in -1e3f64..1e3) {
        let g = lgl_grid::<f64>(n).unwrap();
        let d = differentiate(&g, &vec![c; n + 1], 3.0);
        prop_assert!(d.iter().all(|x| x.abs() <= 1e-9 * c.abs().max(1.0)));
    }
}
