use super::*;
use proptest::prelude::*;
use std::f64::consts::PI;

use crate::quad::adaptive_gauss;
use crate::spectral_grid::TorusGrid;

fn adaptive_kernel_oracle(m: u32, t: f64, sigma: f64, s: f64) -> f64 {
    let p = LambdaProfile::new(m);
    let lt = p.eval(t * s).unwrap().log_value;
    let ls = p.eval(sigma * s).unwrap().log_value;
    adaptive_gauss(
        |y| (lt + ls - 2.0 * p.eval(y * s).unwrap().log_value).exp(),
        0.0,
        t.min(sigma),
        1e-14,
    )
    .unwrap()
}

#[test]
fn kernel_vanishes_at_zero_and_m0_value() {
    assert_eq!(duhamel_kernel_t(1, 0.0, 2.0, 3.0).unwrap(), 0.0);
    assert_eq!(duhamel_kernel_t(1, 2.0, 0.0, 3.0).unwrap(), 0.0);
    let closed = duhamel_kernel_m0(1.0, 1.0, 1.0);
    assert!((closed - 0.432_332_4).abs() < 1e-7);
    let exact = (-2.0f64).exp() * (2f64.exp() - 1.0) / 2.0;
    assert!((closed - exact).abs() < 1e-15);
}

#[test]
fn generic_kernel_matches_m0_closed_form() {
    for &(t, sg, s) in &[(1.0, 1.0, 1.0), (0.3, 2.0, 5.0), (4.0, 1.5, 0.2), (10.0, 9.0, 30.0)] {
        let g = duhamel_kernel_t(0, t, sg, s).unwrap();
        let c = duhamel_kernel_m0(t, sg, s);
        assert!((g - c).abs() <= 1e-8 * c, "({t},{sg},{s}): {g} vs {c}");
    }
}

#[test]
fn m1_kernel_matches_adaptive_oracle() {
    let v = duhamel_kernel_t(1, 1.0, 1.0, 1.0).unwrap();
    let o = adaptive_kernel_oracle(1, 1.0, 1.0, 1.0);
    assert!((v - o).abs() < 1e-8 * o, "{v} vs {o}");
    for &(t, sg, s) in &[(0.5, 2.0, 3.0), (3.0, 1.0, 2.0)] {
        let v = duhamel_kernel_t(3, t, sg, s).unwrap();
        let o = adaptive_kernel_oracle(3, t, sg, s);
        assert!((v - o).abs() < 1e-8 * o);
    }
}

#[test]
fn kernel_finite_at_large_arguments() {
    let v = duhamel_kernel_t(1, 900.0, 1000.0, 1.0).unwrap();
    assert!(v.is_finite() && v >= 0.0);
}

proptest! {
    #[test]
    fn kernel_symmetric_and_nonnegative(t in 0.01f64..5.0, sg in 0.01f64..5.0, s in 0.0f64..6.0, m in 0u32..4) {
        let a = duhamel_kernel_t(m, t, sg, s).unwrap();
        let b = duhamel_kernel_t(m, sg, t, s).unwrap();
        prop_assert!(a >= 0.0);
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1e-300));
    }
}

fn manufactured_source(m: u32, nu: f64, s: f64) -> impl Fn(f64) -> f64 {
    move |x: f64| {
        let w = x * x * (-x).exp();
        let wpp = (2.0 - 4.0 * x + x * x) * (-x).exp();
        (wpp - x.powi(m as i32) * s.powf(m as f64 + 2.0) * w) / x.powf(nu)
    }
}

fn graded_tail_grid(panels_near: usize, panels_far: usize, q: usize) -> TimeGrid {
    let near = TimeGrid::graded(0.0, 2.0, panels_near, q).unwrap();
    let far = TimeGrid::uniform(2.0, 48.0, panels_far, q).unwrap();
    near.join(&far).unwrap()
}

fn manufactured_error(grid: &TimeGrid, m: u32, nu: f64, s: f64) -> f64 {
    let src = manufactured_source(m, nu, s);
    let g: Vec<f64> = grid.nodes().iter().map(|&x| src(x)).collect();
    let w = mode_weights(m, nu, s, grid, &[1.0], 12).unwrap();
    let (v, _) = w.apply(&g);
    let exact = (-1.0f64).exp();
    (v[0] - exact).abs() / exact
}

#[test]
fn manufactured_single_mode_recovery_and_order() {
    let (m, nu, s) = (1, 1.0, 1.3);
    let fine = manufactured_error(&graded_tail_grid(4, 24, 10), m, nu, s);
    assert!(fine < 1e-4, "relative error {fine}");
    let coarse = graded_tail_grid(3, 12, 3).bisected();
    let e1 = manufactured_error(&coarse, m, nu, s);
    let e2 = manufactured_error(&coarse.bisected(), m, nu, s);
    let order = (e1 / e2).log2();
    assert!(order >= 1.9, "order {order} from {e1} → {e2}");
}

#[test]
fn m0_generic_weights_match_closed_form_weights() {
    let grid = TimeGrid::graded(0.0, 3.0, 4, 8).unwrap();
    let evals = [0.0, 0.2, 0.75, 1.9, 3.5];
    let s = 1.7;
    let w = mode_weights(0, 0.0, s, &grid, &evals, 12).unwrap();
    // independent closed-form assembly without splitting: a smooth source
    // for which both must agree to quadrature accuracy
    let src: Vec<f64> = grid.nodes().iter().map(|&x| (-(x - 1.0) * (x - 1.0)).exp()).collect();
    let (v, _) = w.apply(&src);
    for (i, &t) in evals.iter().enumerate() {
        let exact = -adaptive_gauss(|x| duhamel_kernel_m0(t, x, s) * (-(x - 1.0) * (x - 1.0)).exp(), 0.0, t.min(3.0), 1e-14)
            .unwrap()
            - if t < 3.0 {
                adaptive_gauss(|x| duhamel_kernel_m0(t, x, s) * (-(x - 1.0) * (x - 1.0)).exp(), t, 3.0, 1e-14).unwrap()
            } else {
                0.0
            };
        assert!((v[i] - exact).abs() < 1e-8 * (1.0 + exact.abs()), "t={t}: {} vs {exact}", v[i]);
    }
}

fn single_mode_series(grid: &TimeGrid, space: &TorusGrid, f: impl Fn(f64) -> f64) -> TimeSeries {
    TimeSeries::from_fn(grid.clone(), |t| space.sample(|x| f(t) * x[0].cos())).unwrap()
}

#[test]
fn initial_slope_m0_closed_form() {
    // ĝ = 1 on [0,1], s = 1 ⇒ ∫_0^1 e^{-σ} dσ
    let space = TorusGrid::cube(1, 16, 2.0 * PI).unwrap();
    let grid = TimeGrid::uniform(0.0, 1.0, 2, 8).unwrap();
    let g = single_mode_series(&grid, &space, |_| 1.0);
    let quad = DuhamelQuadrature {
        sigma_cutoff: 1.0,
        ..Default::default()
    };
    let slope = initial_slope(0, 0.0, &g, &quad).unwrap();
    let expect = 1.0 - (-1.0f64).exp();
    assert!((expect - 0.632_120_6).abs() < 1e-7);
    for (i, v) in slope.values.iter().enumerate() {
        let x = space.coords(i)[0];
        assert!((v - expect * x.cos()).abs() < 1e-12);
    }
}

#[test]
fn zero_source_and_trace_at_zero() {
    let space = TorusGrid::cube(2, 8, 4.0).unwrap();
    let grid = TimeGrid::graded(0.0, 1.0, 3, 6).unwrap();
    let zero = TimeSeries::from_fn(grid.clone(), |_| space.zeros()).unwrap();
    let quad = DuhamelQuadrature::default();
    let sol = solve_inhomogeneous(1, 1.0, &zero, &quad, &[0.0, 0.5]).unwrap();
    assert!(sol.snapshots.iter().all(|f| f.max_abs() == 0.0));
    let g = TimeSeries::from_fn(grid, |t| space.sample(|x| (1.0 + t) * (-(x[0] * x[0] + x[1] * x[1])).exp())).unwrap();
    let sol = solve_inhomogeneous(1, 1.0, &g, &quad, &[0.0, 0.5]).unwrap();
    assert_eq!(sol.snapshots[0].max_abs(), 0.0);
    assert!(sol.snapshots[1].max_abs() > 0.0);
}

#[test]
fn solve_is_linear_in_source() {
    let space = TorusGrid::cube(1, 16, 6.0).unwrap();
    let grid = TimeGrid::graded(0.0, 1.0, 3, 6).unwrap();
    let quad = DuhamelQuadrature::default();
    let g1 = TimeSeries::from_fn(grid.clone(), |t| space.sample(|x| (-x[0] * x[0]).exp() * (1.0 - t))).unwrap();
    let g2 = TimeSeries::from_fn(grid.clone(), |t| space.sample(|x| (x[0] * t).sin())).unwrap();
    let combo = TimeSeries::new(
        grid,
        g1.fields.iter().zip(&g2.fields).map(|(a, b)| a.scaled(2.0).axpy(-3.0, b).unwrap()).collect(),
    )
    .unwrap();
    let ev = [0.3, 0.9];
    let s1 = solve_inhomogeneous(1, 1.0, &g1, &quad, &ev).unwrap();
    let s2 = solve_inhomogeneous(1, 1.0, &g2, &quad, &ev).unwrap();
    let sc = solve_inhomogeneous(1, 1.0, &combo, &quad, &ev).unwrap();
    for k in 0..2 {
        for i in 0..16 {
            let lhs = sc.snapshots[k].values[i];
            let rhs = 2.0 * s1.snapshots[k].values[i] - 3.0 * s2.snapshots[k].values[i];
            assert!((lhs - rhs).abs() < 1e-10 * (1.0 + rhs.abs()));
        }
    }
}

#[test]
fn mode_ode_residual_and_slope_consistency() {
    let (m, nu, s) = (1u32, 1.0, 2.0);
    let grid = TimeGrid::graded(0.0, 2.0, 5, 10).unwrap();
    let g = |x: f64| (1.0 - x / 2.0).powi(3) * (1.0 + x);
    let vals: Vec<f64> = grid.nodes().iter().map(|&x| g(x)).collect();
    let h = 1e-3;
    for &tau in &[0.4, 1.1] {
        let w = mode_weights(m, nu, s, &grid, &[tau - h, tau, tau + h], 12).unwrap();
        let (v, _) = w.apply(&vals);
        let d2 = (v[0] - 2.0 * v[1] + v[2]) / (h * h);
        let rhs = tau.powf(nu) * g(tau);
        let res = (d2 - tau.powi(m as i32) * s.powi(3) * v[1] - rhs).abs();
        assert!(res <= 1e-4 * (1.0 + rhs.abs()), "τ={tau}: residual {res}");
    }
    // interface slope: original-time slope equals −∂_τ ŵ(0)
    let profile = LambdaProfile::new(m);
    let sw = slope_weights(&profile, nu, s, &grid).unwrap();
    let slope: f64 = sw.iter().zip(&vals).map(|(a, b)| a * b).sum();
    let w = mode_weights(m, nu, s, &grid, &[0.0, h, 2.0 * h], 12).unwrap();
    let (v, d) = w.apply(&vals);
    assert!((slope + d[0]).abs() < 1e-12 * slope.abs());
    let fd = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    assert!((slope + fd).abs() < 1e-4 * slope.abs(), "{slope} vs {}", -fd);
}

#[test]
fn homogeneous_evolution_properties() {
    let space = TorusGrid::cube(2, 16, 8.0).unwrap();
    let f = space.sample(|x| (-(x[0] * x[0] + x[1] * x[1])).exp() + 0.3);
    let psi = forward_transform(&f).unwrap();
    assert_eq!(homogeneous_evolve(1, &psi, 0.0).unwrap(), psi);
    let w = homogeneous_evolve(1, &psi, 1.0).unwrap();
    assert_eq!(w.coeffs[0], psi.coeffs[0]);
    for gamma in [0.0, 1.0, 2.5] {
        assert!(sobolev_norm(&w, gamma) <= (1.0 + 1e-9) * sobolev_norm(&psi, gamma));
    }
    assert!(homogeneous_evolve(1, &psi, -1.0).is_err());
}

fn bump_source(space: &TorusGrid, grid: &TimeGrid, amp: f64) -> TimeSeries {
    TimeSeries::from_fn(grid.clone(), |t| {
        let time = if t < 1.0 { (1.0 - t * t).powi(4) } else { 0.0 };
        space.sample(|x| amp * time * (-(x[0] * x[0] + x[1] * x[1]) * 2.0).exp())
    })
    .unwrap()
}

#[test]
fn weighted_report_scaling_and_refinement() {
    let quad = DuhamelQuadrature::default();
    let space = TorusGrid::cube(2, 16, 8.0).unwrap();
    let grid = TimeGrid::graded(0.0, 1.0, 4, 6).unwrap();
    let r1 = weighted_estimate_report(1, 1.0, &bump_source(&space, &grid, 1.0), &quad, 1.0, 2.0).unwrap();
    let r2 = weighted_estimate_report(1, 1.0, &bump_source(&space, &grid, -3.5), &quad, 1.0, 2.0).unwrap();
    assert!((r1.dtt - r2.dtt).abs() < 1e-10 * r1.dtt);
    assert!((r1.value - r2.value).abs() < 1e-10 * r1.value);
    let fine_space = TorusGrid::cube(2, 32, 8.0).unwrap();
    let fine_grid = TimeGrid::graded(0.0, 1.0, 6, 10).unwrap();
    let rf = weighted_estimate_report(1, 1.0, &bump_source(&fine_space, &fine_grid, 1.0), &quad, 1.0, 2.0).unwrap();
    for (a, b) in [
        (r1.dtt, rf.dtt),
        (r1.weighted_laplacian, rf.weighted_laplacian),
        (r1.weighted_mixed, rf.weighted_mixed),
        (r1.dt, rf.dt),
        (r1.weighted_gradient, rf.weighted_gradient),
        (r1.value, rf.value),
        (r1.trace, rf.trace),
    ] {
        assert!(a.is_finite() && a > 0.0);
        assert!(a / b < 2.0 && b / a < 2.0, "{a} vs {b}");
    }
    for p in [1.5, 2.0, 4.0] {
        let r = weighted_estimate_report(1, 1.0, &bump_source(&space, &grid, 1.0), &quad, 1.0, p).unwrap();
        assert!(r.dtt.is_finite() && r.trace.is_finite());
    }
    let zero = bump_source(&space, &grid, 0.0);
    assert!(weighted_estimate_report(1, 1.0, &zero, &quad, 1.0, 2.0).is_err());
}
