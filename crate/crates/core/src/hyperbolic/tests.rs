use super::*;
use proptest::prelude::*;

use crate::spectral_grid::TorusGrid;

fn rk4_mode(m: u32, rho: f64, f: impl Fn(f64) -> f64, v0: f64, dv0: f64, t_end: f64, steps: usize) -> (f64, f64) {
    let h = t_end / steps as f64;
    let rhs = |t: f64, y: [f64; 2]| [y[1], f(t) - t.powi(m as i32) * rho * rho * y[0]];
    let mut y = [v0, dv0];
    for k in 0..steps {
        let t = k as f64 * h;
        let k1 = rhs(t, y);
        let k2 = rhs(t + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
        let k3 = rhs(t + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
        let k4 = rhs(t + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    (y[0], y[1])
}

#[test]
fn symbols_match_subordination_oracle() {
    for l in [1, 2, 3] {
        let sym = PropagatorSymbols::new(l).unwrap();
        for &t in &[0.1, 0.5, 1.0, 1.7] {
            for &rho in &[0.0, 0.3, 2.0, 7.0, 15.0] {
                let (v1, v2) = sym.pair(t, rho).unwrap();
                let o1 = subordination_v1(l, t, rho).unwrap();
                let o2 = subordination_v2(l, t, rho).unwrap();
                assert!((v1 - o1).abs() < 1e-9 * (1.0 + o1.abs()), "V1 l={l} t={t} ρ={rho}: {v1} vs {o1}");
                assert!((v2 - o2).abs() < 1e-9 * (1.0 + o2.abs()), "V2 l={l} t={t} ρ={rho}: {v2} vs {o2}");
            }
        }
    }
}

#[test]
fn symbols_are_real_and_normalized() {
    for l in [1, 2] {
        let sym = PropagatorSymbols::new(l).unwrap();
        for &(t, rho) in &[(0.4, 3.0), (1.0, 10.0), (2.0, 9.0)] {
            let a = sym.v1(t, rho).unwrap();
            let b = sym.v2(t, rho).unwrap();
            assert!(a.im.abs() < 1e-12 * (1.0 + a.re.abs()), "{a}");
            assert!(b.im.abs() < 1e-12 * (1.0 + b.re.abs()), "{b}");
        }
        let (v1, v2) = sym.pair(1e-8, 5.0).unwrap();
        assert!((v1 - 1.0).abs() < 1e-12 && (v2 - 1e-8).abs() < 1e-18);
        let (d1, d2) = sym.pair_deriv(1e-8, 5.0).unwrap();
        assert!(d1.abs() < 1e-6 && (d2 - 1.0).abs() < 1e-10);
    }
}

#[test]
fn symbols_cover_the_asymptotic_regime() {
    // |z| well beyond the series range
    let sym = PropagatorSymbols::new(1).unwrap();
    let t = 1.5;
    let rho = 45.0;
    assert!(sym.z(t, rho).norm() > 50.0);
    let (v1, v2) = sym.pair(t, rho).unwrap();
    assert!((v1 - subordination_v1(1, t, rho).unwrap()).abs() < 1e-6);
    assert!((v2 - subordination_v2(1, t, rho).unwrap()).abs() < 1e-6);
}

#[test]
fn ode_residual_and_wronskian() {
    for l in [1, 2, 3] {
        let sym = PropagatorSymbols::new(l).unwrap();
        let m = sym.m();
        for &t in &[0.3, 0.9, 1.6] {
            for &rho in &[0.5, 4.0, 12.0] {
                let h = 1e-3;
                let v = |s: f64| sym.pair(s, rho).unwrap();
                let (a0, b0) = v(t);
                let (am, bm) = v(t - h);
                let (ap, bp) = v(t + h);
                let scale = 1.0 + rho * rho * t.powi(m as i32);
                let r1 = (ap - 2.0 * a0 + am) / (h * h) + t.powi(m as i32) * rho * rho * a0;
                let r2 = (bp - 2.0 * b0 + bm) / (h * h) + t.powi(m as i32) * rho * rho * b0;
                assert!(r1.abs() < 1e-4 * scale * scale, "l={l} t={t} ρ={rho}: {r1}");
                assert!(r2.abs() < 1e-4 * scale * scale, "l={l} t={t} ρ={rho}: {r2}");
                let (d1, d2) = sym.pair_deriv(t, rho).unwrap();
                assert!((d1 - (ap - am) / (2.0 * h)).abs() < 1e-5 * scale, "dv1");
                assert!((d2 - (bp - bm) / (2.0 * h)).abs() < 1e-5 * scale, "dv2");
                let w = a0 * d2 - b0 * d1;
                assert!((w - 1.0).abs() < 1e-10, "Wronskian {w}");
            }
        }
    }
}

#[test]
fn rejects_bad_arguments() {
    assert!(PropagatorSymbols::new(0).is_err());
    assert!(v1_symbol(1, -1.0, 1.0).is_err());
    assert!(v2_symbol(1, 1.0, f64::NAN).is_err());
}

fn single_mode(space: &TorusGrid, k: usize) -> SpatialField {
    let l = space.period()[0];
    space.sample(|x| (2.0 * std::f64::consts::PI * k as f64 * x[0] / l).cos())
}

#[test]
fn duhamel_matches_ode_integrator() {
    for l in [1u32, 2] {
        let m = 2 * l - 1;
        let space = TorusGrid::cube(1, 16, 2.0 * std::f64::consts::PI).unwrap();
        let k = 3;
        let rho = k as f64;
        let base = single_mode(&space, k);
        let grid = TimeGrid::uniform(0.0, 1.5, 6, 12).unwrap();
        let fs = TimeSeries::from_fn(grid.clone(), |t| base.scaled((2.0 * t).cos() + t * t)).unwrap();
        let evals = [0.37, 0.75, 1.5];
        let out = duhamel_t(l, &fs, &evals).unwrap();
        for (i, &t) in evals.iter().enumerate() {
            let (want, _) = rk4_mode(m, rho, |s| (2.0 * s).cos() + s * s, 0.0, 0.0, t, 20000);
            let got = out[i].values[0] / base.values[0];
            assert!((got - want).abs() < 1e-8, "l={l} t={t}: {got} vs {want}");
        }
    }
}

#[test]
fn duhamel_small_time_taylor() {
    let space = TorusGrid::cube(1, 8, 2.0 * std::f64::consts::PI).unwrap();
    let base = single_mode(&space, 2);
    for l in [1u32, 2] {
        let grid = TimeGrid::uniform(0.0, 0.05, 1, 10).unwrap();
        let fs = TimeSeries::from_fn(grid.clone(), |_| base.clone()).unwrap();
        for &t in &[0.01, 0.05] {
            let out = duhamel_t(l, &fs, &[t]).unwrap();
            let got = out[0].values[0] / base.values[0];
            let rem = (got - t * t / 2.0).abs();
            assert!(rem < 4.0 * 4.0 * t.powi(2 * l as i32 + 3), "l={l} t={t}: remainder {rem}");
        }
    }
}

#[test]
fn plan_slope_and_homogeneous() {
    let l = 1;
    let space = TorusGrid::cube(1, 16, 2.0 * std::f64::consts::PI).unwrap();
    let base = single_mode(&space, 2);
    let grid = TimeGrid::uniform(0.0, 1.0, 4, 12).unwrap();
    let fs = TimeSeries::from_fn(grid.clone(), |t| base.scaled(1.0 + t)).unwrap();
    let plan = HyperbolicPlan::build(l, &space, &grid, &[0.6, 1.0]).unwrap();
    let (_, d) = plan.apply(&spectra_of(&fs.fields).unwrap());
    let (_, dv) = rk4_mode(1, 2.0, |s| 1.0 + s, 0.0, 0.0, 0.6, 20000);
    let got = inverse_transform(&SpectralField::new(space.clone(), d[0].clone()).unwrap()).unwrap();
    assert!((got.values[0] / base.values[0] - dv).abs() < 1e-8);

    let phi = forward_transform(&base).unwrap();
    let psi = forward_transform(&base.scaled(0.5)).unwrap();
    let (_, at_evals) = plan.homogeneous(&phi.coeffs, &psi.coeffs);
    let direct = homogeneous_evolve(l, &phi, &psi, 1.0).unwrap();
    let via_plan = inverse_transform(&SpectralField::new(space.clone(), at_evals[1].clone()).unwrap()).unwrap();
    for (a, b) in direct.values.iter().zip(&via_plan.values) {
        assert!((a - b).abs() < 1e-13);
    }
    let (w, _) = rk4_mode(1, 2.0, |_| 0.0, 1.0, 0.5, 1.0, 20000);
    assert!((direct.values[0] / base.values[0] - w).abs() < 1e-9);
}

#[test]
fn operator_probe_is_finite_and_bounded() {
    let space = TorusGrid::cube(2, 32, 16.0).unwrap();
    let g = space.sample(|x| (-(x[0] * x[0] + x[1] * x[1])).exp());
    for &t in &[0.2, 1.0] {
        let (r1, r2) = operator_norm_probe(1, &g, 2.0, t).unwrap();
        // the symbols are bounded in modulus by their ρ = 0 values
        assert!(r1 <= 1.0 + 1e-12 && r1 > 0.0, "{r1}");
        assert!(r2 <= 1.0 + 1e-12 && r2 > 0.0, "{r2}");
        let (q1, q2) = operator_norm_probe(1, &g, 4.0, t).unwrap();
        assert!(q1.is_finite() && q2.is_finite());
    }
    assert!(operator_norm_probe(1, &space.zeros(), 2.0, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn wronskian_is_one(l in 1u32..4, t in 0.05f64..1.8, rho in 0.0f64..14.0) {
        let sym = PropagatorSymbols::new(l).unwrap();
        let (a, b) = sym.pair(t, rho).unwrap();
        let (da, db) = sym.pair_deriv(t, rho).unwrap();
        prop_assert!((a * db - b * da - 1.0).abs() < 1e-9);
    }
}
