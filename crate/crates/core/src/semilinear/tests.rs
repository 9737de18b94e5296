use super::*;

use crate::elliptic::{solve_inhomogeneous, DuhamelQuadrature};
use crate::spectral_grid::{TimeSeries, TorusGrid};

fn grid(points: usize) -> TorusGrid {
    TorusGrid::cube(2, points, 16.0).unwrap()
}

fn gaussian(g: &TorusGrid, amp: f64, center: [f64; 2], width: f64) -> SpatialField {
    g.sample(|x| {
        let r2 = (x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2);
        amp * (-r2 / (2.0 * width * width)).exp()
    })
}

fn l2_rel(a: &SpatialField, b: &SpatialField) -> f64 {
    lp_norm(&a.axpy(-1.0, b).unwrap(), 2.0).unwrap() / lp_norm(b, 2.0).unwrap()
}

fn spec(g: &TorusGrid, f: Arc<dyn Nonlinearity>) -> ProblemSpec {
    ProblemSpec::new(1, Scalar::ratio(1, 2), gaussian(g, 0.5, [0.0, 0.0], 1.0), f)
}

fn manufactured(g: &TorusGrid, horizon: f64) -> Arc<Manufactured> {
    let phi = gaussian(g, 0.5, [0.0, 0.0], 1.0);
    let eta = gaussian(g, 0.3, [1.0, -0.5], 1.2);
    Arc::new(Manufactured::new(1, &phi, &eta, horizon, 0.5, 4.0).unwrap())
}

/// `f = g(t, x)`, independent of `u`.
struct SourceOnly;

impl Nonlinearity for SourceOnly {
    fn name(&self) -> String {
        "source".into()
    }
    fn mu(&self) -> Scalar {
        Scalar::int(0)
    }
    fn support_radius(&self) -> f64 {
        4.0
    }
    fn growth_constant(&self) -> f64 {
        2.0
    }
    fn eval(&self, t: f64, u: &SpatialField) -> Result<SpatialField> {
        let g = &u.grid;
        Ok(g.sample(|x| self.pointwise(t, x, 0.0).unwrap()))
    }
    fn pointwise(&self, t: f64, x: &[f64], _u: f64) -> Option<f64> {
        Some((1.0 + t) * spatial_cutoff(x, 4.0))
    }
}

/// Claims a growth constant it does not satisfy.
struct Liar;

impl Nonlinearity for Liar {
    fn name(&self) -> String {
        "liar".into()
    }
    fn mu(&self) -> Scalar {
        Scalar::int(1)
    }
    fn support_radius(&self) -> f64 {
        4.0
    }
    fn growth_constant(&self) -> f64 {
        0.1
    }
    fn eval(&self, _t: f64, u: &SpatialField) -> Result<SpatialField> {
        Ok(u.clone())
    }
    fn pointwise(&self, _t: f64, x: &[f64], u: f64) -> Option<f64> {
        Some(spatial_cutoff(x, 4.0) * u * u)
    }
}

#[test]
fn cutoff_profiles_have_the_stated_plateaus() {
    for c in [CutoffProfile::Smoothstep, CutoffProfile::Exponential] {
        assert_eq!(c.eval(-0.5), 1.0);
        assert_eq!(c.eval(-1.0), 1.0);
        assert_eq!(c.eval(-2.0), 0.0);
        assert_eq!(c.eval(-3.0), 0.0);
        assert!((c.eval(-1.5) - 0.5).abs() < 1e-14);
        let mut prev = 1.0;
        for k in 0..=100 {
            let v = c.eval(-1.0 - k as f64 / 100.0);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
        assert_eq!(CutoffProfile::parse(c.name()).unwrap(), c);
    }
}

#[test]
fn diagnostics_of_synthetic_traces() {
    let r = contraction_diagnostics(&IterationTrace::from_diffs(&[0.0, 0.0, 0.0]));
    assert_eq!(r.fitted_ratio, None);
    assert!(r.converged && !r.recommend_shrink);

    let geo: Vec<f64> = (0..12).map(|k| 2.0 * 0.3f64.powi(k)).collect();
    let t = IterationTrace::from_diffs(&geo);
    let r = contraction_diagnostics(&t);
    assert!((r.fitted_ratio.unwrap() - 0.3).abs() < 1e-6);
    assert!(!r.recommend_shrink);
    assert!(t.ratios.iter().all(|q| (q - 0.3).abs() < 1e-12));

    let div: Vec<f64> = (0..6).map(|k| 1.5f64.powi(k)).collect();
    let r = contraction_diagnostics(&IterationTrace::from_diffs(&div));
    assert!(r.recommend_shrink && r.fitted_ratio.unwrap() > 1.4);
}

#[test]
fn zero_nonlinearity_gives_homogeneous_evolutions() {
    let g = grid(16);
    let p = spec(&g, Arc::new(ZeroNonlinearity));
    let sol = solve_mixed(&p, &SolveConfig::default()).unwrap();
    assert!(sol.elliptic.trace.diffs.is_empty() && sol.hyperbolic.trace.diffs.is_empty());
    let phi_hat = forward_transform(&p.phi).unwrap();
    for (tau, f) in sol.elliptic.taus.iter().zip(&sol.elliptic.snapshots) {
        let ubar = inverse_transform(&homogeneous_evolve(1, &phi_hat, *tau).unwrap()).unwrap();
        assert!(l2_rel(f, &ubar) < 1e-13);
    }
    let psi_hat = forward_transform(&sol.slope_at_zero).unwrap();
    for (t, f) in sol.hyperbolic.times.iter().zip(&sol.hyperbolic.snapshots) {
        let w1 = crate::hyperbolic::homogeneous_evolve(1, &phi_hat, &psi_hat, *t).unwrap();
        assert!(l2_rel(f, &w1) < 1e-12, "t = {t}");
    }
    assert!(sol.patch.value_jump <= 1e-8);
    assert!(sol.patch.slope_mismatch <= 1e-8, "{:?}", sol.patch);
}

#[test]
fn source_only_nonlinearity_needs_one_correction() {
    let g = grid(16);
    let p = spec(&g, Arc::new(SourceOnly));
    let cfg = SolveConfig::default();
    let side = solve_elliptic_side(&p, &cfg).unwrap();
    assert_eq!(side.trace.diffs, vec![0.0]);
    // ū_T against an independent Duhamel solve with the same source
    let t0 = side.t0;
    let source_grid = TimeGrid::uniform(0.0, 2.0 * t0, 8, 10).unwrap();
    let src = TimeSeries::from_fn(source_grid, |tau| {
        let f = SourceOnly.eval(-tau, &g.zeros()).unwrap().scaled(cfg.cutoff.eval(-tau / t0));
        let mut hat = forward_transform(&f).unwrap();
        dealias(&mut hat);
        inverse_transform(&hat).unwrap()
    })
    .unwrap();
    let quad = DuhamelQuadrature {
        sigma_cutoff: 2.0 * t0,
        ..DuhamelQuadrature::default()
    };
    let tau = t0 / 2.0;
    let w = solve_inhomogeneous(1, 0.0, &src, &quad, &[tau]).unwrap();
    let i = side.taus.iter().position(|&x| x == tau).unwrap();
    let ubar = inverse_transform(&homogeneous_evolve(1, &forward_transform(&p.phi).unwrap(), tau).unwrap()).unwrap();
    let ut = side.snapshots[i].axpy(-1.0, &ubar).unwrap();
    assert!(l2_rel(&ut, &w.snapshots[0]) < 1e-4, "{}", l2_rel(&ut, &w.snapshots[0]));
}

#[test]
fn manufactured_solution_is_recovered_with_either_cutoff() {
    let g = grid(32);
    let mf = manufactured(&g, 0.25);
    let p = ProblemSpec::new(1, Scalar::ratio(1, 2), mf.exact(0.0).unwrap(), mf.clone());
    for cutoff in [CutoffProfile::Smoothstep, CutoffProfile::Exponential] {
        let cfg = SolveConfig {
            cutoff,
            max_shrinks: 0,
            ..SolveConfig::default()
        };
        let sol = solve_mixed(&p, &cfg).unwrap();
        for (&t, f) in sol.times.iter().zip(&sol.snapshots) {
            let e = l2_rel(f, &mf.exact(t).unwrap());
            assert!(e < 1e-4, "{cutoff:?}: t = {t}, error {e}");
        }
        let slope_err = l2_rel(&sol.slope_at_zero, &mf.exact_slope().unwrap());
        // limited by the 2/3 truncation of the η-spectrum in the source
        assert!(slope_err < 1e-5, "{slope_err}");
        assert!(sol.patch.slope_mismatch <= 1e-6, "{:?}", sol.patch);
        let r = contraction_diagnostics(&sol.elliptic.trace).fitted_ratio.unwrap();
        assert!(r <= 0.5, "{r}");
        assert!(sol.elliptic.fixed_point_residual <= 10.0 * cfg.picard_tol, "{}", sol.elliptic.fixed_point_residual);
    }
}

#[test]
fn manufactured_horizon_is_enforced() {
    let g = grid(16);
    let mf = manufactured(&g, 0.25);
    let p = ProblemSpec::new(1, Scalar::ratio(1, 2), mf.exact(0.0).unwrap(), mf);
    let cfg = SolveConfig {
        t0: 0.2,
        ..SolveConfig::default()
    };
    assert!(matches!(solve_elliptic_side(&p, &cfg), Err(TricomiError::Domain(_))));
}

#[test]
fn hyperbolic_ratio_drops_when_t0_halves() {
    let g = grid(16);
    let p = ProblemSpec::new(
        1,
        Scalar::ratio(1, 2),
        gaussian(&g, 0.5, [0.0, 0.0], 1.0),
        Arc::new(LinearNonlinearity {
            coefficient: 4.0,
            radius: 4.0,
        }),
    );
    let psi = gaussian(&g, 0.2, [0.5, 0.0], 1.0);
    let cfg = SolveConfig::default();
    let ratios: Vec<f64> = [0.4, 0.2, 0.1]
        .iter()
        .map(|&t0| {
            let side = hyperbolic_attempt(&p.phi, &psi, &p, &cfg, t0, &[2.0]).unwrap();
            contraction_diagnostics(&side.trace).fitted_ratio.unwrap()
        })
        .collect();
    for w in ratios.windows(2) {
        assert!(w[1] <= 0.5 * w[0], "{ratios:?}");
    }
}

#[test]
fn elliptic_ratio_never_grows_under_shrinking() {
    let g = grid(16);
    let p = spec(
        &g,
        Arc::new(PowerNonlinearity {
            coefficient: 4.0,
            radius: 4.0,
            mu: Scalar::int(2),
        }),
    );
    let (profile, case) = p.admit().unwrap();
    let mon = case.target.monitored_exponents(&profile);
    let cfg = SolveConfig::default();
    let ratios: Vec<f64> = [0.5, 0.25, 0.125]
        .iter()
        .map(|&t0| contraction_diagnostics(&elliptic_attempt(&p, &cfg, t0, &mon).unwrap().trace).fitted_ratio.unwrap())
        .collect();
    for w in ratios.windows(2) {
        assert!(w[1] <= w[0], "{ratios:?}");
    }
}

#[test]
fn power_nonlinearity_mixed_solve_contracts() {
    let g = grid(16);
    let p = spec(
        &g,
        Arc::new(PowerNonlinearity {
            coefficient: 1.0,
            radius: 4.0,
            mu: Scalar::int(2),
        }),
    );
    let sol = solve_mixed(&p, &SolveConfig::default()).unwrap();
    assert_eq!(sol.case.case_id, 6);
    for trace in [&sol.elliptic.trace, &sol.hyperbolic.trace] {
        let r = contraction_diagnostics(trace);
        assert!(r.converged && r.fitted_ratio.unwrap() <= 0.5, "{r:?}");
        assert_eq!(trace.attempts.last().unwrap().t0, trace.t0);
    }
    assert!(sol.norms.iter().all(|n| n.l2.is_finite() && n.lp0.is_finite() && n.hs.is_finite()));
    assert!(sol.times.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(sol.times.iter().filter(|&&t| t == 0.0).count(), 1);
    assert!(sol.patch.slope_mismatch <= 1e-6, "{:?}", sol.patch);
}

#[test]
fn strong_coupling_triggers_shrinking_then_failure() {
    let g = grid(16);
    let p = spec(
        &g,
        Arc::new(LinearNonlinearity {
            coefficient: 60.0,
            radius: 4.0,
        }),
    );
    let cfg = SolveConfig {
        t0: 1.0,
        max_shrinks: 5,
        ..SolveConfig::default()
    };
    let side = solve_elliptic_side(&p, &cfg).unwrap();
    assert!(side.t0 < 1.0);
    assert!(side.trace.attempts.len() > 1);
    let stuck = SolveConfig {
        max_shrinks: 0,
        ..cfg
    };
    match solve_elliptic_side(&p, &stuck) {
        Err(TricomiError::NonContraction { diffs, .. }) => assert!(!diffs.is_empty()),
        other => panic!("expected non-contraction, got {other:?}"),
    }
}

#[test]
fn inadmissible_profiles_are_refused_with_the_gate_reason() {
    let g = grid(16);
    let p = ProblemSpec::new(
        2,
        Scalar::ratio(1, 2),
        gaussian(&g, 0.5, [0.0, 0.0], 1.0),
        Arc::new(PowerNonlinearity {
            coefficient: 1.0,
            radius: 4.0,
            mu: Scalar::int(3),
        }),
    );
    let gate = crate::admissibility::solvability_gate(&p.profile().unwrap());
    assert!(!gate.admissible);
    match solve_mixed(&p, &SolveConfig::default()) {
        Err(TricomiError::Domain(msg)) => assert!(msg.contains(&gate.reason), "{msg}"),
        other => panic!("expected refusal, got {other:?}"),
    }
}

#[test]
fn growth_contract_violations_are_reported() {
    let g = grid(16);
    let p = spec(&g, Arc::new(Liar));
    assert!(matches!(
        solve_elliptic_side(&p, &SolveConfig::default()),
        Err(TricomiError::ContractViolation(_))
    ));
    for f in [
        Arc::new(LinearNonlinearity { coefficient: 2.0, radius: 3.0 }) as Arc<dyn Nonlinearity>,
        Arc::new(PowerNonlinearity { coefficient: 2.0, radius: 3.0, mu: Scalar::ratio(5, 3) }),
    ] {
        check_growth_contract(f.as_ref(), &g, (-1.0, 1.0), 500, 3).unwrap();
    }
}

#[test]
fn config_validation_names_the_constraint() {
    let bad = SolveConfig {
        shrink_factor: 1.5,
        ..SolveConfig::default()
    };
    let msg = bad.validate().unwrap_err().to_string();
    assert!(msg.contains("shrink_factor"), "{msg}");
    assert!(SolveConfig { t0: 0.0, ..SolveConfig::default() }.validate().is_err());
}

#[test]
fn norms_converge_under_period_doubling() {
    // λ(τ|ξ|^{2/3}) is not smooth at ξ = 0, so the periodic error decays only
    // algebraically in the period (about L^{-8/3}); each doubling must cut the
    // change in the norms by at least 4
    let run = |points: usize, period: f64| {
        let g = TorusGrid::cube(2, points, period).unwrap();
        solve_mixed(&spec(&g, Arc::new(ZeroNonlinearity)), &SolveConfig::default()).unwrap()
    };
    let runs = [run(16, 8.0), run(32, 16.0), run(64, 32.0)];
    for k in [0, runs[0].norms.len() - 1] {
        let l2: Vec<f64> = runs.iter().map(|r| r.norms[k].l2).collect();
        let (d1, d2) = ((l2[1] - l2[0]).abs(), (l2[2] - l2[1]).abs());
        assert!(d2 * 4.0 <= d1, "t = {}: changes {d1:.3e} then {d2:.3e}", runs[0].norms[k].t);
    }
}
