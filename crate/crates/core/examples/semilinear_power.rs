//! Mixed-type semilinear solve with f = κ χ_R u|u|, shrinking T0 until the
//! iteration contracts.

use std::sync::Arc;

use tricomi::admissibility::Scalar;
use tricomi::semilinear::{contraction_diagnostics, solve_mixed, PowerNonlinearity, ProblemSpec, SolveConfig};
use tricomi::spectral_grid::TorusGrid;

fn main() -> tricomi::error::Result<()> {
    let space = TorusGrid::cube(2, 32, 16.0)?;
    let phi = space.sample(|x| (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp());
    let f = Arc::new(PowerNonlinearity {
        coefficient: 8.0,
        radius: 4.0,
        mu: Scalar::int(2),
    });
    let problem = ProblemSpec::new(1, Scalar::ratio(1, 2), phi, f);
    let cfg = SolveConfig { t0: 2.0, ..SolveConfig::default() };
    let sol = solve_mixed(&problem, &cfg)?;
    println!("case {} ({})", sol.case.case_id, sol.case.target.description());
    for a in &sol.elliptic.trace.attempts {
        println!("elliptic attempt T0 = {}: {} iterations, ratio {:?}", a.t0, a.iterations, a.fitted_ratio);
    }
    let hy = contraction_diagnostics(&sol.hyperbolic.trace);
    println!("hyperbolic side T0 = {}, ratio {:?}", sol.hyperbolic.t0, hy.fitted_ratio);
    println!("slope mismatch at t = 0: {:.3e}", sol.patch.slope_mismatch);
    for n in sol.norms.iter().step_by(10) {
        println!("t = {:+.4}: L2 {:.6e}  Lp0 {:.6e}", n.t, n.l2, n.lp0);
    }
    Ok(())
}
