//! Recovering a manufactured two-sided solution through the full solver.

use std::sync::Arc;

use tricomi::admissibility::Scalar;
use tricomi::semilinear::{solve_mixed, Manufactured, ProblemSpec, SolveConfig};
use tricomi::spectral_grid::{lp_norm, TorusGrid};

fn main() -> tricomi::error::Result<()> {
    let space = TorusGrid::cube(2, 32, 16.0)?;
    let phi = space.sample(|x| 0.5 * (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp());
    let eta = space.sample(|x| 0.3 * (-((x[0] - 1.0).powi(2) + (x[1] + 0.5).powi(2)) / 2.88).exp());
    let mf = Arc::new(Manufactured::new(1, &phi, &eta, 0.25, 0.5, 4.0)?);
    let problem = ProblemSpec::new(1, Scalar::ratio(1, 2), phi, mf.clone());
    let sol = solve_mixed(&problem, &SolveConfig::default())?;
    let mut worst = 0.0f64;
    for (&t, u) in sol.times.iter().zip(&sol.snapshots) {
        let exact = mf.exact(t)?;
        worst = worst.max(lp_norm(&u.axpy(-1.0, &exact)?, 2.0)? / lp_norm(&exact, 2.0)?);
    }
    println!("{} snapshots on [{}, {}]", sol.times.len(), sol.times[0], sol.times.last().unwrap());
    println!("max relative L2 error {worst:.3e}, slope mismatch {:.3e}", sol.patch.slope_mismatch);
    Ok(())
}
