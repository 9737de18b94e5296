//! Linear elliptic Duhamel solve for a bump source, its norms and the
//! slope it leaves at the interface.

use tricomi::elliptic::{solve_inhomogeneous, DuhamelQuadrature};
use tricomi::spectral_grid::{lp_norm, TimeGrid, TimeSeries, TorusGrid};

fn main() -> tricomi::error::Result<()> {
    let space = TorusGrid::cube(2, 32, 16.0)?;
    let shape = space.sample(|x| (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp());
    let g = TimeSeries::from_fn(TimeGrid::graded(0.0, 1.0, 6, 10)?, |t| shape.scaled((t * (1.0 - t)).max(0.0)))?;
    let quad = DuhamelQuadrature::default();
    let taus: Vec<f64> = (0..=8).map(|k| 0.25 * k as f64).collect();
    // m = 1 (l = 1), weight τ^ν with ν = 1
    let sol = solve_inhomogeneous(1, 1.0, &g, &quad, &taus)?;
    for row in sol.norm_table(4.0, 0.5)? {
        println!("τ = {:.2}: L2 {:.6e}  L4 {:.6e}  H^0.5 {:.6e}", row.tau, row.l2, row.lp, row.hs);
    }
    println!("‖∂_t w(0)‖₂ = {:.6e}", lp_norm(&sol.initial_slope, 2.0)?);
    Ok(())
}
