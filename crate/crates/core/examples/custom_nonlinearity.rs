//! A user-supplied nonlinearity: f = κ χ_R sin(u), checked against its
//! declared growth bound before solving.

use std::sync::Arc;

use tricomi::admissibility::Scalar;
use tricomi::error::Result;
use tricomi::semilinear::{check_growth_contract, solve_mixed, spatial_cutoff, Nonlinearity, ProblemSpec, SolveConfig};
use tricomi::spectral_grid::{SpatialField, TorusGrid};

struct Sine {
    kappa: f64,
}

impl Nonlinearity for Sine {
    fn name(&self) -> String {
        format!("{} sin(u)", self.kappa)
    }
    fn mu(&self) -> Scalar {
        Scalar::int(1)
    }
    fn support_radius(&self) -> f64 {
        4.0
    }
    fn growth_constant(&self) -> f64 {
        self.kappa.abs()
    }
    fn eval(&self, _t: f64, u: &SpatialField) -> Result<SpatialField> {
        let cut = u.grid.sample(|x| spatial_cutoff(x, 4.0));
        let mut out = u.clone();
        for (v, c) in out.values.iter_mut().zip(&cut.values) {
            *v = self.kappa * c * v.sin();
        }
        Ok(out)
    }
    fn pointwise(&self, _t: f64, x: &[f64], u: f64) -> Option<f64> {
        Some(self.kappa * spatial_cutoff(x, 4.0) * u.sin())
    }
}

fn main() -> Result<()> {
    let space = TorusGrid::cube(2, 32, 16.0)?;
    let f = Sine { kappa: 2.0 };
    check_growth_contract(&f, &space, (-1.0, 0.5), 256, 3)?;
    let name = f.name();
    let phi = space.sample(|x| (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp());
    let sol = solve_mixed(&ProblemSpec::new(1, Scalar::ratio(1, 2), phi, Arc::new(f)), &SolveConfig::default())?;
    println!("{name}: case {}, T0 = {}, final L2 {:.6e}", sol.case.case_id, sol.hyperbolic.t0, sol.norms.last().unwrap().l2);
    Ok(())
}
