//! Hyperbolic symbols against the subordination oracle, homogeneous
//! evolution, the Duhamel operator and operator-norm probes.

use tricomi::hyperbolic::{duhamel_t, homogeneous_evolve, operator_norm_probe, subordination_v1, PropagatorSymbols};
use tricomi::spectral_grid::{forward_transform, lp_norm, SpectralField, TimeGrid, TimeSeries, TorusGrid};

fn main() -> tricomi::error::Result<()> {
    let sym = PropagatorSymbols::new(1)?;
    for (t, rho) in [(0.5, 2.0), (1.0, 8.0), (1.5, 20.0)] {
        let (v1, v2) = sym.pair(t, rho)?;
        println!("t={t} ρ={rho}: V1 = {v1:+.12}, oracle {:+.12}, V2 = {v2:+.12}", subordination_v1(1, t, rho)?);
    }

    let space = TorusGrid::cube(2, 32, 16.0)?;
    let phi = space.sample(|x| (-(x[0] * x[0] + x[1] * x[1])).exp());
    let phi_hat = forward_transform(&phi)?;
    let zero = SpectralField::zeros(&space);
    for t in [0.25, 0.5, 1.0] {
        let u = homogeneous_evolve(1, &phi_hat, &zero, t)?;
        let (r1, r2) = operator_norm_probe(1, &phi, 2.0, t)?;
        println!("t={t}: ‖u‖₂ = {:.6e}, ‖V1φ‖/‖φ‖ = {r1:.6}, ‖V2φ‖/(t‖φ‖) = {r2:.6}", lp_norm(&u, 2.0)?);
    }

    let f = TimeSeries::from_fn(TimeGrid::uniform(0.0, 1.0, 4, 8)?, |t| phi.scaled(1.0 + t))?;
    let v = duhamel_t(1, &f, &[0.5, 1.0])?;
    println!("‖𝒯f(1)‖₂ = {:.6e}", lp_norm(&v[1], 2.0)?);
    Ok(())
}
