//! Row-integral identity and one bound family fitted and validated.

use tricomi::kernel_verifier::{check_row_integral, run_family_with_refinement, BoundFamily, ProbeGrid, ProbeQuadrature};

fn main() -> tricomi::error::Result<()> {
    for m in [0, 1, 3] {
        let r = check_row_integral(m, 1.5, 1.0)?;
        println!("m={m}: ∫K̂ dσ = {:.15}, 1 − λ(ts) = {:.15}", r.measured, r.exact);
    }

    let grid = ProbeGrid::log(0.5, 4.0, 8, 0.05, 0.5, 6)?;
    let rep = run_family_with_refinement(BoundFamily::P2, 1, 1.0, &grid, &ProbeQuadrature::default())?;
    println!("{}", rep.base.summary());
    println!("refinement drift {:.4} ({})", rep.drift(), if rep.passed() { "stable" } else { "unstable" });
    Ok(())
}
