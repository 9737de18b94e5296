//! Exponent profiles, the solvability gate and the case labels.

use tricomi::admissibility::{classify_case, exponent_profile, solvability_gate, Scalar};

fn main() -> tricomi::error::Result<()> {
    for (n, l, s, mu) in [(2, 1, "1/2", "2"), (2, 1, "1/2", "1"), (2, 1, "1/2", "1/2"), (2, 2, "1/2", "3"), (2, 1, "1/2", "5/3")] {
        let s: Scalar = s.parse()?;
        let mu: Scalar = mu.parse()?;
        let p = exponent_profile(n, l, s, mu)?;
        let gate = solvability_gate(&p);
        print!("(n={n}, l={l}, s={s}, μ={mu}): p0 = {}, Q0 = {} → ", p.p0.to_f64(), p.q_hom0);
        if !gate.admissible {
            println!("rejected: {}", gate.reason);
            continue;
        }
        let c = classify_case(&p)?;
        println!("case {} in {}", c.case_id, c.target.description());
    }
    Ok(())
}
