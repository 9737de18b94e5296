//! The elliptic profile λ and Kummer's function on the imaginary axis.

use num_complex::Complex64;
use tricomi::specfun::{kummer_m, verify_specfun, LambdaProfile};

fn main() -> tricomi::error::Result<()> {
    println!("{:>8} {:>14} {:>14} {:>14}", "t", "λ₁(t)", "λ₁'(t)", "ln λ₁(t)");
    let p = LambdaProfile::new(1);
    for t in [0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0] {
        let e = p.eval(t)?;
        println!("{t:>8} {:>14.6e} {:>14.6e} {:>14.6}", e.value, e.deriv, e.log_value);
    }

    // V₁'s Kummer factor for l = 1 across the series/asymptotic switch
    let g = 1.0 / 6.0;
    for y in [1.0, 10.0, 25.0, 45.0] {
        let m = kummer_m(g, 2.0 * g, Complex64::new(0.0, y))?;
        println!("M(1/6, 1/3, {y}i) = {:.12} {:+.12}i", m.re, m.im);
    }

    let report = verify_specfun(true)?;
    let failed = report.properties.iter().filter(|c| !c.passed).count();
    println!("quick sweep: {} properties, {failed} failed", report.properties.len());
    Ok(())
}
