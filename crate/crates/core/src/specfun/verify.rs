//! Residual and property sweeps over `λ` and Kummer's `M`.

use num_complex::Complex64;

use super::{kummer_m, LambdaProfile};
use crate::error::Result;

/// One residual sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualRow {
    pub function: &'static str,
    pub params: String,
    pub point: String,
    pub residual: f64,
}

/// Outcome of one sampled property.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCheck {
    pub name: String,
    pub passed: bool,
    /// Fitted constant, where the property has one.
    pub fitted: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecfunReport {
    pub rows: Vec<ResidualRow>,
    pub properties: Vec<PropertyCheck>,
}

/// Residual thresholds of the sweep.
pub const LAMBDA_ODE_TOL: f64 = 1e-6;
pub const KUMMER_ODE_TOL: f64 = 1e-6;

impl SpecfunReport {
    pub fn max_residual(&self, function: &str) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.function == function)
            .fold(0.0, |m, r| m.max(r.residual))
    }

    pub fn passed(&self) -> bool {
        self.properties.iter().all(|p| p.passed)
    }

    /// CSV with columns `function,m_or_params,t_or_z,residual`.
    pub fn csv(&self) -> String {
        let mut out = String::from("function,m_or_params,t_or_z,residual\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{:.17e}\n", r.function, r.params, r.point, r.residual));
        }
        out
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
        .collect()
}

/// `f'` by Richardson-extrapolated central differences.
fn richardson(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn lambda_ode_rows(m: u32, ts: &[f64]) -> Result<Vec<ResidualRow>> {
    let p = LambdaProfile::new(m);
    ts.iter()
        .map(|&t| {
            let dl = |x: f64| p.eval(x).map(|e| e.deriv).unwrap_or(f64::NAN);
            let d2 = richardson(dl, t, 1e-2 * t);
            let lam = p.eval(t)?.value;
            let res = (d2 - t.powi(m as i32) * lam).abs() / (1.0 + d2.abs());
            Ok(ResidualRow {
                function: "lambda_ode",
                params: format!("m={m}"),
                point: format!("{t:.6e}"),
                residual: res,
            })
        })
        .collect()
}

fn kummer_rows(a: f64, b: f64, ys: &[f64]) -> Result<Vec<ResidualRow>> {
    let m = |y: f64| kummer_m(a, b, Complex64::new(0.0, y));
    let mut rows = Vec::new();
    for &y in ys {
        let z = Complex64::new(0.0, y);
        let f0 = m(y)?;
        // along the imaginary axis d/dy = i d/dz
        let h = 1e-3;
        let d1 = |h: f64| -> Result<Complex64> { Ok((m(y + h)? - m(y - h)?) / (2.0 * h)) };
        let d2 = |h: f64| -> Result<Complex64> { Ok((m(y + h)? - f0 * 2.0 + m(y - h)?) / (h * h)) };
        let dy = (d1(h / 2.0)? * 4.0 - d1(h)?) / 3.0;
        let dyy = (d2(h / 2.0)? * 4.0 - d2(h)?) / 3.0;
        let i = Complex64::new(0.0, 1.0);
        let fz = dy / i;
        let fzz = -dyy;
        let res = (z * fzz + (b - z) * fz - f0 * a).norm() / (1.0 + (z * fzz).norm());
        rows.push(ResidualRow {
            function: "kummer_ode",
            params: format!("a={a:.6};b={b:.6}"),
            point: format!("{y:.6e}i"),
            residual: res,
        });
    }
    Ok(rows)
}

/// Runs the sweep; `quick` thins every grid.
pub fn verify_specfun(quick: bool) -> Result<SpecfunReport> {
    let n = if quick { 12 } else { 48 };
    let ts = log_grid(1e-3, 10.0, n);
    let mut rows = Vec::new();
    let mut props = Vec::new();
    for m in [0u32, 1, 3, 5] {
        rows.extend(lambda_ode_rows(m, &ts)?);
    }
    let worst = rows.iter().fold(0.0f64, |a, r| a.max(r.residual));
    props.push(PropertyCheck {
        name: "lambda ODE residual".into(),
        passed: worst <= LAMBDA_ODE_TOL,
        fitted: None,
        detail: format!("max residual {worst:.3e} on t ∈ [1e-3, 10], m ∈ {{0,1,3,5}}"),
    });

    let dense = if quick { 400 } else { 2000 };
    for m in [0u32, 1, 3, 5] {
        let p = LambdaProfile::new(m);
        let mf = m as f64;
        let at0 = p.eval(0.0)?.value;
        props.push(PropertyCheck {
            name: format!("lambda(0) = 1, m={m}"),
            passed: (at0 - 1.0).abs() <= 1e-10,
            fitted: None,
            detail: format!("|λ(0) − 1| = {:.3e}", (at0 - 1.0).abs()),
        });

        // λ and −λ' nonincreasing
        let grid: Vec<f64> = (0..=dense).map(|k| 20.0 * k as f64 / dense as f64).collect();
        let evals = grid.iter().map(|&t| p.eval(t)).collect::<Result<Vec<_>>>()?;
        let mono = evals
            .windows(2)
            .all(|w| w[1].value <= w[0].value && -w[1].deriv <= -w[0].deriv);
        props.push(PropertyCheck {
            name: format!("monotonicity, m={m}"),
            passed: mono,
            fitted: None,
            detail: format!("{} samples on [0, 20]", grid.len()),
        });

        // sup (λ + |λ'|)(1+t)^M, stable under refinement
        for big_m in 1..=5 {
            let sup = |k: usize| -> Result<f64> {
                let mut best = 0.0f64;
                for j in 0..=k {
                    let t = 20.0 * j as f64 / k as f64;
                    let e = p.eval(t)?;
                    best = best.max((e.value + e.deriv.abs()) * (1.0 + t).powi(big_m));
                }
                Ok(best)
            };
            let (c1, c2) = (sup(dense / 2)?, sup(dense)?);
            let drift = (c2 - c1).abs() / c2;
            props.push(PropertyCheck {
                name: format!("decay, m={m}, M={big_m}"),
                passed: c2.is_finite() && drift <= 0.01,
                fitted: Some(c2),
                detail: format!("sup = {c2:.6e}, refinement drift {drift:.2e}"),
            });
        }

        // λ(a)/λ(b) ≤ (a/b)^{1/2} exp((2/(m+2))(b^{(m+2)/2} − a^{(m+2)/2}))
        let pts = log_grid(1e-3, 20.0, if quick { 24 } else { 80 });
        let logs = pts.iter().map(|&t| Ok(p.eval(t)?.log_value)).collect::<Result<Vec<_>>>()?;
        let e = 0.5 * (mf + 2.0);
        let mut worst = f64::NEG_INFINITY;
        for (i, &a) in pts.iter().enumerate() {
            for (j, &b) in pts.iter().enumerate().take(i + 1) {
                let lhs = logs[i] - logs[j];
                let rhs = 0.5 * (a / b).ln() + 2.0 / (mf + 2.0) * (b.powf(e) - a.powf(e));
                worst = worst.max(lhs - rhs);
            }
        }
        props.push(PropertyCheck {
            name: format!("ratio bound, m={m}"),
            passed: worst <= 1e-10,
            fitted: None,
            detail: format!("max log(lhs/rhs) = {worst:.3e}"),
        });

        // 1/C ≤ |λ'|/(λ t^{m/2}) on (0, 20], ≤ C for t ≥ 1
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for &t in &log_grid(1e-3, 20.0, dense) {
            let ev = p.eval(t)?;
            let r = (ev.log_abs_deriv - ev.log_value).exp() / t.powf(0.5 * mf);
            lo = lo.min(r);
            if t >= 1.0 {
                hi = hi.max(r);
            }
        }
        let c = hi.max(1.0 / lo);
        props.push(PropertyCheck {
            name: format!("two-sided bound, m={m}"),
            passed: c < 10.0,
            fitted: Some(c),
            detail: format!("min ratio {lo:.6}, max ratio on t ≥ 1 {hi:.6}"),
        });
    }

    let ys: Vec<f64> = log_grid(0.05, 29.0, if quick { 10 } else { 40 });
    let mut params = vec![(0.3, 1.7)];
    for l in [1u32, 2] {
        let g = (2.0 * l as f64 - 1.0) / (2.0 * (2.0 * l as f64 + 1.0));
        params.push((g, 2.0 * g));
        params.push((1.0 - g, 2.0 - 2.0 * g));
    }
    let before = rows.len();
    for &(a, b) in &params {
        rows.extend(kummer_rows(a, b, &ys)?);
    }
    let worst = rows[before..].iter().fold(0.0f64, |a, r| a.max(r.residual));
    props.push(PropertyCheck {
        name: "Kummer ODE residual".into(),
        passed: worst <= KUMMER_ODE_TOL,
        fitted: None,
        detail: format!("max residual {worst:.3e} for |z| ≤ 30 on the imaginary axis"),
    });

    let mut worst = 0.0f64;
    for &y in &ys {
        for a in [0.25, 1.0, 2.5] {
            let z = Complex64::new(0.0, y);
            let v = kummer_m(a, a, z)?;
            let e = z.exp();
            let err = (v - e).norm();
            worst = worst.max(err);
            rows.push(ResidualRow {
                function: "kummer_exp",
                params: format!("a=b={a}"),
                point: format!("{y:.6e}i"),
                residual: err,
            });
        }
    }
    props.push(PropertyCheck {
        name: "Kummer M(a,a,z) = e^z".into(),
        passed: worst <= 1e-10,
        fitted: None,
        detail: format!("max |M − e^z| = {worst:.3e}"),
    });

    Ok(SpecfunReport { rows, properties: props })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_sweep_passes() {
        let r = verify_specfun(true).unwrap();
        for p in &r.properties {
            assert!(p.passed, "{}: {}", p.name, p.detail);
        }
        assert!(r.csv().starts_with("function,m_or_params,t_or_z,residual\n"));
        assert!(r.max_residual("lambda_ode") <= LAMBDA_ODE_TOL);
    }
}
