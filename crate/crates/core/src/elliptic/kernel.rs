//! The Duhamel kernel
//!
//! ```text
//! T̂(t, σ, s) = (1/s) G(min·s) λ(max·s) / λ(min·s),   G(y) = λ(y)² ∫_0^y λ(η)^{−2} dη
//! ```
//!
//! `G` is bounded (it tends to `1/(2|λ'/λ|)`), so every factor stays finite
//! even where `λ` itself underflows.

use crate::error::{Result, TricomiError};
use crate::quad::GaussRule;
use crate::specfun::LambdaProfile;

/// `λ(b)² ∫_a^b λ(y)^{−2} dy`, integrated right to left on doubling panels.
/// The integrand is 1 at `y = b` and decreases monotonically toward `a`, so
/// the loop stops once the remaining mass is below 1e-17 of the total.
pub(crate) fn scaled_inv_sq_integral(
    profile: &LambdaProfile,
    a: f64,
    b: f64,
    log_lb: f64,
    dlog_b: f64,
    rule: &GaussRule,
) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let rate = 2.0 * dlog_b.abs();
    let integrand = |y: f64| -> Result<f64> {
        let l = profile.eval(y)?;
        Ok((2.0 * (log_lb - l.log_value)).exp())
    };
    let mut hi = b;
    let mut width = if rate > 0.0 { (1.0 / rate).min(b - a) } else { b - a };
    let mut total = 0.0;
    for _ in 0..200 {
        let lo = (hi - width).max(a);
        let mut part = 0.0;
        for (y, w) in rule.mapped(lo, hi) {
            part += w * integrand(y)?;
        }
        total += part;
        if lo <= a {
            return Ok(total);
        }
        let edge = integrand(lo)?;
        if edge * (lo - a) <= 1e-17 * total {
            return Ok(total);
        }
        hi = lo;
        width *= 2.0;
    }
    Err(TricomiError::Accuracy {
        context: "inverse-square profile integral".into(),
        first: total,
        second: f64::NAN,
    })
}

/// `ln λ`, `λ'/λ` and `G` at the scaled points `y = t·s` of a sorted set of
/// times, for one frequency `s > 0`.
#[derive(Debug, Clone)]
pub(crate) struct KernelTable {
    s: f64,
    times: Vec<f64>,
    log_l: Vec<f64>,
    dlog: Vec<f64>,
    g: Vec<f64>,
}

impl KernelTable {
    /// `times` must be sorted, nonnegative and free of duplicates.
    pub fn build(profile: &LambdaProfile, s: f64, times: Vec<f64>, y_nodes: usize) -> Result<Self> {
        debug_assert!(s > 0.0);
        debug_assert!(times.windows(2).all(|w| w[0] < w[1]));
        let rule = GaussRule::new(y_nodes);
        let mut log_l = Vec::with_capacity(times.len());
        let mut dlog = Vec::with_capacity(times.len());
        let mut g = Vec::with_capacity(times.len());
        let mut prev: Option<(f64, f64, f64)> = None; // (y, ln λ, G)
        for &t in &times {
            let y = t * s;
            let l = profile.eval(y)?;
            let d = l.log_deriv();
            let gy = match prev {
                None => scaled_inv_sq_integral(profile, 0.0, y, l.log_value, d, &rule)?,
                Some((py, pl, pg)) => {
                    pg * (2.0 * (l.log_value - pl)).exp()
                        + scaled_inv_sq_integral(profile, py, y, l.log_value, d, &rule)?
                }
            };
            log_l.push(l.log_value);
            dlog.push(d);
            g.push(gy);
            prev = Some((y, l.log_value, gy));
        }
        Ok(KernelTable {
            s,
            times,
            log_l,
            dlog,
            g,
        })
    }

    pub fn index(&self, t: f64) -> usize {
        self.times
            .binary_search_by(|x| x.total_cmp(&t))
            .expect("time missing from kernel table")
    }

    pub fn log_lambda(&self, i: usize) -> f64 {
        self.log_l[i]
    }

    pub fn g(&self, i: usize) -> f64 {
        self.g[i]
    }

    /// `T̂(t_i, σ_j)`.
    pub fn kernel(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if self.times[i] <= self.times[j] { (i, j) } else { (j, i) };
        self.g[lo] * (self.log_l[hi] - self.log_l[lo]).exp() / self.s
    }

    /// `∂_t T̂(t_i, σ_j)`.
    pub fn kernel_dt(&self, i: usize, j: usize) -> f64 {
        if self.times[i] < self.times[j] {
            (self.log_l[j] - self.log_l[i]).exp() * (self.dlog[i] * self.g[i] + 1.0)
        } else {
            self.dlog[i] * (self.log_l[i] - self.log_l[j]).exp() * self.g[j]
        }
    }
}

/// Sorts and deduplicates a list of times.
pub(crate) fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// `T̂(t, σ, s)` for the profile of order `m`.
pub fn duhamel_kernel_t(m: u32, t: f64, sigma: f64, s: f64) -> Result<f64> {
    if !(t >= 0.0 && sigma >= 0.0 && s >= 0.0) {
        return Err(TricomiError::domain("duhamel_kernel_t needs nonnegative arguments"));
    }
    if t == 0.0 || sigma == 0.0 {
        return Ok(0.0);
    }
    if s == 0.0 {
        return Ok(t.min(sigma));
    }
    let profile = LambdaProfile::new(m);
    let table = KernelTable::build(&profile, s, sorted_unique(vec![t, sigma]), 16)?;
    Ok(table.kernel(table.index(t), table.index(sigma)))
}

/// Closed form of `T̂` for `m = 0`, where `λ = e^{−t}`.
pub fn duhamel_kernel_m0(t: f64, sigma: f64, s: f64) -> f64 {
    if s == 0.0 {
        return t.min(sigma);
    }
    let lo = t.min(sigma);
    (-(t + sigma - 2.0 * lo) * s).exp() * (-(-2.0 * s * lo).exp_m1()) / (2.0 * s)
}
