//! Numerical checks of the elliptic kernel integrals and bound functions.
//!
//! The kernel is `K̂_ν(t, σ, ξ) = |ξ|² t^{m−ν} σ^ν T̂(t, σ, ξ)` with
//! `|ξ|² = s^{m+2}`. Probes integrate `∫|∫K̂ h dσ| dt` for bumps `h`
//! supported in `(a−b, a+b)`. Outside the support the inner integral
//! factors, so only the band needs a genuinely two-dimensional quadrature.
//!
//! None of the bound constants is known in closed form: each family fits its
//! constant on a calibration grid and is then checked on an interleaved,
//! disjoint validation grid.

mod bump;
mod probe;

pub use bump::{BumpFamily, BumpShape};
pub use probe::{probe_integrals, ProbeIntegrals, ProbeQuadrature};

use std::cell::RefCell;

use rand::Rng;
use rayon::prelude::*;

use crate::elliptic::{duhamel_kernel_m0, duhamel_kernel_t};
use crate::elliptic::KernelTable;
use crate::error::{Result, TricomiError};
use crate::quad::{adaptive_gauss, adaptive_gauss_tail};
use crate::specfun::LambdaProfile;

fn check_order(m: u32, nu: f64) -> Result<()> {
    if !(0.0..=m as f64).contains(&nu) {
        return Err(TricomiError::domain(format!("ν = {nu} must lie in [0, m] = [0, {m}]")));
    }
    Ok(())
}

/// `K̂_ν(t, σ, s) = s^{m+2} t^{m−ν} σ^ν T̂(t, σ, s)`.
pub fn khat(m: u32, nu: f64, t: f64, sigma: f64, s: f64) -> Result<f64> {
    check_order(m, nu)?;
    if !(t >= 0.0 && sigma >= 0.0 && s >= 0.0) {
        return Err(TricomiError::domain("khat needs nonnegative arguments"));
    }
    if t == 0.0 || sigma == 0.0 || s == 0.0 {
        return Ok(0.0);
    }
    let tt = if m == 0 { duhamel_kernel_m0(t, sigma, s) } else { duhamel_kernel_t(m, t, sigma, s)? };
    Ok(s.powi(m as i32 + 2) * t.powf(m as f64 - nu) * sigma.powf(nu) * tt)
}

/// Runs an adaptive rule on a fallible integrand, surfacing the first error.
fn integrate_fallible(
    f: impl Fn(f64) -> Result<f64>,
    run: impl FnOnce(&dyn Fn(f64) -> f64) -> Result<f64>,
) -> Result<f64> {
    let err = RefCell::new(None);
    let g = |x: f64| match f(x) {
        Ok(v) => v,
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let r = run(&g);
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    r
}

/// `(ln λ(y), G(y))` at a single point.
fn log_lambda_and_g(profile: &LambdaProfile, y: f64) -> Result<(f64, f64)> {
    let table = KernelTable::build(profile, 1.0, vec![y], 16)?;
    Ok((table.log_lambda(0), table.g(0)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowCheck {
    pub measured: f64,
    pub exact: f64,
}

impl RowCheck {
    pub fn error(&self) -> f64 {
        (self.measured - self.exact).abs()
    }
}

/// `∫_0^∞ K̂(t, σ, s) dσ` at `ν = m` against `1 − λ(ts)`.
pub fn check_row_integral(m: u32, t: f64, s: f64) -> Result<RowCheck> {
    if !(t >= 0.0 && s >= 0.0) {
        return Err(TricomiError::domain("row integral needs t, s ≥ 0"));
    }
    if t * s == 0.0 {
        return Ok(RowCheck { measured: 0.0, exact: 0.0 });
    }
    let profile = LambdaProfile::new(m);
    let mf = m as f64;
    let pre = s.powi(m as i32 + 1);
    let (lt, gt) = log_lambda_and_g(&profile, t * s)?;
    let tol = 1e-11;
    // σ < t: σ^m G(σs) λ(ts)/λ(σs)
    let left = integrate_fallible(
        |sig: f64| {
            if sig == 0.0 {
                return Ok(0.0);
            }
            let (ls, gs) = log_lambda_and_g(&profile, sig * s)?;
            Ok(pre * sig.powf(mf) * gs * (lt - ls).exp())
        },
        |f| adaptive_gauss(f, 0.0, t, tol),
    )?;
    // σ > t: σ^m G(ts) λ(σs)/λ(ts)
    let rate = profile.eval(t * s)?.log_deriv().abs() * s;
    let right = integrate_fallible(
        |sig: f64| Ok(pre * sig.powf(mf) * gt * (profile.eval(sig * s)?.log_value - lt).exp()),
        |f| adaptive_gauss_tail(f, t, 1.0 / rate.max(1e-3), tol),
    )?;
    Ok(RowCheck {
        measured: left + right,
        exact: 1.0 - profile.eval(t * s)?.value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnCheck {
    pub measured: f64,
    /// The same integral at a hundred times tighter tolerance.
    pub refined: f64,
}

impl ColumnCheck {
    pub fn relative_change(&self) -> f64 {
        (self.measured - self.refined).abs() / self.refined.abs().max(f64::MIN_POSITIVE)
    }
}

fn column_integral(profile: &LambdaProfile, sigma: f64, s: f64, tol: f64) -> Result<f64> {
    let mf = profile.m() as f64;
    let pre = s.powi(profile.m() as i32 + 1) * sigma.powf(mf);
    let (ls, gs) = log_lambda_and_g(profile, sigma * s)?;
    let left = integrate_fallible(
        |t: f64| {
            if t == 0.0 {
                return Ok(0.0);
            }
            let (lt, gt) = log_lambda_and_g(profile, t * s)?;
            Ok(pre * gt * (ls - lt).exp())
        },
        |f| adaptive_gauss(f, 0.0, sigma, tol),
    )?;
    let rate = profile.eval(sigma * s)?.log_deriv().abs() * s;
    let right = integrate_fallible(
        |t: f64| Ok(pre * gs * (profile.eval(t * s)?.log_value - ls).exp()),
        |f| adaptive_gauss_tail(f, sigma, 1.0 / rate.max(1e-3), tol),
    )?;
    Ok(left + right)
}

/// `∫_0^∞ K̂(t, σ, s) dt` at `ν = m`.
pub fn check_column_integral(m: u32, sigma: f64, s: f64) -> Result<ColumnCheck> {
    if !(sigma >= 0.0 && s >= 0.0) {
        return Err(TricomiError::domain("column integral needs σ, s ≥ 0"));
    }
    if sigma * s == 0.0 {
        return Ok(ColumnCheck { measured: 0.0, refined: 0.0 });
    }
    let profile = LambdaProfile::new(m);
    Ok(ColumnCheck {
        measured: column_integral(&profile, sigma, s, 1e-8)?,
        refined: column_integral(&profile, sigma, s, 1e-10)?,
    })
}

/// `(a, b, s)`: bump center, half-width and frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbePoint {
    pub a: f64,
    pub b: f64,
    pub s: f64,
}

impl ProbePoint {
    pub fn new(a: f64, b: f64, s: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && s > 0.0 && b < a) {
            return Err(TricomiError::domain(format!("probe needs 0 < b < a and s > 0, got ({a}, {b}, {s})")));
        }
        Ok(ProbePoint { a, b, s })
    }

    /// The products `(as, bs)` the bound functions depend on.
    pub fn scaled(&self) -> (f64, f64) {
        (self.a * self.s, self.b * self.s)
    }
}

/// Cartesian grid of probes with `b = fraction · a`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeGrid {
    pub a_values: Vec<f64>,
    pub b_fractions: Vec<f64>,
    pub s_values: Vec<f64>,
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

impl ProbeGrid {
    /// Logarithmic grid in `a` on `[a_lo, a_hi]` and in `b/a` on `[f_lo, f_hi]`.
    pub fn log(a_lo: f64, a_hi: f64, n_a: usize, f_lo: f64, f_hi: f64, n_f: usize) -> Result<Self> {
        if !(0.0 < a_lo && a_lo < a_hi && 0.0 < f_lo && f_lo < f_hi && f_hi <= 0.5) || n_a < 2 || n_f < 1 {
            return Err(TricomiError::domain("invalid probe grid ranges"));
        }
        Ok(ProbeGrid {
            a_values: log_space(a_lo, a_hi, n_a),
            b_fractions: log_space(f_lo, f_hi, n_f),
            s_values: vec![1.0],
        })
    }

    /// Doubles the number of `a` values over the same range.
    pub fn densified(&self) -> Self {
        let lo = self.a_values[0];
        let hi = *self.a_values.last().unwrap();
        ProbeGrid {
            a_values: log_space(lo, hi, 2 * self.a_values.len()),
            ..self.clone()
        }
    }

    pub fn probes(&self) -> Vec<ProbePoint> {
        let mut out = Vec::new();
        for &s in &self.s_values {
            for &a in &self.a_values {
                for &f in &self.b_fractions {
                    out.push(ProbePoint { a, b: f * a, s });
                }
            }
        }
        out
    }

    /// Checkerboard split into calibration and validation probes.
    pub fn split(&self) -> (Vec<ProbePoint>, Vec<ProbePoint>) {
        let mut cal = Vec::new();
        let mut val = Vec::new();
        for (k, &s) in self.s_values.iter().enumerate() {
            for (i, &a) in self.a_values.iter().enumerate() {
                for (j, &f) in self.b_fractions.iter().enumerate() {
                    let p = ProbePoint { a, b: f * a, s };
                    if (i + j + k) % 2 == 0 { cal.push(p) } else { val.push(p) }
                }
            }
        }
        (cal, val)
    }
}

/// `exp(−C a^{m/2} b)`.
pub fn p1(m: u32, c: f64, a: f64, b: f64) -> f64 {
    (-c * a.powf(m as f64 / 2.0) * b).exp()
}

/// `b a^{m/2} + b² a^m + b³ a^{3m/2}`.
pub fn p2(m: u32, a: f64, b: f64) -> f64 {
    let x = b * a.powf(m as f64 / 2.0);
    x + x * x + x * x * x
}

/// `a` for `a ≤ 3`, `exp(−C a^{m/2} b)` beyond.
pub fn p3(m: u32, c: f64, a: f64, b: f64) -> f64 {
    if a <= 3.0 { a } else { p1(m, c, a, b) }
}

/// `a` for `a ≤ 3`, `a^{m/2}b + a^m b² + a b^{2/m}` beyond.
pub fn p4(m: u32, a: f64, b: f64) -> f64 {
    if a <= 3.0 {
        a
    } else {
        let mf = m as f64;
        a.powf(mf / 2.0) * b + a.powf(mf) * b * b + a * b.powf(2.0 / mf)
    }
}

/// `a` for `a ≤ 1`, `b a^{m/2}` beyond.
pub fn p5(m: u32, a: f64, b: f64) -> f64 {
    if a <= 1.0 { a } else { b * a.powf(m as f64 / 2.0) }
}

/// `P₅ + b a^{m/2} + b² a^m`.
pub fn p6(m: u32, a: f64, b: f64) -> f64 {
    let x = b * a.powf(m as f64 / 2.0);
    p5(m, a, b) + x + x * x
}

/// One probe against one bound function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeRecord {
    pub probe: ProbePoint,
    pub measured: f64,
    pub bound: f64,
    pub ratio: f64,
}

impl ProbeRecord {
    fn new(probe: ProbePoint, measured: f64, bound: f64) -> Self {
        ProbeRecord { probe, measured, bound, ratio: measured / bound }
    }
}

fn require_mean_zero(h: &BumpFamily) -> Result<()> {
    let total = h.integral()?;
    if total.abs() > 1e-12 {
        return Err(TricomiError::ContractViolation(format!("bump must have zero mean, ∫h = {total:e}")));
    }
    Ok(())
}

/// `∫_{𝒞Δ(a,2b)} |∫K̂h dσ| dt` at `ν = m`, against `P₁(as, bs)‖h‖₁`.
pub fn check_offband_bound(m: u32, probe: &ProbePoint, h: &BumpFamily, c: f64, quad: &ProbeQuadrature) -> Result<ProbeRecord> {
    let (a, b) = probe.scaled();
    let ints = probe_integrals(m, m as f64, probe, h, quad)?;
    Ok(ProbeRecord::new(*probe, ints.offband(), p1(m, c, a, b) * h.l1_norm()))
}

/// Full-line integral at `ν = m` for a mean-zero bump, against `P₂(as, bs)‖h‖₁`.
pub fn check_meanzero_bound(m: u32, probe: &ProbePoint, h: &BumpFamily, quad: &ProbeQuadrature) -> Result<ProbeRecord> {
    require_mean_zero(h)?;
    let (a, b) = probe.scaled();
    let ints = probe_integrals(m, m as f64, probe, h, quad)?;
    Ok(ProbeRecord::new(*probe, ints.full(), p2(m, a, b) * h.l1_norm()))
}

/// Tail (`t > a+b`) against `P₅` and full line against `P₆` for the
/// weighted kernel with a mean-zero bump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedRecord {
    pub tail_p5: ProbeRecord,
    pub full_p6: ProbeRecord,
}

pub fn check_weighted_bounds(m: u32, nu: f64, probe: &ProbePoint, h: &BumpFamily, quad: &ProbeQuadrature) -> Result<WeightedRecord> {
    check_order(m, nu)?;
    require_mean_zero(h)?;
    let (a, b) = probe.scaled();
    let ints = probe_integrals(m, nu, probe, h, quad)?;
    Ok(WeightedRecord {
        tail_p5: ProbeRecord::new(*probe, ints.right_tail(), p5(m, a, b) * h.l1_norm()),
        full_p6: ProbeRecord::new(*probe, ints.full(), p6(m, a, b) * h.l1_norm()),
    })
}

/// Checks `0 ≤ K̂_ν ≤ K̂₁ + K̂₂` (`K̂₁` with weight `σ^m`, `K̂₂` with
/// `t^m`) on random samples. Returns the largest `K̂_ν / (K̂₁ + K̂₂)`.
pub fn check_domination(m: u32, nu: f64, samples: usize, rng: &mut impl Rng) -> Result<f64> {
    check_order(m, nu)?;
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let t: f64 = rng.gen_range(0.01..4.0);
        let sigma: f64 = rng.gen_range(0.01..4.0);
        let s: f64 = rng.gen_range(0.05..3.0);
        let k = khat(m, nu, t, sigma, s)?;
        let k1 = khat(m, m as f64, t, sigma, s)?;
        let k2 = khat(m, 0.0, t, sigma, s)?;
        if k < 0.0 {
            return Err(TricomiError::ContractViolation(format!("negative kernel at ({t}, {sigma}, {s})")));
        }
        if k1 + k2 > 0.0 {
            worst = worst.max(k / (k1 + k2));
        }
    }
    Ok(worst)
}

/// Bound family checked by [`run_family`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundFamily {
    /// Off-band integral, plain bump.
    P1,
    /// Full line, mean-zero bump, `ν = m`.
    P2,
    /// Tail beyond the band, mean-zero bump.
    P5,
    /// Full line, mean-zero bump.
    P6,
}

impl BoundFamily {
    pub fn name(self) -> &'static str {
        match self {
            BoundFamily::P1 => "P1",
            BoundFamily::P2 => "P2",
            BoundFamily::P5 => "P5",
            BoundFamily::P6 => "P6",
        }
    }

    fn shape(self) -> BumpShape {
        match self {
            BoundFamily::P1 => BumpShape::Plain,
            _ => BumpShape::MeanZero,
        }
    }

    fn measured(self, ints: &ProbeIntegrals) -> f64 {
        match self {
            BoundFamily::P1 => ints.offband(),
            BoundFamily::P5 => ints.right_tail(),
            BoundFamily::P2 | BoundFamily::P6 => ints.full(),
        }
    }

    fn bound(self, m: u32, c: f64, a: f64, b: f64) -> f64 {
        match self {
            BoundFamily::P1 => p1(m, c, a, b),
            BoundFamily::P2 => p2(m, a, b),
            BoundFamily::P5 => p5(m, a, b),
            BoundFamily::P6 => p6(m, a, b),
        }
    }
}

/// Calibration fit and validation outcome of one bound family.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelProbeReport {
    pub family: BoundFamily,
    pub m: u32,
    pub nu: f64,
    /// Exponent constant `C` inside `P₁`; `None` for the other families.
    pub fitted_exponent: Option<f64>,
    /// Prefactor: the largest calibration ratio.
    pub fitted_constant: f64,
    pub calibration: Vec<ProbeRecord>,
    pub validation: Vec<ProbeRecord>,
}

impl KernelProbeReport {
    pub fn max_validation_ratio(&self) -> f64 {
        self.validation.iter().map(|r| r.ratio).fold(0.0, f64::max)
    }

    /// Every ratio finite and positive, and validation within twice the
    /// fitted constant.
    pub fn passed(&self) -> bool {
        let all = self.calibration.iter().chain(&self.validation);
        let finite = all.clone().all(|r| r.ratio.is_finite() && r.ratio > 0.0);
        finite && self.fitted_constant.is_finite() && self.max_validation_ratio() <= 2.0 * self.fitted_constant
    }

    pub fn summary(&self) -> String {
        let expo = self.fitted_exponent.map_or(String::new(), |c| format!(" exponent C={c:.6e}"));
        format!(
            "{} m={} nu={}: calibration={} validation={}{expo} constant={:.6e} max_validation_ratio={:.6e} {}",
            self.family.name(),
            self.m,
            self.nu,
            self.calibration.len(),
            self.validation.len(),
            self.fitted_constant,
            self.max_validation_ratio(),
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }

    /// CSV rows `set,a,b,s,measured,bound,ratio`.
    pub fn csv(&self) -> String {
        let mut out = String::from("set,a,b,s,measured,bound,ratio\n");
        for (name, set) in [("calibration", &self.calibration), ("validation", &self.validation)] {
            for r in set {
                out.push_str(&format!(
                    "{name},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                    r.probe.a, r.probe.b, r.probe.s, r.measured, r.bound, r.ratio
                ));
            }
        }
        out
    }
}

/// Slope of the least-squares line through `(x, y)`.
fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Decay rate `C ≥ 0` of the tightest upper envelope `y ≤ K − C x`: the
/// line lies on or above every point and minimizes the mean gap. The gap is
/// convex in `C`, so a ternary search suffices.
fn envelope_rate(pts: &[(f64, f64)]) -> f64 {
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let gap = |c: f64| pts.iter().map(|&(x, y)| y + c * x).fold(f64::NEG_INFINITY, f64::max) - c * mx;
    let (mut lo, mut hi) = (0.0, (-2.0 * ls_slope(pts)).max(1.0));
    for _ in 0..200 {
        let (c1, c2) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
        if gap(c1) <= gap(c2) {
            hi = c2;
        } else {
            lo = c1;
        }
    }
    0.5 * (lo + hi)
}

/// Measures every probe of the grid and fits the family.
pub fn run_family(family: BoundFamily, m: u32, nu: f64, grid: &ProbeGrid, quad: &ProbeQuadrature) -> Result<KernelProbeReport> {
    check_order(m, nu)?;
    if matches!(family, BoundFamily::P1 | BoundFamily::P2) && nu != m as f64 {
        return Err(TricomiError::domain("P1 and P2 families are defined for ν = m"));
    }
    let (cal, val) = grid.split();
    let measure = |set: &[ProbePoint]| -> Result<Vec<(ProbePoint, f64)>> {
        set.par_iter()
            .map(|p| {
                let h = BumpFamily::new(family.shape(), p.a, p.b)?;
                let ints = probe_integrals(m, nu, p, &h, quad)?;
                Ok((*p, family.measured(&ints)))
            })
            .collect()
    };
    let cal_m = measure(&cal)?;
    let val_m = measure(&val)?;
    let fitted_exponent = if family == BoundFamily::P1 {
        let pts: Vec<(f64, f64)> = cal_m
            .iter()
            .map(|(p, v)| {
                let (a, b) = p.scaled();
                (a.powf(m as f64 / 2.0) * b, v.ln())
            })
            .collect();
        Some(envelope_rate(&pts))
    } else {
        None
    };
    let c = fitted_exponent.unwrap_or(0.0);
    let records = |set: Vec<(ProbePoint, f64)>| -> Vec<ProbeRecord> {
        set.into_iter()
            .map(|(p, v)| {
                let (a, b) = p.scaled();
                ProbeRecord::new(p, v, family.bound(m, c, a, b))
            })
            .collect()
    };
    let calibration = records(cal_m);
    let validation = records(val_m);
    let fitted_constant = calibration.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(KernelProbeReport {
        family,
        m,
        nu,
        fitted_exponent,
        fitted_constant,
        calibration,
        validation,
    })
}

/// A family run at base resolution and again with doubled quadrature
/// nodes and probe density.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub base: KernelProbeReport,
    pub refined: KernelProbeReport,
}

impl StabilityReport {
    /// `max(r₁/r₂, r₂/r₁)` of the validation max ratios.
    pub fn drift(&self) -> f64 {
        let a = self.base.max_validation_ratio();
        let b = self.refined.max_validation_ratio();
        (a / b).max(b / a)
    }

    pub fn passed(&self) -> bool {
        self.base.passed() && self.refined.passed() && self.drift() <= 2.0
    }
}

pub fn run_family_with_refinement(family: BoundFamily, m: u32, nu: f64, grid: &ProbeGrid, quad: &ProbeQuadrature) -> Result<StabilityReport> {
    Ok(StabilityReport {
        base: run_family(family, m, nu, grid, quad)?,
        refined: run_family(family, m, nu, &grid.densified(), &quad.doubled())?,
    })
}
