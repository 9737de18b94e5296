//! Semilinear solves of `∂_t²u − t^{2l−1}Δu = f(t, x, u)` around `t = 0`.
//!
//! The elliptic side (`t ≤ 0`) is a Picard iteration for the correction `v`
//! in `u = ū + ū_T + v`, where `ū` is the homogeneous evolution of `φ` and
//! `ū_T` the response to `χ_T f(ū)`. The hyperbolic side (`t ≥ 0`) is the
//! fixed point `v = 𝒯 f(w₁ + v)` with `w₁ = V₁φ + V₂ψ`, started from the
//! elliptic trace `(φ, ∂_t u(0⁻))`. Both loops shrink `T0` until the fitted
//! contraction ratio is at most one half.

use std::sync::Arc;

use num_complex::Complex64;

use crate::admissibility::{classify_case, exponent_profile, CaseLabel, ExponentProfile, Scalar};
use crate::elliptic::{frequency_s, homogeneous_evolve, EllipticPlan};
use crate::error::{Result, TricomiError};
use crate::hyperbolic::HyperbolicPlan;
use crate::quad::Lagrange;
use crate::spectral_grid::{
    dealias, forward_transform, inverse_transform, lp_norm, sobolev_norm, SpatialField, SpectralField, TimeGrid,
};
use crate::specfun::LambdaProfile;

mod nonlinearity;

pub use nonlinearity::{
    check_growth_contract, spatial_cutoff, LinearNonlinearity, Manufactured, Nonlinearity, PowerNonlinearity,
    ZeroNonlinearity,
};

#[cfg(test)]
mod tests;

/// Fitted contraction ratios above this trigger a `T0` shrink.
pub const SHRINK_TARGET: f64 = 0.5;

/// Time cutoff `χ` with `χ ≡ 1` on `[−1, ∞)` and `χ ≡ 0` on `(−∞, −2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutoffProfile {
    /// Quintic smoothstep, `C²` at the plateau edges.
    Smoothstep,
    /// `e^{−1/r}`-based transition, `C^∞`.
    Exponential,
}

impl CutoffProfile {
    pub fn eval(self, t: f64) -> f64 {
        let r = -1.0 - t;
        if r <= 0.0 {
            return 1.0;
        }
        if r >= 1.0 {
            return 0.0;
        }
        let step = match self {
            CutoffProfile::Smoothstep => r * r * r * (10.0 - 15.0 * r + 6.0 * r * r),
            CutoffProfile::Exponential => {
                let a = (-1.0 / r).exp();
                let b = (-1.0 / (1.0 - r)).exp();
                a / (a + b)
            }
        };
        1.0 - step
    }

    pub fn name(self) -> &'static str {
        match self {
            CutoffProfile::Smoothstep => "smoothstep",
            CutoffProfile::Exponential => "exponential",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "smoothstep" => Ok(CutoffProfile::Smoothstep),
            "exponential" => Ok(CutoffProfile::Exponential),
            _ => Err(TricomiError::Parse(format!("unknown cutoff profile {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig {
    /// Initial half-width of the time interval.
    pub t0: f64,
    pub shrink_factor: f64,
    pub max_shrinks: usize,
    /// Relative tolerance on successive differences.
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub cutoff: CutoffProfile,
    /// Graded panels on `[0, T0]` for either side.
    pub time_panels: usize,
    /// Uniform panels on the cutoff ramp `τ ∈ [T0, 2T0]`.
    pub ramp_panels: usize,
    pub nodes_per_panel: usize,
    /// Gauss nodes of the inner integral of the elliptic kernel.
    pub y_nodes: usize,
    /// Seed of the growth-contract spot checks.
    pub seed: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            t0: 0.5,
            shrink_factor: 0.5,
            max_shrinks: 6,
            picard_tol: 1e-10,
            picard_max_iters: 60,
            cutoff: CutoffProfile::Smoothstep,
            time_panels: 5,
            ramp_panels: 2,
            nodes_per_panel: 8,
            y_nodes: 12,
            seed: 7,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t0 > 0.0) || !self.t0.is_finite() {
            return Err(TricomiError::domain(format!("T0 must be positive, got {}", self.t0)));
        }
        if !(self.shrink_factor > 0.0 && self.shrink_factor < 1.0) {
            return Err(TricomiError::domain(format!("shrink_factor must lie in (0,1), got {}", self.shrink_factor)));
        }
        if !(self.picard_tol > 0.0) || self.picard_max_iters == 0 {
            return Err(TricomiError::domain("picard_tol must be positive and picard_max_iters ≥ 1"));
        }
        if self.time_panels < 2 || self.ramp_panels == 0 || self.nodes_per_panel < 4 || self.y_nodes < 4 {
            return Err(TricomiError::domain(
                "time discretization needs time_panels ≥ 2, ramp_panels ≥ 1 and node counts ≥ 4",
            ));
        }
        Ok(())
    }
}

/// Equation parameters and data: `l`, the Sobolev index `s` of `φ`, the
/// datum `φ` on a periodic grid (its dimension is `n`) and `f`.
#[derive(Clone)]
pub struct ProblemSpec {
    pub l: u32,
    pub s: Scalar,
    pub phi: SpatialField,
    pub nonlinearity: Arc<dyn Nonlinearity>,
}

impl ProblemSpec {
    pub fn new(l: u32, s: impl Into<Scalar>, phi: SpatialField, nonlinearity: Arc<dyn Nonlinearity>) -> Self {
        ProblemSpec {
            l,
            s: s.into(),
            phi,
            nonlinearity,
        }
    }

    pub fn n(&self) -> u32 {
        self.phi.grid.dim() as u32
    }

    /// `m = 2l − 1`.
    pub fn m(&self) -> u32 {
        2 * self.l - 1
    }

    pub fn profile(&self) -> Result<ExponentProfile> {
        exponent_profile(self.n(), self.l, self.s, self.nonlinearity.mu())
    }

    /// Profile and case label; inadmissible profiles are refused with the
    /// gate's reason.
    pub fn admit(&self) -> Result<(ExponentProfile, CaseLabel)> {
        if self.l == 0 {
            return Err(TricomiError::domain("l must be at least 1"));
        }
        let profile = self.profile()?;
        let case = classify_case(&profile)?;
        Ok((profile, case))
    }
}

/// One shrink-loop attempt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Attempt {
    pub t0: f64,
    pub iterations: usize,
    pub fitted_ratio: Option<f64>,
    pub converged: bool,
}

/// Per-iterate norms and successive differences of a fixed-point loop.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub t0: f64,
    /// Exponents of the monitored norms; `L²` is appended to each norm row.
    pub monitored: Vec<f64>,
    /// For each iterate `v^k`, `k ≥ 1`: sup over nodes of each monitored norm,
    /// then of the `L²` norm.
    pub norms: Vec<Vec<f64>>,
    /// `diffs[k] = Σ_p sup_t ‖v^{k+1} − v^k‖_p`.
    pub diffs: Vec<f64>,
    /// `diffs[k+1] / diffs[k]` where the denominator is positive.
    pub ratios: Vec<f64>,
    pub tolerance_met: bool,
    /// Earlier attempts of the shrink loop, followed by this one.
    pub attempts: Vec<Attempt>,
}

impl IterationTrace {
    fn new(t0: f64, monitored: Vec<f64>) -> Self {
        IterationTrace {
            t0,
            monitored,
            norms: Vec::new(),
            diffs: Vec::new(),
            ratios: Vec::new(),
            tolerance_met: false,
            attempts: Vec::new(),
        }
    }

    /// A trace holding only difference norms, for diagnostics.
    pub fn from_diffs(diffs: &[f64]) -> Self {
        let mut t = IterationTrace::new(f64::NAN, Vec::new());
        for &d in diffs {
            t.push_diff(d);
        }
        t
    }

    fn push_diff(&mut self, d: f64) {
        if let Some(&prev) = self.diffs.last() {
            if prev > 0.0 {
                self.ratios.push(d / prev);
            }
        }
        self.diffs.push(d);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionReport {
    /// Geometric fit `d_k ≈ C r^k`; `None` when every difference vanishes.
    pub fitted_ratio: Option<f64>,
    pub converged: bool,
    pub recommend_shrink: bool,
}

/// Least-squares fit of `ln d_k` against `k`. Differences that are exactly
/// zero after a positive one count as ratio zero; differences at the
/// roundoff floor of the first one are ignored.
pub fn contraction_diagnostics(trace: &IterationTrace) -> ContractionReport {
    let d = &trace.diffs;
    let max = d.iter().cloned().fold(0.0f64, f64::max);
    if d.iter().any(|x| !x.is_finite()) {
        return ContractionReport {
            fitted_ratio: Some(f64::INFINITY),
            converged: false,
            recommend_shrink: true,
        };
    }
    if max == 0.0 {
        return ContractionReport {
            fitted_ratio: None,
            converged: true,
            recommend_shrink: false,
        };
    }
    let floor = 1e-13 * max;
    let pts: Vec<(f64, f64)> = d
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > floor)
        .map(|(k, &x)| (k as f64, x.ln()))
        .collect();
    let fitted = if pts.len() < 2 {
        0.0
    } else {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        (sxy / sxx).exp()
    };
    ContractionReport {
        fitted_ratio: Some(fitted),
        converged: trace.tolerance_met,
        recommend_shrink: fitted > SHRINK_TARGET,
    }
}

/// Elliptic-side result in the variable `τ = −t`.
#[derive(Debug, Clone)]
pub struct EllipticSide {
    pub t0: f64,
    /// Ascending `τ ∈ [0, T0]`, starting at `τ = 0`.
    pub taus: Vec<f64>,
    pub snapshots: Vec<SpatialField>,
    /// `∂_t u(0⁻)` in the original time.
    pub slope_at_zero: SpatialField,
    /// End of the first time panel; snapshots inside it are used for trace
    /// interpolation at the interface.
    pub first_panel_end: f64,
    /// Last `L²` difference over `1 + sup‖χ f(u)‖₂`.
    pub fixed_point_residual: f64,
    pub trace: IterationTrace,
}

impl EllipticSide {
    /// `∂_t u(0⁻)` from the polynomial through the snapshots of the first panel.
    pub fn interpolated_slope(&self) -> Result<SpatialField> {
        let idx: Vec<usize> = (0..self.taus.len()).filter(|&i| self.taus[i] < self.first_panel_end).collect();
        let d = interface_derivative(&idx.iter().map(|&i| self.taus[i]).collect::<Vec<_>>(), &idx.iter().map(|&i| &self.snapshots[i]).collect::<Vec<_>>())?;
        Ok(d.scaled(-1.0))
    }
}

/// Hyperbolic-side result.
#[derive(Debug, Clone)]
pub struct HyperbolicSide {
    pub t0: f64,
    /// Ascending `t ∈ [0, T0]`, starting at `t = 0`.
    pub times: Vec<f64>,
    pub snapshots: Vec<SpatialField>,
    pub first_panel_end: f64,
    pub fixed_point_residual: f64,
    pub trace: IterationTrace,
}

impl HyperbolicSide {
    /// `∂_t u(0⁺)` from the polynomial through the snapshots of the first panel.
    pub fn interpolated_slope(&self) -> Result<SpatialField> {
        let idx: Vec<usize> = (0..self.times.len()).filter(|&i| self.times[i] < self.first_panel_end).collect();
        interface_derivative(&idx.iter().map(|&i| self.times[i]).collect::<Vec<_>>(), &idx.iter().map(|&i| &self.snapshots[i]).collect::<Vec<_>>())
    }
}

fn interface_derivative(times: &[f64], fields: &[&SpatialField]) -> Result<SpatialField> {
    let Some(first) = fields.first() else {
        return Err(TricomiError::domain("no snapshots in the first panel"));
    };
    let w = Lagrange::new(times).basis_deriv(0.0);
    let mut out = first.grid.zeros();
    for (wj, f) in w.iter().zip(fields) {
        out = out.axpy(*wj, f)?;
    }
    Ok(out)
}

/// Interface diagnostics of a mixed solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchReport {
    /// `‖u(0⁻) − u(0⁺)‖₂`.
    pub value_jump: f64,
    /// `‖∂_t u(0⁻) − ∂_t u(0⁺)‖₂ / (1 + ‖∂_t u(0)‖₂)`, both sides interpolated.
    pub slope_mismatch: f64,
    pub slope_norm: f64,
}

impl PatchReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.value_jump <= tol && self.slope_mismatch <= tol
    }
}

/// Norms of one snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSample {
    pub t: f64,
    pub l2: f64,
    pub lp0: f64,
    pub lp1: f64,
    pub hs: f64,
}

#[derive(Debug, Clone)]
pub struct MixedSolution {
    /// Ascending times in `[−T0_elliptic, T0_hyperbolic]`, `t = 0` once.
    pub times: Vec<f64>,
    pub snapshots: Vec<SpatialField>,
    pub slope_at_zero: SpatialField,
    pub norms: Vec<NormSample>,
    pub case: CaseLabel,
    pub profile: ExponentProfile,
    pub patch: PatchReport,
    pub elliptic: EllipticSide,
    pub hyperbolic: HyperbolicSide,
}

fn sup_norms(fields: &[SpatialField], exponents: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0f64; exponents.len()];
    for f in fields {
        for (o, &p) in out.iter_mut().zip(exponents) {
            *o = o.max(lp_norm(f, p)?);
        }
    }
    Ok(out)
}

fn differences(a: &[SpatialField], b: &[SpatialField]) -> Result<Vec<SpatialField>> {
    a.iter().zip(b).map(|(x, y)| x.axpy(-1.0, y)).collect()
}

/// Spectra of `weights[j]·fields[j]`, dealiased.
fn source_spectra(fields: &[SpatialField], weights: &[f64]) -> Result<Vec<Vec<Complex64>>> {
    fields
        .iter()
        .zip(weights)
        .map(|(f, &w)| {
            let mut hat = forward_transform(&f.scaled(w))?;
            dealias(&mut hat);
            Ok(hat.coeffs)
        })
        .collect()
}

fn fields_from(grid: &crate::spectral_grid::TorusGrid, spectra: Vec<Vec<Complex64>>) -> Result<Vec<SpatialField>> {
    spectra
        .into_iter()
        .map(|c| inverse_transform(&SpectralField::new(grid.clone(), c)?))
        .collect()
}

fn monitored_exponents(problem: &ProblemSpec) -> Result<Vec<f64>> {
    let (profile, case) = problem.admit()?;
    Ok(case.target.monitored_exponents(&profile))
}

/// Source grid, evaluation times (nodes first, then interior breakpoints)
/// and the end of the first panel.
fn time_layout(grid: &TimeGrid, t_max: f64) -> (Vec<f64>, Vec<f64>, f64) {
    let nodes = grid.nodes();
    let mut evals = nodes.clone();
    evals.extend(grid.breaks().iter().copied().filter(|&b| b > 0.0 && b <= t_max));
    (nodes, evals, grid.breaks()[1])
}

/// Snapshot set on `[0, T0]`: the datum at 0 and every evaluation time up to
/// `T0`, in ascending order.
fn snapshot_set(t0: f64, evals: &[f64], fields: &[SpatialField], datum: &SpatialField) -> (Vec<f64>, Vec<SpatialField>) {
    let mut pairs: Vec<(f64, SpatialField)> = evals
        .iter()
        .zip(fields)
        .filter(|(&t, _)| t <= t0)
        .map(|(&t, f)| (t, f.clone()))
        .collect();
    pairs.push((0.0, datum.clone()));
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

struct LoopOutcome {
    v: Vec<SpatialField>,
    slope: Vec<Complex64>,
    last_l2_diff: f64,
}

/// Runs `v^{k+1} = step(v^k)` from `v⁰ = 0`, recording the trace. `step`
/// returns the new iterate at the evaluation times and its interface slope.
fn fixed_point_loop(
    cfg: &SolveConfig,
    trace: &mut IterationTrace,
    n_nodes: usize,
    base: &[SpatialField],
    mut step: impl FnMut(&[SpatialField]) -> Result<(Vec<SpatialField>, Vec<Complex64>)>,
) -> Result<LoopOutcome> {
    let grid = base[0].grid.clone();
    let mut v: Vec<SpatialField> = vec![grid.zeros(); base.len()];
    let mut slope = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut with_l2 = trace.monitored.clone();
    with_l2.push(2.0);
    let base_scale: f64 = sup_norms(&base[..n_nodes], &trace.monitored)?.iter().sum();
    let mut last_l2 = 0.0;
    for _ in 0..cfg.picard_max_iters {
        let (next, next_slope) = step(&v)?;
        let dv = differences(&next[..n_nodes], &v[..n_nodes])?;
        let dn = sup_norms(&dv, &with_l2)?;
        let diff: f64 = dn[..trace.monitored.len()].iter().sum();
        last_l2 = dn[trace.monitored.len()];
        trace.norms.push(sup_norms(&next[..n_nodes], &with_l2)?);
        trace.push_diff(diff);
        let scale: f64 = base_scale + trace.norms.last().unwrap()[..trace.monitored.len()].iter().sum::<f64>();
        v = next;
        slope = next_slope;
        if diff <= cfg.picard_tol * scale.max(1e-300) || diff == 0.0 {
            trace.tolerance_met = true;
            break;
        }
        let first = trace.diffs[0];
        if !diff.is_finite() || diff > 1e8 * first.max(1e-300) {
            break;
        }
    }
    Ok(LoopOutcome {
        v,
        slope,
        last_l2_diff: last_l2,
    })
}

fn elliptic_attempt(problem: &ProblemSpec, cfg: &SolveConfig, t0: f64, monitored: &[f64]) -> Result<EllipticSide> {
    let f = problem.nonlinearity.as_ref();
    if t0 < f.min_t0() {
        return Err(TricomiError::domain(format!(
            "T0 = {t0} is below the smallest horizon {} supported by {}",
            f.min_t0(),
            f.name()
        )));
    }
    let m = problem.m();
    let space = problem.phi.grid.clone();
    let q = cfg.nodes_per_panel;
    let grid = TimeGrid::graded(0.0, t0, cfg.time_panels, q)?.join(&TimeGrid::uniform(t0, 2.0 * t0, cfg.ramp_panels, q)?)?;
    let (nodes, evals, first_panel_end) = time_layout(&grid, t0);
    let n = nodes.len();
    let phi_hat = forward_transform(&problem.phi)?;
    let ubar = evals
        .iter()
        .map(|&tau| inverse_transform(&homogeneous_evolve(m, &phi_hat, tau)?))
        .collect::<Result<Vec<_>>>()?;
    // ∂_t ū(0⁻) = −s λ'(0) φ̂
    let d0 = LambdaProfile::new(m).deriv_at_zero();
    let homog_slope = phi_hat.radial_multiplier(|k| -frequency_s(m, k) * d0);
    let mut trace = IterationTrace::new(t0, monitored.to_vec());

    if f.is_zero() {
        trace.tolerance_met = true;
        let (taus, snapshots) = snapshot_set(t0, &evals, &ubar, &problem.phi);
        return Ok(EllipticSide {
            t0,
            taus,
            snapshots,
            slope_at_zero: inverse_transform(&homog_slope)?,
            first_panel_end,
            fixed_point_residual: 0.0,
            trace,
        });
    }

    let plan = EllipticPlan::build(m, 0.0, &space, &grid, &evals, cfg.y_nodes, false)?;
    let chi: Vec<f64> = nodes.iter().map(|&tau| cfg.cutoff.eval(-tau / t0)).collect();
    let f_bar = (0..n).map(|j| f.eval(-nodes[j], &ubar[j])).collect::<Result<Vec<_>>>()?;
    let (ut, _, ut_slope) = plan.apply(&source_spectra(&f_bar, &chi)?);
    let ut = fields_from(&space, ut)?;
    let base: Vec<SpatialField> = ubar.iter().zip(&ut).map(|(a, b)| a.axpy(1.0, b)).collect::<Result<_>>()?;

    let mut last_source_norm = 0.0f64;
    let out = fixed_point_loop(cfg, &mut trace, n, &base, |v| {
        let mut g = Vec::with_capacity(n);
        let mut src_norm = 0.0f64;
        for j in 0..n {
            let u = base[j].axpy(1.0, &v[j])?;
            let fu = f.eval(-nodes[j], &u)?;
            src_norm = src_norm.max(chi[j] * lp_norm(&fu, 2.0)?);
            g.push(fu.axpy(-1.0, &f_bar[j])?);
        }
        last_source_norm = src_norm;
        let (vals, _, slope) = plan.apply(&source_spectra(&g, &chi)?);
        Ok((fields_from(&space, vals)?, slope))
    })?;

    let u_all: Vec<SpatialField> = base.iter().zip(&out.v).map(|(a, b)| a.axpy(1.0, b)).collect::<Result<_>>()?;
    let mut slope = homog_slope;
    for (i, c) in slope.coeffs.iter_mut().enumerate() {
        *c += ut_slope[i] + out.slope[i];
    }
    let (taus, snapshots) = snapshot_set(t0, &evals, &u_all, &problem.phi);
    Ok(EllipticSide {
        t0,
        taus,
        snapshots,
        slope_at_zero: inverse_transform(&slope)?,
        first_panel_end,
        fixed_point_residual: out.last_l2_diff / (1.0 + last_source_norm),
        trace,
    })
}

fn hyperbolic_attempt(
    phi: &SpatialField,
    psi: &SpatialField,
    problem: &ProblemSpec,
    cfg: &SolveConfig,
    t0: f64,
    monitored: &[f64],
) -> Result<HyperbolicSide> {
    let f = problem.nonlinearity.as_ref();
    let space = phi.grid.clone();
    let grid = TimeGrid::graded(0.0, t0, cfg.time_panels, cfg.nodes_per_panel)?;
    let (nodes, evals, first_panel_end) = time_layout(&grid, t0);
    let n = nodes.len();
    let plan = HyperbolicPlan::build(problem.l, &space, &grid, &evals)?;
    let (_, w1) = plan.homogeneous(&forward_transform(phi)?.coeffs, &forward_transform(psi)?.coeffs);
    let w1 = fields_from(&space, w1)?;
    let mut trace = IterationTrace::new(t0, monitored.to_vec());
    if f.is_zero() {
        trace.tolerance_met = true;
        let (times, snapshots) = snapshot_set(t0, &evals, &w1, phi);
        return Ok(HyperbolicSide {
            t0,
            times,
            snapshots,
            first_panel_end,
            fixed_point_residual: 0.0,
            trace,
        });
    }
    let ones = vec![1.0; n];
    let mut last_source_norm = 0.0f64;
    let out = fixed_point_loop(cfg, &mut trace, n, &w1, |v| {
        let mut g = Vec::with_capacity(n);
        let mut src_norm = 0.0f64;
        for j in 0..n {
            let fu = f.eval(nodes[j], &w1[j].axpy(1.0, &v[j])?)?;
            src_norm = src_norm.max(lp_norm(&fu, 2.0)?);
            g.push(fu);
        }
        last_source_norm = src_norm;
        let (vals, _) = plan.apply(&source_spectra(&g, &ones)?);
        Ok((fields_from(&space, vals)?, Vec::new()))
    })?;
    let u_all: Vec<SpatialField> = w1.iter().zip(&out.v).map(|(a, b)| a.axpy(1.0, b)).collect::<Result<_>>()?;
    let (times, snapshots) = snapshot_set(t0, &evals, &u_all, phi);
    Ok(HyperbolicSide {
        t0,
        times,
        snapshots,
        first_panel_end,
        fixed_point_residual: out.last_l2_diff / (1.0 + last_source_norm),
        trace,
    })
}

/// Attempts at `T0, T0·factor, …` until the fitted contraction ratio is at
/// most [`SHRINK_TARGET`] and the tolerance is met.
fn shrink_loop<T>(
    cfg: &SolveConfig,
    side: &str,
    mut attempt: impl FnMut(f64) -> Result<T>,
    trace_of: impl Fn(&mut T) -> &mut IterationTrace,
) -> Result<T> {
    let mut t0 = cfg.t0;
    let mut history = Vec::new();
    for k in 0..=cfg.max_shrinks {
        let mut out = attempt(t0)?;
        let trace = trace_of(&mut out);
        let report = contraction_diagnostics(trace);
        history.push(Attempt {
            t0,
            iterations: trace.diffs.len(),
            fitted_ratio: report.fitted_ratio,
            converged: report.converged,
        });
        if report.converged && !report.recommend_shrink {
            trace.attempts = history;
            return Ok(out);
        }
        if k == cfg.max_shrinks {
            return Err(TricomiError::NonContraction {
                reason: format!(
                    "{side} iteration: fitted ratio {:?} at T0 = {t0} after {} shrinks (target ≤ {SHRINK_TARGET}, tolerance met: {})",
                    report.fitted_ratio, cfg.max_shrinks, report.converged
                ),
                diffs: trace.diffs.clone(),
            });
        }
        t0 *= cfg.shrink_factor;
    }
    unreachable!("shrink loop returns from its last attempt")
}

fn preflight(problem: &ProblemSpec, cfg: &SolveConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let monitored = monitored_exponents(problem)?;
    check_growth_contract(
        problem.nonlinearity.as_ref(),
        &problem.phi.grid,
        (-2.0 * cfg.t0, cfg.t0),
        256,
        cfg.seed,
    )?;
    Ok(monitored)
}

/// Elliptic side on `[−T0, 0]`: Picard iteration for the correction `v`.
pub fn solve_elliptic_side(problem: &ProblemSpec, cfg: &SolveConfig) -> Result<EllipticSide> {
    let monitored = preflight(problem, cfg)?;
    shrink_loop(cfg, "elliptic", |t0| elliptic_attempt(problem, cfg, t0, &monitored), |s| &mut s.trace)
}

/// Hyperbolic side on `[0, T0]` with data `w(0) = φ`, `∂_t w(0) = ψ`.
/// The difference norm is the sup-in-time `L^{p0}` norm.
pub fn solve_hyperbolic_side(
    phi: &SpatialField,
    psi: &SpatialField,
    problem: &ProblemSpec,
    cfg: &SolveConfig,
) -> Result<HyperbolicSide> {
    preflight(problem, cfg)?;
    if phi.grid != psi.grid || phi.grid != problem.phi.grid {
        return Err(TricomiError::SizeMismatch("φ, ψ and the problem live on different grids".into()));
    }
    let p0 = problem.profile()?.p0.to_f64();
    shrink_loop(cfg, "hyperbolic", |t0| hyperbolic_attempt(phi, psi, problem, cfg, t0, &[p0]), |s| &mut s.trace)
}

/// Both sides glued through `(φ, ∂_t u(0⁻))`. The hyperbolic loop starts
/// from the elliptic `T0`.
pub fn solve_mixed(problem: &ProblemSpec, cfg: &SolveConfig) -> Result<MixedSolution> {
    let (profile, case) = problem.admit()?;
    let elliptic = solve_elliptic_side(problem, cfg)?;
    let hyp_cfg = SolveConfig {
        t0: elliptic.t0,
        ..*cfg
    };
    let hyperbolic = solve_hyperbolic_side(&problem.phi, &elliptic.slope_at_zero, problem, &hyp_cfg)?;

    let left = elliptic.interpolated_slope()?;
    let right = hyperbolic.interpolated_slope()?;
    let slope_norm = lp_norm(&elliptic.slope_at_zero, 2.0)?;
    let patch = PatchReport {
        value_jump: lp_norm(&elliptic.snapshots[0].axpy(-1.0, &hyperbolic.snapshots[0])?, 2.0)?,
        slope_mismatch: lp_norm(&left.axpy(-1.0, &right)?, 2.0)? / (1.0 + slope_norm),
        slope_norm,
    };

    let mut times = Vec::new();
    let mut snapshots = Vec::new();
    for (tau, f) in elliptic.taus.iter().zip(&elliptic.snapshots).rev() {
        times.push(-tau);
        snapshots.push(f.clone());
    }
    for (&t, f) in hyperbolic.times.iter().zip(&hyperbolic.snapshots).skip(1) {
        times.push(t);
        snapshots.push(f.clone());
    }
    let (p0, p1) = (profile.p0.to_f64(), profile.p1.to_f64());
    let gamma = problem.s.to_f64();
    let norms = times
        .iter()
        .zip(&snapshots)
        .map(|(&t, f)| {
            let lp = |p: f64| if p.is_nan() { Ok(f64::NAN) } else { lp_norm(f, p) };
            Ok(NormSample {
                t,
                l2: lp_norm(f, 2.0)?,
                lp0: lp(p0)?,
                lp1: lp(p1)?,
                hs: sobolev_norm(&forward_transform(f)?, gamma),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MixedSolution {
        times,
        snapshots,
        slope_at_zero: elliptic.slope_at_zero.clone(),
        norms,
        case,
        profile,
        patch,
        elliptic,
        hyperbolic,
    })
}
