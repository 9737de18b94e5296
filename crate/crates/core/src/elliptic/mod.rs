//! Degenerate-elliptic side, in flipped time `τ = −t ≥ 0`.
//!
//! Mode by mode, with `s = |ξ|^{2/(m+2)}` the equation is
//! `∂_τ²ŵ − τ^m s^{m+2} ŵ = τ^ν ĝ`. The homogeneous solution with `ŵ(0) = ψ̂`
//! that stays bounded is `λ(τs) ψ̂`; the inhomogeneous one with `ŵ(0) = 0` is
//!
//! ```text
//! ŵ(τ) = −∫_0^∞ T̂(τ, σ, s) σ^ν ĝ(σ) dσ
//! ```
//!
//! and its slope in the original time `t = −τ` at the interface is
//! `∂_t ŵ(0) = ∫_0^∞ λ(σs) σ^ν ĝ(σ) dσ`.

mod kernel;

pub use kernel::{duhamel_kernel_m0, duhamel_kernel_t};
pub(crate) use kernel::{sorted_unique, KernelTable};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, TricomiError};
use crate::modes::{apply_grouped, radial_groups, WeightMatrix};
use crate::quad::{GaussRule, Lagrange};
use crate::spectral_grid::{
    forward_transform, inverse_transform, lp_norm, partial, sobolev_norm, SpatialField, SpectralField, TimeGrid,
    TimeSeries, TorusGrid,
};
use crate::specfun::LambdaProfile;

/// Discretization of the `σ`-integral.
#[derive(Debug, Clone, Copy)]
pub struct DuhamelQuadrature {
    /// Panels of the source grid built by [`DuhamelQuadrature::source_grid`].
    pub sigma_panels: usize,
    pub sigma_nodes_per_panel: usize,
    /// Gauss nodes per panel of the inner `y`-integral defining `G`.
    pub y_nodes: usize,
    /// Upper limit of the `σ`-integral; must cover the source support.
    pub sigma_cutoff: f64,
}

impl Default for DuhamelQuadrature {
    fn default() -> Self {
        DuhamelQuadrature {
            sigma_panels: 8,
            sigma_nodes_per_panel: 10,
            y_nodes: 12,
            sigma_cutoff: 1.0,
        }
    }
}

impl DuhamelQuadrature {
    pub fn validate(&self) -> Result<()> {
        if self.sigma_nodes_per_panel < 4 || self.y_nodes < 4 {
            return Err(TricomiError::domain("Duhamel node counts must be at least 4"));
        }
        if self.sigma_panels == 0 || !(self.sigma_cutoff > 0.0) {
            return Err(TricomiError::domain("Duhamel quadrature needs panels ≥ 1 and a positive cutoff"));
        }
        Ok(())
    }

    /// Source grid on `[0, sigma_cutoff]`, graded toward `σ = 0`.
    pub fn source_grid(&self) -> Result<TimeGrid> {
        self.validate()?;
        TimeGrid::graded(0.0, self.sigma_cutoff, self.sigma_panels, self.sigma_nodes_per_panel)
    }
}

/// `s = |ξ|^{2/(m+2)}` from `|ξ|²`.
pub(crate) fn frequency_s(m: u32, xi_sq: f64) -> f64 {
    xi_sq.powf(1.0 / (m as f64 + 2.0))
}

/// `λ(τs) ψ̂` for every mode.
pub fn homogeneous_evolve(m: u32, psi: &SpectralField, tau: f64) -> Result<SpectralField> {
    if !(tau >= 0.0) {
        return Err(TricomiError::domain(format!("elliptic evolution needs τ ≥ 0, got {tau}")));
    }
    if tau == 0.0 {
        return Ok(psi.clone());
    }
    let profile = LambdaProfile::new(m);
    let xi2 = psi.grid.xi_sq_table();
    let groups = radial_groups(&xi2);
    let mut out = psi.clone();
    for g in &groups {
        let v = profile.eval(tau * frequency_s(m, g.xi_sq))?.value;
        for &i in &g.modes {
            out.coeffs[i] = psi.coeffs[i] * v;
        }
    }
    Ok(out)
}

/// Quadrature weights of the Duhamel solve for one frequency `s`:
/// `ŵ(τ_i) = Σ_j value[i,j] ĝ(σ_j)` and `∂_τ ŵ(τ_i) = Σ_j slope[i,j] ĝ(σ_j)`,
/// where `σ_j` are the nodes of the source grid.
#[derive(Debug, Clone)]
pub struct ModeWeights {
    pub(crate) value: WeightMatrix,
    pub(crate) slope: WeightMatrix,
}

impl ModeWeights {
    /// Values and `τ`-derivatives at the evaluation times.
    pub fn apply(&self, g: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (self.value.apply_real(g), self.slope.apply_real(g))
    }
}

/// Splits of a panel containing an evaluation time in its interior: the
/// kernel kinks there, so each side gets its own Gauss rule and the source is
/// carried over by Lagrange interpolation from the panel nodes.
struct Split {
    eval: usize,
    panel: usize,
    pieces: Vec<(f64, f64, Vec<f64>)>, // (node, weight, Lagrange basis)
}

fn plan_splits(grid: &TimeGrid, evals: &[f64], sub: &GaussRule, lower_only: bool) -> Vec<Split> {
    let nodes = grid.nodes();
    let q = grid.nodes_per_panel();
    let mut out = Vec::new();
    for (i, &t) in evals.iter().enumerate() {
        for p in 0..grid.panels() {
            let (a, b) = grid.panel(p);
            if !(a < t && t < b) {
                continue;
            }
            let lag = Lagrange::new(&nodes[p * q..(p + 1) * q]);
            let mut pieces = Vec::new();
            let mut sides = vec![(a, t)];
            if !lower_only {
                sides.push((t, b));
            }
            for (lo, hi) in sides {
                for (x, w) in sub.mapped(lo, hi) {
                    pieces.push((x, w, lag.basis(x)));
                }
            }
            out.push(Split { eval: i, panel: p, pieces });
        }
    }
    out
}

/// Builds [`ModeWeights`] for one frequency.
pub fn mode_weights(
    m: u32,
    nu: f64,
    s: f64,
    grid: &TimeGrid,
    evals: &[f64],
    y_nodes: usize,
) -> Result<ModeWeights> {
    if evals.iter().any(|&t| !(t >= 0.0)) {
        return Err(TricomiError::domain("evaluation times must be nonnegative"));
    }
    let profile = LambdaProfile::new(m);
    let (nodes, wts) = grid.nodes_and_weights();
    let q = grid.nodes_per_panel();
    let sub = GaussRule::new(q);
    let splits = plan_splits(grid, evals, &sub, false);
    let n = nodes.len();
    let mut value = WeightMatrix::zeros(evals.len(), n);
    let mut slope = WeightMatrix::zeros(evals.len(), n);
    let mut split_of = vec![usize::MAX; evals.len()];
    for sp in &splits {
        split_of[sp.eval] = sp.panel;
    }
    let in_split = |i: usize, p: usize| split_of[i] == p;
    let sigma_nu = |x: f64| if nu == 0.0 { 1.0 } else { x.powf(nu) };

    if s == 0.0 {
        let kern = |t: f64, x: f64| (t.min(x), if t < x { 1.0 } else { 0.0 });
        for (i, &t) in evals.iter().enumerate() {
            for j in 0..n {
                if in_split(i, j / q) {
                    continue;
                }
                let (k, kd) = kern(t, nodes[j]);
                let c = wts[j] * sigma_nu(nodes[j]);
                value.add(i, j, -c * k);
                slope.add(i, j, -c * kd);
            }
        }
        for sp in &splits {
            let t = evals[sp.eval];
            for (x, w, basis) in &sp.pieces {
                let (k, kd) = kern(t, *x);
                let c = w * sigma_nu(*x);
                for (l, b) in basis.iter().enumerate() {
                    value.add(sp.eval, sp.panel * q + l, -c * k * b);
                    slope.add(sp.eval, sp.panel * q + l, -c * kd * b);
                }
            }
        }
        return Ok(ModeWeights { value, slope });
    }

    let mut times = nodes.clone();
    times.extend_from_slice(evals);
    for sp in &splits {
        times.extend(sp.pieces.iter().map(|p| p.0));
    }
    times.retain(|&t| t > 0.0);
    let table = KernelTable::build(&profile, s, sorted_unique(times), y_nodes)?;
    let node_idx: Vec<usize> = nodes.iter().map(|&x| table.index(x)).collect();
    for (i, &t) in evals.iter().enumerate() {
        if t == 0.0 {
            // T̂(0, σ) = 0 and ∂_t T̂(0, σ) = λ(σ s)
            for j in 0..n {
                let c = wts[j] * sigma_nu(nodes[j]);
                slope.add(i, j, -c * table.log_lambda(node_idx[j]).exp());
            }
            continue;
        }
        let ti = table.index(t);
        for j in 0..n {
            if in_split(i, j / q) {
                continue;
            }
            let c = wts[j] * sigma_nu(nodes[j]);
            value.add(i, j, -c * table.kernel(ti, node_idx[j]));
            slope.add(i, j, -c * table.kernel_dt(ti, node_idx[j]));
        }
    }
    for sp in &splits {
        let ti = table.index(evals[sp.eval]);
        for (x, w, basis) in &sp.pieces {
            let xj = table.index(*x);
            let c = w * sigma_nu(*x);
            let k = table.kernel(ti, xj);
            let kd = table.kernel_dt(ti, xj);
            for (l, b) in basis.iter().enumerate() {
                value.add(sp.eval, sp.panel * q + l, -c * k * b);
                slope.add(sp.eval, sp.panel * q + l, -c * kd * b);
            }
        }
    }
    Ok(ModeWeights { value, slope })
}

/// Weights of `∂_t ŵ(0) = ∫ λ(σs) σ^ν ĝ dσ` (original time) on the source grid.
pub(crate) fn slope_weights(profile: &LambdaProfile, nu: f64, s: f64, grid: &TimeGrid) -> Result<Vec<f64>> {
    let (nodes, wts) = grid.nodes_and_weights();
    nodes
        .iter()
        .zip(&wts)
        .map(|(&x, &w)| {
            let sn = if nu == 0.0 { 1.0 } else { x.powf(nu) };
            Ok(w * sn * profile.eval(x * s)?.value)
        })
        .collect()
}

/// Output of [`solve_inhomogeneous`].
#[derive(Debug, Clone)]
pub struct EllipticSolution {
    pub eval_times: Vec<f64>,
    pub snapshots: Vec<SpatialField>,
    /// `∂_τ w` at the evaluation times.
    pub tau_derivs: Vec<SpatialField>,
    /// `∂_t w` at the interface, in the original time `t = −τ`.
    pub initial_slope: SpatialField,
}

/// One row of a per-snapshot norm table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormRow {
    pub tau: f64,
    pub l2: f64,
    pub lp: f64,
    pub hs: f64,
}

impl EllipticSolution {
    pub fn norm_table(&self, p: f64, gamma: f64) -> Result<Vec<NormRow>> {
        self.eval_times
            .iter()
            .zip(&self.snapshots)
            .map(|(&tau, f)| {
                Ok(NormRow {
                    tau,
                    l2: lp_norm(f, 2.0)?,
                    lp: lp_norm(f, p)?,
                    hs: sobolev_norm(&forward_transform(f)?, gamma),
                })
            })
            .collect()
    }
}

fn check_source(g: &TimeSeries, quad: &DuhamelQuadrature) -> Result<()> {
    quad.validate()?;
    if g.fields.is_empty() {
        return Err(TricomiError::domain("source has no snapshots"));
    }
    if g.grid.t_start() != 0.0 {
        return Err(TricomiError::domain("elliptic source grid must start at τ = 0"));
    }
    if g.grid.t_end() > quad.sigma_cutoff * (1.0 + 1e-12) {
        return Err(TricomiError::domain(format!(
            "source support {} exceeds sigma_cutoff {}",
            g.grid.t_end(),
            quad.sigma_cutoff
        )));
    }
    Ok(())
}

pub(crate) fn spectra_of(fields: &[SpatialField]) -> Result<Vec<Vec<Complex64>>> {
    fields.iter().map(|f| Ok(forward_transform(f)?.coeffs)).collect()
}

pub(crate) fn fields_of(grid: &TorusGrid, spectra: Vec<Vec<Complex64>>) -> Result<Vec<SpatialField>> {
    spectra
        .into_iter()
        .map(|c| inverse_transform(&SpectralField::new(grid.clone(), c)?))
        .collect()
}

/// Per-radius Duhamel weights for a whole grid, reusable across solves with
/// the same source grid and evaluation times.
pub(crate) struct EllipticPlan {
    groups: Vec<crate::modes::RadialGroup>,
    weights: Vec<Vec<WeightMatrix>>,
    n_modes: usize,
}

impl EllipticPlan {
    pub fn build(
        m: u32,
        nu: f64,
        space: &TorusGrid,
        source: &TimeGrid,
        evals: &[f64],
        y_nodes: usize,
        verify: bool,
    ) -> Result<Self> {
        let groups = radial_groups(&space.xi_sq_table());
        let profile = LambdaProfile::new(m);
        let weights: Vec<Vec<WeightMatrix>> = groups
            .par_iter()
            .map(|g| {
                let s = frequency_s(m, g.xi_sq);
                let w = mode_weights(m, nu, s, source, evals, y_nodes)?;
                let sw = slope_weights(&profile, nu, s, source)?;
                let mut slope0 = WeightMatrix::zeros(1, sw.len());
                slope0.data = sw;
                Ok(vec![w.value, w.slope, slope0])
            })
            .collect::<Result<_>>()?;
        if verify {
            if let Some(last) = groups.last() {
                let s = frequency_s(m, last.xi_sq);
                let fine = mode_weights(m, nu, s, source, evals, 2 * y_nodes)?;
                let coarse = &weights[groups.len() - 1][0];
                let scale = coarse.data.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                let diff = coarse
                    .data
                    .iter()
                    .zip(&fine.value.data)
                    .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
                if diff > 1e-8 * scale.max(1e-300) {
                    return Err(TricomiError::Accuracy {
                        context: format!("Duhamel weights under y-node doubling at s={s}"),
                        first: scale,
                        second: diff,
                    });
                }
            }
        }
        Ok(EllipticPlan {
            groups,
            weights,
            n_modes: space.len(),
        })
    }

    /// `(values, τ-derivatives, interface slope)` as spectra.
    pub fn apply(&self, spectra: &[Vec<Complex64>]) -> (Vec<Vec<Complex64>>, Vec<Vec<Complex64>>, Vec<Complex64>) {
        let mut out = apply_grouped(&self.groups, &self.weights, spectra, self.n_modes);
        let slope = out.pop().unwrap().pop().unwrap();
        let derivs = out.pop().unwrap();
        let values = out.pop().unwrap();
        (values, derivs, slope)
    }
}

/// Solves `∂_τ²w + τ^m Δw = τ^ν g` with `w(0) = 0` and `w` bounded, for a
/// source given on a grid starting at `τ = 0`.
pub fn solve_inhomogeneous(
    m: u32,
    nu: f64,
    g: &TimeSeries,
    quad: &DuhamelQuadrature,
    eval_times: &[f64],
) -> Result<EllipticSolution> {
    check_source(g, quad)?;
    if !(0.0..=m as f64).contains(&nu) {
        return Err(TricomiError::domain(format!("ν must lie in [0, m], got {nu}")));
    }
    let space = g.fields[0].grid.clone();
    let plan = EllipticPlan::build(m, nu, &space, &g.grid, eval_times, quad.y_nodes, true)?;
    let (values, derivs, slope) = plan.apply(&spectra_of(&g.fields)?);
    Ok(EllipticSolution {
        eval_times: eval_times.to_vec(),
        snapshots: fields_of(&space, values)?,
        tau_derivs: fields_of(&space, derivs)?,
        initial_slope: inverse_transform(&SpectralField::new(space, slope)?)?,
    })
}

/// `∂_t w(0, ·)` in the original time, `F⁻¹[∫ λ(σs) σ^ν ĝ(σ) dσ]`.
pub fn initial_slope(m: u32, nu: f64, g: &TimeSeries, quad: &DuhamelQuadrature) -> Result<SpatialField> {
    check_source(g, quad)?;
    let space = g.fields[0].grid.clone();
    let spectra = spectra_of(&g.fields)?;
    let profile = LambdaProfile::new(m);
    let groups = radial_groups(&space.xi_sq_table());
    let mut out = SpectralField::zeros(&space);
    for grp in &groups {
        let w = slope_weights(&profile, nu, frequency_s(m, grp.xi_sq), &g.grid)?;
        for &i in &grp.modes {
            out.coeffs[i] = w.iter().zip(&spectra).map(|(wj, sj)| sj[i] * *wj).sum();
        }
    }
    inverse_transform(&out)
}

/// Left-hand norms of the weighted estimate on `G_T = [0,T] × ℝⁿ`, each
/// divided by `‖g‖_{L^p}` over the source grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedReport {
    pub p: f64,
    pub dtt: f64,
    pub weighted_laplacian: f64,
    pub weighted_mixed: f64,
    pub dt: f64,
    pub weighted_gradient: f64,
    pub value: f64,
    /// `sup_τ (‖w(τ)‖_p + ‖∂_τ w(τ)‖_p) / ‖g‖_p`.
    pub trace: f64,
}

fn spacetime_norm(weights: &[f64], slices: &[f64], p: f64) -> f64 {
    weights.iter().zip(slices).map(|(w, n)| w * n.powf(p)).sum::<f64>().powf(1.0 / p)
}

pub fn weighted_estimate_report(
    m: u32,
    nu: f64,
    g: &TimeSeries,
    quad: &DuhamelQuadrature,
    t_max: f64,
    p: f64,
) -> Result<WeightedReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(TricomiError::domain(format!("weighted report needs p ∈ (1, ∞), got {p}")));
    }
    check_source(g, quad)?;
    let (_, gw) = g.grid.nodes_and_weights();
    let g_slices: Vec<f64> = g.fields.iter().map(|f| lp_norm(f, p)).collect::<Result<_>>()?;
    let g_norm = spacetime_norm(&gw, &g_slices, p);
    if g_norm == 0.0 {
        return Err(TricomiError::domain("weighted report is undefined for g ≡ 0"));
    }
    // evaluation grid: source panels below T, then T itself
    let mut breaks: Vec<f64> = g.grid.breaks().iter().copied().filter(|&b| b < t_max).collect();
    breaks.push(t_max);
    let eval_grid = TimeGrid::from_breaks(breaks, g.grid.nodes_per_panel())?;
    let (taus, ew) = eval_grid.nodes_and_weights();
    let sol = solve_inhomogeneous(m, nu, g, quad, &taus)?;
    let space = &g.fields[0].grid;
    let mf = m as f64;
    let mut rows: [Vec<f64>; 6] = Default::default();
    let mut trace = 0.0f64;
    for (k, &tau) in taus.iter().enumerate() {
        let w = &sol.snapshots[k];
        let wt = &sol.tau_derivs[k];
        let what = forward_transform(w)?;
        let wthat = forward_transform(wt)?;
        let lap = inverse_transform(&crate::spectral_grid::laplacian(&what))?;
        let src = g.interpolate(tau);
        // ∂_τ²w = τ^ν g − τ^m Δw
        let tnu = if nu == 0.0 { 1.0 } else { tau.powf(nu) };
        let dtt = src.scaled(tnu).axpy(-tau.powf(mf), &lap)?;
        rows[0].push(lp_norm(&dtt, p)?);
        rows[1].push(tau.powf(mf - nu) * lp_norm(&lap, p)?);
        let half = tau.powf(0.5 * (mf - nu));
        let mut mixed = 0.0;
        let mut grad = 0.0;
        for axis in 0..space.dim() {
            mixed += lp_norm(&inverse_transform(&partial(&wthat, axis)?)?, p)?;
            grad += lp_norm(&inverse_transform(&partial(&what, axis)?)?, p)?;
        }
        rows[2].push(half * mixed);
        let ndt = lp_norm(wt, p)?;
        let nw = lp_norm(w, p)?;
        rows[3].push(ndt);
        rows[4].push(half * grad);
        rows[5].push(nw);
        trace = trace.max(nw + ndt);
    }
    let r = |i: usize| spacetime_norm(&ew, &rows[i], p) / g_norm;
    Ok(WeightedReport {
        p,
        dtt: r(0),
        weighted_laplacian: r(1),
        weighted_mixed: r(2),
        dt: r(3),
        weighted_gradient: r(4),
        value: r(5),
        trace: trace / g_norm,
    })
}

#[cfg(test)]
mod tests;
