//! Degenerate-hyperbolic side, `t ≥ 0`.
//!
//! With `z = (4i/(2l+1)) t^{(2l+1)/2} ρ`, `ρ = |ξ|`, and `γ = (2l−1)/(2(2l+1))`
//! the mode equation `∂_t²v + t^{2l−1}ρ²v = 0` has the fundamental pair
//!
//! ```text
//! V₁ = e^{−z/2} M(γ, 2γ, z),     V₂ = t e^{−z/2} M(1−γ, 2−2γ, z)
//! ```
//!
//! normalized by `V₁(0) = 1, V₁'(0) = 0, V₂(0) = 0, V₂'(0) = 1`. Both are
//! real; the Wronskian `V₁V₂' − V₂V₁'` is identically 1, so the Duhamel
//! operator `𝒯f(t) = ∫_0^t (V₂(t)V₁(τ) − V₁(t)V₂(τ)) f(τ) dτ` solves the
//! inhomogeneous problem with zero data.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::elliptic::{fields_of, spectra_of, sorted_unique};
use crate::error::{Result, TricomiError};
use crate::modes::{apply_grouped, radial_groups, RadialGroup, WeightMatrix};
use crate::quad::{tanh_sinh, GaussRule, Lagrange};
use crate::spectral_grid::{forward_transform, inverse_transform, lp_norm, SpatialField, SpectralField, TimeGrid, TimeSeries, TorusGrid};
use crate::specfun::{gamma_fn, kummer_m};

/// Parameters of the symbol pair for one `l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorSymbols {
    pub l: u32,
    pub gamma: f64,
}

impl PropagatorSymbols {
    pub fn new(l: u32) -> Result<Self> {
        if l == 0 {
            return Err(TricomiError::domain("l must be at least 1"));
        }
        let lf = l as f64;
        Ok(PropagatorSymbols {
            l,
            gamma: (2.0 * lf - 1.0) / (2.0 * (2.0 * lf + 1.0)),
        })
    }

    /// `m = 2l − 1`.
    pub fn m(&self) -> u32 {
        2 * self.l - 1
    }

    /// `φ(t) = (2/(2l+1)) t^{(2l+1)/2}`.
    pub fn phase_map(&self, t: f64) -> f64 {
        let e = self.l as f64 + 0.5;
        t.powf(e) / e
    }

    /// `z = 2iφ(t)ρ`.
    pub fn z(&self, t: f64, rho: f64) -> Complex64 {
        Complex64::new(0.0, 2.0 * self.phase_map(t) * rho)
    }

    pub fn v1(&self, t: f64, rho: f64) -> Result<Complex64> {
        check_args(t, rho)?;
        let z = self.z(t, rho);
        Ok((-0.5 * z).exp() * kummer_m(self.gamma, 2.0 * self.gamma, z)?)
    }

    pub fn v2(&self, t: f64, rho: f64) -> Result<Complex64> {
        check_args(t, rho)?;
        let z = self.z(t, rho);
        let a = 1.0 - self.gamma;
        Ok((-0.5 * z).exp() * kummer_m(a, 2.0 * a, z)? * t)
    }

    /// Real parts of `(V₁, V₂)`.
    pub fn pair(&self, t: f64, rho: f64) -> Result<(f64, f64)> {
        if rho == 0.0 || t == 0.0 {
            return Ok((1.0, t));
        }
        Ok((self.v1(t, rho)?.re, self.v2(t, rho)?.re))
    }

    /// `(∂_t V₁, ∂_t V₂)` from `dM/dz = (a/b) M(a+1, b+1, z)`.
    pub fn pair_deriv(&self, t: f64, rho: f64) -> Result<(f64, f64)> {
        check_args(t, rho)?;
        if rho == 0.0 {
            return Ok((0.0, 1.0));
        }
        if t == 0.0 {
            return Ok((0.0, 1.0));
        }
        let z = self.z(t, rho);
        let dz = Complex64::new(0.0, 2.0 * rho * t.powf(self.l as f64 - 0.5));
        let e = (-0.5 * z).exp();
        let g = self.gamma;
        let m1 = kummer_m(g, 2.0 * g, z)?;
        let m1p = kummer_m(g + 1.0, 2.0 * g + 1.0, z)? * 0.5;
        let a = 1.0 - g;
        let m2 = kummer_m(a, 2.0 * a, z)?;
        let m2p = kummer_m(a + 1.0, 2.0 * a + 1.0, z)? * 0.5;
        let dv1 = dz * e * (m1p - 0.5 * m1);
        let dv2 = e * m2 + dz * e * (m2p - 0.5 * m2) * t;
        Ok((dv1.re, dv2.re))
    }
}

fn check_args(t: f64, rho: f64) -> Result<()> {
    if !(t >= 0.0 && rho >= 0.0) || !t.is_finite() || !rho.is_finite() {
        return Err(TricomiError::domain(format!("symbols need t, ρ ≥ 0, got ({t}, {rho})")));
    }
    Ok(())
}

pub fn v1_symbol(l: u32, t: f64, rho: f64) -> Result<Complex64> {
    PropagatorSymbols::new(l)?.v1(t, rho)
}

pub fn v2_symbol(l: u32, t: f64, rho: f64) -> Result<Complex64> {
    PropagatorSymbols::new(l)?.v2(t, rho)
}

/// `V₁` from the wave-subordination integral
/// `2^{2−2γ} Γ(2γ)/Γ(γ)² ∫_0^1 cos(φ(t)ρs) (1−s²)^{γ−1} ds`.
pub fn subordination_v1(l: u32, t: f64, rho: f64) -> Result<f64> {
    let sym = PropagatorSymbols::new(l)?;
    let g = sym.gamma;
    let k = sym.phase_map(t) * rho;
    let c = 2f64.powf(2.0 - 2.0 * g) * gamma_fn(2.0 * g)? / gamma_fn(g)?.powi(2);
    let integral = tanh_sinh(|s, _, to_one| (k * s).cos() * (to_one * (1.0 + s)).powf(g - 1.0), 0.0, 1.0, 1e-13)?;
    Ok(c * integral)
}

/// `V₂` from `t·2^{2γ} Γ(2−2γ)/Γ(1−γ)² ∫_0^1 cos(φ(t)ρs) (1−s²)^{−γ} ds`.
pub fn subordination_v2(l: u32, t: f64, rho: f64) -> Result<f64> {
    let sym = PropagatorSymbols::new(l)?;
    let g = sym.gamma;
    let k = sym.phase_map(t) * rho;
    let c = 2f64.powf(2.0 * g) * gamma_fn(2.0 - 2.0 * g)? / gamma_fn(1.0 - g)?.powi(2);
    let integral = tanh_sinh(|s, _, to_one| (k * s).cos() * (to_one * (1.0 + s)).powf(-g), 0.0, 1.0, 1e-13)?;
    Ok(t * c * integral)
}

fn xi_to_rho(xi_sq: f64) -> f64 {
    xi_sq.sqrt()
}

/// `V₁(t, D)φ + V₂(t, D)ψ`.
pub fn homogeneous_evolve(l: u32, phi: &SpectralField, psi: &SpectralField, t: f64) -> Result<SpatialField> {
    if phi.grid != psi.grid {
        return Err(TricomiError::SizeMismatch("φ and ψ live on different grids".into()));
    }
    let sym = PropagatorSymbols::new(l)?;
    let groups = radial_groups(&phi.grid.xi_sq_table());
    let pairs: Vec<(f64, f64)> = groups
        .par_iter()
        .map(|g| sym.pair(t, xi_to_rho(g.xi_sq)))
        .collect::<Result<_>>()?;
    let mut out = SpectralField::zeros(&phi.grid);
    for (g, (v1, v2)) in groups.iter().zip(pairs) {
        for &i in &g.modes {
            out.coeffs[i] = phi.coeffs[i] * v1 + psi.coeffs[i] * v2;
        }
    }
    inverse_transform(&out)
}

/// Per-radius weights of `𝒯` and the symbol values needed for the
/// homogeneous part, for one source grid and set of evaluation times.
pub(crate) struct HyperbolicPlan {
    groups: Vec<RadialGroup>,
    weights: Vec<Vec<WeightMatrix>>,
    /// `(V₁, V₂)` at the source nodes followed by the evaluation times.
    symbols: Vec<Vec<(f64, f64)>>,
    n_modes: usize,
    n_nodes: usize,
}

fn plan_group(sym: &PropagatorSymbols, rho: f64, grid: &TimeGrid, evals: &[f64]) -> Result<(Vec<WeightMatrix>, Vec<(f64, f64)>)> {
    let (nodes, wts) = grid.nodes_and_weights();
    let q = grid.nodes_per_panel();
    let sub = GaussRule::new(q);
    let n = nodes.len();
    let tmax = evals.iter().copied().fold(0.0, f64::max);
    // every time at which a symbol value is needed
    let mut times: Vec<f64> = nodes.iter().copied().filter(|&x| x < tmax).collect();
    times.extend_from_slice(evals);
    let mut partials = Vec::new();
    for (i, &t) in evals.iter().enumerate() {
        if let Some(p) = (0..grid.panels()).find(|&p| grid.panel(p).0 < t && t < grid.panel(p).1) {
            let a = grid.panel(p).0;
            let lag = Lagrange::new(&nodes[p * q..(p + 1) * q]);
            let pieces: Vec<(f64, f64, Vec<f64>)> = sub.mapped(a, t).map(|(x, w)| (x, w, lag.basis(x))).collect();
            times.extend(pieces.iter().map(|pc| pc.0));
            partials.push((i, p, pieces));
        }
    }
    let times = sorted_unique(times);
    let vals: Vec<(f64, f64)> = times.iter().map(|&t| sym.pair(t, rho)).collect::<Result<_>>()?;
    let lookup = |t: f64| vals[times.binary_search_by(|x| x.total_cmp(&t)).expect("symbol time missing")];
    let mut value = WeightMatrix::zeros(evals.len(), n);
    let mut slope = WeightMatrix::zeros(evals.len(), n);
    for (i, &t) in evals.iter().enumerate() {
        if t == 0.0 {
            continue;
        }
        let (a1, a2) = lookup(t);
        let (d1, d2) = sym.pair_deriv(t, rho)?;
        let partial = partials.iter().find(|pp| pp.0 == i);
        for j in 0..n {
            let p = j / q;
            if grid.panel(p).1 > t {
                continue;
            }
            let (b1, b2) = lookup(nodes[j]);
            value.add(i, j, wts[j] * (a2 * b1 - a1 * b2));
            slope.add(i, j, wts[j] * (d2 * b1 - d1 * b2));
        }
        if let Some((_, p, pieces)) = partial {
            for (x, w, basis) in pieces {
                let (b1, b2) = lookup(*x);
                let k = w * (a2 * b1 - a1 * b2);
                let kd = w * (d2 * b1 - d1 * b2);
                for (l, b) in basis.iter().enumerate() {
                    value.add(i, p * q + l, k * b);
                    slope.add(i, p * q + l, kd * b);
                }
            }
        }
    }
    let mut sym_vals: Vec<(f64, f64)> = nodes.iter().map(|&x| sym.pair(x, rho)).collect::<Result<_>>()?;
    sym_vals.extend(evals.iter().map(|&t| lookup(t)));
    Ok((vec![value, slope], sym_vals))
}

impl HyperbolicPlan {
    pub fn build(l: u32, space: &TorusGrid, grid: &TimeGrid, evals: &[f64]) -> Result<Self> {
        if evals.iter().any(|&t| t < grid.t_start() || t > grid.t_end()) {
            return Err(TricomiError::domain("evaluation times must lie within the source grid"));
        }
        if grid.t_start() != 0.0 {
            return Err(TricomiError::domain("hyperbolic source grid must start at t = 0"));
        }
        let sym = PropagatorSymbols::new(l)?;
        let groups = radial_groups(&space.xi_sq_table());
        let built: Vec<(Vec<WeightMatrix>, Vec<(f64, f64)>)> = groups
            .par_iter()
            .map(|g| plan_group(&sym, xi_to_rho(g.xi_sq), grid, evals))
            .collect::<Result<_>>()?;
        let (weights, symbols) = built.into_iter().unzip();
        Ok(HyperbolicPlan {
            groups,
            weights,
            symbols,
            n_modes: space.len(),
            n_nodes: grid.len(),
        })
    }

    /// `(𝒯f, ∂_t 𝒯f)` at the evaluation times, as spectra.
    pub fn apply(&self, spectra: &[Vec<Complex64>]) -> (Vec<Vec<Complex64>>, Vec<Vec<Complex64>>) {
        let mut out = apply_grouped(&self.groups, &self.weights, spectra, self.n_modes);
        let d = out.pop().unwrap();
        let v = out.pop().unwrap();
        (v, d)
    }

    /// `V₁φ̂ + V₂ψ̂` at the source nodes and at the evaluation times.
    pub fn homogeneous(&self, phi: &[Complex64], psi: &[Complex64]) -> (Vec<Vec<Complex64>>, Vec<Vec<Complex64>>) {
        let total = self.symbols.first().map_or(0, |s| s.len());
        let mut all = vec![vec![Complex64::new(0.0, 0.0); self.n_modes]; total];
        for (g, vals) in self.groups.iter().zip(&self.symbols) {
            for (k, &(v1, v2)) in vals.iter().enumerate() {
                for &i in &g.modes {
                    all[k][i] = phi[i] * v1 + psi[i] * v2;
                }
            }
        }
        let evals = all.split_off(self.n_nodes);
        (all, evals)
    }
}

/// `𝒯f` at each evaluation time for a source sampled on a grid from `t = 0`.
pub fn duhamel_t(l: u32, f: &TimeSeries, t_eval: &[f64]) -> Result<Vec<SpatialField>> {
    let space = f.fields[0].grid.clone();
    let plan = HyperbolicPlan::build(l, &space, &f.grid, t_eval)?;
    let (v, _) = plan.apply(&spectra_of(&f.fields)?);
    fields_of(&space, v)
}

/// `(‖V₁(t,D)g‖_p / ‖g‖_p, ‖V₂(t,D)g‖_p / (t‖g‖_p))`.
pub fn operator_norm_probe(l: u32, g: &SpatialField, p: f64, t: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) {
        return Err(TricomiError::domain("operator probe needs t > 0"));
    }
    let gn = lp_norm(g, p)?;
    if gn == 0.0 {
        return Err(TricomiError::domain("operator probe is undefined for g ≡ 0"));
    }
    let ghat = forward_transform(g)?;
    let zero = SpectralField::zeros(&g.grid);
    let w1 = homogeneous_evolve(l, &ghat, &zero, t)?;
    let w2 = homogeneous_evolve(l, &zero, &ghat, t)?;
    Ok((lp_norm(&w1, p)? / gn, lp_norm(&w2, p)? / (t * gn)))
}

#[cfg(test)]
mod tests;
