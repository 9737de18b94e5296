//! Separable evaluation of `t ↦ ∫K̂(t, σ) h(σ) dσ`.
//!
//! Write `k(t, σ) = s^{m+1} t^{m−ν} σ^ν G(min·s) λ(max·s)/λ(min·s)` and let
//! `Λ = λ(as)`. For `t` right of the support the inner integral is
//! `t^{m−ν} (λ(ts)/Λ) C_R` and left of it `t^{m−ν} G(ts)(Λ/λ(ts)) C_L`, with
//! constants `C_R`, `C_L` taken over the bump. Inside the band the same two
//! pieces are accumulated over `σ < t` and `σ > t`.

use super::BumpFamily;
use crate::elliptic::{sorted_unique, KernelTable};
use crate::error::{Result, TricomiError};
use crate::quad::{GaussRule, Lagrange};
use crate::specfun::LambdaProfile;

/// Node counts of the probe quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeQuadrature {
    /// Gauss–Legendre panels across the band `(a−b, a+b)`.
    pub band_panels: usize,
    pub nodes_per_panel: usize,
    /// Nodes per gap between consecutive band nodes for the σ-integrals.
    pub gap_nodes: usize,
    /// Nodes of the rule used to build `G`.
    pub y_nodes: usize,
    /// The outer tail stops where the integrand drops below this fraction
    /// of its running peak.
    pub tail_cutoff: f64,
}

impl Default for ProbeQuadrature {
    fn default() -> Self {
        ProbeQuadrature {
            band_panels: 8,
            nodes_per_panel: 10,
            gap_nodes: 6,
            y_nodes: 12,
            tail_cutoff: 1e-14,
        }
    }
}

impl ProbeQuadrature {
    pub fn doubled(&self) -> Self {
        ProbeQuadrature {
            band_panels: 2 * self.band_panels,
            gap_nodes: 2 * self.gap_nodes,
            y_nodes: 2 * self.y_nodes,
            ..*self
        }
    }
}

/// `∫|∫K̂h dσ| dt` over the pieces of the half-line.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProbeIntegrals {
    /// `(a−b, a+b)`.
    pub band: f64,
    /// `(a+b, a+2b)`.
    pub right_near: f64,
    /// `(a+2b, ∞)`.
    pub right_far: f64,
    /// `(a−2b, a−b)`, clipped at 0.
    pub left_near: f64,
    /// `(0, a−2b)`.
    pub left_far: f64,
}

impl ProbeIntegrals {
    /// Complement of `Δ(a, 2b)`.
    pub fn offband(&self) -> f64 {
        self.right_far + self.left_far
    }

    /// `(a+b, ∞)`.
    pub fn right_tail(&self) -> f64 {
        self.right_near + self.right_far
    }

    pub fn full(&self) -> f64 {
        self.band + self.right_near + self.right_far + self.left_near + self.left_far
    }
}

/// Nodes and weights on `[lo, hi]` split into `panels` equal pieces.
fn panels(rule: &GaussRule, lo: f64, hi: f64, panels: usize) -> Vec<(f64, f64)> {
    if hi <= lo {
        return Vec::new();
    }
    let h = (hi - lo) / panels as f64;
    (0..panels)
        .flat_map(|p| rule.mapped(lo + p as f64 * h, lo + (p + 1) as f64 * h).collect::<Vec<_>>())
        .collect()
}

struct Tail {
    nodes: Vec<(f64, f64)>,
}

/// Panels from `start` to the right, widening geometrically until `f`
/// falls below `cutoff` of its running peak.
fn right_tail(rule: &GaussRule, start: f64, width0: f64, cutoff: f64, f: impl Fn(f64) -> Result<f64>) -> Result<Tail> {
    let mut nodes = Vec::new();
    let mut lo = start;
    let mut w = width0;
    let mut peak: f64 = f(start)?.abs();
    for _ in 0..400 {
        let hi = lo + w;
        nodes.extend(rule.mapped(lo, hi));
        let end = f(hi)?.abs();
        peak = peak.max(end);
        if end <= cutoff * peak && hi > start + width0 {
            return Ok(Tail { nodes });
        }
        lo = hi;
        w *= 1.25;
    }
    Err(TricomiError::Accuracy { context: "probe tail truncation".into(), first: peak, second: f64::NAN })
}

/// Panels from `end` leftwards to 0, widening geometrically; stops early
/// once `f` is below `cutoff` of its running peak.
fn left_tail(rule: &GaussRule, end: f64, width0: f64, cutoff: f64, f: impl Fn(f64) -> Result<f64>) -> Result<Tail> {
    let mut nodes = Vec::new();
    if end <= 0.0 {
        return Ok(Tail { nodes });
    }
    let mut hi = end;
    let mut w = width0.min(end);
    let mut peak: f64 = f(end)?.abs();
    loop {
        let lo = (hi - w).max(0.0);
        nodes.extend(rule.mapped(lo, hi));
        if lo == 0.0 {
            return Ok(Tail { nodes });
        }
        let v = f(lo)?.abs();
        peak = peak.max(v);
        if v * lo <= cutoff * peak * (end - lo) {
            return Ok(Tail { nodes });
        }
        hi = lo;
        w *= 2.0;
    }
}

/// `∫|p|` on `[lo, hi]` for the interpolant `p` through `(nodes, values)`,
/// split at the sign changes of `p` so each piece is integrated exactly.
fn abs_integral(nodes: &[f64], values: &[f64], lo: f64, hi: f64, rule: &GaussRule) -> f64 {
    let lag = Lagrange::new(nodes);
    let p = |x: f64| lag.basis(x).iter().zip(values).map(|(b, v)| b * v).sum::<f64>();
    const SCAN: usize = 64;
    let mut cuts = vec![lo];
    let mut prev = (lo, p(lo));
    for i in 1..=SCAN {
        let x = lo + (hi - lo) * i as f64 / SCAN as f64;
        let v = p(x);
        if prev.1 * v < 0.0 {
            let (mut a, mut b, fa) = (prev.0, x, prev.1);
            for _ in 0..60 {
                let c = 0.5 * (a + b);
                if p(c) * fa > 0.0 { a = c } else { b = c }
            }
            cuts.push(0.5 * (a + b));
        }
        prev = (x, v);
    }
    cuts.push(hi);
    cuts.windows(2)
        .map(|w| rule.integrate(w[0], w[1], p).abs())
        .sum()
}

pub fn probe_integrals(m: u32, nu: f64, probe: &super::ProbePoint, h: &BumpFamily, quad: &ProbeQuadrature) -> Result<ProbeIntegrals> {
    super::check_order(m, nu)?;
    let (a, b, s) = (probe.a, probe.b, probe.s);
    if (h.center - a).abs() > 1e-12 * a || (h.half_width - b).abs() > 1e-12 * b {
        return Err(TricomiError::SizeMismatch("bump support differs from the probe".into()));
    }
    let profile = LambdaProfile::new(m);
    let mf = m as f64;
    let pre = s.powi(m as i32 + 1);
    let rule = GaussRule::new(quad.nodes_per_panel);
    let gap_rule = GaussRule::new(quad.gap_nodes);
    let (lo, hi) = (a - b, a + b);
    let log_a = profile.eval(a * s)?.log_value;

    // outer band nodes and σ sub-nodes between them
    let band = panels(&rule, lo, hi, quad.band_panels);
    let mut cuts: Vec<f64> = vec![lo];
    cuts.extend(band.iter().map(|n| n.0));
    cuts.push(hi);
    let mut gaps: Vec<Vec<(f64, f64)>> = Vec::with_capacity(cuts.len() - 1);
    for w in cuts.windows(2) {
        gaps.push(gap_rule.mapped(w[0], w[1]).collect());
    }

    // tails need ln λ everywhere and G on the left
    let lam = |t: f64| -> Result<f64> { Ok(profile.eval(t * s)?.log_value - log_a) };
    let rate = profile.eval(hi * s)?.log_deriv().abs() * s;
    let w0 = b.min(1.0 / rate.max(1e-3));
    let rn = panels(&rule, hi, a + 2.0 * b, 2);
    let rf = right_tail(&rule, a + 2.0 * b, w0, quad.tail_cutoff, |t| Ok(t.powf(mf - nu) * lam(t)?.exp()))?;
    let ln_lo = (a - 2.0 * b).max(0.0);
    let ln = panels(&rule, ln_lo, lo, 2);
    let lrate = profile.eval(ln_lo * s)?.log_deriv().abs() * s;
    let lf = left_tail(&rule, ln_lo, b.min(1.0 / lrate.max(1e-3)), quad.tail_cutoff, |t| {
        Ok(t.powf(mf - nu + 1.0) * (-lam(t)?).exp())
    })?;

    let mut pts: Vec<f64> = Vec::new();
    pts.extend(band.iter().map(|n| n.0));
    pts.extend(gaps.iter().flatten().map(|n| n.0));
    pts.extend(rn.iter().chain(&rf.nodes).chain(&ln).chain(&lf.nodes).map(|n| n.0));
    pts.push(a);
    let pts = sorted_unique(pts.into_iter().filter(|&t| t > 0.0).collect());
    let table = KernelTable::build(&profile, s, pts, quad.y_nodes)?;
    let get = |t: f64| {
        let i = table.index(t);
        (table.log_lambda(i) - log_a, table.g(i))
    };

    // ∫ σ^ν h G e^{−ln λ}, ∫ σ^ν h e^{ln λ} per gap
    let mut right_parts = Vec::with_capacity(gaps.len());
    let mut left_parts = Vec::with_capacity(gaps.len());
    for gap in &gaps {
        let (mut r, mut l) = (0.0, 0.0);
        for &(x, w) in gap {
            let (ll, g) = get(x);
            let hv = w * x.powf(nu) * h.eval(x);
            r += hv * g * (-ll).exp();
            l += hv * ll.exp();
        }
        right_parts.push(r);
        left_parts.push(l);
    }
    let c_right: f64 = right_parts.iter().sum();
    let c_left: f64 = left_parts.iter().sum();

    let mut out = ProbeIntegrals::default();
    // suffix sums, not c_left minus a prefix: the parts span many orders of
    // magnitude and the difference would be pure rounding
    let mut suffix = vec![0.0; left_parts.len() + 1];
    for k in (0..left_parts.len()).rev() {
        suffix[k] = suffix[k + 1] + left_parts[k];
    }
    let mut acc_r = 0.0;
    let mut inner = Vec::with_capacity(band.len());
    for (k, &(t, _)) in band.iter().enumerate() {
        acc_r += right_parts[k];
        let acc_l = suffix[k + 1];
        let (ll, g) = get(t);
        inner.push(t.powf(mf - nu) * (ll.exp() * acc_r + g * (-ll).exp() * acc_l));
    }
    let q = quad.nodes_per_panel;
    let pw = (hi - lo) / quad.band_panels as f64;
    for p in 0..quad.band_panels {
        let nodes: Vec<f64> = band[p * q..(p + 1) * q].iter().map(|n| n.0).collect();
        out.band += abs_integral(&nodes, &inner[p * q..(p + 1) * q], lo + p as f64 * pw, lo + (p + 1) as f64 * pw, &rule);
    }
    let right = |nodes: &[(f64, f64)]| -> f64 {
        nodes.iter().map(|&(t, w)| w * t.powf(mf - nu) * get(t).0.exp()).sum::<f64>() * c_right.abs()
    };
    let left = |nodes: &[(f64, f64)]| -> f64 {
        nodes
            .iter()
            .filter(|n| n.0 > 0.0)
            .map(|&(t, w)| {
                let (ll, g) = get(t);
                w * t.powf(mf - nu) * g * (-ll).exp()
            })
            .sum::<f64>()
            * c_left.abs()
    };
    out.right_near = right(&rn);
    out.right_far = right(&rf.nodes);
    out.left_near = left(&ln);
    out.left_far = left(&lf.nodes);
    for v in [&mut out.band, &mut out.right_near, &mut out.right_far, &mut out.left_near, &mut out.left_far] {
        *v *= pre;
    }
    Ok(out)
}
