//! Quadrature rules: Gauss–Legendre, adaptive Gauss–Legendre, tanh-sinh,
//! and Lagrange interpolation on arbitrary nodes.

use std::f64::consts::PI;

use crate::error::{Result, TricomiError};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Builds the `n`-point rule by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let half = n.div_ceil(2);
        for i in 0..half {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_deriv(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_deriv(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped affinely onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (c + h * x, h * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive Gauss–Legendre on `[a, b]`: a panel is accepted when the 10-point
/// rule and the sum of 10-point rules on its halves agree to `tol` relative to
/// the running magnitude, otherwise it is bisected.
pub fn adaptive_gauss(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let rule = GaussRule::new(10);
    let whole = rule.integrate(a, b, &f);
    let mut stack = vec![(a, b, whole, 0usize)];
    let mut total = 0.0;
    let mut scale = whole.abs();
    let mut panels = 0usize;
    while let Some((lo, hi, est, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(lo, mid, &f);
        let right = rule.integrate(mid, hi, &f);
        let refined = left + right;
        scale = scale.max(refined.abs());
        let err = (refined - est).abs();
        if err <= tol * scale.max(1e-300) || err < 1e-300 || (hi - lo) < 1e-15 * (b - a).abs() {
            total += refined;
        } else if depth >= 60 {
            return Err(TricomiError::Accuracy {
                context: "adaptive Gauss-Legendre".into(),
                first: est,
                second: refined,
            });
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
        panels += 1;
        if panels > 200_000 {
            return Err(TricomiError::Accuracy {
                context: "adaptive Gauss-Legendre panel budget".into(),
                first: est,
                second: refined,
            });
        }
    }
    Ok(total)
}

/// Adaptive integration of a nonnegative, eventually decaying integrand over
/// `[a, ∞)`: doubling panels are added until a panel contributes less than
/// `tol` of the accumulated value.
pub fn adaptive_gauss_tail(f: impl Fn(f64) -> f64, a: f64, width: f64, tol: f64) -> Result<f64> {
    let mut lo = a;
    let mut w = width;
    let mut total = 0.0;
    for _ in 0..200 {
        let part = adaptive_gauss(&f, lo, lo + w, tol)?;
        total += part;
        if part.abs() <= tol * total.abs() || (total == 0.0 && part == 0.0) {
            return Ok(total);
        }
        lo += w;
        w *= 2.0;
    }
    Err(TricomiError::Accuracy {
        context: "semi-infinite tail".into(),
        first: total,
        second: f64::NAN,
    })
}

/// Tanh-sinh quadrature on `[a, b]`.
///
/// The integrand receives `(x, x - a, b - x)` so endpoint singularities can be
/// evaluated from the complements without cancellation.
pub fn tanh_sinh(f: impl Fn(f64, f64, f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let half = 0.5 * (b - a);
    let eval = |t: f64| -> f64 {
        let u = 0.5 * PI * t.sinh();
        let cu = u.cosh();
        // 1 - tanh(u) and 1 + tanh(u) written without cancellation
        let e = (-2.0 * u.abs()).exp();
        let small = 2.0 * e / (1.0 + e);
        let (to_a, to_b) = if u >= 0.0 {
            (half * (2.0 - small), half * small)
        } else {
            (half * small, half * (2.0 - small))
        };
        if to_a <= 0.0 || to_b <= 0.0 {
            return 0.0;
        }
        let w = half * 0.5 * PI * t.cosh() / (cu * cu);
        let x = if u >= 0.0 { b - to_b } else { a + to_a };
        w * f(x, to_a, to_b)
    };
    let tmax = 6.0;
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= tmax {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut est = h * sum;
    for _ in 0..12 {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= tmax {
            let t = k as f64 * h;
            sum += eval(t) + eval(-t);
            k += 2;
        }
        let next = h * sum;
        if (next - est).abs() <= tol * next.abs().max(1e-300) {
            return Ok(next);
        }
        est = next;
    }
    Err(TricomiError::Accuracy {
        context: "tanh-sinh".into(),
        first: est,
        second: h * sum,
    })
}

/// Fixed tanh-sinh rule on `[-1, 1]` with step `h`, truncated where the
/// weights fall below 1e-300.
pub fn tanh_sinh_rule(h: f64) -> GaussRule {
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut k: i64 = 0;
    loop {
        let t = k as f64 * h;
        let u = 0.5 * PI * t.sinh();
        let x = u.tanh();
        let w = h * 0.5 * PI * t.cosh() / u.cosh().powi(2);
        if w < 1e-300 || x >= 1.0 {
            break;
        }
        if k == 0 {
            nodes.push(0.0);
            weights.push(w);
        } else {
            nodes.push(x);
            weights.push(w);
            nodes.push(-x);
            weights.push(w);
        }
        k += 1;
    }
    let mut idx: Vec<usize> = (0..nodes.len()).collect();
    idx.sort_by(|&i, &j| nodes[i].total_cmp(&nodes[j]));
    GaussRule {
        nodes: idx.iter().map(|&i| nodes[i]).collect(),
        weights: idx.iter().map(|&i| weights[i]).collect(),
    }
}

/// Lagrange basis on a fixed node set, evaluated in barycentric form.
#[derive(Debug, Clone)]
pub struct Lagrange {
    nodes: Vec<f64>,
    bary: Vec<f64>,
}

impl Lagrange {
    pub fn new(nodes: &[f64]) -> Self {
        let n = nodes.len();
        let mut bary = vec![1.0; n];
        for j in 0..n {
            for k in 0..n {
                if j != k {
                    bary[j] /= nodes[j] - nodes[k];
                }
            }
        }
        Lagrange {
            nodes: nodes.to_vec(),
            bary,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Values of every basis polynomial at `x`.
    pub fn basis(&self, x: f64) -> Vec<f64> {
        let n = self.nodes.len();
        if let Some(j) = self.nodes.iter().position(|&xj| xj == x) {
            let mut out = vec![0.0; n];
            out[j] = 1.0;
            return out;
        }
        let terms: Vec<f64> = (0..n).map(|j| self.bary[j] / (x - self.nodes[j])).collect();
        let denom: f64 = terms.iter().sum();
        terms.into_iter().map(|t| t / denom).collect()
    }

    /// Derivatives of every basis polynomial at `x`.
    pub fn basis_deriv(&self, x: f64) -> Vec<f64> {
        let n = self.nodes.len();
        let mut out = vec![0.0; n];
        if let Some(i) = self.nodes.iter().position(|&xi| xi == x) {
            // differentiation matrix row at a node
            let mut diag = 0.0;
            for j in 0..n {
                if j != i {
                    let d = (self.bary[j] / self.bary[i]) / (self.nodes[i] - self.nodes[j]);
                    out[j] = d;
                    diag -= d;
                }
            }
            out[i] = diag;
            return out;
        }
        let l = self.basis(x);
        let s: f64 = (0..n).map(|k| l[k] / (x - self.nodes[k])).sum();
        for j in 0..n {
            out[j] = l[j] * (s - 1.0 / (x - self.nodes[j]));
        }
        out
    }
}
