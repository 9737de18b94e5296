//! Exponent calculus, solvability gate and iteration-case classifier.
//!
//! Boundary cases are equalities between exponents, so everything is
//! computed in exact rational arithmetic whenever the inputs are rational.
//! A [`Scalar`] silently degrades to `f64` when an input is irrational or an
//! intermediate overflows `i64`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, ToPrimitive, Zero};

use crate::error::{Result, TricomiError};

/// A real number, exact when possible.
#[derive(Debug, Clone, Copy)]
pub enum Scalar {
    Exact(Rational64),
    Approx(f64),
}

impl Scalar {
    pub fn int(v: i64) -> Self {
        Scalar::Exact(Rational64::from_integer(v))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::Exact(Rational64::new(num, den))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Approx(x) => x,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_zero(self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Approx(x) => x == 0.0,
        }
    }

    pub fn signum(self) -> Ordering {
        self.partial_cmp(&Scalar::int(0)).unwrap_or(Ordering::Equal)
    }

    pub fn recip(self) -> Self {
        Scalar::int(1) / self
    }

    fn combine(
        self,
        rhs: Self,
        exact: impl Fn(&Rational64, &Rational64) -> Option<Rational64>,
        approx: impl Fn(f64, f64) -> f64,
    ) -> Self {
        if let (Scalar::Exact(a), Scalar::Exact(b)) = (self, rhs) {
            if let Some(r) = exact(&a, &b) {
                return Scalar::Exact(r);
            }
        }
        Scalar::Approx(approx(self.to_f64(), rhs.to_f64()))
    }
}

impl From<f64> for Scalar {
    /// Dyadic values with a small denominator are taken exactly.
    fn from(x: f64) -> Self {
        if x.is_finite() && x.abs() < (1u64 << 40) as f64 {
            let scaled = x * (1u64 << 20) as f64;
            if scaled.fract() == 0.0 {
                return Scalar::Exact(Rational64::new(scaled as i64, 1 << 20));
            }
        }
        Scalar::Approx(x)
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::int(v)
    }
}

impl FromStr for Scalar {
    type Err = TricomiError;

    /// Accepts `a/b`, plain decimals (exact) and anything `f64` parses.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || TricomiError::Parse(format!("not a number: {s:?}"));
        if let Some((a, b)) = t.split_once('/') {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0 {
                return Err(bad());
            }
            return Ok(Scalar::ratio(a, b));
        }
        let plain = t.trim_start_matches(['-', '+']);
        if !plain.is_empty() && plain.chars().all(|c| c.is_ascii_digit() || c == '.') && plain.matches('.').count() <= 1 {
            let (ip, fp) = plain.split_once('.').unwrap_or((plain, ""));
            if ip.len() + fp.len() <= 17 {
                let digits: i64 = format!("{ip}{fp}").parse().unwrap_or(0);
                let sign = if t.starts_with('-') { -1 } else { 1 };
                return Ok(Scalar::ratio(sign * digits, 10i64.pow(fp.len() as u32)));
            }
        }
        let x: f64 = t.parse().map_err(|_| bad())?;
        Ok(Scalar::from(x))
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Self) -> Self {
        self.combine(rhs, |a, b| a.checked_add(b), |a, b| a + b)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Self) -> Self {
        self.combine(rhs, |a, b| a.checked_sub(b), |a, b| a - b)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Self) -> Self {
        self.combine(rhs, |a, b| a.checked_mul(b), |a, b| a * b)
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Self) -> Self {
        self.combine(rhs, |a, b| if b.is_zero() { None } else { a.checked_div(b) }, |a, b| a / b)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Self {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Approx(x) => Scalar::Approx(-x),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Scalar::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Approx(x) => write!(f, "{x:.12}"),
        }
    }
}

/// A Lebesgue exponent defined through its reciprocal: finite when the
/// reciprocal is positive, `∞` when it vanishes and undefined otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite { value: Scalar, recip: Scalar },
    Infinite,
    Undefined,
}

impl Exponent {
    fn from_recip(r: Option<Scalar>) -> Self {
        match r {
            Some(r) if r.signum() == Ordering::Greater => Exponent::Finite { value: r.recip(), recip: r },
            Some(r) if r.is_zero() => Exponent::Infinite,
            _ => Exponent::Undefined,
        }
    }

    /// The reciprocal, `0` for `∞`, `None` when undefined.
    pub fn recip(&self) -> Option<Scalar> {
        match self {
            Exponent::Finite { recip, .. } => Some(*recip),
            Exponent::Infinite => Some(Scalar::int(0)),
            Exponent::Undefined => None,
        }
    }

    pub fn value(&self) -> Option<Scalar> {
        match self {
            Exponent::Finite { value, .. } => Some(*value),
            _ => None,
        }
    }

    /// `f64` value with `∞` for an infinite exponent and NaN if undefined.
    pub fn to_f64(&self) -> f64 {
        match self {
            Exponent::Finite { value, .. } => value.to_f64(),
            Exponent::Infinite => f64::INFINITY,
            Exponent::Undefined => f64::NAN,
        }
    }

    pub fn is_defined(&self) -> bool {
        !matches!(self, Exponent::Undefined)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite { value, .. } => {
                if value.is_exact() {
                    write!(f, "{value} ({:.6})", value.to_f64())
                } else {
                    write!(f, "{value}")
                }
            }
            Exponent::Infinite => write!(f, "inf"),
            Exponent::Undefined => write!(f, "undefined"),
        }
    }
}

/// Regularity exponents in time of the linear mixed evolution for `H^γ` data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C1Regularity {
    /// `γ − (2l+3)/(2(2l+1))`, the exponent claimed for the whole problem.
    pub stated: Scalar,
    /// `γ − 2/(2l+1)`, what the elliptic-side estimate actually yields.
    pub elliptic_side: Scalar,
}

impl C1Regularity {
    pub fn new(l: u32, gamma: Scalar) -> Self {
        let l = l as i64;
        C1Regularity {
            stated: gamma - Scalar::ratio(2 * l + 3, 2 * (2 * l + 1)),
            elliptic_side: gamma - Scalar::ratio(2, 2 * l + 1),
        }
    }

    pub fn discrepant(&self) -> bool {
        self.stated != self.elliptic_side
    }
}

/// Every derived exponent for `(n, l, s, μ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentProfile {
    pub n: u32,
    pub l: u32,
    pub s: Scalar,
    pub mu: Scalar,
    pub p0: Exponent,
    pub p1: Exponent,
    pub p2: Exponent,
    pub r1: Exponent,
    pub q0: Exponent,
    pub theta: Exponent,
    pub big_theta: Exponent,
    /// Homogeneous dimension `Q₀ = 1 + n(2l+1)/2`.
    pub q_hom0: Scalar,
    /// `Q₁ = 1 + nl`.
    pub q_hom1: Scalar,
    pub c1: C1Regularity,
    pub warnings: Vec<String>,
}

pub fn exponent_profile(n: u32, l: u32, s: impl Into<Scalar>, mu: impl Into<Scalar>) -> Result<ExponentProfile> {
    let (s, mu) = (s.into(), mu.into());
    if n == 0 {
        return Err(TricomiError::domain("n must be at least 1"));
    }
    if l == 0 {
        return Err(TricomiError::domain("l must be at least 1"));
    }
    let nn = Scalar::int(n as i64);
    let half_n = nn / Scalar::int(2);
    if !(s >= Scalar::int(0) && s < half_n) {
        return Err(TricomiError::domain(format!("s = {s} must lie in [0, n/2) = [0, {half_n})")));
    }
    if !(mu >= Scalar::int(0)) || !mu.to_f64().is_finite() {
        return Err(TricomiError::domain(format!("μ = {mu} must be nonnegative")));
    }
    let mut warnings = Vec::new();
    if n == 1 {
        warnings.push("n = 1 is outside the range n ≥ 2 covered by the theory".to_string());
    }
    let li = l as i64;
    let one = Scalar::int(1);
    let half = Scalar::ratio(1, 2);
    let q_hom1 = qnu_raw(n, l, one);
    let q_hom0 = qnu_raw(n, l, Scalar::int(0));
    let r_p0 = (nn - Scalar::int(2) * s) / (Scalar::int(2) * nn);
    let r_p1 = half - (s - Scalar::ratio(2, 2 * li + 1)) / nn;
    let r_q0 = half - (s - Scalar::ratio(2 * li + 3, 2 * (2 * li + 1))) / nn;
    let r_p2 = mu * r_p0 - q_hom0.recip();
    let p2 = Exponent::from_recip(Some(r_p2));
    let r_r1 = p2.recip().map(|r| (mu - one) * r_p0 + r);
    let r1 = Exponent::from_recip(r_r1);
    let theta = Exponent::from_recip(p2.recip().map(|r| r - q_hom1.recip()));
    let big_theta = Exponent::from_recip(r1.recip().map(|r| r - q_hom1.recip()));
    Ok(ExponentProfile {
        n,
        l,
        s,
        mu,
        p0: Exponent::from_recip(Some(r_p0)),
        p1: Exponent::from_recip(Some(r_p1)),
        p2,
        r1,
        q0: Exponent::from_recip(Some(r_q0)),
        theta,
        big_theta,
        q_hom0,
        q_hom1,
        c1: C1Regularity::new(l, s),
        warnings,
    })
}

fn qnu_raw(n: u32, l: u32, nu: Scalar) -> Scalar {
    Scalar::int(1) + Scalar::int(n as i64) * (Scalar::int(2 * l as i64 + 1) - nu) / Scalar::int(2)
}

impl ExponentProfile {
    /// `Q_ν = 1 + n(2l+1−ν)/2`.
    pub fn q_nu(&self, nu: impl Into<Scalar>) -> Scalar {
        qnu_raw(self.n, self.l, nu.into())
    }

    fn p0_value(&self) -> Scalar {
        self.p0.value().expect("p0 is always finite")
    }

    /// Ordering of `p₀/μ` against `x`, treating `p₀/0` as `+∞`.
    fn cmp_p0_over_mu(&self, x: Scalar) -> Ordering {
        if self.mu.is_zero() {
            return Ordering::Greater;
        }
        self.p0_value().partial_cmp(&(x * self.mu)).unwrap_or(Ordering::Equal)
    }

    /// `Q₀ ≤ p₀/(μ−1)` for `μ > 1`.
    fn q0_below_critical(&self) -> bool {
        self.q_hom0 * (self.mu - Scalar::int(1)) <= self.p0_value()
    }

    pub fn regime(&self) -> Option<Regime> {
        if !(self.mu < self.p0_value()) {
            return None;
        }
        Some(match self.cmp_p0_over_mu(self.q_hom0) {
            Ordering::Less => Regime::A,
            Ordering::Greater => Regime::B,
            Ordering::Equal => Regime::C,
        })
    }

    /// Exponents as `f64` rows for display.
    pub fn table(&self) -> Vec<(&'static str, String)> {
        vec![
            ("n", self.n.to_string()),
            ("l", self.l.to_string()),
            ("s", self.s.to_string()),
            ("mu", self.mu.to_string()),
            ("p0", self.p0.to_string()),
            ("p1", self.p1.to_string()),
            ("p2", self.p2.to_string()),
            ("r1", self.r1.to_string()),
            ("q0", self.q0.to_string()),
            ("theta", self.theta.to_string()),
            ("Theta", self.big_theta.to_string()),
            ("Q0", self.q_hom0.to_string()),
            ("Q1", self.q_hom1.to_string()),
            ("C1 exponent (stated)", self.c1.stated.to_string()),
            ("C1 exponent (elliptic side)", self.c1.elliptic_side.to_string()),
        ]
    }
}

/// Position of `p₀/μ` relative to `Q₀`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `1 < p₀/μ < Q₀`.
    A,
    /// `p₀/μ > Q₀`.
    B,
    /// `p₀/μ = Q₀`.
    C,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateDecision {
    pub admissible: bool,
    pub reason: String,
}

pub fn solvability_gate(profile: &ExponentProfile) -> GateDecision {
    let one = Scalar::int(1);
    let mu = profile.mu;
    let p0 = profile.p0_value();
    if mu <= one {
        return GateDecision { admissible: true, reason: format!("0 ≤ μ = {mu} ≤ 1") };
    }
    if !(mu < p0) {
        return GateDecision { admissible: false, reason: format!("μ < p_0 violated: μ = {mu}, p_0 = {p0}") };
    }
    let crit = p0 / (mu - one);
    if profile.q0_below_critical() {
        GateDecision {
            admissible: true,
            reason: format!("1 < μ < p_0 and Q_0 = {} ≤ p_0/(μ−1) = {crit}", profile.q_hom0),
        }
    } else {
        GateDecision {
            admissible: false,
            reason: format!("Q_0 ≤ p_0/(μ−1) violated: Q_0 = {} > p_0/(μ−1) = {crit}", profile.q_hom0),
        }
    }
}

/// The iteration set of the elliptic-side Picard scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetSpace {
    /// `C(L^q ∩ L^∞)` for every finite `q`.
    M1,
    /// `C(L^p ∩ L^θ)`, `p ≤ p₂`.
    M2,
    /// `C(L^γ ∩ L^Θ)`, `γ ≤ r₁`.
    M3,
    /// `C(L^{p₀})`.
    M4,
}

impl TargetSpace {
    pub fn name(self) -> &'static str {
        match self {
            TargetSpace::M1 => "M1",
            TargetSpace::M2 => "M2",
            TargetSpace::M3 => "M3",
            TargetSpace::M4 => "M4",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            TargetSpace::M1 => "C([-T0,0], L^q ∩ L^inf) for all finite q, with time derivative in L^inf",
            TargetSpace::M2 => "C([-T0,0], L^p ∩ L^theta), p ≤ p2",
            TargetSpace::M3 => "C([-T0,0], L^gamma ∩ L^Theta), gamma ≤ r1",
            TargetSpace::M4 => "C([-T0,0], L^p0) with time derivative in L^p0",
        }
    }

    /// Lebesgue exponents whose norms the solver monitors.
    pub fn monitored_exponents(self, profile: &ExponentProfile) -> Vec<f64> {
        match self {
            TargetSpace::M1 => vec![profile.p0.to_f64(), f64::INFINITY],
            TargetSpace::M2 => vec![profile.p2.to_f64(), profile.theta.to_f64()],
            TargetSpace::M3 => vec![profile.r1.to_f64(), profile.big_theta.to_f64()],
            TargetSpace::M4 => vec![profile.p0.to_f64()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseLabel {
    pub regime: Regime,
    pub case_id: u8,
    pub target: TargetSpace,
    pub note: Option<String>,
}

pub const CASE8_NOTE: &str = "Case 8 uses p0/(mu-1) as the upper bound on Q0; the bound p0/mu would leave the case empty";

/// The nine case headers evaluated independently of each other.
pub fn matching_cases(p: &ExponentProfile) -> Vec<u8> {
    let zero = Scalar::int(0);
    let one = Scalar::int(1);
    let mu = p.mu;
    let p0 = p.p0_value();
    let q0 = p.q_hom0;
    let q1 = p.q_hom1;
    let small = mu > zero && mu <= one;
    let big = mu > one && mu < p0;
    let below = p.cmp_p0_over_mu(q0) == Ordering::Less;
    let above = p.cmp_p0_over_mu(q0) == Ordering::Greater;
    let equal = p.cmp_p0_over_mu(q0) == Ordering::Equal;
    let crit = big && p.q0_below_critical();
    // 1/x against 1/Q1, valid for defined exponents
    let vs_q1 = |e: &Exponent| e.recip().map(|r| q1.recip().partial_cmp(&r).unwrap_or(Ordering::Equal));
    let p2_vs = vs_q1(&p.p2);
    let r1_vs = vs_q1(&p.r1);
    let mut out = Vec::new();
    let headers = [
        big && above,
        crit && below && r1_vs == Some(Ordering::Greater),
        small && below && p2_vs == Some(Ordering::Greater),
        (small || mu.is_zero()) && above,
        small && below && p2_vs == Some(Ordering::Less),
        crit && below && r1_vs == Some(Ordering::Less),
        mu > zero && mu < p0 && equal,
        crit && below && r1_vs == Some(Ordering::Equal),
        small && below && p2_vs == Some(Ordering::Equal),
    ];
    for (i, h) in headers.iter().enumerate() {
        if *h {
            out.push(i as u8 + 1);
        }
    }
    out
}

pub fn classify_case(profile: &ExponentProfile) -> Result<CaseLabel> {
    let gate = solvability_gate(profile);
    if !gate.admissible {
        return Err(TricomiError::domain(format!("inadmissible profile: {}", gate.reason)));
    }
    let regime = profile.regime().expect("admissible profiles have μ < p0");
    let one = Scalar::int(1);
    let q1r = profile.q_hom1.recip();
    let (case_id, target) = if profile.mu.is_zero() {
        (4, TargetSpace::M1)
    } else if regime == Regime::C {
        (7, TargetSpace::M4)
    } else if profile.mu <= one {
        match regime {
            Regime::B => (4, TargetSpace::M1),
            _ => {
                let r = profile.p2.recip().expect("p2 is finite in regime A");
                match q1r.partial_cmp(&r).unwrap_or(Ordering::Equal) {
                    Ordering::Greater => (3, TargetSpace::M1),
                    Ordering::Less => (5, TargetSpace::M2),
                    Ordering::Equal => (9, TargetSpace::M4),
                }
            }
        }
    } else {
        match regime {
            Regime::B => (1, TargetSpace::M1),
            _ => {
                let r = profile.r1.recip().expect("r1 is finite in regime A");
                match q1r.partial_cmp(&r).unwrap_or(Ordering::Equal) {
                    Ordering::Greater => (2, TargetSpace::M1),
                    Ordering::Less => (6, TargetSpace::M3),
                    Ordering::Equal => (8, TargetSpace::M4),
                }
            }
        }
    };
    let note = match case_id {
        8 => Some(CASE8_NOTE.to_string()),
        4 if profile.mu.is_zero() => Some("mu = 0 handled as Case 4 (bounded nonlinearity)".to_string()),
        _ => None,
    };
    Ok(CaseLabel { regime, case_id, target, note })
}

/// Trajectory of `1/q_{k+1} = μ/q_k − 1/Q₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceTrace {
    /// `1/q_1, 1/q_2, …`.
    pub recips: Vec<Scalar>,
    /// First index (1-based) with `q_k ≤ 1` or `1/q_k ≤ 0`.
    pub first_failure: Option<usize>,
}

impl DivergenceTrace {
    pub fn exponents(&self) -> Vec<Exponent> {
        self.recips.iter().map(|&r| Exponent::from_recip(Some(r))).collect()
    }

    /// Successive increments `1/q_{k+1} − 1/q_k`.
    pub fn increments(&self) -> Vec<f64> {
        self.recips.windows(2).map(|w| (w[1] - w[0]).to_f64()).collect()
    }
}

pub fn divergence_demo(profile: &ExponentProfile, q1: impl Into<Scalar>, steps: usize) -> Result<DivergenceTrace> {
    let q1 = q1.into();
    if !(q1 > Scalar::int(1)) {
        return Err(TricomiError::domain(format!("q1 = {q1} must exceed 1")));
    }
    let mut recips = vec![q1.recip()];
    for _ in 1..steps {
        let last = *recips.last().unwrap();
        recips.push(profile.mu * last - profile.q_hom1.recip());
    }
    let first_failure = recips
        .iter()
        .position(|r| *r >= Scalar::int(1) || *r <= Scalar::int(0))
        .map(|i| i + 1);
    Ok(DivergenceTrace { recips, first_failure })
}

/// True when the reciprocal gap `(μ−1)/p₁ − 1/Q₁` is positive, the
/// condition under which the recursion started from `p₁` blows up.
pub fn recursion_diverges(profile: &ExponentProfile) -> bool {
    let r = profile.p1.recip().expect("p1 is finite");
    (profile.mu - Scalar::int(1)) * r - profile.q_hom1.recip() > Scalar::int(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> Scalar {
        s.parse().unwrap()
    }

    fn prof(n: u32, l: u32, s: &str, mu: &str) -> ExponentProfile {
        exponent_profile(n, l, q(s), q(mu)).unwrap()
    }

    #[test]
    fn worked_examples() {
        let p = prof(2, 1, "0", "1");
        assert_eq!(p.p0.value(), Some(Scalar::int(2)));
        assert_eq!(p.q_hom0, Scalar::int(4));
        assert_eq!(p.q_hom1, Scalar::int(3));
        let p = prof(3, 1, "1", "1");
        assert_eq!(p.p0.value(), Some(Scalar::int(6)));
        assert_eq!(p.q_hom0, Scalar::ratio(11, 2));
        assert_eq!(p.p1.value(), Some(Scalar::ratio(18, 7)));
        let p = prof(2, 1, "0.5", "2");
        assert_eq!(p.p0.value(), Some(Scalar::int(4)));
        assert_eq!(p.p2.value(), Some(Scalar::int(4)));
        assert_eq!(p.r1.value(), Some(Scalar::int(2)));
    }

    #[test]
    fn gate_examples() {
        assert!(solvability_gate(&prof(2, 1, "0.5", "1")).admissible);
        let g = solvability_gate(&prof(2, 1, "0.5", "2"));
        assert!(g.admissible, "{}", g.reason);
        let g = solvability_gate(&prof(2, 2, "0.5", "3"));
        assert!(!g.admissible);
        assert!(g.reason.contains("Q_0 ≤ p_0/(μ−1) violated: Q_0 = 6") && g.reason.contains("= 2"), "{}", g.reason);
        let g = solvability_gate(&prof(2, 1, "0.5", "4"));
        assert!(!g.admissible && g.reason.contains("μ < p_0"));
        assert!(classify_case(&prof(2, 2, "0.5", "3")).is_err());
    }

    #[test]
    fn hand_computed_table() {
        // (n, l, s, μ) → case, each worked by hand from the case headers
        let table: [(u32, u32, &str, &str, u8); 12] = [
            (2, 1, "0.5", "2", 6),     // p0/μ=2<Q0=4≤4, r1=2<Q1=3
            (2, 1, "0.5", "1", 7),     // p0/μ=4=Q0
            (2, 1, "0.5", "0.5", 4),   // p0/μ=8>Q0=4
            (2, 1, "0.5", "0", 4),     // bounded nonlinearity
            (4, 1, "22/35", "1", 9),   // p0=35/12<Q0=7, 1/p2=12/35−1/7=1/5, p2=Q1=5
            (2, 1, "0", "1", 3),       // p0/μ=2<4, 1/p2=1/4, p2=4>Q1=3
            (4, 1, "0", "1", 5),       // p0/μ=2<7, 1/p2=1/2−1/7, p2=14/5<Q1=5
            (3, 1, "1", "1.05", 1),    // p0/μ=120/21>Q0=11/2
            (2, 2, "0.5", "1", 3),     // Q0=6, p0/μ=4<6, 1/p2=1/12, p2=12>Q1=5
            (2, 1, "0.5", "1.5", 2),   // p0/μ=8/3<4≤8, 1/r1=1/8+1/8, r1=4>3
            (2, 1, "0.5", "5/3", 8),   // 1/p2=1/6, 1/r1=1/6+1/6, r1=3=Q1
            (4, 1, "1", "1.2", 6),     // p0=4, p0/μ=10/3<7≤20, 1/r1=1/20+11/70, r1=140/29<5
        ];
        for (n, l, s, mu, want) in table {
            let p = prof(n, l, s, mu);
            let got = classify_case(&p).map(|c| c.case_id);
            assert_eq!(got.ok(), Some(want), "({n},{l},{s},{mu})");
        }
    }

    #[test]
    fn case8_flags_header_typo() {
        let c = classify_case(&prof(2, 1, "0.5", "5/3")).unwrap();
        assert_eq!(c.case_id, 8);
        assert_eq!(c.target, TargetSpace::M4);
        assert!(c.note.unwrap().contains("Case 8"));
    }

    #[test]
    fn regimes() {
        assert_eq!(prof(2, 1, "0.5", "2").regime(), Some(Regime::A));
        assert_eq!(prof(2, 1, "0.5", "0.5").regime(), Some(Regime::B));
        assert_eq!(prof(2, 1, "0.5", "1").regime(), Some(Regime::C));
        assert_eq!(prof(2, 1, "0.5", "4").regime(), None);
    }

    #[test]
    fn undefined_exponents_are_flagged() {
        let p = prof(2, 1, "0.5", "0.5");
        // 1/p2 = 1/8 − 1/4 < 0
        assert_eq!(p.p2, Exponent::Undefined);
        assert_eq!(p.r1, Exponent::Undefined);
        assert_eq!(p.theta, Exponent::Undefined);
        let p = prof(2, 1, "0.5", "1");
        assert_eq!(p.p2, Exponent::Infinite);
        assert!(p.table().iter().any(|(k, v)| *k == "p2" && v == "inf"));
    }

    #[test]
    fn domain_errors() {
        assert!(exponent_profile(2, 1, 1.0, 1.0).is_err());
        assert!(exponent_profile(2, 0, 0.5, 1.0).is_err());
        assert!(exponent_profile(2, 1, 0.5, -1.0).is_err());
        assert!(!exponent_profile(1, 1, 0.25, 0.5).unwrap().warnings.is_empty());
    }

    #[test]
    fn c1_discrepancy() {
        let p = prof(2, 1, "0.5", "1");
        // γ − 5/6 against γ − 2/3
        assert_eq!(p.c1.stated, Scalar::ratio(-1, 3));
        assert_eq!(p.c1.elliptic_side, Scalar::ratio(-1, 6));
        assert!(p.c1.discrepant());
    }

    #[test]
    fn divergence_examples() {
        // μ = 1: arithmetic decrease by 1/Q1
        let p = prof(2, 1, "0.5", "1");
        let tr = divergence_demo(&p, 2, 8).unwrap();
        for d in tr.increments() {
            assert!((d + 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(tr.first_failure, Some(3));
        // violating profile: (μ−1)/p1 > 1/Q1
        let p = prof(2, 2, "0.5", "3");
        assert!(recursion_diverges(&p));
        let p1 = p.p1.value().unwrap();
        let tr = divergence_demo(&p, p1, 8).unwrap();
        let inc = tr.increments();
        for w in inc.windows(2) {
            assert!((w[1] / w[0] - 3.0).abs() < 1e-12, "{inc:?}");
        }
        assert!(tr.first_failure.is_some());
        // fixed point of the affine map
        let p = prof(2, 1, "0.5", "2");
        let fixed = p.q_hom1; // 1/q = 2/q − 1/3 ⇒ q = 3
        let tr = divergence_demo(&p, fixed, 5).unwrap();
        assert!(tr.recips.iter().all(|&r| r == Scalar::ratio(1, 3)));
        assert!(divergence_demo(&p, 1, 3).is_err());
    }

    #[test]
    fn scalar_parsing() {
        assert_eq!(q("0.5"), Scalar::ratio(1, 2));
        assert_eq!(q("5/3"), Scalar::ratio(5, 3));
        assert_eq!(q("-0.25"), Scalar::ratio(-1, 4));
        assert!(q("0.1").is_exact());
        assert!(!q("1e-320").is_exact());
        assert!("abc".parse::<Scalar>().is_err());
        assert!(Scalar::from(0.1).to_f64() == 0.1);
    }

    fn arb_profile() -> impl Strategy<Value = ExponentProfile> {
        (2u32..6, 1u32..5, 0i64..64, 0i64..256).prop_filter_map("admissible", |(n, l, s, mu)| {
            let s = Scalar::ratio(s * n as i64, 128);
            let mu = Scalar::ratio(mu, 32);
            let p = exponent_profile(n, l, s, mu).ok()?;
            solvability_gate(&p).admissible.then_some(p)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn partition(p in arb_profile()) {
            let c = classify_case(&p).unwrap();
            let m = matching_cases(&p);
            prop_assert_eq!(m, vec![c.case_id]);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]
        #[test]
        fn reciprocal_identities(p in arb_profile()) {
            let r = |e: &Exponent| e.recip().map(|x| x.to_f64());
            let p0 = r(&p.p0).unwrap();
            prop_assert!(p0 > 0.0 && (p.s.to_f64() == 0.0 || 1.0 / p0 > 2.0));
            if let Some(p2) = r(&p.p2) {
                prop_assert!((p2 - (p.mu.to_f64() * p0 - 1.0 / p.q_hom0.to_f64())).abs() < 1e-12);
                if let Some(r1) = r(&p.r1) {
                    prop_assert!((r1 - ((p.mu.to_f64() - 1.0) * p0 + p2)).abs() < 1e-12);
                }
            }
            prop_assert_eq!(p.q_nu(1), p.q_hom1);
            prop_assert_eq!(p.q_nu(0), p.q_hom0);
            // exact where inputs are rational
            prop_assert!(p.q_hom0.is_exact() && p.p0.recip().unwrap().is_exact());
        }

        #[test]
        fn stable_off_boundaries(p in arb_profile(), sign in prop::bool::ANY) {
            let c = classify_case(&p).unwrap();
            if ![7u8, 8, 9].contains(&c.case_id) && p.mu.to_f64() > 1e-6 {
                let eps = if sign { 1e-9 } else { -1e-9 };
                let near = |x: f64, y: f64| (x - y).abs() < 1e-6;
                let mu = p.mu.to_f64();
                let p0 = p.p0.to_f64();
                let boundary = near(mu, 1.0)
                    || near(p0 / mu, p.q_hom0.to_f64())
                    || (mu > 1.0 && near(p0 / (mu - 1.0), p.q_hom0.to_f64()))
                    || near(p.p2.to_f64(), p.q_hom1.to_f64())
                    || near(p.r1.to_f64(), p.q_hom1.to_f64());
                if !boundary {
                    let q = exponent_profile(p.n, p.l, p.s, Scalar::Approx(mu + eps)).unwrap();
                    prop_assert_eq!(classify_case(&q).unwrap().case_id, c.case_id);
                }
            }
        }

        #[test]
        fn monotonicity(n in 2u32..6, l in 1u32..5, a in 0i64..60, b in 1i64..4) {
            let s1 = Scalar::ratio(a * n as i64, 128);
            let s2 = s1 + Scalar::ratio(b * n as i64, 128);
            let p = exponent_profile(n, l, s1, 1).unwrap();
            if let Ok(q) = exponent_profile(n, l, s2, 1) {
                prop_assert!(q.p0.value().unwrap() > p.p0.value().unwrap());
            }
            let pl = exponent_profile(n, l + 1, s1, 1).unwrap();
            prop_assert!(pl.q_hom0 > p.q_hom0);
            let pn = exponent_profile(n + 1, l, s1, 1).unwrap();
            prop_assert!(pn.q_hom0 > p.q_hom0);
        }
    }
}
