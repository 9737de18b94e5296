//! Modified Bessel function of the second kind for orders in `[0, 1]`.
//!
//! Everything is computed on the order pair `(K_μ, K_{μ+1})` with
//! `|μ| ≤ 1/2` and returned scaled by `e^x`:
//! Temme's series for `x ≤ 2`, Steed's continued fraction CF2 up to the
//! asymptotic switch, and the large-argument Hankel expansion beyond it.

use std::f64::consts::PI;

use super::SpecFunConfig;
use crate::error::{Result, TricomiError};

/// Taylor coefficients of `1/Γ(z)` about `z = 0` (Abramowitz & Stegun 6.1.34).
const RGAMMA_TAYLOR: [f64; 26] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_8,
    -0.042_002_635_034_095_2,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_3,
    -0.009_621_971_527_877_0,
    0.007_218_943_246_663_0,
    -0.001_165_167_591_859_1,
    -0.000_215_241_674_114_9,
    0.000_128_050_282_388_2,
    -0.000_020_134_854_780_7,
    -0.000_001_250_493_482_1,
    0.000_001_133_027_232_0,
    -0.000_000_205_633_841_7,
    0.000_000_006_116_095_0,
    0.000_000_005_002_007_5,
    -0.000_000_001_181_274_6,
    0.000_000_000_104_342_7,
    0.000_000_000_007_782_3,
    -0.000_000_000_003_696_8,
    0.000_000_000_000_510_0,
    -0.000_000_000_000_020_6,
    -0.000_000_000_000_005_4,
    0.000_000_000_000_001_4,
    0.000_000_000_000_000_1,
];

/// Returns `(gam1, gam2, 1/Γ(1+μ), 1/Γ(1−μ))` for `|μ| ≤ 1/2`, where
/// `gam1 = (1/Γ(1−μ) − 1/Γ(1+μ)) / (2μ)` and `gam2` is the mean of the two
/// reciprocals. The series form keeps `gam1` accurate as `μ → 0`.
pub(crate) fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    // 1/Γ(1+x) = Σ_k c_{k+1} x^k
    let mut even = 0.0;
    let mut odd = 0.0;
    let mu2 = mu * mu;
    let mut pe = 1.0;
    for k in (0..RGAMMA_TAYLOR.len()).step_by(2) {
        even += RGAMMA_TAYLOR[k] * pe;
        if k + 1 < RGAMMA_TAYLOR.len() {
            odd += RGAMMA_TAYLOR[k + 1] * pe;
        }
        pe *= mu2;
    }
    // 1/Γ(1+μ) = even + μ·odd, 1/Γ(1−μ) = even − μ·odd
    let gampl = even + mu * odd;
    let gammi = even - mu * odd;
    (-odd, even, gampl, gammi)
}

/// `(e^x K_μ(x), e^x K_{μ+1}(x))` for `|μ| ≤ 1/2`, `x > 0`.
pub(crate) fn k_pair_scaled(mu: f64, x: f64, cfg: &SpecFunConfig) -> Result<(f64, f64)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(TricomiError::domain(format!("Bessel K needs x > 0, got {x}")));
    }
    if mu.abs() > 0.5 + 1e-15 {
        return Err(TricomiError::domain(format!("order pair needs |μ| ≤ 1/2, got {mu}")));
    }
    if x <= 2.0 {
        temme(mu, x, cfg).map(|(k0, k1)| {
            let e = x.exp();
            (k0 * e, k1 * e)
        })
    } else if x < cfg.asymptotic_switch_bessel {
        steed_cf2(mu, x, cfg)
    } else {
        Ok((hankel_scaled(mu, x, cfg)?, hankel_scaled(mu + 1.0, x, cfg)?))
    }
}

fn temme(mu: f64, x: f64, cfg: &SpecFunConfig) -> Result<(f64, f64)> {
    let x2 = 0.5 * x;
    let pimu = PI * mu;
    let fact = if pimu.abs() < 1e-15 { 1.0 } else { pimu / pimu.sin() };
    let d = -x2.ln();
    let e = mu * d;
    let fact2 = if e.abs() < 1e-15 { 1.0 } else { e.sinh() / e };
    let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
    let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
    let mut sum = ff;
    let ee = e.exp();
    let mut p = 0.5 * ee / gampl;
    let mut q = 0.5 / (ee * gammi);
    let mut c = 1.0;
    let dd = x2 * x2;
    let mut sum1 = p;
    for i in 1..cfg.series_max_terms {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - mu * mu);
        c *= dd / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * ff;
        sum += del;
        let del1 = c * (p - fi * ff);
        sum1 += del1;
        if del.abs() < sum.abs() * cfg.series_tol && del1.abs() < sum1.abs() * cfg.series_tol {
            return Ok((sum, sum1 * 2.0 / x));
        }
    }
    Err(TricomiError::Accuracy {
        context: format!("Temme series for K at x={x}"),
        first: sum,
        second: f64::NAN,
    })
}

fn steed_cf2(mu: f64, x: f64, cfg: &SpecFunConfig) -> Result<(f64, f64)> {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - mu * mu;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    let mut converged = false;
    for i in 1..cfg.series_max_terms {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < cfg.series_tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(TricomiError::Accuracy {
            context: format!("Steed CF2 for K at x={x}"),
            first: s,
            second: f64::NAN,
        });
    }
    let h = a1 * h;
    let k0 = (PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (mu + x + 0.5 - h) / x;
    Ok((k0, k1))
}

/// `e^x K_ν(x)` from the Hankel expansion, valid for large `x`.
fn hankel_scaled(nu: f64, x: f64, cfg: &SpecFunConfig) -> Result<f64> {
    let four_nu2 = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..cfg.series_max_terms {
        let odd = (2 * k - 1) as f64;
        term *= (four_nu2 - odd * odd) / (8.0 * k as f64 * x);
        if term.abs() > prev {
            break;
        }
        sum += term;
        prev = term.abs();
        if term.abs() < cfg.series_tol * sum.abs() {
            return Ok((PI / (2.0 * x)).sqrt() * sum);
        }
    }
    if prev < 1e3 * cfg.series_tol {
        return Ok((PI / (2.0 * x)).sqrt() * sum);
    }
    Err(TricomiError::Accuracy {
        context: format!("Hankel expansion for K at x={x}"),
        first: sum,
        second: prev,
    })
}

/// `e^x K_ν(x)` for `ν ∈ [0, 1]`.
pub(crate) fn k_scaled(nu: f64, x: f64, cfg: &SpecFunConfig) -> Result<f64> {
    if !(0.0..=1.0).contains(&nu) {
        return Err(TricomiError::domain(format!("Bessel order must lie in [0,1], got {nu}")));
    }
    if nu <= 0.5 {
        Ok(k_pair_scaled(-nu, x, cfg)?.0)
    } else {
        Ok(k_pair_scaled(nu - 1.0, x, cfg)?.1)
    }
}
