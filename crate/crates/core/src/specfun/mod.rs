//! Scalar special functions behind both propagators.
//!
//! The elliptic side is driven by the decaying profile
//!
//! ```text
//! λ(t) = C t^{1/2} K_ν((2/(m+2)) t^{(m+2)/2}),  ν = 1/(m+2),  C = 2 / (Γ(ν) (m+2)^ν)
//! ```
//!
//! which solves `λ'' = t^m λ` with `λ(0) = 1` and `λ(∞) = 0`. The hyperbolic
//! side uses Kummer's function `M(a, b, z)` on the imaginary axis.

mod bessel;
mod kummer;
pub mod verify;

pub use kummer::{kummer_m, kummer_m_with};
pub use verify::{verify_specfun, SpecfunReport};

use crate::error::{Result, TricomiError};

/// Tolerances and regime switches for the special-function kernels.
#[derive(Debug, Clone, Copy)]
pub struct SpecFunConfig {
    pub series_tol: f64,
    pub series_max_terms: usize,
    pub asymptotic_switch_bessel: f64,
    pub asymptotic_switch_kummer: f64,
    /// Node count used by the defining-integral oracles.
    pub quadrature_nodes: usize,
}

impl Default for SpecFunConfig {
    fn default() -> Self {
        SpecFunConfig {
            series_tol: 1e-16,
            series_max_terms: 1000,
            asymptotic_switch_bessel: 25.0,
            asymptotic_switch_kummer: 30.0,
            quadrature_nodes: 64,
        }
    }
}

impl SpecFunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.series_tol > 0.0) {
            return Err(TricomiError::domain("series_tol must be positive"));
        }
        if !(self.asymptotic_switch_bessel > 0.0 && self.asymptotic_switch_kummer > 0.0) {
            return Err(TricomiError::domain("asymptotic switches must be positive"));
        }
        if self.quadrature_nodes < 16 {
            return Err(TricomiError::domain("quadrature_nodes must be at least 16"));
        }
        Ok(())
    }
}

/// Gamma function for positive arguments.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(TricomiError::domain(format!("gamma_fn needs x > 0, got {x}")));
    }
    Ok(libm::tgamma(x))
}

/// `1/Γ(x)`, zero at the poles.
pub(crate) fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        0.0
    } else {
        1.0 / libm::tgamma(x)
    }
}

fn check_bessel_args(nu: f64, x: f64) -> Result<()> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(TricomiError::domain(format!("Bessel order must lie in (0,1], got {nu}")));
    }
    if !(x > 0.0) {
        return Err(TricomiError::domain(format!("Bessel K needs x > 0, got {x}")));
    }
    Ok(())
}

/// `K_ν(x)` for `ν ∈ (0, 1]`, `x > 0`. Signals [`TricomiError::Underflow`]
/// when the value is below the representable range; use [`log_bessel_k`]
/// there.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    check_bessel_args(nu, x)?;
    let scaled = bessel::k_scaled(nu, x, &SpecFunConfig::default())?;
    let v = scaled * (-x).exp();
    if v == 0.0 || !v.is_normal() {
        return Err(TricomiError::Underflow {
            log_value: scaled.ln() - x,
        });
    }
    Ok(v)
}

/// `e^x K_ν(x)`.
pub fn bessel_k_scaled(nu: f64, x: f64) -> Result<f64> {
    check_bessel_args(nu, x)?;
    bessel::k_scaled(nu, x, &SpecFunConfig::default())
}

/// `ln K_ν(x)`, finite for every positive `x`.
pub fn log_bessel_k(nu: f64, x: f64) -> Result<f64> {
    Ok(bessel_k_scaled(nu, x)?.ln() - x)
}

/// Value, derivative and their logarithms of `λ` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaEval {
    pub value: f64,
    pub deriv: f64,
    pub log_value: f64,
    pub log_abs_deriv: f64,
}

impl LambdaEval {
    /// `λ'/λ`, computed from the logarithms so it stays finite where `λ`
    /// underflows.
    pub fn log_deriv(&self) -> f64 {
        -(self.log_abs_deriv - self.log_value).exp()
    }
}

/// Precomputed constants of `λ` for one `m`; cheap to copy into hot loops.
#[derive(Debug, Clone, Copy)]
pub struct LambdaProfile {
    m: u32,
    nu: f64,
    ln_c: f64,
    deriv0: f64,
    cfg: SpecFunConfig,
}

impl LambdaProfile {
    pub fn new(m: u32) -> Self {
        Self::with_config(m, SpecFunConfig::default())
    }

    pub fn with_config(m: u32, cfg: SpecFunConfig) -> Self {
        let mf = m as f64;
        let nu = 1.0 / (mf + 2.0);
        let g_nu = libm::tgamma(nu);
        let ln_c = (2.0 / g_nu).ln() - nu * (mf + 2.0).ln();
        let deriv0 = -libm::tgamma(1.0 - nu) * (mf + 2.0).powf(1.0 - 2.0 * nu) / g_nu;
        LambdaProfile {
            m,
            nu,
            ln_c,
            deriv0,
            cfg,
        }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Bessel order `ν = 1/(m+2)`.
    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// `λ'(0) = −Γ(1−ν)(m+2)^{1−2ν}/Γ(ν)`.
    pub fn deriv_at_zero(&self) -> f64 {
        self.deriv0
    }

    pub fn eval(&self, t: f64) -> Result<LambdaEval> {
        if !(t >= 0.0) || t.is_infinite() {
            return Err(TricomiError::domain(format!("λ needs finite t ≥ 0, got {t}")));
        }
        if self.m == 0 {
            let v = (-t).exp();
            return Ok(LambdaEval {
                value: v,
                deriv: -v,
                log_value: -t,
                log_abs_deriv: -t,
            });
        }
        let mf = self.m as f64;
        if t < 1e-6 {
            // λ = 1 + λ'(0) t + t^{m+2}/((m+1)(m+2)) + λ'(0) t^{m+3}/((m+2)(m+3)) + …
            let tm1 = t.powf(mf + 1.0);
            let value = 1.0
                + self.deriv0 * t
                + tm1 * t / ((mf + 1.0) * (mf + 2.0))
                + self.deriv0 * tm1 * t * t / ((mf + 2.0) * (mf + 3.0));
            let deriv = self.deriv0 + tm1 / (mf + 1.0) + self.deriv0 * tm1 * t / (mf + 2.0);
            return Ok(LambdaEval {
                value,
                deriv,
                log_value: value.ln(),
                log_abs_deriv: (-deriv).ln(),
            });
        }
        let x = 2.0 / (mf + 2.0) * t.powf(0.5 * (mf + 2.0));
        let (k_nu, k_one_minus_nu) = bessel::k_pair_scaled(-self.nu, x, &self.cfg)?;
        let log_value = self.ln_c + 0.5 * t.ln() + k_nu.ln() - x;
        let log_ratio = 0.5 * mf * t.ln() + (k_one_minus_nu / k_nu).ln();
        let log_abs_deriv = log_value + log_ratio;
        Ok(LambdaEval {
            value: log_value.exp(),
            deriv: -log_abs_deriv.exp(),
            log_value,
            log_abs_deriv,
        })
    }
}

/// `λ(t)` for the given `m`, with derivative and log variants.
pub fn lambda_fn(m: u32, t: f64) -> Result<LambdaEval> {
    LambdaProfile::new(m).eval(t)
}

pub fn lambda_deriv(m: u32, t: f64) -> Result<f64> {
    Ok(lambda_fn(m, t)?.deriv)
}

pub fn log_lambda(m: u32, t: f64) -> Result<f64> {
    Ok(lambda_fn(m, t)?.log_value)
}
