//! Nonlinearities `f(t, x, u)` and their growth contract.

use std::collections::HashMap;
use std::sync::Mutex;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::admissibility::Scalar;
use crate::elliptic::frequency_s;
use crate::error::{Result, TricomiError};
use crate::modes::radial_groups;
use crate::spectral_grid::{forward_transform, inverse_transform, laplacian, SpatialField, SpectralField, TorusGrid};
use crate::specfun::LambdaProfile;

/// A nonlinearity with the growth bounds
/// `|f| ≤ C(1+|u|)^μ` and `|∂_u f| ≤ C(1+|u|)^{max(μ−1,0)}`.
pub trait Nonlinearity: Send + Sync {
    fn name(&self) -> String;

    /// Growth exponent `μ`.
    fn mu(&self) -> Scalar;

    /// `f` vanishes for `|x|` beyond this radius; infinite if unrestricted.
    fn support_radius(&self) -> f64;

    /// The constant `C` of the growth bounds.
    fn growth_constant(&self) -> f64;

    /// `f(t, ·, u(·))` on the grid of `u`.
    fn eval(&self, t: f64, u: &SpatialField) -> Result<SpatialField>;

    /// Pointwise form used for contract spot checks; `None` when `f`
    /// depends on `x` through precomputed fields.
    fn pointwise(&self, _t: f64, _x: &[f64], _u: f64) -> Option<f64> {
        None
    }

    /// True when `f ≡ 0`, letting the solvers skip the iteration.
    fn is_zero(&self) -> bool {
        false
    }

    /// Smallest admissible `T0`; the manufactured problem needs its source
    /// on the cutoff plateau.
    fn min_t0(&self) -> f64 {
        0.0
    }
}

/// Smooth bump `exp(1 − 1/(1 − |x|²/R²))` with peak 1 and support `|x| < R`.
pub fn spatial_cutoff(x: &[f64], radius: f64) -> f64 {
    let r2 = x.iter().map(|v| v * v).sum::<f64>() / (radius * radius);
    if r2 >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r2)).exp()
    }
}

fn eval_pointwise(f: &(impl Nonlinearity + ?Sized), t: f64, u: &SpatialField) -> Result<SpatialField> {
    let g = &u.grid;
    let values = (0..g.len())
        .map(|i| {
            let x = g.coords(i);
            f.pointwise(t, &x[..g.dim()], u.values[i]).expect("pointwise nonlinearity")
        })
        .collect();
    SpatialField::new(g.clone(), values)
}

/// `f ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroNonlinearity;

impl Nonlinearity for ZeroNonlinearity {
    fn name(&self) -> String {
        "zero".into()
    }
    fn mu(&self) -> Scalar {
        Scalar::int(0)
    }
    fn support_radius(&self) -> f64 {
        0.0
    }
    fn growth_constant(&self) -> f64 {
        0.0
    }
    fn eval(&self, _t: f64, u: &SpatialField) -> Result<SpatialField> {
        Ok(u.grid.zeros())
    }
    fn pointwise(&self, _t: f64, _x: &[f64], _u: f64) -> Option<f64> {
        Some(0.0)
    }
    fn is_zero(&self) -> bool {
        true
    }
}

/// `f = κ·c_R(x)·u`, with `c_R` the [`spatial_cutoff`] bump.
#[derive(Debug, Clone, Copy)]
pub struct LinearNonlinearity {
    pub coefficient: f64,
    pub radius: f64,
}

impl Nonlinearity for LinearNonlinearity {
    fn name(&self) -> String {
        format!("linear(c={}, R={})", self.coefficient, self.radius)
    }
    fn mu(&self) -> Scalar {
        Scalar::int(1)
    }
    fn support_radius(&self) -> f64 {
        self.radius
    }
    fn growth_constant(&self) -> f64 {
        self.coefficient.abs()
    }
    fn eval(&self, t: f64, u: &SpatialField) -> Result<SpatialField> {
        eval_pointwise(self, t, u)
    }
    fn pointwise(&self, _t: f64, x: &[f64], u: f64) -> Option<f64> {
        Some(self.coefficient * spatial_cutoff(x, self.radius) * u)
    }
}

/// `f = κ·c_R(x)·u|u|^{μ−1}` for `μ ≥ 1`.
#[derive(Debug, Clone, Copy)]
pub struct PowerNonlinearity {
    pub coefficient: f64,
    pub radius: f64,
    pub mu: Scalar,
}

impl Nonlinearity for PowerNonlinearity {
    fn name(&self) -> String {
        format!("power(c={}, R={}, μ={})", self.coefficient, self.radius, self.mu)
    }
    fn mu(&self) -> Scalar {
        self.mu
    }
    fn support_radius(&self) -> f64 {
        self.radius
    }
    fn growth_constant(&self) -> f64 {
        self.coefficient.abs() * self.mu.to_f64().max(1.0)
    }
    fn eval(&self, t: f64, u: &SpatialField) -> Result<SpatialField> {
        eval_pointwise(self, t, u)
    }
    fn pointwise(&self, _t: f64, x: &[f64], u: f64) -> Option<f64> {
        let mu = self.mu.to_f64();
        let pow = if mu == 2.0 { u.abs() } else { u.abs().powf(mu - 1.0) };
        Some(self.coefficient * spatial_cutoff(x, self.radius) * u * pow)
    }
}

/// Samples `f` at random `(t, x, u)` and checks the growth bounds and the
/// support radius. Nonlinearities without a pointwise form pass unchecked.
pub fn check_growth_contract(f: &dyn Nonlinearity, grid: &TorusGrid, t_range: (f64, f64), samples: usize, seed: u64) -> Result<()> {
    let mu = f.mu().to_f64();
    let c = f.growth_constant();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let t = rng.gen_range(t_range.0..=t_range.1);
        let i = rng.gen_range(0..grid.len());
        let xf = grid.coords(i);
        let x = &xf[..grid.dim()];
        let u: f64 = rng.gen_range(-10.0..10.0);
        let Some(v) = f.pointwise(t, x, u) else {
            return Ok(());
        };
        let bound = c * (1.0 + u.abs()).powf(mu);
        if !(v.abs() <= bound * (1.0 + 1e-12) + 1e-300) {
            return Err(TricomiError::ContractViolation(format!(
                "{}: |f({t}, x, {u})| = {} exceeds C(1+|u|)^μ = {bound}",
                f.name(),
                v.abs()
            )));
        }
        let h = 1e-6 * (1.0 + u.abs());
        let dv = (f.pointwise(t, x, u + h).unwrap() - f.pointwise(t, x, u - h).unwrap()) / (2.0 * h);
        let dbound = c * (1.0 + u.abs()).powf((mu - 1.0).max(0.0));
        if !(dv.abs() <= dbound * (1.0 + 1e-5) + 1e-8) {
            return Err(TricomiError::ContractViolation(format!(
                "{}: |∂_u f({t}, x, {u})| ≈ {} exceeds C(1+|u|)^max(μ−1,0) = {dbound}",
                f.name(),
                dv.abs()
            )));
        }
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r > f.support_radius() && v != 0.0 {
            return Err(TricomiError::ContractViolation(format!(
                "{}: f = {v} at |x| = {r} beyond support radius {}",
                f.name(),
                f.support_radius()
            )));
        }
    }
    Ok(())
}

/// Two-sided manufactured problem with a known solution.
///
/// For `t ≤ 0` (with `τ = −t`) the exact solution is
/// `û(τ) = λ(τs)(φ̂ + b(τ/T)η̂)` with `b(r) = 1 − (1−r)⁶` on `[0,1]` and
/// `b = 1` beyond, so `u` solves the homogeneous equation for `τ ≥ T`.
/// For `t ≥ 0` it is `φ + tψ + t²E`, with `ψ` the exact interface slope and
/// `E` chosen so the source is continuous at `t = 0`. The nonlinearity is
/// `f = F + κ·c_R(x)(u − u_exact)`, where `F` is the residual of `u_exact`.
pub struct Manufactured {
    l: u32,
    horizon: f64,
    coupling: f64,
    radius: f64,
    phi: SpectralField,
    eta: SpectralField,
    psi: SpectralField,
    e_term: SpectralField,
    weight: SpatialField,
    cache: Mutex<HashMap<u64, (SpatialField, SpatialField)>>,
}

const BLEND_POWER: i32 = 6;

fn blend(r: f64) -> (f64, f64, f64) {
    if r >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let k = BLEND_POWER as f64;
    let w = 1.0 - r;
    (1.0 - w.powi(BLEND_POWER), k * w.powi(BLEND_POWER - 1), -k * (k - 1.0) * w.powi(BLEND_POWER - 2))
}

impl Manufactured {
    /// `horizon` is the time `T` of the elliptic blend; solves must use
    /// `T0 ≥ horizon` so the source stays on the cutoff plateau.
    pub fn new(l: u32, phi: &SpatialField, eta: &SpatialField, horizon: f64, coupling: f64, radius: f64) -> Result<Self> {
        if l == 0 || !(horizon > 0.0) {
            return Err(TricomiError::domain("manufactured problem needs l ≥ 1 and horizon > 0"));
        }
        let grid = phi.grid.clone();
        let m = 2 * l - 1;
        let phi_hat = forward_transform(phi)?;
        let eta_hat = forward_transform(eta)?;
        let d0 = LambdaProfile::new(m).deriv_at_zero();
        let (_, b1, b2) = blend(0.0);
        let xi2 = grid.xi_sq_table();
        let mut psi = SpectralField::zeros(&grid);
        let mut e_term = SpectralField::zeros(&grid);
        for i in 0..grid.len() {
            let s = frequency_s(m, xi2[i]);
            // ∂_t = −∂_τ
            psi.coeffs[i] = -(phi_hat.coeffs[i] * (s * d0) + eta_hat.coeffs[i] * (b1 / horizon));
            let f0 = eta_hat.coeffs[i] * (2.0 * s * d0 * b1 / horizon + b2 / (horizon * horizon));
            e_term.coeffs[i] = f0 * 0.5;
        }
        let weight = grid.sample(|x| coupling * spatial_cutoff(x, radius));
        Ok(Manufactured {
            l,
            horizon,
            coupling,
            radius,
            phi: phi_hat,
            eta: eta_hat,
            psi,
            e_term,
            weight,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Exact interface slope `∂_t u(0)`.
    pub fn exact_slope(&self) -> Result<SpatialField> {
        inverse_transform(&self.psi)
    }

    /// `u_exact(t)`.
    pub fn exact(&self, t: f64) -> Result<SpatialField> {
        Ok(self.exact_and_residual(t)?.0)
    }

    fn exact_and_residual(&self, t: f64) -> Result<(SpatialField, SpatialField)> {
        if let Some(hit) = self.cache.lock().unwrap().get(&t.to_bits()) {
            return Ok(hit.clone());
        }
        let grid = &self.phi.grid;
        let m = 2 * self.l - 1;
        let mut u = SpectralField::zeros(grid);
        let mut f = SpectralField::zeros(grid);
        if t <= 0.0 {
            let tau = -t;
            let (b0, b1, b2) = blend(tau / self.horizon);
            let (b1, b2) = (b1 / self.horizon, b2 / (self.horizon * self.horizon));
            let profile = LambdaProfile::new(m);
            for g in radial_groups(&grid.xi_sq_table()) {
                let s = frequency_s(m, g.xi_sq);
                let lam = profile.eval(tau * s)?;
                for &i in &g.modes {
                    let a = self.phi.coeffs[i] + self.eta.coeffs[i] * b0;
                    u.coeffs[i] = a * lam.value;
                    f.coeffs[i] = self.eta.coeffs[i] * (2.0 * s * lam.deriv * b1 + lam.value * b2);
                }
            }
        } else {
            let lap = |x: &SpectralField| laplacian(x).coeffs;
            let (lp, ls, le) = (lap(&self.phi), lap(&self.psi), lap(&self.e_term));
            let tm = t.powi(m as i32);
            for i in 0..grid.len() {
                u.coeffs[i] = self.phi.coeffs[i] + self.psi.coeffs[i] * t + self.e_term.coeffs[i] * (t * t);
                let lap_u: Complex64 = lp[i] + ls[i] * t + le[i] * (t * t);
                f.coeffs[i] = self.e_term.coeffs[i] * 2.0 - lap_u * tm;
            }
        }
        let out = (inverse_transform(&u)?, inverse_transform(&f)?);
        self.cache.lock().unwrap().insert(t.to_bits(), out.clone());
        Ok(out)
    }
}

impl Nonlinearity for Manufactured {
    fn name(&self) -> String {
        format!("manufactured(T={}, κ={}, R={})", self.horizon, self.coupling, self.radius)
    }
    /// Declared as quadratic so the profile matches the power preset; the
    /// map is affine in `u`, which satisfies the `μ = 2` bounds.
    fn mu(&self) -> Scalar {
        Scalar::int(2)
    }
    fn support_radius(&self) -> f64 {
        f64::INFINITY
    }
    fn growth_constant(&self) -> f64 {
        f64::INFINITY
    }
    fn min_t0(&self) -> f64 {
        self.horizon
    }
    fn eval(&self, t: f64, u: &SpatialField) -> Result<SpatialField> {
        let (exact, resid) = self.exact_and_residual(t)?;
        let values = (0..u.values.len())
            .map(|i| resid.values[i] + self.weight.values[i] * (u.values[i] - exact.values[i]))
            .collect();
        SpatialField::new(u.grid.clone(), values)
    }
}
