use std::f64::consts::E;
use std::sync::OnceLock;

use crate::error::{Result, TricomiError};
use crate::quad::tanh_sinh;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BumpShape {
    /// `exp(−1/(1−u²))`, unit mass.
    Plain,
    /// The derivative of the plain bump, unit `L¹` norm.
    MeanZero,
}

/// A bump on `(a−b, a+b)` in the variable `u = (σ−a)/b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpFamily {
    pub shape: BumpShape,
    pub center: f64,
    pub half_width: f64,
    /// Multiplies the normalized bump; 1 unless a test rescales it.
    pub scale: f64,
}

/// `∫_{−1}^{1} exp(−1/(1−u²)) du`.
fn plain_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| {
        tanh_sinh(|u, _, _| (-1.0 / (1.0 - u * u)).exp(), -1.0, 1.0, 1e-15).expect("bump mass quadrature")
    })
}

impl BumpFamily {
    pub fn new(shape: BumpShape, center: f64, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && center - half_width >= 0.0) || !center.is_finite() {
            return Err(TricomiError::domain(format!(
                "bump support ({}, {}) must lie in [0, ∞)",
                center - half_width,
                center + half_width
            )));
        }
        Ok(BumpFamily { shape, center, half_width, scale: 1.0 })
    }

    pub fn plain(center: f64, half_width: f64) -> Result<Self> {
        Self::new(BumpShape::Plain, center, half_width)
    }

    pub fn mean_zero(center: f64, half_width: f64) -> Result<Self> {
        Self::new(BumpShape::MeanZero, center, half_width)
    }

    pub fn scaled(self, scale: f64) -> Self {
        BumpFamily { scale, ..self }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }

    pub fn eval(&self, sigma: f64) -> f64 {
        let u = (sigma - self.center) / self.half_width;
        if u.abs() >= 1.0 {
            return 0.0;
        }
        let q = 1.0 - u * u;
        let e = (-1.0 / q).exp();
        let b = self.half_width;
        self.scale
            * match self.shape {
                BumpShape::Plain => e / (b * plain_mass()),
                // φ'(u)/b divided by ∫|φ'| = 2/e
                BumpShape::MeanZero => -2.0 * u / (q * q) * e * E / (2.0 * b),
            }
    }

    /// `‖h‖₁`, equal to `|scale|` by construction.
    pub fn l1_norm(&self) -> f64 {
        self.scale.abs()
    }

    /// `∫h` by quadrature over the two halves of the support, so an exact
    /// zero mean does not defeat the relative stopping rule.
    pub fn integral(&self) -> Result<f64> {
        let (lo, hi) = self.support();
        let f = |x: f64, _: f64, _: f64| self.eval(x);
        Ok(tanh_sinh(f, lo, self.center, 1e-15)? + tanh_sinh(f, self.center, hi, 1e-15)?)
    }

    /// `∫|h|` by quadrature, split at the sign change of the mean-zero shape.
    pub fn l1_quadrature(&self) -> Result<f64> {
        let (lo, hi) = self.support();
        let f = |x: f64, _: f64, _: f64| self.eval(x).abs();
        Ok(tanh_sinh(f, lo, self.center, 1e-15)? + tanh_sinh(f, self.center, hi, 1e-15)?)
    }
}
