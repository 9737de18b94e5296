//! Periodic spatial grids, unitary FFTs, norms and Fourier multipliers.
//!
//! A [`TorusGrid`] of period `L_j` and `N_j` points per axis stands in for
//! `ℝⁿ`. Samples sit at `x_i = (i − N/2)·h`, stored row-major with the last
//! axis contiguous. Transforms carry the symmetric `1/√N` factor, so
//! Parseval holds without volume constants and the continuum `L²` norm is
//! `(hⁿ Σ|f̂|²)^{1/2}` on either side.

mod io;
mod time;

pub use io::{read_field, write_csv_slice, write_field, FIELD_MAGIC, FIELD_VERSION};
pub use time::{TimeGrid, TimeSeries};

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Result, TricomiError};

/// Largest total point count a grid may allocate.
pub const MAX_GRID_POINTS: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub struct TorusGrid {
    dim: usize,
    points: [usize; 3],
    period: [f64; 3],
}

impl TorusGrid {
    pub fn new(points: &[usize], period: &[f64]) -> Result<Self> {
        let dim = points.len();
        if !(1..=3).contains(&dim) {
            return Err(TricomiError::domain(format!("grid dimension must be 1..=3, got {dim}")));
        }
        if period.len() != dim {
            return Err(TricomiError::SizeMismatch(format!(
                "{dim} axes but {} periods",
                period.len()
            )));
        }
        let mut p = [1usize; 3];
        let mut l = [1.0f64; 3];
        for j in 0..dim {
            if points[j] < 8 || points[j] % 2 != 0 {
                return Err(TricomiError::domain(format!(
                    "points per axis must be even and ≥ 8, got {}",
                    points[j]
                )));
            }
            if !(period[j] > 0.0) || !period[j].is_finite() {
                return Err(TricomiError::domain(format!("period must be positive, got {}", period[j])));
            }
            p[j] = points[j];
            l[j] = period[j];
        }
        let total: usize = p[..dim].iter().product();
        if total > MAX_GRID_POINTS {
            return Err(TricomiError::domain(format!(
                "grid has {total} points, cap is {MAX_GRID_POINTS}"
            )));
        }
        Ok(TorusGrid {
            dim,
            points: p,
            period: l,
        })
    }

    /// Same resolution and period on every axis.
    pub fn cube(dim: usize, points: usize, period: f64) -> Result<Self> {
        Self::new(&vec![points; dim], &vec![period; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[usize] {
        &self.points[..self.dim]
    }

    pub fn period(&self) -> &[f64] {
        &self.period[..self.dim]
    }

    pub fn len(&self) -> usize {
        self.points().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid spacing along `axis`.
    pub fn spacing(&self, axis: usize) -> f64 {
        self.period[axis] / self.points[axis] as f64
    }

    /// Volume of one grid cell, `Π h_j`.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|j| self.spacing(j)).product()
    }

    fn multi_index(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for j in (0..self.dim).rev() {
            idx[j] = flat % self.points[j];
            flat /= self.points[j];
        }
        idx
    }

    /// Physical coordinates of a sample.
    pub fn coords(&self, flat: usize) -> [f64; 3] {
        let idx = self.multi_index(flat);
        let mut x = [0.0; 3];
        for j in 0..self.dim {
            x[j] = (idx[j] as f64 - (self.points[j] / 2) as f64) * self.spacing(j);
        }
        x
    }

    /// Signed integer wavenumber of index `i` on an axis of `n` points.
    fn signed_k(i: usize, n: usize) -> i64 {
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Angular wave vector `ξ_j = 2π k_j / L_j` of a spectral index.
    pub fn wave_vector(&self, flat: usize) -> [f64; 3] {
        let idx = self.multi_index(flat);
        let mut xi = [0.0; 3];
        for j in 0..self.dim {
            xi[j] = 2.0 * PI * Self::signed_k(idx[j], self.points[j]) as f64 / self.period[j];
        }
        xi
    }

    /// `|ξ|²` for every spectral index.
    pub fn xi_sq_table(&self) -> Vec<f64> {
        (0..self.len())
            .map(|f| {
                let xi = self.wave_vector(f);
                xi[..self.dim].iter().map(|v| v * v).sum()
            })
            .collect()
    }

    /// True for modes kept by the 2/3 dealiasing rule.
    pub fn dealias_mask(&self) -> Vec<bool> {
        (0..self.len())
            .map(|f| {
                let idx = self.multi_index(f);
                (0..self.dim).all(|j| {
                    let k = Self::signed_k(idx[j], self.points[j]).unsigned_abs() as usize;
                    3 * k <= self.points[j]
                })
            })
            .collect()
    }

    /// True on any Nyquist plane, where odd multipliers must vanish.
    fn is_nyquist(&self, flat: usize, axis: usize) -> bool {
        self.multi_index(flat)[axis] == self.points[axis] / 2
    }

    pub fn zeros(&self) -> SpatialField {
        SpatialField {
            grid: self.clone(),
            values: vec![0.0; self.len()],
        }
    }

    /// Samples `f(x)` at every grid point.
    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> SpatialField {
        let values = (0..self.len())
            .map(|i| {
                let x = self.coords(i);
                f(&x[..self.dim])
            })
            .collect();
        SpatialField {
            grid: self.clone(),
            values,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialField {
    pub grid: TorusGrid,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub grid: TorusGrid,
    pub coeffs: Vec<Complex64>,
}

impl SpatialField {
    pub fn new(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(TricomiError::SizeMismatch(format!(
                "grid has {} points, got {} values",
                grid.len(),
                values.len()
            )));
        }
        Ok(SpatialField { grid, values })
    }

    pub fn scaled(&self, c: f64) -> Self {
        SpatialField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// `self + c·other`.
    pub fn axpy(&self, c: f64, other: &SpatialField) -> Result<Self> {
        check_same(&self.grid, &other.grid)?;
        Ok(SpatialField {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + c * b).collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl SpectralField {
    pub fn new(grid: TorusGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(TricomiError::SizeMismatch(format!(
                "grid has {} modes, got {} coefficients",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(SpectralField { grid, coeffs })
    }

    pub fn zeros(grid: &TorusGrid) -> Self {
        SpectralField {
            grid: grid.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Multiplies every coefficient by `symbol(|ξ|²)`.
    pub fn radial_multiplier(&self, symbol: impl Fn(f64) -> f64) -> Self {
        let xi2 = self.grid.xi_sq_table();
        SpectralField {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().zip(&xi2).map(|(c, &k)| c * symbol(k)).collect(),
        }
    }

    /// Largest `|Im f(x)|` relative to `max |f|` after inversion; zero for a
    /// Hermitian-symmetric spectrum.
    pub fn hermitian_defect(&self) -> f64 {
        let data = inverse_complex(self);
        let max = data.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let im = data.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
        if max == 0.0 {
            0.0
        } else {
            im / max
        }
    }
}

fn check_same(a: &TorusGrid, b: &TorusGrid) -> Result<()> {
    if a != b {
        return Err(TricomiError::SizeMismatch("fields live on different grids".into()));
    }
    Ok(())
}

/// In-place unitary FFT along every axis.
fn fft_all_axes(grid: &TorusGrid, data: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let pts = grid.points();
    let total = grid.len();
    for axis in 0..grid.dim() {
        let n = pts[axis];
        let fft = if inverse {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        };
        let stride: usize = pts[axis + 1..].iter().product();
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let outer = total / (n * stride);
        for o in 0..outer {
            for inner in 0..stride {
                let base = o * n * stride + inner;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    data[base + k * stride] = *v;
                }
            }
        }
    }
    let scale = 1.0 / (total as f64).sqrt();
    for v in data.iter_mut() {
        *v *= scale;
    }
}

pub fn forward_transform(f: &SpatialField) -> Result<SpectralField> {
    if f.values.len() != f.grid.len() {
        return Err(TricomiError::SizeMismatch("field does not match its grid".into()));
    }
    let mut data: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_all_axes(&f.grid, &mut data, false);
    Ok(SpectralField {
        grid: f.grid.clone(),
        coeffs: data,
    })
}

fn inverse_complex(f: &SpectralField) -> Vec<Complex64> {
    let mut data = f.coeffs.clone();
    fft_all_axes(&f.grid, &mut data, true);
    data
}

/// Inverse transform; the imaginary part (roundoff for Hermitian input) is
/// dropped.
pub fn inverse_transform(f: &SpectralField) -> Result<SpatialField> {
    if f.coeffs.len() != f.grid.len() {
        return Err(TricomiError::SizeMismatch("spectrum does not match its grid".into()));
    }
    let data = inverse_complex(f);
    Ok(SpatialField {
        grid: f.grid.clone(),
        values: data.into_iter().map(|z| z.re).collect(),
    })
}

/// Riemann-sum `L^p` norm, `p ∈ [1, ∞]`.
pub fn lp_norm(f: &SpatialField, p: f64) -> Result<f64> {
    lp_norm_values(&f.grid, &f.values, p)
}

pub(crate) fn lp_norm_values(grid: &TorusGrid, values: &[f64], p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(TricomiError::domain(format!("L^p norm needs p ≥ 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(values.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    let h = grid.cell_volume();
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return Ok(0.0);
    }
    // factor out the maximum so large p cannot overflow
    let s: f64 = values.iter().map(|v| (v.abs() / max).powf(p)).sum();
    Ok(max * (h * s).powf(1.0 / p))
}

/// `L²` norm computed on the spectral side.
pub fn spectral_l2_norm(f: &SpectralField) -> f64 {
    let s: f64 = f.coeffs.iter().map(|c| c.norm_sqr()).sum();
    (f.grid.cell_volume() * s).sqrt()
}

/// `H^γ` norm with weight `(1 + |ξ|²)^γ` on `|f̂|²`.
pub fn sobolev_norm(f: &SpectralField, gamma: f64) -> f64 {
    let xi2 = f.grid.xi_sq_table();
    let s: f64 = f
        .coeffs
        .iter()
        .zip(&xi2)
        .map(|(c, &k)| (1.0 + k).powf(gamma) * c.norm_sqr())
        .sum();
    (f.grid.cell_volume() * s).sqrt()
}

/// Spectral Laplacian, multiplier `−|ξ|²`.
pub fn laplacian(f: &SpectralField) -> SpectralField {
    f.radial_multiplier(|k| -k)
}

/// Spectral partial derivative `∂_{x_axis}`, with the Nyquist plane zeroed.
pub fn partial(f: &SpectralField, axis: usize) -> Result<SpectralField> {
    if axis >= f.grid.dim() {
        return Err(TricomiError::domain(format!("axis {axis} out of range")));
    }
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if f.grid.is_nyquist(i, axis) {
                Complex64::new(0.0, 0.0)
            } else {
                c * Complex64::new(0.0, f.grid.wave_vector(i)[axis])
            }
        })
        .collect();
    Ok(SpectralField {
        grid: f.grid.clone(),
        coeffs,
    })
}

/// Zeroes modes outside the 2/3 band.
pub fn dealias(f: &mut SpectralField) {
    let mask = f.grid.dealias_mask();
    for (c, keep) in f.coeffs.iter_mut().zip(mask) {
        if !keep {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}
