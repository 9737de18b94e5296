//! Grouping of spectral modes by `|ξ|²`, so radial symbols and quadrature
//! weights are built once per distinct radius.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

pub(crate) struct RadialGroup {
    pub xi_sq: f64,
    pub modes: Vec<usize>,
}

pub(crate) fn radial_groups(xi_sq: &[f64]) -> Vec<RadialGroup> {
    let mut map: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (i, &k) in xi_sq.iter().enumerate() {
        // nonnegative floats order like their bit patterns
        map.entry(k.to_bits()).or_default().push(i);
    }
    map.into_iter()
        .map(|(bits, modes)| RadialGroup {
            xi_sq: f64::from_bits(bits),
            modes,
        })
        .collect()
}

/// Dense `rows × cols` weights mapping node values to output values.
#[derive(Debug, Clone)]
pub(crate) struct WeightMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl WeightMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        WeightMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    #[inline]
    pub fn add(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] += v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn apply_real(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(w, v)| w * v).sum())
            .collect()
    }
}

/// Applies per-group weight matrices to node-major spectra
/// (`input[node][mode]`), returning `output[row][mode]` for each matrix kind.
/// Groups are processed in parallel; every output slot is written by exactly
/// one group, so results do not depend on the thread count.
pub(crate) fn apply_grouped(
    groups: &[RadialGroup],
    weights: &[Vec<WeightMatrix>],
    input: &[Vec<Complex64>],
    n_modes: usize,
) -> Vec<Vec<Vec<Complex64>>> {
    let kinds = weights.first().map_or(0, |w| w.len());
    let partial: Vec<Vec<Vec<Vec<Complex64>>>> = groups
        .par_iter()
        .zip(weights.par_iter())
        .map(|(g, ws)| {
            ws.iter()
                .map(|w| {
                    (0..w.rows)
                        .map(|r| {
                            let row = w.row(r);
                            g.modes
                                .iter()
                                .map(|&m| {
                                    let mut acc = Complex64::new(0.0, 0.0);
                                    for (j, &wj) in row.iter().enumerate() {
                                        if wj != 0.0 {
                                            acc += input[j][m] * wj;
                                        }
                                    }
                                    acc
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut out: Vec<Vec<Vec<Complex64>>> = (0..kinds)
        .map(|k| {
            let rows = weights.first().map_or(0, |w| w[k].rows);
            vec![vec![Complex64::new(0.0, 0.0); n_modes]; rows]
        })
        .collect();
    for (g, per_kind) in groups.iter().zip(partial) {
        for (k, rows) in per_kind.into_iter().enumerate() {
            for (r, vals) in rows.into_iter().enumerate() {
                for (&m, v) in g.modes.iter().zip(vals) {
                    out[k][r][m] = v;
                }
            }
        }
    }
    out
}
