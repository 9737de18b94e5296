use crate::error::{Result, TricomiError};
use crate::quad::{GaussRule, Lagrange};

use super::SpatialField;

/// Composite Gauss–Legendre time grid: panels between sorted breakpoints,
/// each carrying the same number of nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    breaks: Vec<f64>,
    nodes_per_panel: usize,
}

impl TimeGrid {
    pub fn from_breaks(breaks: Vec<f64>, nodes_per_panel: usize) -> Result<Self> {
        if breaks.len() < 2 {
            return Err(TricomiError::domain("time grid needs at least one panel"));
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(TricomiError::domain("time grid breakpoints must increase strictly"));
        }
        if nodes_per_panel == 0 {
            return Err(TricomiError::domain("time grid needs at least one node per panel"));
        }
        Ok(TimeGrid {
            breaks,
            nodes_per_panel,
        })
    }

    pub fn uniform(t_start: f64, t_end: f64, panels: usize, nodes_per_panel: usize) -> Result<Self> {
        if panels == 0 || !(t_start < t_end) {
            return Err(TricomiError::domain("uniform time grid needs t_start < t_end and panels ≥ 1"));
        }
        let h = (t_end - t_start) / panels as f64;
        let mut breaks: Vec<f64> = (0..panels).map(|k| t_start + h * k as f64).collect();
        breaks.push(t_end);
        Self::from_breaks(breaks, nodes_per_panel)
    }

    /// Panels halving in width toward `t_start`: breakpoints
    /// `t_start + (t_end − t_start)·2^{k−panels+1}`.
    pub fn graded(t_start: f64, t_end: f64, panels: usize, nodes_per_panel: usize) -> Result<Self> {
        if panels == 0 || !(t_start < t_end) {
            return Err(TricomiError::domain("graded time grid needs t_start < t_end and panels ≥ 1"));
        }
        let len = t_end - t_start;
        let mut breaks = vec![t_start];
        for k in 0..panels {
            let e = k as i32 + 1 - panels as i32;
            breaks.push(t_start + len * 2f64.powi(e));
        }
        *breaks.last_mut().unwrap() = t_end;
        Self::from_breaks(breaks, nodes_per_panel)
    }

    /// Splits every panel at its midpoint.
    pub fn bisected(&self) -> Self {
        let mut breaks = Vec::with_capacity(2 * self.breaks.len() - 1);
        for w in self.breaks.windows(2) {
            breaks.push(w[0]);
            breaks.push(0.5 * (w[0] + w[1]));
        }
        breaks.push(self.t_end());
        Self::from_breaks(breaks, self.nodes_per_panel).expect("midpoints keep breaks increasing")
    }

    /// Concatenates grids whose endpoints meet.
    pub fn join(&self, other: &TimeGrid) -> Result<Self> {
        if self.nodes_per_panel != other.nodes_per_panel || self.t_end() != other.t_start() {
            return Err(TricomiError::domain("joined grids must meet and share node counts"));
        }
        let mut breaks = self.breaks.clone();
        breaks.extend_from_slice(&other.breaks[1..]);
        Self::from_breaks(breaks, self.nodes_per_panel)
    }

    pub fn t_start(&self) -> f64 {
        self.breaks[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.breaks.last().unwrap()
    }

    pub fn panels(&self) -> usize {
        self.breaks.len() - 1
    }

    pub fn nodes_per_panel(&self) -> usize {
        self.nodes_per_panel
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn panel(&self, p: usize) -> (f64, f64) {
        (self.breaks[p], self.breaks[p + 1])
    }

    pub fn len(&self) -> usize {
        self.panels() * self.nodes_per_panel
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rule(&self) -> GaussRule {
        GaussRule::new(self.nodes_per_panel)
    }

    /// All nodes, panel by panel.
    pub fn nodes(&self) -> Vec<f64> {
        self.nodes_and_weights().0
    }

    pub fn nodes_and_weights(&self) -> (Vec<f64>, Vec<f64>) {
        let rule = self.rule();
        let mut nodes = Vec::with_capacity(self.len());
        let mut weights = Vec::with_capacity(self.len());
        for p in 0..self.panels() {
            let (a, b) = self.panel(p);
            for (x, w) in rule.mapped(a, b) {
                nodes.push(x);
                weights.push(w);
            }
        }
        (nodes, weights)
    }

    /// Index of the panel containing `t` (the left one at a shared breakpoint).
    pub fn panel_of(&self, t: f64) -> Option<usize> {
        if t < self.t_start() || t > self.t_end() {
            return None;
        }
        let p = self.breaks.partition_point(|&b| b < t);
        Some(p.saturating_sub(1).min(self.panels() - 1))
    }

    /// Nodes plus every breakpoint, sorted: the natural evaluation times.
    pub fn nodes_with_breaks(&self) -> Vec<f64> {
        let mut all = self.nodes();
        all.extend_from_slice(&self.breaks);
        all.sort_by(f64::total_cmp);
        all
    }
}

/// Spatial snapshots at the nodes of a [`TimeGrid`].
#[derive(Debug, Clone)]
pub struct TimeSeries {
    pub grid: TimeGrid,
    pub fields: Vec<SpatialField>,
}

impl TimeSeries {
    pub fn new(grid: TimeGrid, fields: Vec<SpatialField>) -> Result<Self> {
        if fields.len() != grid.len() {
            return Err(TricomiError::SizeMismatch(format!(
                "time grid has {} nodes, got {} snapshots",
                grid.len(),
                fields.len()
            )));
        }
        if let Some(first) = fields.first() {
            if fields.iter().any(|f| f.grid != first.grid) {
                return Err(TricomiError::SizeMismatch("snapshots on different grids".into()));
            }
        }
        Ok(TimeSeries { grid, fields })
    }

    /// Samples `f(t)` at every node.
    pub fn from_fn(grid: TimeGrid, mut f: impl FnMut(f64) -> SpatialField) -> Result<Self> {
        let fields = grid.nodes().into_iter().map(&mut f).collect();
        Self::new(grid, fields)
    }

    /// Panel-wise Lagrange interpolation; zero outside the grid's interval.
    pub fn interpolate(&self, t: f64) -> SpatialField {
        let template = &self.fields[0];
        let Some(p) = self.grid.panel_of(t) else {
            return template.grid.zeros();
        };
        let q = self.grid.nodes_per_panel();
        let nodes = self.grid.nodes();
        let lag = Lagrange::new(&nodes[p * q..(p + 1) * q]);
        let basis = lag.basis(t);
        let mut out = vec![0.0; template.values.len()];
        for (j, w) in basis.iter().enumerate() {
            for (o, v) in out.iter_mut().zip(&self.fields[p * q + j].values) {
                *o += w * v;
            }
        }
        SpatialField {
            grid: template.grid.clone(),
            values: out,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_breaks_halve_toward_start() {
        let g = TimeGrid::graded(0.0, 1.0, 4, 5).unwrap();
        assert_eq!(g.breaks(), &[0.0, 0.125, 0.25, 0.5, 1.0]);
        assert_eq!(g.len(), 20);
        let (_, w) = g.nodes_and_weights();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn panel_lookup() {
        let g = TimeGrid::uniform(0.0, 2.0, 4, 3).unwrap();
        assert_eq!(g.panel_of(0.0), Some(0));
        assert_eq!(g.panel_of(0.5), Some(0));
        assert_eq!(g.panel_of(0.51), Some(1));
        assert_eq!(g.panel_of(2.0), Some(3));
        assert_eq!(g.panel_of(2.1), None);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(TimeGrid::uniform(1.0, 1.0, 2, 3).is_err());
        assert!(TimeGrid::from_breaks(vec![0.0, 2.0, 1.0], 3).is_err());
    }
}
