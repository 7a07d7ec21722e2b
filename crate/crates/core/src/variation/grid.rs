use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::AnalysisError;

/// Square lattice of parameters `center + h·(i + i·j)`, `|i|, |j| <= half_width`,
/// with everything outside `|λ| <= clip_radius` dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaGrid {
    pub center: Complex64,
    pub spacing: f64,
    pub half_width: usize,
    pub clip_radius: f64,
}

impl LambdaGrid {
    pub fn new(
        center: Complex64,
        spacing: f64,
        half_width: usize,
        clip_radius: f64,
    ) -> Result<Self, AnalysisError> {
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(AnalysisError::InvalidGrid("center must be finite".into()));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(AnalysisError::InvalidGrid(format!(
                "spacing must be positive, got {spacing}"
            )));
        }
        if !(clip_radius > 0.0 && clip_radius < 1.0) {
            return Err(AnalysisError::InvalidGrid(format!(
                "clip radius must lie in (0,1), got {clip_radius}"
            )));
        }
        if half_width == 0 {
            return Err(AnalysisError::InvalidGrid(
                "half_width must be at least 1".into(),
            ));
        }
        Ok(LambdaGrid {
            center,
            spacing,
            half_width,
            clip_radius,
        })
    }

    /// Grid around the origin just covering the clip disk.
    pub fn centered(spacing: f64, clip_radius: f64) -> Result<Self, AnalysisError> {
        let half_width = ((clip_radius / spacing) - 1e-9).ceil().max(1.0) as usize;
        LambdaGrid::new(Complex64::new(0.0, 0.0), spacing, half_width, clip_radius)
    }

    /// Points per side of the full (unclipped) lattice.
    pub fn side(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn lambda_at(&self, i: usize, j: usize) -> Complex64 {
        let hw = self.half_width as f64;
        self.center
            + Complex64::new(
                self.spacing * (i as f64 - hw),
                self.spacing * (j as f64 - hw),
            )
    }

    #[cfg(test)]
    fn lambda_at_f(&self, x: f64, y: f64) -> Complex64 {
        let hw = self.half_width as f64;
        self.center + Complex64::new(self.spacing * (x - hw), self.spacing * (y - hw))
    }

    pub fn retained(&self, i: usize, j: usize) -> bool {
        i < self.side() && j < self.side() && self.lambda_at(i, j).norm() <= self.clip_radius
    }

    /// Retained lattice points in row-major order (`j` outer, `i` inner).
    pub fn points(&self) -> Vec<(usize, usize, Complex64)> {
        let n = self.side();
        (0..n)
            .flat_map(|j| (0..n).map(move |i| (i, j)))
            .filter(|&(i, j)| self.retained(i, j))
            .map(|(i, j)| (i, j, self.lambda_at(i, j)))
            .collect()
    }
}

/// Real values on the retained points of a grid; dropped points hold NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    grid: LambdaGrid,
    values: Vec<f64>,
}

impl GridField {
    pub fn from_fn(grid: LambdaGrid, f: impl Fn(Complex64) -> f64) -> Self {
        let n = grid.side();
        let mut values = vec![f64::NAN; n * n];
        for (i, j, l) in grid.points() {
            values[j * n + i] = f(l);
        }
        GridField { grid, values }
    }

    /// Builds a field from values listed in [`LambdaGrid::points`] order.
    pub fn from_points(grid: LambdaGrid, point_values: &[f64]) -> Result<Self, AnalysisError> {
        let points = grid.points();
        if points.len() != point_values.len() {
            return Err(AnalysisError::InvalidGrid(format!(
                "expected {} values, got {}",
                points.len(),
                point_values.len()
            )));
        }
        let n = grid.side();
        let mut values = vec![f64::NAN; n * n];
        for ((i, j, _), v) in points.iter().zip(point_values) {
            values[j * n + i] = *v;
        }
        Ok(GridField { grid, values })
    }

    pub fn grid(&self) -> &LambdaGrid {
        &self.grid
    }

    pub fn get(&self, i: isize, j: isize) -> Option<f64> {
        let n = self.grid.side() as isize;
        if i < 0 || j < 0 || i >= n || j >= n {
            return None;
        }
        let v = self.values[(j * n + i) as usize];
        (!v.is_nan()).then_some(v)
    }

    pub fn map(&self, f: impl Fn(Complex64, f64) -> f64) -> GridField {
        let n = self.grid.side();
        let mut values = self.values.clone();
        for (i, j, l) in self.grid.points() {
            let k = j * n + i;
            values[k] = f(l, values[k]);
        }
        GridField {
            grid: self.grid,
            values,
        }
    }

    pub fn retained_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().copied().filter(|v| !v.is_nan())
    }

    pub(crate) fn ensure_finite(&self) -> Result<(), AnalysisError> {
        if self.retained_values().all(f64::is_finite) {
            Ok(())
        } else {
            Err(AnalysisError::NonFinite)
        }
    }

    /// Tensor-product degree-5 Lagrange interpolation at fractional lattice
    /// coordinates, or `None` if the 6×6 stencil is not fully retained.
    pub(crate) fn interpolate(&self, x: f64, y: f64) -> Option<f64> {
        const WIDTH: isize = 6;
        let x0 = x.floor() as isize - 2;
        let y0 = y.floor() as isize - 2;
        let wx = lagrange_weights(x - x0 as f64);
        let wy = lagrange_weights(y - y0 as f64);
        let mut acc = 0.0;
        for b in 0..WIDTH {
            let mut row = 0.0;
            for a in 0..WIDTH {
                let v = self.get(x0 + a, y0 + b)?;
                row += wx[a as usize] * v;
            }
            acc += wy[b as usize] * row;
        }
        Some(acc)
    }
}

// Weights for nodes 0..6 evaluated at t (t in [2,3) in practice).
fn lagrange_weights(t: f64) -> [f64; 6] {
    let mut w = [1.0; 6];
    for (k, wk) in w.iter_mut().enumerate() {
        for m in 0..6 {
            if m != k {
                *wk *= (t - m as f64) / (k as f64 - m as f64);
            }
        }
    }
    w
}
