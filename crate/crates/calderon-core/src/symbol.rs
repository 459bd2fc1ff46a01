//! Lipschitz symbols `a` (the commutator's multiplying function), with the
//! measured finite-difference Lipschitz constant and the stock families:
//! linear `a(x) = x·e`, smooth compactly supported bumps, and piecewise
//! linear tents (Lipschitz but not `C¹`).

use crate::error::{LabError, Result};
use crate::grid::{BoxGrid, GridFunction, C64};

/// Real-valued symbol samples with a recorded Lipschitz bound
/// `max |∇a|` from forward differences.
#[derive(Debug, Clone)]
pub struct LipschitzSymbol {
    grid: BoxGrid,
    values: Vec<f64>,
    lip_bound: f64,
}

impl LipschitzSymbol {
    pub fn new(grid: BoxGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(LabError::InvalidArgument(format!(
                "symbol sample count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(LabError::NonFinite { context: "symbol samples", index: i });
            }
        }
        let lip_bound = forward_difference_sup(&grid, &values);
        Ok(LipschitzSymbol { grid, values, lip_bound })
    }

    pub fn from_fn(grid: BoxGrid, mut f: impl FnMut(f64, f64) -> f64) -> Result<Self> {
        let n = grid.n();
        let h = grid.spacing();
        let l = grid.half_width();
        let mut values = Vec::with_capacity(grid.len());
        for iy in 0..n {
            for ix in 0..n {
                values.push(f(-l + ix as f64 * h, -l + iy as f64 * h));
            }
        }
        Self::new(grid, values)
    }

    /// `a(x) = x·e` for a unit direction `e`.
    pub fn linear(grid: BoxGrid, ex: f64, ey: f64) -> Result<Self> {
        let norm = (ex * ex + ey * ey).sqrt();
        if norm == 0.0 {
            return Err(LabError::InvalidArgument("linear symbol needs a direction".into()));
        }
        Self::from_fn(grid, |x, y| (x * ex + y * ey) / norm)
    }

    /// Coordinate symbol `a(x) = x_m`, `m ∈ {1, 2}`.
    pub fn coordinate(grid: BoxGrid, axis: usize) -> Result<Self> {
        match axis {
            1 => Self::from_fn(grid, |x, _| x),
            2 => Self::from_fn(grid, |_, y| y),
            _ => Err(LabError::InvalidArgument(format!("axis must be 1 or 2, got {axis}"))),
        }
    }

    /// Smooth bump `height · exp(-1/(1 - |x-c|²/R²))`-style profile.
    pub fn bump(grid: BoxGrid, cx: f64, cy: f64, radius: f64, height: f64) -> Result<Self> {
        if radius <= 0.0 {
            return Err(LabError::InvalidArgument("bump radius must be positive".into()));
        }
        let scale = height / crate::radial::bump(0.0);
        Self::from_fn(grid, |x, y| {
            let r = ((x - cx).powi(2) + (y - cy).powi(2)).sqrt() / radius;
            scale * crate::radial::bump(r)
        })
    }

    /// Piecewise-linear tent `height · max(0, 1 − |x−c|_∞/R)`: Lipschitz
    /// but not `C¹`, stressing the gradient-only hypothesis.
    pub fn tent(grid: BoxGrid, cx: f64, cy: f64, radius: f64, height: f64) -> Result<Self> {
        if radius <= 0.0 {
            return Err(LabError::InvalidArgument("tent radius must be positive".into()));
        }
        Self::from_fn(grid, |x, y| {
            let d = ((x - cx).abs()).max((y - cy).abs()) / radius;
            height * (1.0 - d).max(0.0)
        })
    }

    /// One real per line, row-major `n²` values.
    pub fn from_file(path: &std::path::Path, grid: BoxGrid) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v: f64 = line.parse().map_err(|_| LabError::Parse {
                path: path.display().to_string(),
                message: format!("line {}: not a real number: {line:?}", lineno + 1),
            })?;
            values.push(v);
        }
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &BoxGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn lip_bound(&self) -> f64 {
        self.lip_bound
    }

    /// Recompute the forward-difference bound (should match the stored one).
    pub fn recompute_lip_bound(&self) -> f64 {
        forward_difference_sup(&self.grid, &self.values)
    }

    /// Pointwise `(±a)^i · f`.
    pub fn pow_times(&self, f: &GridFunction, i: u32, negate: bool) -> Result<GridFunction> {
        self.grid_matches(f)?;
        let mut out = f.clone();
        if i == 0 {
            return Ok(out);
        }
        for (v, a) in out.values_mut().iter_mut().zip(&self.values) {
            let base = if negate { -a } else { *a };
            *v *= C64::new(base.powi(i as i32), 0.0);
        }
        Ok(out)
    }

    pub fn scale(&self, lambda: f64) -> LipschitzSymbol {
        LipschitzSymbol {
            grid: self.grid,
            values: self.values.iter().map(|v| v * lambda).collect(),
            lip_bound: self.lip_bound * lambda.abs(),
        }
    }

    pub fn offset(&self, c: f64) -> LipschitzSymbol {
        LipschitzSymbol {
            grid: self.grid,
            values: self.values.iter().map(|v| v + c).collect(),
            lip_bound: self.lip_bound,
        }
    }

    fn grid_matches(&self, f: &GridFunction) -> Result<()> {
        if self.grid == *f.grid() {
            Ok(())
        } else {
            Err(LabError::GridMismatch("symbol grid differs from function grid".into()))
        }
    }
}

fn forward_difference_sup(grid: &BoxGrid, values: &[f64]) -> f64 {
    let n = grid.n();
    let h = grid.spacing();
    let mut sup = 0.0f64;
    for iy in 0..n {
        for ix in 0..n {
            let v = values[iy * n + ix];
            if ix + 1 < n {
                sup = sup.max((values[iy * n + ix + 1] - v).abs() / h);
            }
            if iy + 1 < n {
                sup = sup.max((values[(iy + 1) * n + ix] - v).abs() / h);
            }
        }
    }
    sup
}
