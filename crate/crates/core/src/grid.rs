//! Uniform grids and functions sampled on them.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Uniform grid on [a, b] with `n_steps` panels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    a: f64,
    b: f64,
    n_steps: usize,
}

impl Grid {
    pub fn new(a: f64, b: f64, n_steps: usize) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || !(b > a) {
            return domain(format!("grid needs finite a < b, got [{a}, {b}]"));
        }
        if n_steps == 0 {
            return domain("grid needs at least one step");
        }
        Ok(Self { a, b, n_steps })
    }

    /// Grid on [a, b] whose step is as close as possible to `h`.
    pub fn with_step(a: f64, b: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return domain(format!("step must be positive, got {h}"));
        }
        Self::new(a, b, ((b - a) / h).round().max(1.0) as usize)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (self.b - self.a) / self.n_steps as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.a + i as f64 * self.step()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.node(i))
    }

    /// Index of the node nearest to `x` (clamped to the grid).
    pub fn index_of(&self, x: f64) -> usize {
        let i = ((x - self.a) / self.step()).round();
        i.clamp(0.0, self.n_steps as f64) as usize
    }
}

/// Values of a function at every node of a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return domain(format!("sampled function has {} values for {} nodes", values.len(), grid.len()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().map(f).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Value at the node nearest to `x`.
    pub fn value_near(&self, x: f64) -> f64 {
        self.values[self.grid.index_of(x)]
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid.nodes().zip(self.values.iter().copied())
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = self.iter().map(|(t, v)| f(t, v)).collect();
        Self { grid: self.grid, values }
    }

    /// Pointwise combination with another function on the same grid.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return domain("sampled functions live on different grids");
        }
        let values = self.values.iter().zip(&other.values).map(|(&x, &y)| f(x, y)).collect();
        Ok(Self { grid: self.grid, values })
    }

    /// Same samples in reverse order: g(a + b - x) on the same grid.
    pub fn reflected(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self { grid: self.grid, values }
    }
}
