//! Staggered 1D grid: strain on nodes `l1 + i h`, fluid content on cell
//! centres `l1 + (i - 1/2) h`.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Uniform grid on `[l1, l2]` with `n` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    l1: f64,
    l2: f64,
    n: usize,
    h: f64,
}

pub const MIN_CELLS: usize = 4;

impl Grid1D {
    pub fn new(l1: f64, l2: f64, n: usize) -> Result<Self> {
        if l2 <= l1 || !l1.is_finite() || !l2.is_finite() || n < MIN_CELLS {
            return Err(Error::DegenerateDomain { l1, l2, n });
        }
        Ok(Self {
            l1,
            l2,
            n,
            h: (l2 - l1) / n as f64,
        })
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }
    pub fn l2(&self) -> f64 {
        self.l2
    }
    pub fn length(&self) -> f64 {
        self.l2 - self.l1
    }
    /// Number of cells.
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Centre of cell `i`, `i` in `0..=n+1` (0 and n+1 are ghost cells).
    pub fn cell_center(&self, i: usize) -> f64 {
        self.l1 + (i as f64 - 0.5) * self.h
    }

    /// Node `i`, `i` in `-1..=n+1`. Node `n` is placed exactly at `l2`.
    pub fn node(&self, i: isize) -> f64 {
        if i == self.n as isize {
            self.l2
        } else {
            self.l1 + i as f64 * self.h
        }
    }

    /// Centres of the interior cells `1..=n`.
    pub fn cell_centers(&self) -> Vec<f64> {
        (1..=self.n).map(|i| self.cell_center(i)).collect()
    }

    /// Nodes `0..=n`.
    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n as isize).map(|i| self.node(i)).collect()
    }
}

/// Piecewise-constant field on cells `1..=n` with a Dirichlet ghost value
/// for cell 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CellField {
    pub boundary: f64,
    pub values: Vec<f64>,
}

impl CellField {
    pub fn new(boundary: f64, values: Vec<f64>) -> Self {
        Self { boundary, values }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self::new(c, vec![c; n])
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Value of cell `i` in `0..=n`; cell 0 is the Dirichlet slot.
    pub fn at(&self, i: usize) -> f64 {
        if i == 0 {
            self.boundary
        } else {
            self.values[i - 1]
        }
    }

    pub fn l2_norm(&self, grid: &Grid1D) -> f64 {
        discrete_l2_norm(&self.values, grid.h())
    }
}

/// Field on nodes `0..=n`; nodes `-1` and `n+1` mirror nodes `1` and `n-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeField {
    pub values: Vec<f64>,
}

impl NodeField {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self::new(vec![c; n + 1])
    }

    /// Number of cells (one less than the stored node count).
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    /// Value at node `i` in `-1..=n+1`, ghosts included.
    pub fn at(&self, i: isize) -> f64 {
        let n = self.n() as isize;
        let j = match i {
            -1 => 1,
            i if i == n + 1 => n - 1,
            i => i,
        };
        self.values[j as usize]
    }

    /// Trapezoid-weighted norm, so that a unit constant has norm
    /// `sqrt(length)`.
    pub fn l2_norm(&self, grid: &Grid1D) -> f64 {
        trapezoid_l2_norm(&self.values, grid.h())
    }
}

/// `sqrt(h * sum v_i^2)` with half weight on the first and last value.
pub fn trapezoid_l2_norm(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    let inner: f64 = values.iter().map(|x| x * x).sum();
    let ends = match n {
        0 => 0.0,
        1 => values[0] * values[0],
        _ => values[0] * values[0] + values[n - 1] * values[n - 1],
    };
    (h * (inner - 0.5 * ends)).sqrt()
}

/// `sqrt(h * sum v_i^2)`.
pub fn discrete_l2_norm(values: &[f64], h: f64) -> f64 {
    (h * values.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

pub fn sample_cells<F: Fn(f64) -> f64>(grid: &Grid1D, f: F) -> CellField {
    CellField::new(
        f(grid.cell_center(0)),
        grid.cell_centers().into_iter().map(&f).collect(),
    )
}

pub fn sample_nodes<F: Fn(f64) -> f64>(grid: &Grid1D, f: F) -> NodeField {
    NodeField::new(grid.nodes().into_iter().map(f).collect())
}

/// Formats `x` with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV text with a header row and one row per entry of the equal-length
/// columns.
pub fn columns_csv(header: &[&str], columns: &[&[f64]]) -> String {
    let rows = columns.first().map_or(0, |c| c.len());
    let mut out = header.join(",");
    out.push('\n');
    for r in 0..rows {
        for (k, col) in columns.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", fmt_f64(col[r]));
        }
        out.push('\n');
    }
    out
}

impl CellField {
    /// `x,value` rows for cells `1..=n`.
    pub fn to_csv(&self, grid: &Grid1D) -> String {
        columns_csv(&["x", "value"], &[&grid.cell_centers(), &self.values])
    }
}

impl NodeField {
    /// `x,value` rows for nodes `0..=n`.
    pub fn to_csv(&self, grid: &Grid1D) -> String {
        columns_csv(&["x", "value"], &[&grid.nodes(), &self.values])
    }
}
