//! Banded matrices, banded Gaussian elimination and the structural checks
//! behind the discrete maximum principle (diagonal dominance,
//! irreducibility, entrywise nonnegativity).

use crate::error::{Error, Result};

/// Square matrix with `kl` sub- and `ku` super-diagonals, stored row by row:
/// entry `(i, j)` lives at `data[i * width + (j + kl - i)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let kl = kl.min(n.saturating_sub(1));
        let ku = ku.min(n.saturating_sub(1));
        Self {
            n,
            kl,
            ku,
            data: vec![0.0; n * (kl + ku + 1)],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = Self::zeros(n, 0, 0);
        a.data.fill(1.0);
        a
    }

    /// Tridiagonal matrix; `sub[i]` is entry `(i + 1, i)`, `sup[i]` is `(i, i + 1)`.
    pub fn tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64]) -> Result<Self> {
        let n = diag.len();
        let off = n.saturating_sub(1);
        for len in [sub.len(), sup.len()] {
            if len != off {
                return Err(Error::DimensionMismatch { expected: off, found: len });
            }
        }
        let mut a = Self::zeros(n, 1, 1);
        for i in 0..n {
            a.set(i, i, diag[i]);
            if i + 1 < n {
                a.set(i + 1, i, sub[i]);
                a.set(i, i + 1, sup[i]);
            }
        }
        Ok(a)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }
    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    fn width(&self) -> usize {
        self.kl + self.ku + 1
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.kl >= i && j <= i + self.ku
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        i * self.width() + (j + self.kl - i)
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[self.offset(i, j)]
        } else {
            0.0
        }
    }

    /// # Panics
    /// If `(i, j)` lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside the band");
        let k = self.offset(i, j);
        self.data[k] = v;
    }

    /// # Panics
    /// If `(i, j)` lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside the band");
        let k = self.offset(i, j);
        self.data[k] += v;
    }

    /// Column range of row `i` inside the band.
    pub fn row_range(&self, i: usize) -> std::ops::RangeInclusive<usize> {
        i.saturating_sub(self.kl)..=(i + self.ku).min(self.n - 1)
    }

    /// `self + s * other`, with the union of both bands.
    pub fn add_scaled(&self, other: &BandedMatrix, s: f64) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        let mut out = Self::zeros(self.n, self.kl.max(other.kl), self.ku.max(other.ku));
        for i in 0..self.n {
            for j in self.row_range(i) {
                out.add(i, j, self.get(i, j));
            }
            for j in other.row_range(i) {
                out.add(i, j, s * other.get(i, j));
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.len() });
        }
        Ok((0..self.n)
            .map(|i| self.row_range(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect())
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Packs a dense square matrix; fails if a nonzero lies outside the band.
    pub fn from_dense(dense: &[Vec<f64>], kl: usize, ku: usize) -> Result<Self> {
        let n = dense.len();
        let mut a = Self::zeros(n, kl, ku);
        for (i, row) in dense.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            for (j, &v) in row.iter().enumerate() {
                if a.in_band(i, j) {
                    a.set(i, j, v);
                } else if v != 0.0 {
                    return Err(Error::invalid("dense", format!("entry ({i}, {j}) outside the band")));
                }
            }
        }
        Ok(a)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row_range(i).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Per-row `|a_kk| - sum_{l != k} |a_kl|`.
#[derive(Debug, Clone, PartialEq)]
pub struct DominanceReport {
    pub dominant: bool,
    pub margins: Vec<f64>,
}

/// Weak dominance in every row and strict dominance in at least one.
pub fn is_strictly_diagonally_dominant(a: &BandedMatrix) -> DominanceReport {
    let margins: Vec<f64> = (0..a.n())
        .map(|i| {
            let off: f64 = a.row_range(i).filter(|&j| j != i).map(|j| a.get(i, j).abs()).sum();
            a.get(i, i).abs() - off
        })
        .collect();
    let dominant = !margins.is_empty()
        && margins.iter().all(|&m| m >= 0.0)
        && margins.iter().any(|&m| m > 0.0);
    DominanceReport { dominant, margins }
}

/// True iff the matrix is tridiagonal with no zero on its off-diagonals.
pub fn is_irreducible_tridiagonal(a: &BandedMatrix) -> bool {
    let n = a.n();
    for i in 0..n {
        for j in a.row_range(i) {
            if i.abs_diff(j) > 1 && a.get(i, j) != 0.0 {
                return false;
            }
        }
    }
    (0..n.saturating_sub(1)).all(|i| a.get(i + 1, i) != 0.0 && a.get(i, i + 1) != 0.0)
}

pub fn is_entrywise_nonnegative(a: &BandedMatrix) -> bool {
    (0..a.n()).all(|i| a.row_range(i).all(|j| a.get(i, j) >= 0.0))
}

/// Pivoting used by [`solve_banded`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pivoting {
    /// No pivoting when the matrix is diagonally dominant, partial otherwise.
    Auto,
    None,
    Partial,
}

/// Solves `a x = rhs` by banded Gaussian elimination.
pub fn solve_banded(a: &BandedMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    solve_banded_with(a, rhs, Pivoting::Auto)
}

pub fn solve_banded_with(a: &BandedMatrix, rhs: &[f64], pivoting: Pivoting) -> Result<Vec<f64>> {
    let n = a.n();
    if rhs.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: rhs.len() });
    }
    let pivot = match pivoting {
        Pivoting::Auto => !is_strictly_diagonally_dominant(a).dominant,
        Pivoting::None => false,
        Pivoting::Partial => true,
    };
    let (kl, ku) = (a.lower_bandwidth(), a.upper_bandwidth());
    // room for the fill-in produced by row swaps
    let extra = if pivot { kl } else { 0 };
    let mut w = BandedMatrix::zeros(n, kl, ku + extra);
    let ku_w = w.upper_bandwidth();
    for i in 0..n {
        for j in a.row_range(i) {
            w.set(i, j, a.get(i, j));
        }
    }
    let mut b = rhs.to_vec();

    for k in 0..n {
        let last_row = (k + kl).min(n - 1);
        let last_col = (k + ku_w).min(n - 1);
        if pivot {
            let p = (k..=last_row)
                .max_by(|&r, &s| w.get(r, k).abs().total_cmp(&w.get(s, k).abs()))
                .unwrap_or(k);
            if p != k {
                for j in k..=last_col {
                    let (x, y) = (w.get(k, j), w.get(p, j));
                    w.set(k, j, y);
                    w.set(p, j, x);
                }
                b.swap(k, p);
            }
        }
        let d = w.get(k, k);
        if d == 0.0 || !d.is_finite() {
            return Err(Error::SingularMatrix { pivot: k });
        }
        for r in k + 1..=last_row {
            let f = w.get(r, k) / d;
            if f == 0.0 {
                continue;
            }
            w.set(r, k, 0.0);
            for j in k + 1..=last_col {
                let v = w.get(k, j);
                if v != 0.0 {
                    w.add(r, j, -f * v);
                }
            }
            b[r] -= f * b[k];
        }
    }

    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..=(i + ku_w).min(n - 1)).map(|j| w.get(i, j) * x[j]).sum();
        x[i] = (b[i] - s) / w.get(i, i);
    }
    Ok(x)
}
