//! One step of the scheme: explicit strain update, then the theta-weighted
//! fluid-content update.

use crate::error::{Error, Result};
use crate::grid::{CellField, Grid1D, NodeField};
use crate::linalg::{solve_banded, BandedMatrix};
use crate::potential::{psi_total, ModelParams};
use crate::reaction::Reaction;

use super::config::{Boundary, CrossStencil, LeftFlux, SweepOrder};
use super::coupling::CrossCoupling;

/// Discrete state at time `t` after `n` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionState {
    pub n: usize,
    pub t: f64,
    pub eps: NodeField,
    pub m: CellField,
    /// `(eps_i - eps_(i-1)) / h` for `i` in `0..=n+1`.
    pub b: Vec<f64>,
    /// Fluid flux at nodes `0..=n`.
    pub flux: Vec<f64>,
}

/// Strain gradients `b_i = (eps_i - eps_(i-1)) / h`, `i = 0..=n+1`, with
/// mirrored ghost nodes at both ends.
pub fn update_b(eps: &NodeField, h: f64) -> Vec<f64> {
    let n = eps.n() as isize;
    (0..=n + 1).map(|i| (eps.at(i) - eps.at(i - 1)) / h).collect()
}

/// Fluid flux with both ends insulated: `F_0 = F_n = 0` and
/// `F_i = k3 (m_(i+1) - m_i) / h + k2 b_i` in between.
pub fn compute_flux(m: &CellField, b: &[f64], h: f64, k2: f64, k3: f64) -> Vec<f64> {
    compute_flux_with(m, b, h, k2, k3, LeftFlux::ZeroFlux)
}

/// As [`compute_flux`], with the chosen treatment of the `l1` face.
/// `grad` is indexed like `b`.
pub fn compute_flux_with(m: &CellField, grad: &[f64], h: f64, k2: f64, k3: f64, left: LeftFlux) -> Vec<f64> {
    let n = m.n();
    let mut f = vec![0.0; n + 1];
    for i in 1..n {
        f[i] = k3 * (m.at(i + 1) - m.at(i)) / h + k2 * grad[i];
    }
    if left == LeftFlux::Dirichlet {
        f[0] = k3 * (m.at(1) - m.at(0)) / h + k2 * grad[1];
    }
    f
}

/// The `n x n` flux-difference matrix: `k3 * tridiag(1, -2, 1)` with first
/// row `(-1, 1)` and last row `(1, -1)`.
pub fn assemble_h(n: usize, k3: f64) -> BandedMatrix {
    let mut h = BandedMatrix::zeros(n, 1, 1);
    for i in 0..n {
        let diag = if i == 0 || i == n - 1 { -1.0 } else { -2.0 };
        h.set(i, i, k3 * diag);
        if i + 1 < n {
            h.set(i, i + 1, k3);
            h.set(i + 1, i, k3);
        }
    }
    h
}

/// `H` plus the extra diagonal term that the Dirichlet face puts on the
/// first row.
pub fn density_operator(n: usize, k3: f64, left: LeftFlux) -> BandedMatrix {
    let mut op = assemble_h(n, k3);
    if left == LeftFlux::Dirichlet {
        op.add(0, 0, -k3);
    }
    op
}

/// `m_xx` approximations at nodes `1..=n`.
pub fn cross_second_difference(m: &CellField, stencil: CrossStencil, h: f64) -> Vec<f64> {
    let n = m.n();
    let h2 = h * h;
    (1..=n)
        .map(|i| match stencil {
            CrossStencil::Lagged => {
                let left = if i >= 2 { m.at(i - 2) } else { m.at(0) };
                (left - 2.0 * m.at(i - 1) + m.at(i)) / h2
            }
            CrossStencil::Centered => {
                let right = if i < n { m.at(i + 1) } else { m.at(n) };
                (m.at(i - 1) - 2.0 * m.at(i) + right) / h2
            }
        })
        .collect()
}

/// Result of the concavity check on the first two strain gradients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct A3Report {
    pub holds: bool,
    /// Indices `i` with `b0_i - b0_(i-1) + b1_i - b1_(i-1) > 0`.
    pub violations: Vec<usize>,
}

/// Checks `b0_i - b0_(i-1) + b1_i - b1_(i-1) <= 0` for `i = 2..=n`, the
/// increments that involve no ghost node.
pub fn check_a3(b0: &[f64], b1: &[f64]) -> A3Report {
    let n = b0.len().min(b1.len()).saturating_sub(2);
    let violations: Vec<usize> = (2..=n)
        .filter(|&i| b0[i] - b0[i - 1] + b1[i] - b1[i - 1] > 0.0)
        .collect();
    A3Report {
        holds: violations.is_empty(),
        violations,
    }
}

/// Discrete energy `h sum [ (k1 b^2 + 2 k2 b m_x + k3 m_x^2) / 2 + Psi ]`
/// over the cells, with one-sided `m_x` in the end cells.
pub fn total_energy(eps: &NodeField, m: &CellField, grid: &Grid1D, params: &ModelParams) -> f64 {
    let n = grid.n();
    let h = grid.h();
    let mut sum = 0.0;
    for i in 1..=n {
        let b = (eps.values[i] - eps.values[i - 1]) / h;
        let mx = match i {
            1 => (m.at(2) - m.at(1)) / h,
            i if i == n => (m.at(n) - m.at(n - 1)) / h,
            i => (m.at(i + 1) - m.at(i - 1)) / (2.0 * h),
        };
        let grad = 0.5 * (params.k1 * b * b + 2.0 * params.k2 * b * mx + params.k3 * mx * mx);
        let e_mid = 0.5 * (eps.values[i - 1] + eps.values[i]);
        sum += grad + psi_total(e_mid, m.at(i), params);
    }
    h * sum
}

/// Linear system for the new fluid content.
#[derive(Debug, Clone)]
pub struct DensitySystem {
    pub matrix: BandedMatrix,
    pub rhs: Vec<f64>,
}

/// Optional additive sources, evaluated by the caller at the right time level.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepSources<'s> {
    /// Strain source at nodes `1..=n`.
    pub strain: Option<&'s [f64]>,
    /// Fluid source at cells `1..=n`.
    pub density: Option<&'s [f64]>,
}

/// Everything one step needs besides the state.
pub struct Stepper<'a> {
    pub grid: Grid1D,
    pub params: ModelParams,
    pub theta: f64,
    pub left_flux: LeftFlux,
    pub order: SweepOrder,
    pub reaction: &'a dyn Reaction,
    pub coupling: &'a dyn CrossCoupling,
}

fn check_len(v: Option<&[f64]>, n: usize) -> Result<()> {
    match v {
        Some(s) if s.len() != n => Err(Error::DimensionMismatch { expected: n, found: s.len() }),
        _ => Ok(()),
    }
}

impl<'a> Stepper<'a> {
    fn indices(&self, range: std::ops::RangeInclusive<usize>) -> Box<dyn Iterator<Item = usize>> {
        match self.order {
            SweepOrder::Ascending => Box::new(range),
            SweepOrder::Descending => Box::new(range.rev()),
        }
    }

    /// State with `b` and the flux filled in.
    pub fn state(&self, n: usize, t: f64, eps: NodeField, m: CellField) -> Result<EvolutionState> {
        let cells = self.grid.n();
        if eps.values.len() != cells + 1 {
            return Err(Error::DimensionMismatch { expected: cells + 1, found: eps.values.len() });
        }
        if m.n() != cells {
            return Err(Error::DimensionMismatch { expected: cells, found: m.n() });
        }
        let h = self.grid.h();
        let b = update_b(&eps, h);
        let grad = self.coupling.flux_gradient(&eps, &self.grid)?;
        let flux = compute_flux_with(&m, &grad, h, self.params.k2, self.params.k3, self.left_flux);
        Ok(EvolutionState { n, t, eps, m, b, flux })
    }

    /// Explicit strain update at nodes `1..=n`; node 0 takes `eps_left`.
    pub fn step_strain(&self, state: &EvolutionState, tau: f64, eps_left: f64, source: Option<&[f64]>) -> Result<NodeField> {
        let n = self.grid.n();
        check_len(source, n)?;
        let h2 = self.grid.h() * self.grid.h();
        let ModelParams { k1, k2, .. } = self.params;
        let cross = self.coupling.strain_term(&state.m, &self.grid)?;
        let e = &state.eps;
        let mut next = vec![0.0; n + 1];
        next[0] = eps_left;
        for i in self.indices(1..=n) {
            let ii = i as isize;
            let diffusion = k1 * (e.at(ii - 1) - 2.0 * e.at(ii) + e.at(ii + 1)) / h2;
            let mut rate = diffusion + k2 * cross[i - 1] + self.reaction.f1(e.at(ii), state.m.at(i));
            if let Some(s) = source {
                rate += s[i - 1];
            }
            next[i] = e.at(ii) + tau * rate;
        }
        Ok(NodeField::new(next))
    }

    /// Cross-flux differences `(G_i - G_(i-1)) / h` for cells `1..=n`, where
    /// `G` collects every flux part not proportional to the unknown cells.
    fn cross_divergence(&self, grad: &[f64], m_left: f64) -> Vec<f64> {
        let n = self.grid.n();
        let h = self.grid.h();
        let ModelParams { k2, k3, .. } = self.params;
        let mut g = vec![0.0; n + 1];
        for i in 1..n {
            g[i] = k2 * grad[i];
        }
        if self.left_flux == LeftFlux::Dirichlet {
            g[0] = -k3 * m_left / h + k2 * grad[1];
        }
        (1..=n).map(|i| (g[i] - g[i - 1]) / h).collect()
    }

    /// Assembles `(I - lambda theta L) m_new = rhs` for the step to
    /// `eps_new`, with `lambda = tau / h^2`.
    pub fn density_system(
        &self,
        state: &EvolutionState,
        eps_new: &NodeField,
        tau: f64,
        m_left: f64,
        source: Option<&[f64]>,
    ) -> Result<DensitySystem> {
        let n = self.grid.n();
        check_len(source, n)?;
        let h = self.grid.h();
        let lambda = tau / (h * h);
        let theta = self.theta;
        let op = density_operator(n, self.params.k3, self.left_flux);
        let grad_old = self.coupling.flux_gradient(&state.eps, &self.grid)?;
        let grad_new = self.coupling.flux_gradient(eps_new, &self.grid)?;
        let cross_old = self.cross_divergence(&grad_old, state.m.boundary);
        let cross_new = self.cross_divergence(&grad_new, m_left);
        let explicit = op.mul_vec(&state.m.values)?;
        let mut rhs = vec![0.0; n];
        for i in self.indices(1..=n) {
            let k = i - 1;
            let mut r = state.m.values[k]
                + lambda * (1.0 - theta) * explicit[k]
                + tau * (theta * cross_new[k] + (1.0 - theta) * cross_old[k])
                + tau * self.reaction.f2(state.eps.values[i], state.m.values[k]);
            if let Some(s) = source {
                r += tau * s[k];
            }
            rhs[k] = r;
        }
        let matrix = BandedMatrix::identity(n).add_scaled(&op, -lambda * theta)?;
        Ok(DensitySystem { matrix, rhs })
    }

    pub fn step_density(
        &self,
        state: &EvolutionState,
        eps_new: &NodeField,
        tau: f64,
        m_left: f64,
        source: Option<&[f64]>,
    ) -> Result<CellField> {
        let sys = self.density_system(state, eps_new, tau, m_left, source)?;
        Ok(CellField::new(m_left, solve_banded(&sys.matrix, &sys.rhs)?))
    }

    /// The fluid update written directly as flux differences, evaluated
    /// with a candidate new level `m_new`. A solution of the step is a
    /// fixed point of this map.
    pub fn density_divided_difference(
        &self,
        state: &EvolutionState,
        eps_new: &NodeField,
        m_new: &CellField,
        tau: f64,
        source: Option<&[f64]>,
    ) -> Result<Vec<f64>> {
        let n = self.grid.n();
        check_len(source, n)?;
        let h = self.grid.h();
        let ModelParams { k2, k3, .. } = self.params;
        let grad_old = self.coupling.flux_gradient(&state.eps, &self.grid)?;
        let grad_new = self.coupling.flux_gradient(eps_new, &self.grid)?;
        let f_old = compute_flux_with(&state.m, &grad_old, h, k2, k3, self.left_flux);
        let f_new = compute_flux_with(m_new, &grad_new, h, k2, k3, self.left_flux);
        Ok((1..=n)
            .map(|i| {
                let rate = self.theta * (f_new[i] - f_new[i - 1]) / h
                    + (1.0 - self.theta) * (f_old[i] - f_old[i - 1]) / h
                    + self.reaction.f2(state.eps.values[i], state.m.values[i - 1])
                    + source.map_or(0.0, |s| s[i - 1]);
                state.m.values[i - 1] + tau * rate
            })
            .collect())
    }

    /// Full step to `state.t + tau` with boundary data at the new time.
    pub fn step(&self, state: &EvolutionState, tau: f64, boundary: &Boundary, sources: StepSources<'_>) -> Result<EvolutionState> {
        let t = state.t + tau;
        let eps = self.step_strain(state, tau, boundary.eps.eval(t), sources.strain)?;
        let m = self.step_density(state, &eps, tau, boundary.m.eval(t), sources.density)?;
        self.state(state.n + 1, t, eps, m)
    }
}
