//! Convergence-order checks with manufactured solutions.
//!
//! Temporal runs use the fluid equation alone (`k2 = 0`, strain frozen)
//! with `m* = cos(pi x) exp(-t)` and forcing weighted in time like the
//! fluxes. Observed orders come from successive differences between runs
//! with halved steps, which cancels the fixed spatial error. The spatial
//! check evaluates the stationary residual at a manufactured smooth pair.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::evolve::{
    Boundary, BoundaryValue, CrossStencil, EvolutionState, LeftFlux, RawCoupling, StepSources, Stepper, SweepOrder,
};
use crate::grid::{fmt_f64, CellField, Grid1D, NodeField};
use crate::potential::{reaction_f1, reaction_f2, ModelParams};
use crate::reaction::{Reaction, ZeroReaction};
use crate::steady::StationaryProblem;

/// Errors against a refinement parameter, with the orders between
/// consecutive rows.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderTable {
    pub label: String,
    /// Step size (`tau` or `h`) of each row.
    pub sizes: Vec<f64>,
    pub errors: Vec<f64>,
    /// `orders[k]` compares rows `k` and `k + 1`.
    pub orders: Vec<f64>,
}

impl OrderTable {
    pub fn new(label: impl Into<String>, sizes: Vec<f64>, errors: Vec<f64>) -> Self {
        let orders = sizes
            .windows(2)
            .zip(errors.windows(2))
            .map(|(s, e)| (e[0] / e[1]).ln() / (s[0] / s[1]).ln())
            .collect();
        Self { label: label.into(), sizes, errors, orders }
    }

    /// Order between the two finest rows.
    pub fn final_order(&self) -> f64 {
        self.orders.last().copied().unwrap_or(f64::NAN)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("study,size,error,order\n");
        for (k, (s, e)) in self.sizes.iter().zip(&self.errors).enumerate() {
            let order = if k == 0 { String::new() } else { fmt_f64(self.orders[k - 1]) };
            let _ = writeln!(out, "{},{},{},{}", self.label, fmt_f64(*s), fmt_f64(*e), order);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemporalStudy {
    pub theta: f64,
    pub k3: f64,
    pub cells: usize,
    pub t_final: f64,
    /// Step counts of the coarsest run; every later run doubles it.
    pub coarse_steps: usize,
    pub levels: usize,
}

impl TemporalStudy {
    pub fn new(theta: f64) -> Self {
        Self {
            theta,
            k3: 1.0,
            cells: 100,
            t_final: 0.5,
            coarse_steps: 10,
            levels: 5,
        }
    }
}

fn manufactured_m(x: f64, t: f64) -> f64 {
    (PI * x).cos() * (-t).exp()
}

fn manufactured_source(x: f64, t: f64, k3: f64) -> f64 {
    (k3 * PI * PI - 1.0) * manufactured_m(x, t)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn temporal_run(study: &TemporalStudy, steps: usize) -> Result<Vec<f64>> {
    let grid = Grid1D::new(0.0, 1.0, study.cells)?;
    let params = ModelParams {
        k1: 0.0,
        k2: 0.0,
        k3: study.k3,
        ..ModelParams::coexistence()
    };
    let reaction = ZeroReaction;
    let coupling = RawCoupling { stencil: CrossStencil::Lagged };
    let stepper = Stepper {
        grid,
        params,
        theta: study.theta,
        left_flux: LeftFlux::Dirichlet,
        order: SweepOrder::Ascending,
        reaction: &reaction as &dyn Reaction,
        coupling: &coupling,
    };
    let x0 = grid.cell_center(0);
    let boundary = Boundary {
        eps: BoundaryValue::constant(0.0),
        m: BoundaryValue::Function(Arc::new(move |t| manufactured_m(x0, t))),
    };
    let centers = grid.cell_centers();
    let m0 = CellField::new(manufactured_m(x0, 0.0), centers.iter().map(|&x| manufactured_m(x, 0.0)).collect());
    let mut state: EvolutionState = stepper.state(0, 0.0, NodeField::constant(study.cells, 0.0), m0)?;
    let tau = study.t_final / steps as f64;
    let mut source = vec![0.0; study.cells];
    for k in 0..steps {
        let (t0, t1) = (k as f64 * tau, (k + 1) as f64 * tau);
        for (s, &x) in source.iter_mut().zip(&centers) {
            *s = study.theta * manufactured_source(x, t1, study.k3)
                + (1.0 - study.theta) * manufactured_source(x, t0, study.k3);
        }
        let sources = StepSources { strain: None, density: Some(&source) };
        state = stepper.step(&state, tau, &boundary, sources)?;
        state.t = t1;
    }
    Ok(state.m.values)
}

/// Temporal order of the fluid update. Row `k` holds the max-norm change
/// between the runs with `coarse_steps * 2^k` and twice as many steps.
pub fn temporal_order(study: &TemporalStudy) -> Result<OrderTable> {
    if study.levels < 3 {
        return Err(Error::invalid("levels", "need at least 3 refinements"));
    }
    if !(0.0..=1.0).contains(&study.theta) {
        return Err(Error::invalid("theta", "must lie in [0, 1]"));
    }
    let runs = (0..study.levels)
        .map(|k| temporal_run(study, study.coarse_steps << k))
        .collect::<Result<Vec<_>>>()?;
    let sizes = (0..study.levels - 1)
        .map(|k| study.t_final / (study.coarse_steps << k) as f64)
        .collect();
    let errors = runs.windows(2).map(|w| max_diff(&w[0], &w[1])).collect();
    Ok(OrderTable::new(format!("temporal theta={}", study.theta), sizes, errors))
}

fn coupled_run(theta: f64, steps: usize) -> Result<Vec<f64>> {
    let cells = 20;
    let grid = Grid1D::new(0.0, 1.0, cells)?;
    let params = ModelParams {
        k1: 0.1,
        k2: 0.05,
        k3: 0.1,
        ..ModelParams::coexistence()
    };
    let reaction = ZeroReaction;
    let coupling = RawCoupling { stencil: CrossStencil::Lagged };
    let stepper = Stepper {
        grid,
        params,
        theta,
        left_flux: LeftFlux::Dirichlet,
        order: SweepOrder::Ascending,
        reaction: &reaction as &dyn Reaction,
        coupling: &coupling,
    };
    let boundary = Boundary::constant(-0.1, -0.2);
    let eps = NodeField::new(grid.nodes().iter().map(|&x| -0.1 - 0.05 * (1.0 - (PI * x).cos())).collect());
    let m = CellField::new(-0.2, grid.cell_centers().iter().map(|&x| -0.2 + 0.04 * (1.0 - (PI * x).cos())).collect());
    let mut state = stepper.state(0, 0.0, eps, m)?;
    let tau = COUPLED_T / steps as f64;
    for _ in 0..steps {
        state = stepper.step(&state, tau, &boundary, StepSources::default())?;
    }
    Ok(state.eps.values.into_iter().chain(state.m.values).collect())
}

const COUPLED_T: f64 = 0.05;

/// Temporal order of the full scheme, whose explicit strain update caps it
/// at one for every `theta`.
pub fn coupled_temporal_order(theta: f64, levels: usize) -> Result<OrderTable> {
    if levels < 3 {
        return Err(Error::invalid("levels", "need at least 3 refinements"));
    }
    let coarse = 10usize;
    let runs = (0..levels).map(|k| coupled_run(theta, coarse << k)).collect::<Result<Vec<_>>>()?;
    let sizes = (0..levels - 1).map(|k| COUPLED_T / (coarse << k) as f64).collect();
    let errors = runs.windows(2).map(|w| max_diff(&w[0], &w[1])).collect();
    Ok(OrderTable::new(format!("coupled theta={theta}"), sizes, errors))
}

/// Smooth pair satisfying the Neumann condition at `x = 1`.
fn manufactured_pair(x: f64) -> [f64; 4] {
    let c = (PI * x).cos();
    let (eps, m) = (-0.15 + 0.02 * c, -0.1 + 0.03 * c);
    let (eps_xx, m_xx) = (-0.02 * PI * PI * c, -0.03 * PI * PI * c);
    [eps, m, eps_xx, m_xx]
}

/// Max-norm of the stationary residual at the manufactured pair, with the
/// forcing that makes it an exact solution of the continuous problem.
pub fn spatial_residual(params: &ModelParams, cells: usize) -> Result<f64> {
    let grid = Grid1D::new(0.0, 1.0, cells)?;
    let nodes = grid.nodes();
    let (mut s_eps, mut s_m, mut x) = (Vec::new(), Vec::new(), Vec::new());
    for &xi in &nodes {
        let [e, m, e_xx, m_xx] = manufactured_pair(xi);
        s_eps.push(-params.k1 * e_xx - params.k2 * m_xx - reaction_f1(e, m, params));
        s_m.push(-params.k2 * e_xx - params.k3 * m_xx - reaction_f2(e, m, params));
        x.extend([e, m]);
    }
    let [e0, m0, ..] = manufactured_pair(0.0);
    let problem = StationaryProblem::new(grid, *params, e0, m0)?.with_forcing(s_eps, s_m)?;
    let r = problem.residual(&x)?;
    Ok(r.iter().fold(0.0, |a, v| a.max(v.abs())))
}

/// Spatial order of the stationary discretisation over `cells` (each
/// entry doubling the previous one).
pub fn spatial_order(params: &ModelParams, cells: &[usize]) -> Result<OrderTable> {
    if cells.len() < 2 {
        return Err(Error::invalid("cells", "need at least 2 grids"));
    }
    let errors = cells.iter().map(|&n| spatial_residual(params, n)).collect::<Result<Vec<_>>>()?;
    let sizes = cells.iter().map(|&n| 1.0 / n as f64).collect();
    Ok(OrderTable::new("spatial", sizes, errors))
}

/// Parameters for the spatial study: the double-well model with unit
/// diffusion.
pub fn spatial_params() -> ModelParams {
    ModelParams {
        k1: 1.0,
        k2: 0.5,
        k3: 1.0,
        ..ModelParams::coexistence()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_table_of_exact_power_law() {
        let t = OrderTable::new("x", vec![0.1, 0.05, 0.025], vec![3e-2, 7.5e-3, 1.875e-3]);
        assert!((t.final_order() - 2.0).abs() < 1e-12);
        assert_eq!(t.to_csv().lines().count(), 4);
    }

    #[test]
    fn implicit_run_is_first_order() {
        let study = TemporalStudy { cells: 40, levels: 4, ..TemporalStudy::new(1.0) };
        let o = temporal_order(&study).unwrap().final_order();
        assert!((0.9..=1.1).contains(&o), "{o}");
    }

    #[test]
    fn coupled_scheme_is_first_order_in_time() {
        for theta in [0.5, 1.0] {
            let o = coupled_temporal_order(theta, 4).unwrap().final_order();
            assert!((0.85..=1.15).contains(&o), "{theta}: {o}");
        }
    }

    #[test]
    fn spatial_residual_shrinks() {
        let t = spatial_order(&spatial_params(), &[20, 40, 80]).unwrap();
        assert!((1.8..=2.2).contains(&t.final_order()), "{:?}", t.orders);
    }
}
