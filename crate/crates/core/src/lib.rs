//! Solvers for a one-dimensional double-well consolidation model of a
//! fluid-saturated porous bar.
//!
//! The unknowns are the solid strain `eps` and the fluid content `m`. They
//! obey a cross-diffusion system
//!
//! ```text
//!   eps_t = k1 eps_xx + k2 m_xx + f1(eps, m)
//!   m_t   = k2 eps_xx + k3 m_xx + f2(eps, m)
//! ```
//!
//! with Dirichlet data at `l1` and zero-derivative conditions at `l2`. The
//! crate is split by concern:
//!
//! * [`potential`]: the energy density, its derivatives, equilibria and the
//!   coexistence pressure.
//! * [`reaction`]: reaction terms behind the [`reaction::Reaction`] trait.
//! * [`grid`]: staggered grids and field containers.
//! * [`linalg`]: banded LU and matrix structure diagnostics.
//! * [`evolve`]: the explicit/theta time-stepping scheme.
//! * [`mollifier`]: mollified fields and gradients for the regularized run.
//! * [`steady`]: Newton–Raphson solver for the stationary problem.
//! * [`mms`]: manufactured-solution convergence harness.
//!
//! Interchangeable algorithm variants are registered by name in a
//! [`registry::Registry`] so that drivers can pick them from configuration.

pub mod error;
pub mod evolve;
pub mod grid;
pub mod linalg;
pub mod mms;
pub mod mollifier;
pub mod potential;
pub mod reaction;
pub mod registry;
pub mod steady;

pub use error::{Error, Result};
pub use grid::{CellField, Grid1D, NodeField};
pub use potential::{EquilibriumPoint, ModelParams};
