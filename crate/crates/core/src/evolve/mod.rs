//! Time stepping for the cross-diffusion system.
//!
//! Strain lives on nodes and is advanced explicitly; fluid content lives on
//! cells and is advanced with a theta-weighted flux difference,
//!
//! ```text
//! (m_i^n - m_i) / tau = theta (F_i^n - F_(i-1)^n) / h
//!                     + (1 - theta) (F_i - F_(i-1)) / h + f2(eps_i, m_i)
//! ```
//!
//! which is one tridiagonal solve per step.

mod config;
mod coupling;
mod run;
mod scheme;

pub use config::{
    max_stable_tau, Boundary, BoundaryValue, CrossStencil, LeftFlux, StabilityReport, SweepOrder,
    ThetaSchemeConfig, TimeStep,
};
pub use coupling::{
    coupling_registry, CouplingRegistry, CouplingSpec, CrossCoupling, MollifiedCoupling, RawCoupling,
};
pub use run::{run_evolution, run_regularized, run_with_coupling, EvolutionProblem, MonitorRecord, RunResult};
pub use scheme::{
    assemble_h, check_a3, compute_flux, compute_flux_with, cross_second_difference, density_operator,
    total_energy, update_b, A3Report, DensitySystem, EvolutionState, StepSources, Stepper,
};
