//! Evaluation of the cross-diffusion terms: raw divided differences, or the
//! same stencils applied to mollified partner fields.

use crate::error::{Error, Result};
use crate::grid::{CellField, Grid1D, NodeField};
use crate::mollifier::{check_support, mollify_cells, mollify_nodes, MollifierKernel};
use crate::registry::Registry;

use super::config::CrossStencil;
use super::scheme::{cross_second_difference, update_b};

pub trait CrossCoupling: Send + Sync {
    fn name(&self) -> &str;
    /// `m_xx` as seen by the strain equation, at nodes `1..=n`.
    fn strain_term(&self, m: &CellField, grid: &Grid1D) -> Result<Vec<f64>>;
    /// `eps_x` as seen by the fluid flux, indexed like `b` (`0..=n+1`).
    fn flux_gradient(&self, eps: &NodeField, grid: &Grid1D) -> Result<Vec<f64>>;
}

#[derive(Debug, Clone, Copy)]
pub struct RawCoupling {
    pub stencil: CrossStencil,
}

impl CrossCoupling for RawCoupling {
    fn name(&self) -> &str {
        "raw"
    }
    fn strain_term(&self, m: &CellField, grid: &Grid1D) -> Result<Vec<f64>> {
        Ok(cross_second_difference(m, self.stencil, grid.h()))
    }
    fn flux_gradient(&self, eps: &NodeField, grid: &Grid1D) -> Result<Vec<f64>> {
        Ok(update_b(eps, grid.h()))
    }
}

/// Mollifies the partner field (zero extension, Dirichlet slot untouched)
/// before applying the raw stencils.
#[derive(Debug, Clone, Copy)]
pub struct MollifiedCoupling {
    pub stencil: CrossStencil,
    pub kernel: MollifierKernel,
}

impl CrossCoupling for MollifiedCoupling {
    fn name(&self) -> &str {
        "mollified"
    }
    fn strain_term(&self, m: &CellField, grid: &Grid1D) -> Result<Vec<f64>> {
        let smooth = mollify_cells(m, grid, &self.kernel)?;
        Ok(cross_second_difference(&smooth, self.stencil, grid.h()))
    }
    fn flux_gradient(&self, eps: &NodeField, grid: &Grid1D) -> Result<Vec<f64>> {
        let smooth = mollify_nodes(eps, grid, &self.kernel)?;
        Ok(update_b(&smooth, grid.h()))
    }
}

/// Inputs available to coupling constructors.
#[derive(Debug, Clone, Copy)]
pub struct CouplingSpec {
    pub grid: Grid1D,
    pub stencil: CrossStencil,
    /// Mollifier radius; required by `mollified`.
    pub delta: Option<f64>,
}

pub type CouplingRegistry = Registry<CouplingSpec, dyn CrossCoupling>;

pub fn coupling_registry() -> CouplingRegistry {
    let mut reg: CouplingRegistry = Registry::new("cross coupling");
    reg.register("raw", "divided differences of the partner field", |s| {
        Ok(Box::new(RawCoupling { stencil: s.stencil }))
    })
    .register("mollified", "divided differences of the mollified partner field", |s| {
        let delta = s.delta.ok_or_else(|| Error::invalid("delta", "required by the mollified coupling"))?;
        let kernel = MollifierKernel::new(delta)?;
        check_support(&s.grid, &kernel)?;
        Ok(Box::new(MollifiedCoupling { stencil: s.stencil, kernel }))
    });
    reg
}
