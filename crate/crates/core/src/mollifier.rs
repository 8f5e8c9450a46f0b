//! Standard mollifier, discrete convolution with zero extension and the
//! mollified gradient.

use crate::error::{Error, Result};
use crate::grid::{discrete_l2_norm, trapezoid_l2_norm, CellField, Grid1D, NodeField};

/// Sample count of the trapezoid rule that fixes the kernel's mass.
const NORMALIZATION_SAMPLES: usize = 8192;

/// `J(r) = c / delta * exp(-1 / (1 - (r / delta)^2))` on `|r| < delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifierKernel {
    delta: f64,
    scale: f64,
}

fn bump(s: f64) -> f64 {
    if s.abs() < 1.0 {
        (-1.0 / (1.0 - s * s)).exp()
    } else {
        0.0
    }
}

/// Trapezoid rule for `bump` on `[-1, 1]`; the integrand is flat to all
/// orders at the ends, so the rule converges faster than any power.
fn bump_mass(samples: usize) -> f64 {
    let ds = 2.0 / samples as f64;
    (1..samples).map(|k| bump(-1.0 + k as f64 * ds)).sum::<f64>() * ds
}

impl MollifierKernel {
    pub fn new(delta: f64) -> Result<Self> {
        if delta <= 0.0 || !delta.is_finite() {
            return Err(Error::invalid("delta", "must be positive and finite"));
        }
        Ok(Self {
            delta,
            scale: 1.0 / bump_mass(NORMALIZATION_SAMPLES),
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.scale / self.delta * bump(r / self.delta)
    }

    /// Trapezoid approximation of the kernel's mass with `samples` panels.
    pub fn mass(&self, samples: usize) -> f64 {
        let dr = 2.0 * self.delta / samples as f64;
        (1..samples).map(|k| self.eval(-self.delta + k as f64 * dr)).sum::<f64>() * dr
    }

    /// Weights `w_0..=w_K` of the symmetric lattice stencil at spacing `h`,
    /// scaled so that `w_0 + 2 (w_1 + ... + w_K)` is exactly one.
    pub fn lattice_weights(&self, h: f64) -> Vec<f64> {
        let reach = (self.delta / h).ceil() as usize;
        let mut w: Vec<f64> = (0..=reach).map(|k| self.eval(k as f64 * h) * h).collect();
        while w.len() > 1 && *w.last().unwrap() == 0.0 {
            w.pop();
        }
        let total = w[0] + 2.0 * w[1..].iter().sum::<f64>();
        w.iter_mut().for_each(|v| *v /= total);
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// Cell centres `1..=n`.
    Cells,
    /// Nodes `0..=n`, with half quadrature weight at both ends.
    Nodes,
}

/// Fails unless `delta < (l2 - l1) / 2`.
pub fn check_support(grid: &Grid1D, kernel: &MollifierKernel) -> Result<()> {
    if kernel.delta() >= 0.5 * grid.length() {
        return Err(Error::DeltaTooLarge {
            delta: kernel.delta(),
            length: grid.length(),
        });
    }
    Ok(())
}

fn expected_len(grid: &Grid1D, placement: Placement) -> usize {
    match placement {
        Placement::Cells => grid.n(),
        Placement::Nodes => grid.n() + 1,
    }
}

/// Discrete `J * u` at the field's own points, `u` extended by zero
/// outside the domain.
pub fn mollify(values: &[f64], placement: Placement, grid: &Grid1D, kernel: &MollifierKernel) -> Result<Vec<f64>> {
    check_support(grid, kernel)?;
    let len = expected_len(grid, placement);
    if values.len() != len {
        return Err(Error::DimensionMismatch { expected: len, found: values.len() });
    }
    let w = kernel.lattice_weights(grid.h());
    let quad = |k: usize| match placement {
        Placement::Nodes if k == 0 || k + 1 == len => 0.5,
        _ => 1.0,
    };
    let reach = w.len() - 1;
    Ok((0..len)
        .map(|j| {
            let lo = j.saturating_sub(reach);
            let hi = (j + reach).min(len - 1);
            (lo..=hi).map(|k| w[j.abs_diff(k)] * quad(k) * values[k]).sum()
        })
        .collect())
}

/// Mollifies the interior cells; the Dirichlet slot is carried over.
pub fn mollify_cells(field: &CellField, grid: &Grid1D, kernel: &MollifierKernel) -> Result<CellField> {
    Ok(CellField::new(
        field.boundary,
        mollify(&field.values, Placement::Cells, grid, kernel)?,
    ))
}

pub fn mollify_nodes(field: &NodeField, grid: &Grid1D, kernel: &MollifierKernel) -> Result<NodeField> {
    Ok(NodeField::new(mollify(&field.values, Placement::Nodes, grid, kernel)?))
}

/// Central differences of the mollified field, one-sided at both ends.
pub fn mollified_gradient(
    values: &[f64],
    placement: Placement,
    grid: &Grid1D,
    kernel: &MollifierKernel,
) -> Result<Vec<f64>> {
    let v = mollify(values, placement, grid, kernel)?;
    Ok(central_gradient(&v, grid.h()))
}

pub(crate) fn central_gradient(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|j| match j {
            0 => (v[1] - v[0]) / h,
            j if j + 1 == n => (v[j] - v[j - 1]) / h,
            j => (v[j + 1] - v[j - 1]) / (2.0 * h),
        })
        .collect()
}

/// Discrete norm matching `placement`: plain for cells, trapezoid for nodes.
pub fn placement_norm(values: &[f64], placement: Placement, h: f64) -> f64 {
    match placement {
        Placement::Cells => discrete_l2_norm(values, h),
        Placement::Nodes => trapezoid_l2_norm(values, h),
    }
}

/// Largest observed `||grad^delta f|| / ||f||` over the given fields, a
/// lower bound for the gradient constant at this `delta`.
pub fn measure_gradient_constant(
    fields: &[Vec<f64>],
    placement: Placement,
    grid: &Grid1D,
    kernel: &MollifierKernel,
) -> Result<f64> {
    let h = grid.h();
    let mut worst = 0.0f64;
    for f in fields {
        let norm = placement_norm(f, placement, h);
        if norm == 0.0 {
            continue;
        }
        let g = mollified_gradient(f, placement, grid, kernel)?;
        worst = worst.max(placement_norm(&g, placement, h) / norm);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample_cells, sample_nodes};
    use std::f64::consts::PI;

    #[test]
    fn kernel_has_unit_mass_and_compact_support() {
        for delta in [0.3, 0.1, 0.025] {
            let k = MollifierKernel::new(delta).unwrap();
            assert!((k.mass(20_000) - 1.0).abs() < 1e-10);
            assert_eq!(k.eval(delta), 0.0);
            assert_eq!(k.eval(-1.5 * delta), 0.0);
            assert_eq!(k.eval(0.3 * delta), k.eval(-0.3 * delta));
            assert!(k.eval(0.0) > 0.0);
        }
        assert!(MollifierKernel::new(0.0).is_err());
    }

    #[test]
    fn lattice_weights_sum_to_one() {
        let k = MollifierKernel::new(0.05).unwrap();
        let w = k.lattice_weights(0.01);
        assert_eq!(w.len(), 5);
        let total = w[0] + 2.0 * w[1..].iter().sum::<f64>();
        assert!((total - 1.0).abs() < 1e-15);
        // narrower than a cell: the identity
        assert_eq!(MollifierKernel::new(0.005).unwrap().lattice_weights(0.01), vec![1.0]);
    }

    #[test]
    fn constants_and_lines_survive_away_from_the_ends() {
        let g = Grid1D::new(0.0, 1.0, 200).unwrap();
        let k = MollifierKernel::new(0.1).unwrap();
        let c = sample_cells(&g, |_| -0.7);
        let mc = mollify_cells(&c, &g, &k).unwrap();
        let line = sample_nodes(&g, |x| 3.0 * x - 1.0);
        let grad = mollified_gradient(&line.values, Placement::Nodes, &g, &k).unwrap();
        for (j, x) in g.cell_centers().iter().enumerate() {
            if *x >= 0.1 + 1e-12 && *x <= 0.9 - 1e-12 {
                assert!((mc.values[j] + 0.7).abs() < 1e-10);
            }
        }
        for (j, x) in g.nodes().iter().enumerate() {
            if *x >= 0.1 + g.h() + 1e-12 && *x <= 0.9 - g.h() - 1e-12 {
                assert!((grad[j] - 3.0).abs() < 1e-8, "{x} {}", grad[j]);
            }
        }
    }

    #[test]
    fn support_guard() {
        let g = Grid1D::new(0.0, 1.0, 50).unwrap();
        let k = MollifierKernel::new(0.5).unwrap();
        assert!(matches!(
            mollify(&vec![0.0; 50], Placement::Cells, &g, &k),
            Err(Error::DeltaTooLarge { .. })
        ));
        let k = MollifierKernel::new(0.1).unwrap();
        assert!(matches!(
            mollify(&vec![0.0; 49], Placement::Cells, &g, &k),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn smoothing_error_shrinks_with_delta() {
        let g = Grid1D::new(0.0, 1.0, 400).unwrap();
        let u = sample_cells(&g, |x| (PI * x).sin());
        let mut last = f64::INFINITY;
        for delta in [0.1, 0.05, 0.025] {
            let k = MollifierKernel::new(delta).unwrap();
            let mu = mollify(&u.values, Placement::Cells, &g, &k).unwrap();
            let diff: Vec<f64> = mu.iter().zip(&u.values).map(|(a, b)| a - b).collect();
            let e = discrete_l2_norm(&diff, g.h());
            assert!(e < last);
            last = e;
        }
    }

    #[test]
    fn gradient_constant_grows_as_delta_shrinks() {
        let g = Grid1D::new(0.0, 1.0, 200).unwrap();
        let fields: Vec<Vec<f64>> = (1..=20)
            .map(|k| g.cell_centers().iter().map(|x| (k as f64 * PI * x).sin()).collect())
            .collect();
        let c1 = measure_gradient_constant(&fields, Placement::Cells, &g, &MollifierKernel::new(0.1).unwrap()).unwrap();
        let c2 = measure_gradient_constant(&fields, Placement::Cells, &g, &MollifierKernel::new(0.025).unwrap()).unwrap();
        assert!(c2 > c1 && c1 > 0.0);
    }
}
