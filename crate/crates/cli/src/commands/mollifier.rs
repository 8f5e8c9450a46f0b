use std::fmt;

use consolidation::evolve::{run_evolution, run_regularized, Boundary, EvolutionProblem, RunResult, ThetaSchemeConfig};
use consolidation::grid::{discrete_l2_norm, sample_cells, sample_nodes, trapezoid_l2_norm, Grid1D};
use consolidation::mollifier::{mollify, MollifierKernel, Placement};
use consolidation::reaction::ZeroReaction;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Output;
use crate::config::Config;

#[derive(Debug, Clone)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct MollifierReport {
    pub checks: Vec<PropertyCheck>,
    /// `(delta, |J_delta u - u|)` for the smooth test field.
    pub approximation: Vec<(f64, f64)>,
    /// `(delta, distance of the regularized run from the raw one)`.
    pub trajectories: Vec<(f64, f64)>,
}

impl MollifierReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for MollifierReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

fn strictly_decreasing(values: &[(f64, f64)]) -> bool {
    values.windows(2).all(|w| w[1].1 < w[0].1)
}

fn listing(values: &[(f64, f64)]) -> String {
    values.iter().map(|(d, e)| format!("{d}: {e:.3e}")).collect::<Vec<_>>().join(", ")
}

/// Distance between two runs: strain in the trapezoid norm, fluid in the
/// cell norm.
pub fn run_distance(a: &RunResult, b: &RunResult, grid: &Grid1D) -> f64 {
    let (sa, sb) = (&a.final_state, &b.final_state);
    let de: Vec<f64> = sa.eps.values.iter().zip(&sb.eps.values).map(|(x, y)| x - y).collect();
    let dm: Vec<f64> = sa.m.values.iter().zip(&sb.m.values).map(|(x, y)| x - y).collect();
    trapezoid_l2_norm(&de, grid.h()).hypot(discrete_l2_norm(&dm, grid.h()))
}

pub fn run(config: &Config, out: &Output) -> anyhow::Result<MollifierReport> {
    let deltas = config.list("mollifier.deltas")?.unwrap_or_else(|| vec![0.1, 0.05, 0.025]);
    let fields = config.parsed_or("mollifier.fields", 100usize)?;
    let seed = config.parsed_or("mollifier.seed", 2024u64)?;
    let n = config.parsed_or("mollifier.N", 200usize)?;
    let t_final = config.parsed_or("mollifier.T", 0.05)?;
    let grid = Grid1D::new(0.0, 1.0, n)?;
    let kernels = deltas.iter().map(|&d| MollifierKernel::new(d)).collect::<Result<Vec<_>, _>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..fields {
        let kernel = &kernels[k % kernels.len()];
        let cells: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let nodes: Vec<f64> = (0..=n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mc = mollify(&cells, Placement::Cells, &grid, kernel)?;
        let mn = mollify(&nodes, Placement::Nodes, &grid, kernel)?;
        worst = worst
            .max(discrete_l2_norm(&mc, grid.h()) - discrete_l2_norm(&cells, grid.h()))
            .max(trapezoid_l2_norm(&mn, grid.h()) - trapezoid_l2_norm(&nodes, grid.h()));
    }
    let contraction = PropertyCheck {
        name: "norm contraction",
        passed: worst <= 1e-12,
        detail: format!("{fields} random fields, largest norm increase {worst:.3e}"),
    };

    let smooth: Vec<f64> = grid.cell_centers().iter().map(|&x| (6.0 * x).sin() * x * (1.0 - x)).collect();
    let approximation = deltas
        .iter()
        .zip(&kernels)
        .map(|(&d, k)| -> anyhow::Result<(f64, f64)> {
            let v = mollify(&smooth, Placement::Cells, &grid, k)?;
            let diff: Vec<f64> = v.iter().zip(&smooth).map(|(a, b)| a - b).collect();
            Ok((d, discrete_l2_norm(&diff, grid.h())))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let convergence = PropertyCheck {
        name: "approximation as delta shrinks",
        passed: strictly_decreasing(&approximation),
        detail: listing(&approximation),
    };

    let params = consolidation::ModelParams { k2: 0.5e-3, ..config.model()? };
    let bump = |c: f64, w: f64| move |x: f64| -0.1 * (-(x - c).powi(2) / (w * w)).exp();
    let reaction = ZeroReaction;
    let problem = EvolutionProblem {
        grid,
        params,
        reaction: &reaction,
        eps0: sample_nodes(&grid, bump(0.5, 0.1)),
        m0: sample_cells(&grid, bump(0.45, 0.08)),
        boundary: Boundary::constant(0.0, 0.0),
    };
    let scheme = ThetaSchemeConfig { t_final, steady_tol: None, ..Default::default() };
    let raw = run_evolution(&problem, &scheme)?;
    let trajectories = deltas
        .iter()
        .map(|&d| -> anyhow::Result<(f64, f64)> { Ok((d, run_distance(&run_regularized(&problem, &scheme, d)?, &raw, &grid))) })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let regularized = PropertyCheck {
        name: "regularized runs approach the raw run",
        passed: strictly_decreasing(&trajectories),
        detail: listing(&trajectories),
    };

    let report = MollifierReport { checks: vec![contraction, convergence, regularized], approximation, trajectories };
    let mut csv = String::from("delta,approximation_error,trajectory_distance\n");
    for ((d, a), (_, t)) in report.approximation.iter().zip(&report.trajectories) {
        csv += &format!("{},{},{}\n", consolidation::grid::fmt_f64(*d), consolidation::grid::fmt_f64(*a), consolidation::grid::fmt_f64(*t));
    }
    out.csv("mollifier.csv", &csv)?;
    Ok(report)
}
