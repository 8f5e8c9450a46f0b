use std::fmt;

use anyhow::Context;
use consolidation::evolve::{run_evolution, run_regularized, EvolutionProblem, RunResult};
use consolidation::grid::{columns_csv, CellField, Grid1D, NodeField};
use consolidation::reaction::reaction_registry;
use consolidation::steady::{make_initial_guess, StationaryProblem};
use consolidation::ModelParams;

use super::Output;
use crate::config::{Config, ConfigError};
use crate::svg::{render, LineStyle, Panel, Series};

/// Cell averages of a node profile, which is linear interpolation to the
/// cell centres.
pub fn nodes_to_cells(boundary: f64, nodes: &[f64]) -> CellField {
    CellField::new(boundary, nodes.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect())
}

/// Initial fields described by the `initial.*` keys.
pub fn initial_fields(config: &Config, grid: &Grid1D, params: ModelParams) -> anyhow::Result<(NodeField, CellField)> {
    let (eps_d, m_d) = {
        let b = config.boundary()?;
        (b.eps.eval(0.0), b.m.eval(0.0))
    };
    match config.get("initial.kind").unwrap_or("profile") {
        "profile" => {
            let quad = |base: &str| -> Result<[f64; 3], ConfigError> {
                Ok([
                    config.parsed_or(&format!("initial.{base}"), if base == "eps" { eps_d } else { m_d })?,
                    config.parsed_or(&format!("initial.{base}_slope"), 0.0)?,
                    config.parsed_or(&format!("initial.{base}_curvature"), 0.0)?,
                ])
            };
            let (e, m) = (quad("eps")?, quad("m")?);
            let at = |c: [f64; 3], x: f64| {
                let s = (x - grid.l1()) / grid.length();
                c[0] + c[1] * s + c[2] * s * s
            };
            let eps = NodeField::new(grid.nodes().iter().map(|&x| at(e, x)).collect());
            let m = CellField::new(m_d, grid.cell_centers().iter().map(|&x| at(m, x)).collect());
            Ok((eps, m))
        }
        "guess" => {
            let kind = config.get("initial.guess").unwrap_or("two-phase");
            let problem = StationaryProblem::new(*grid, params, eps_d, m_d)?;
            let x = make_initial_guess(&problem, kind, &config.newton()?)
                .with_context(|| format!("building the `{kind}` initial state"))?;
            let eps: Vec<f64> = x.iter().step_by(2).copied().collect();
            let m: Vec<f64> = x.iter().skip(1).step_by(2).copied().collect();
            Ok((NodeField::new(eps), nodes_to_cells(m_d, &m)))
        }
        other => Err(ConfigError::Value {
            key: "initial.kind".into(),
            value: other.into(),
            reason: "expected `profile` or `guess`".into(),
        }
        .into()),
    }
}

#[derive(Debug, Clone)]
pub struct EvolveReport {
    pub grid: Grid1D,
    pub result: RunResult,
    pub delta: Option<f64>,
}

impl fmt::Display for EvolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.result;
        let s = &r.stability;
        writeln!(f, "steps {}  t = {:.6}  tau = {:.6e}", r.steps, r.final_state.t, r.tau)?;
        if let Some(d) = self.delta {
            writeln!(f, "mollifier radius {d}")?;
        }
        writeln!(f, "tau_max {:.6e} (rho {:.6e}, iota {:.6e})", s.tau_max, s.rho, s.iota)?;
        let a3 = s.a3_ok.map_or("n/a", |ok| if ok { "ok" } else { "violated" });
        writeln!(f, "A1 {}  A2 {}  A3 {a3}", ok(s.a1_ok), ok(s.a2_ok))?;
        writeln!(f, "steady {}", r.reached_steady)?;
        writeln!(f, "positive entries over the run {}", r.total_positive_entries())?;
        if let Some(last) = r.monitors.last() {
            writeln!(f, "final energy {:.10e}  increment {:.3e}", last.energy, last.residual)?;
        }
        Ok(())
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "violated"
    }
}

pub fn run(config: &Config, out: &Output) -> anyhow::Result<EvolveReport> {
    let params = config.model()?;
    let grid = config.grid()?;
    let scheme = config.scheme()?;
    let boundary = config.boundary()?;
    let reaction = reaction_registry().build(config.reaction_kind(), &config.reaction_spec(params)?)?;
    let (eps0, m0) = initial_fields(config, &grid, params)?;
    let problem = EvolutionProblem { grid, params, reaction: reaction.as_ref(), eps0, m0, boundary };
    let delta: Option<f64> = config.parsed("scheme.delta")?;
    let result = match delta {
        Some(d) => run_regularized(&problem, &scheme, d)?,
        None => run_evolution(&problem, &scheme)?,
    };
    out.csv("trajectory.csv", &result.trajectory_csv(&grid))?;
    out.csv("monitor.csv", &result.monitor_csv())?;
    let s = &result.final_state;
    out.csv("final_eps.csv", &columns_csv(&["x", "eps"], &[&grid.nodes(), &s.eps.values]))?;
    out.csv("final_m.csv", &columns_csv(&["x", "m"], &[&grid.cell_centers(), &s.m.values]))?;
    let title = format!("t = {:.4}", s.t);
    let panels = [
        Panel::new(title.clone(), "x", "eps").with(Series::new("eps", grid.nodes(), s.eps.values.clone(), LineStyle::Solid)),
        Panel::new(title, "x", "m").with(Series::new("m", grid.cell_centers(), s.m.values.clone(), LineStyle::Solid)),
    ];
    out.svg("final.svg", &render(&panels))?;
    Ok(EvolveReport { grid, result, delta })
}
