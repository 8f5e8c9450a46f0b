use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::grid::{fmt_f64, CellField, Grid1D, NodeField};
use crate::mollifier::{check_support, MollifierKernel};
use crate::potential::ModelParams;
use crate::reaction::Reaction;

use super::config::{max_stable_tau, Boundary, StabilityReport, ThetaSchemeConfig, TimeStep};
use super::coupling::{CrossCoupling, MollifiedCoupling, RawCoupling};
use super::scheme::{check_a3, total_energy, A3Report, EvolutionState, StepSources, Stepper};

/// Data of one evolution run.
pub struct EvolutionProblem<'a> {
    pub grid: Grid1D,
    pub params: ModelParams,
    pub reaction: &'a dyn Reaction,
    pub eps0: NodeField,
    pub m0: CellField,
    pub boundary: Boundary,
}

/// Per-step diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorRecord {
    pub n: usize,
    pub t: f64,
    pub min_eps: f64,
    pub max_eps: f64,
    pub min_m: f64,
    pub max_m: f64,
    pub energy: f64,
    /// `max |u^n - u^(n-1)| / tau` over both fields; zero for the initial record.
    pub residual: f64,
    /// Entries `> 0` in either field.
    pub positive_entries: usize,
    /// Entries exactly `0` in either field.
    pub zero_entries: usize,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub snapshots: Vec<EvolutionState>,
    pub monitors: Vec<MonitorRecord>,
    pub final_state: EvolutionState,
    pub stability: StabilityReport,
    pub a3: Option<A3Report>,
    /// Nominal step (first step of a sequence).
    pub tau: f64,
    pub steps: usize,
    pub reached_steady: bool,
}

impl RunResult {
    pub fn total_positive_entries(&self) -> usize {
        self.monitors.iter().map(|r| r.positive_entries).sum()
    }

    pub fn monitor_csv(&self) -> String {
        let mut out = String::from("n,t,min_eps,max_eps,min_m,max_m,energy,residual,negativity_violations\n");
        for r in &self.monitors {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.n,
                fmt_f64(r.t),
                fmt_f64(r.min_eps),
                fmt_f64(r.max_eps),
                fmt_f64(r.min_m),
                fmt_f64(r.max_m),
                fmt_f64(r.energy),
                fmt_f64(r.residual),
                r.positive_entries
            );
        }
        out
    }

    /// Long-format trajectory. Row `i` of a snapshot holds node `i`'s
    /// position and strain together with cell `i`'s fluid content and strain
    /// gradient (cell 0 being the Dirichlet slot) and the flux at node `i`.
    pub fn trajectory_csv(&self, grid: &Grid1D) -> String {
        let mut out = String::from("n,t,x,eps,m,b,F\n");
        for s in &self.snapshots {
            for i in 0..=grid.n() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    s.n,
                    fmt_f64(s.t),
                    fmt_f64(grid.node(i as isize)),
                    fmt_f64(s.eps.values[i]),
                    fmt_f64(s.m.at(i)),
                    fmt_f64(s.b[i]),
                    fmt_f64(s.flux[i])
                );
            }
        }
        out
    }
}

fn extrema(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

fn monitor(state: &EvolutionState, prev: Option<&EvolutionState>, tau: f64, grid: &Grid1D, params: &ModelParams, signs: bool) -> MonitorRecord {
    let (min_eps, max_eps) = extrema(&state.eps.values);
    let (min_m, max_m) = extrema(&state.m.values);
    let (min_m, max_m) = (min_m.min(state.m.boundary), max_m.max(state.m.boundary));
    let residual = prev.map_or(0.0, |p| {
        let de = state.eps.values.iter().zip(&p.eps.values).map(|(a, b)| (a - b).abs());
        let dm = state.m.values.iter().zip(&p.m.values).map(|(a, b)| (a - b).abs());
        de.chain(dm).fold(0.0, f64::max) / tau
    });
    let (mut positive_entries, mut zero_entries) = (0, 0);
    if signs {
        let all = state.eps.values.iter().chain(&state.m.values).chain(std::iter::once(&state.m.boundary));
        for &v in all {
            if v > 0.0 {
                positive_entries += 1;
            } else if v == 0.0 {
                zero_entries += 1;
            }
        }
    }
    MonitorRecord {
        n: state.n,
        t: state.t,
        min_eps,
        max_eps,
        min_m,
        max_m,
        energy: total_energy(&state.eps, &state.m, grid, params),
        residual,
        positive_entries,
        zero_entries,
    }
}

fn all_finite(state: &EvolutionState) -> bool {
    state.eps.values.iter().chain(&state.m.values).all(|v| v.is_finite())
}

/// Advances the scheme with raw cross terms.
pub fn run_evolution(problem: &EvolutionProblem<'_>, config: &ThetaSchemeConfig) -> Result<RunResult> {
    let coupling = RawCoupling { stencil: config.cross_stencil };
    run_with_coupling(problem, config, &coupling)
}

/// Advances the scheme with every cross term taken from mollified partner
/// fields of radius `delta`.
pub fn run_regularized(problem: &EvolutionProblem<'_>, config: &ThetaSchemeConfig, delta: f64) -> Result<RunResult> {
    let kernel = MollifierKernel::new(delta)?;
    check_support(&problem.grid, &kernel)?;
    let coupling = MollifiedCoupling { stencil: config.cross_stencil, kernel };
    run_with_coupling(problem, config, &coupling)
}

pub fn run_with_coupling(problem: &EvolutionProblem<'_>, config: &ThetaSchemeConfig, coupling: &dyn CrossCoupling) -> Result<RunResult> {
    config.validate()?;
    problem.params.validate()?;
    let grid = problem.grid;
    let h = grid.h();
    let bound = max_stable_tau(config.theta, h, problem.params.k2);
    let nominal = match &config.tau {
        TimeStep::Auto { safety } => safety * bound.tau_max,
        TimeStep::Fixed(t) => *t,
        TimeStep::Sequence(ts) => ts[0],
    };
    if config.enforce_stability {
        let largest = match &config.tau {
            TimeStep::Sequence(ts) => ts.iter().copied().fold(0.0, f64::max),
            _ => nominal,
        };
        if largest > bound.tau_max {
            return Err(Error::StabilityViolation { tau: largest, tau_max: bound.tau_max });
        }
    }
    let mut stability = bound.at_tau(config.theta, h, nominal);

    let stepper = Stepper {
        grid,
        params: problem.params,
        theta: config.theta,
        left_flux: config.left_flux,
        order: config.sweep_order,
        reaction: problem.reaction,
        coupling,
    };
    let mut eps0 = problem.eps0.clone();
    let mut m0 = problem.m0.clone();
    if let Some(first) = eps0.values.first_mut() {
        *first = problem.boundary.eps.eval(0.0);
    }
    m0.boundary = problem.boundary.m.eval(0.0);
    let mut state = stepper.state(0, 0.0, eps0, m0)?;
    if !all_finite(&state) {
        return Err(Error::NonFinite { step: 0 });
    }

    let mut monitors = vec![monitor(&state, None, nominal, &grid, &problem.params, config.negativity_monitor)];
    let mut snapshots = vec![state.clone()];
    let mut a3 = None;
    let mut reached_steady = false;
    let t_end = config.t_final;
    let t_slack = 1e-12 * t_end;

    while state.t < t_end - t_slack {
        if config.max_steps.is_some_and(|cap| state.n >= cap) {
            break;
        }
        let tau = match &config.tau {
            TimeStep::Sequence(ts) => match ts.get(state.n) {
                Some(&t) => t,
                None => break,
            },
            _ => nominal,
        }
        .min(t_end - state.t);
        let next = stepper.step(&state, tau, &problem.boundary, StepSources::default())?;
        if !all_finite(&next) {
            return Err(Error::NonFinite { step: next.n });
        }
        if next.n == 1 {
            let report = check_a3(&state.b, &next.b);
            stability.a3_ok = Some(report.holds);
            a3 = Some(report);
        }
        let record = monitor(&next, Some(&state), tau, &grid, &problem.params, config.negativity_monitor);
        let steady = config.steady_tol.is_some_and(|tol| record.residual < tol);
        monitors.push(record);
        state = next;
        if config.record_every.is_some_and(|k| state.n % k == 0) {
            snapshots.push(state.clone());
        }
        if steady {
            reached_steady = true;
            break;
        }
    }
    if snapshots.last().map(|s| s.n) != Some(state.n) {
        snapshots.push(state.clone());
    }
    Ok(RunResult {
        snapshots,
        monitors,
        steps: state.n,
        final_state: state,
        stability,
        a3,
        tau: nominal,
        reached_steady,
    })
}
