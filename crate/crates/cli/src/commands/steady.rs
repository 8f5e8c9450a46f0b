use std::fmt;

use anyhow::Context;
use consolidation::steady::{continuation_in_k2, make_initial_guess, newton_solve, StationaryProblem, StationarySolution};

use super::Output;
use crate::config::Config;
use crate::svg::{render, LineStyle, Panel, Series};

#[derive(Debug, Clone)]
pub struct SteadyRun {
    pub guess: String,
    pub solution: StationarySolution,
    /// Solutions for the continuation values of `k2`.
    pub variants: Vec<(f64, StationarySolution)>,
}

#[derive(Debug, Clone)]
pub struct SteadyReport {
    pub problem: StationaryProblem,
    pub runs: Vec<SteadyRun>,
}

impl SteadyReport {
    pub fn run(&self, guess: &str) -> Option<&SteadyRun> {
        self.runs.iter().find(|r| r.guess == guess)
    }
}

impl fmt::Display for SteadyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "stationary solutions, N = {}, k2 = {}", self.problem.grid.n(), self.problem.params.k2)?;
        for r in &self.runs {
            let m = r.solution.m();
            let rep = &r.solution.report;
            writeln!(
                f,
                "  {:<11} iterations {:>4}  residual {:.2e}  m(l2) = {:.8}",
                r.guess,
                rep.iterations(),
                rep.residual_norms.last().copied().unwrap_or(f64::NAN),
                m.last().copied().unwrap_or(f64::NAN)
            )?;
            if let Some(e) = rep.fd_error {
                writeln!(f, "  {:<11} jacobian check {e:.2e}", "")?;
            }
            for (k2, v) in &r.variants {
                writeln!(f, "  {:<11} k2 = {k2:<8} m(l2) = {:.8}", "", v.m().last().copied().unwrap_or(f64::NAN))?;
            }
        }
        Ok(())
    }
}

pub fn problem(config: &Config) -> anyhow::Result<StationaryProblem> {
    let (eps_d, m_d) = config.boundary_constants()?;
    let mut p = StationaryProblem::new(config.grid()?, config.model()?, eps_d, m_d)?;
    p.bc = config.steady_bc()?;
    Ok(p)
}

pub fn guesses(config: &Config) -> Vec<String> {
    config
        .get("steady.guess")
        .unwrap_or("fluid-poor")
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

fn solve_one(config: &Config, problem: &StationaryProblem, guess: &str) -> anyhow::Result<SteadyRun> {
    let newton = config.newton()?;
    let start = make_initial_guess(problem, guess, &newton).with_context(|| format!("initial guess `{guess}`"))?;
    let solution = newton_solve(problem, &start, &newton).with_context(|| format!("Newton solve from `{guess}`"))?;
    let k2s = config.list("steady.continuation_k2")?.unwrap_or_default();
    let variants = if k2s.is_empty() {
        Vec::new()
    } else {
        let sols = continuation_in_k2(problem, &k2s, &solution.x, &newton).with_context(|| format!("continuation from `{guess}`"))?;
        k2s.into_iter().zip(sols).collect()
    };
    Ok(SteadyRun { guess: guess.to_string(), solution, variants })
}

fn panels(run: &SteadyRun, k2: f64) -> [Panel; 2] {
    let x = run.solution.grid.nodes();
    let mut eps = Panel::new(format!("{} guess", run.guess), "x", "eps");
    let mut m = Panel::new(format!("{} guess", run.guess), "x", "m");
    let base = format!("k2 = {k2}");
    eps.series.push(Series::new(&base, x.clone(), run.solution.eps(), LineStyle::Solid));
    m.series.push(Series::new(&base, x.clone(), run.solution.m(), LineStyle::Solid));
    for (k, v) in &run.variants {
        let label = format!("k2 = {k}");
        eps.series.push(Series::new(&label, x.clone(), v.eps(), LineStyle::Dotted));
        m.series.push(Series::new(&label, x.clone(), v.m(), LineStyle::Dotted));
    }
    [eps, m]
}

/// Solves from every configured guess; the guesses run concurrently.
pub fn run(config: &Config, out: &Output) -> anyhow::Result<SteadyReport> {
    let problem = problem(config)?;
    let names = guesses(config);
    let results: Vec<anyhow::Result<SteadyRun>> = std::thread::scope(|scope| {
        let handles: Vec<_> = names
            .iter()
            .map(|g| {
                let problem = &problem;
                scope.spawn(move || solve_one(config, problem, g))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("steady worker panicked")).collect()
    });
    let runs = results.into_iter().collect::<anyhow::Result<Vec<_>>>()?;
    for r in &runs {
        out.csv(&format!("steady_{}.csv", r.guess), &r.solution.to_csv())?;
        out.csv(&format!("newton_{}.csv", r.guess), &r.solution.report.to_csv())?;
        for (k2, v) in &r.variants {
            out.csv(&format!("steady_{}_k2_{k2}.csv", r.guess), &v.to_csv())?;
        }
        out.svg(&format!("steady_{}.svg", r.guess), &render(&panels(r, problem.params.k2)))?;
    }
    Ok(SteadyReport { problem, runs })
}
