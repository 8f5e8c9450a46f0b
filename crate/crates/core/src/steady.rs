//! Stationary profiles by Newton's method on a uniform node grid.
//!
//! Unknowns are interleaved `(eps_0, m_0, eps_1, m_1, ...)`, which keeps the
//! Jacobian inside three sub- and super-diagonals.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::grid::{fmt_f64, Grid1D};
use crate::linalg::{solve_banded, BandedMatrix};
use crate::potential::{
    find_equilibria, hessian_psi, phase_minima, reaction_f1, reaction_f2, EquilibriumPoint, ModelParams, SearchBox,
};
use crate::registry::Registry;

const BAND: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BcMode {
    /// Values at `l1`, zero derivative at `l2`.
    DirichletNeumann,
    /// Values at both ends.
    DirichletDirichlet { eps_right: f64, m_right: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryProblem {
    pub grid: Grid1D,
    pub params: ModelParams,
    pub eps_left: f64,
    pub m_left: f64,
    pub bc: BcMode,
    /// Extra sources `(strain, fluid)` at every node, added to the reactions.
    pub forcing: Option<(Vec<f64>, Vec<f64>)>,
}

impl StationaryProblem {
    pub fn new(grid: Grid1D, params: ModelParams, eps_left: f64, m_left: f64) -> Result<Self> {
        params.validate()?;
        if !eps_left.is_finite() || !m_left.is_finite() {
            return Err(Error::invalid("boundary", "values must be finite"));
        }
        Ok(Self {
            grid,
            params,
            eps_left,
            m_left,
            bc: BcMode::DirichletNeumann,
            forcing: None,
        })
    }

    pub fn with_right_values(mut self, eps_right: f64, m_right: f64) -> Result<Self> {
        if !eps_right.is_finite() || !m_right.is_finite() {
            return Err(Error::invalid("boundary", "values must be finite"));
        }
        self.bc = BcMode::DirichletDirichlet { eps_right, m_right };
        Ok(self)
    }

    pub fn with_forcing(mut self, strain: Vec<f64>, fluid: Vec<f64>) -> Result<Self> {
        let n = self.grid.n() + 1;
        for v in [&strain, &fluid] {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.len() });
            }
        }
        self.forcing = Some((strain, fluid));
        Ok(self)
    }

    pub fn with_k2(&self, k2: f64) -> Result<Self> {
        let params = self.params.with_k2(k2);
        params.validate()?;
        Ok(Self { params, ..self.clone() })
    }

    pub fn unknowns(&self) -> usize {
        2 * (self.grid.n() + 1)
    }

    pub fn is_dirichlet_row(&self, row: usize) -> bool {
        row < 2 || (matches!(self.bc, BcMode::DirichletDirichlet { .. }) && row + 2 >= self.unknowns())
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.unknowns() {
            return Err(Error::DimensionMismatch { expected: self.unknowns(), found: x.len() });
        }
        Ok(())
    }

    /// Writes the Dirichlet values into `x`.
    pub fn impose_boundary(&self, x: &mut [f64]) {
        x[0] = self.eps_left;
        x[1] = self.m_left;
        if let BcMode::DirichletDirichlet { eps_right, m_right } = self.bc {
            let k = x.len();
            x[k - 2] = eps_right;
            x[k - 1] = m_right;
        }
    }

    pub fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        let n = self.grid.n();
        let s2 = self.grid.h() * self.grid.h();
        let ModelParams { k1, k2, k3, .. } = self.params;
        let mut r = vec![0.0; x.len()];
        r[0] = x[0] - self.eps_left;
        r[1] = x[1] - self.m_left;
        for i in 1..=n {
            let (e, m) = (x[2 * i], x[2 * i + 1]);
            if i == n {
                if let BcMode::DirichletDirichlet { eps_right, m_right } = self.bc {
                    r[2 * i] = e - eps_right;
                    r[2 * i + 1] = m - m_right;
                    continue;
                }
            }
            let (le, lm) = if i < n {
                (
                    (x[2 * i + 2] - 2.0 * e + x[2 * i - 2]) / s2,
                    (x[2 * i + 3] - 2.0 * m + x[2 * i - 1]) / s2,
                )
            } else {
                (2.0 * (x[2 * i - 2] - e) / s2, 2.0 * (x[2 * i - 1] - m) / s2)
            };
            let (s_e, s_m) = self.forcing.as_ref().map_or((0.0, 0.0), |(a, b)| (a[i], b[i]));
            r[2 * i] = -k1 * le - k2 * lm - reaction_f1(e, m, &self.params) - s_e;
            r[2 * i + 1] = -k2 * le - k3 * lm - reaction_f2(e, m, &self.params) - s_m;
        }
        Ok(r)
    }

    /// Analytic Jacobian of [`StationaryProblem::residual`].
    pub fn jacobian(&self, x: &[f64]) -> Result<BandedMatrix> {
        self.check_len(x)?;
        let n = self.grid.n();
        let s2 = self.grid.h() * self.grid.h();
        let ModelParams { k1, k2, k3, .. } = self.params;
        let mut j = BandedMatrix::zeros(x.len(), BAND, BAND);
        j.set(0, 0, 1.0);
        j.set(1, 1, 1.0);
        for i in 1..=n {
            let (re, rm) = (2 * i, 2 * i + 1);
            if i == n && matches!(self.bc, BcMode::DirichletDirichlet { .. }) {
                j.set(re, re, 1.0);
                j.set(rm, rm, 1.0);
                continue;
            }
            // reactions are minus the energy gradient, so their Jacobian is minus the Hessian
            let hess = hessian_psi(x[re], x[rm], &self.params);
            let rows = [(re, k1, k2, hess[0]), (rm, k2, k3, hess[1])];
            let left = if i == n { 2.0 } else { 1.0 };
            for (row, ke, km, h) in rows {
                j.set(row, re, 2.0 * ke / s2 + h[0]);
                j.set(row, rm, 2.0 * km / s2 + h[1]);
                j.set(row, re - 2, -left * ke / s2);
                j.set(row, rm - 2, -left * km / s2);
                if i < n {
                    j.set(row, re + 2, -ke / s2);
                    j.set(row, rm + 2, -km / s2);
                }
            }
        }
        Ok(j)
    }

    /// Largest `|J - J_fd| / max(|J|, 1)` against central differences of the
    /// residual.
    pub fn jacobian_fd_error(&self, x: &[f64]) -> Result<f64> {
        let j = self.jacobian(x)?;
        let mut worst = 0.0f64;
        let mut xp = x.to_vec();
        for col in 0..x.len() {
            let step = 1e-6 * x[col].abs().max(1e-2);
            xp[col] = x[col] + step;
            let rp = self.residual(&xp)?;
            xp[col] = x[col] - step;
            let rm = self.residual(&xp)?;
            xp[col] = x[col];
            for row in col.saturating_sub(BAND + 1)..(col + BAND + 2).min(x.len()) {
                let fd = (rp[row] - rm[row]) / (2.0 * step);
                let a = j.get(row, col);
                worst = worst.max((a - fd).abs() / a.abs().max(1.0));
            }
        }
        Ok(worst)
    }
}

/// Strategy producing the next Newton iterate.
pub trait Damping {
    fn name(&self) -> &str;
    fn advance(&mut self, problem: &StationaryProblem, x: &[f64], r: &[f64], r_norm: f64) -> Result<Vec<f64>>;
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn newton_direction(problem: &StationaryProblem, x: &[f64], r: &[f64]) -> Result<Vec<f64>> {
    solve_banded(&problem.jacobian(x)?, r)
}

/// Full steps `x - J^-1 R`.
#[derive(Debug, Default)]
pub struct PlainNewton;

impl Damping for PlainNewton {
    fn name(&self) -> &str {
        "none"
    }
    fn advance(&mut self, problem: &StationaryProblem, x: &[f64], r: &[f64], _: f64) -> Result<Vec<f64>> {
        let dx = newton_direction(problem, x, r)?;
        Ok(x.iter().zip(&dx).map(|(a, d)| a - d).collect())
    }
}

/// Halves the Newton step until the residual max-norm decreases.
#[derive(Debug)]
pub struct Backtracking {
    pub max_halvings: usize,
}

impl Damping for Backtracking {
    fn name(&self) -> &str {
        "backtracking"
    }
    fn advance(&mut self, problem: &StationaryProblem, x: &[f64], r: &[f64], r_norm: f64) -> Result<Vec<f64>> {
        let dx = newton_direction(problem, x, r)?;
        let mut t = 1.0;
        let mut trial = Vec::new();
        for _ in 0..=self.max_halvings {
            trial = x.iter().zip(&dx).map(|(a, d)| a - t * d).collect();
            if inf_norm(&problem.residual(&trial)?) < r_norm {
                break;
            }
            t *= 0.5;
        }
        Ok(trial)
    }
}

/// Pseudo-transient continuation: solves `(J + D / dt) dx = R` with `D` the
/// identity on non-Dirichlet rows. `dt` doubles on every step taken once the
/// residual is below `switch_norm`, so the iteration turns into plain Newton
/// close to a solution. When the residual grows, `dt` shrinks by the ratio
/// of the residuals, but never below `dt_min`.
#[derive(Debug)]
pub struct PseudoTransient {
    pub dt: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub switch_norm: f64,
    last_norm: Option<f64>,
}

impl PseudoTransient {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            dt_min: dt,
            dt_max: 1e12,
            switch_norm: 1e-3,
            last_norm: None,
        }
    }
}

impl Damping for PseudoTransient {
    fn name(&self) -> &str {
        "pseudo-transient"
    }
    fn advance(&mut self, problem: &StationaryProblem, x: &[f64], r: &[f64], r_norm: f64) -> Result<Vec<f64>> {
        let mut j = problem.jacobian(x)?;
        for row in 0..x.len() {
            if !problem.is_dirichlet_row(row) {
                j.add(row, row, 1.0 / self.dt);
            }
        }
        let dx = solve_banded(&j, r)?;
        match self.last_norm {
            Some(prev) if r_norm > prev => self.dt = (self.dt * prev / r_norm).max(self.dt_min),
            _ if r_norm < self.switch_norm => self.dt = (2.0 * self.dt).min(self.dt_max),
            _ => {}
        }
        self.last_norm = Some(r_norm);
        Ok(x.iter().zip(&dx).map(|(a, d)| a - d).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonConfig {
    /// Residual max-norm tolerance.
    pub tol: f64,
    pub max_iters: usize,
    /// Registered damping name.
    pub damping: String,
    /// Compare the analytic Jacobian with finite differences at the guess.
    pub fd_check: bool,
    /// Initial pseudo-time step for `pseudo-transient`.
    pub ptc_dt: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: 200,
            damping: "backtracking".into(),
            fd_check: false,
            ptc_dt: 1.0,
        }
    }
}

impl NewtonConfig {
    pub fn pseudo_transient() -> Self {
        Self {
            damping: "pseudo-transient".into(),
            max_iters: 2000,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::invalid("tol", "must be > 0"));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters", "must be >= 1"));
        }
        if self.ptc_dt.is_nan() || self.ptc_dt <= 0.0 {
            return Err(Error::invalid("ptc_dt", "must be > 0"));
        }
        Ok(())
    }
}

pub type DampingRegistry = Registry<NewtonConfig, dyn Damping>;

pub fn damping_registry() -> DampingRegistry {
    let mut reg: DampingRegistry = Registry::new("damping");
    reg.register("none", "full Newton steps", |_| Ok(Box::new(PlainNewton)))
        .register("backtracking", "halve the step until the residual decreases", |_| {
            Ok(Box::new(Backtracking { max_halvings: 20 }))
        })
        .register("pseudo-transient", "pseudo-time regularised Newton with growing time step", |c| {
            Ok(Box::new(PseudoTransient::new(c.ptc_dt)))
        });
    reg
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NewtonReport {
    /// Residual max-norm of every iterate, starting with the guess.
    pub residual_norms: Vec<f64>,
    /// Max-norm of the update leaving each iterate.
    pub step_norms: Vec<f64>,
    pub fd_error: Option<f64>,
}

impl NewtonReport {
    pub fn iterations(&self) -> usize {
        self.step_norms.len()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,residual_norm,step_norm\n");
        for (k, r) in self.residual_norms.iter().enumerate() {
            let s = self.step_norms.get(k).copied().unwrap_or(0.0);
            let _ = writeln!(out, "{k},{},{}", fmt_f64(*r), fmt_f64(s));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationarySolution {
    pub grid: Grid1D,
    /// Interleaved `(eps_i, m_i)`.
    pub x: Vec<f64>,
    pub report: NewtonReport,
}

impl StationarySolution {
    pub fn eps(&self) -> Vec<f64> {
        self.x.iter().step_by(2).copied().collect()
    }

    pub fn m(&self) -> Vec<f64> {
        self.x.iter().skip(1).step_by(2).copied().collect()
    }

    pub fn to_csv(&self) -> String {
        crate::grid::columns_csv(&["x", "eps", "m"], &[&self.grid.nodes(), &self.eps(), &self.m()])
    }
}

pub fn newton_solve(problem: &StationaryProblem, guess: &[f64], config: &NewtonConfig) -> Result<StationarySolution> {
    config.validate()?;
    problem.check_len(guess)?;
    let mut damping = damping_registry().build(&config.damping, config)?;
    let mut x = guess.to_vec();
    problem.impose_boundary(&mut x);
    let mut report = NewtonReport::default();
    if config.fd_check {
        report.fd_error = Some(problem.jacobian_fd_error(&x)?);
    }
    for it in 0..=config.max_iters {
        let r = problem.residual(&x)?;
        let r_norm = inf_norm(&r);
        report.residual_norms.push(r_norm);
        if !r_norm.is_finite() {
            return Err(Error::NoConvergence { iterations: it, residual: r_norm });
        }
        if r_norm < config.tol {
            return Ok(StationarySolution { grid: problem.grid, x, report });
        }
        if it == config.max_iters {
            break;
        }
        let next = damping.advance(problem, &x, &r, r_norm)?;
        report.step_norms.push(x.iter().zip(&next).fold(0.0, |m, (a, b)| m.max((a - b).abs())));
        x = next;
    }
    Err(Error::NoConvergence {
        iterations: config.max_iters,
        residual: *report.residual_norms.last().unwrap_or(&f64::NAN),
    })
}

/// Fluid-poor (lower `m`) and fluid-rich minima of the energy.
pub fn phases(params: &ModelParams) -> Result<(EquilibriumPoint, EquilibriumPoint)> {
    let points = find_equilibria(params, &SearchBox::default(), 16)?;
    phase_minima(&points).ok_or(Error::NoEquilibrium)
}

/// Strategy for the starting point of a stationary solve.
pub trait InitialGuess {
    fn name(&self) -> &str;
    fn build(&self, problem: &StationaryProblem, newton: &NewtonConfig) -> Result<Vec<f64>>;
}

fn constant_guess(problem: &StationaryProblem, eps: f64, m: f64) -> Vec<f64> {
    let mut x: Vec<f64> = (0..problem.unknowns()).map(|k| if k % 2 == 0 { eps } else { m }).collect();
    problem.impose_boundary(&mut x);
    x
}

/// Constant state at the fluid-poor minimum.
#[derive(Debug, Default)]
pub struct FluidPoorGuess;

impl InitialGuess for FluidPoorGuess {
    fn name(&self) -> &str {
        "fluid-poor"
    }
    fn build(&self, problem: &StationaryProblem, _: &NewtonConfig) -> Result<Vec<f64>> {
        let (poor, _) = phases(&problem.params)?;
        Ok(constant_guess(problem, poor.eps, poor.m))
    }
}

/// Constant state at the fluid-rich minimum.
#[derive(Debug, Default)]
pub struct FluidRichGuess;

impl InitialGuess for FluidRichGuess {
    fn name(&self) -> &str {
        "fluid-rich"
    }
    fn build(&self, problem: &StationaryProblem, _: &NewtonConfig) -> Result<Vec<f64>> {
        let (_, rich) = phases(&problem.params)?;
        Ok(constant_guess(problem, rich.eps, rich.m))
    }
}

/// Linear interpolation between the fluid-poor state at `l1` and the
/// fluid-rich state at `l2`.
pub fn linear_two_phase_seed(problem: &StationaryProblem, poor: &EquilibriumPoint, rich: &EquilibriumPoint) -> Vec<f64> {
    let n = problem.grid.n();
    let mut x = Vec::with_capacity(problem.unknowns());
    for i in 0..=n {
        let s = i as f64 / n as f64;
        x.push(poor.eps + (rich.eps - poor.eps) * s);
        x.push(poor.m + (rich.m - poor.m) * s);
    }
    x
}

/// Solution of the problem with both phases pinned at the ends, started
/// from [`linear_two_phase_seed`].
#[derive(Debug, Default)]
pub struct TwoPhaseGuess;

impl InitialGuess for TwoPhaseGuess {
    fn name(&self) -> &str {
        "two-phase"
    }
    fn build(&self, problem: &StationaryProblem, newton: &NewtonConfig) -> Result<Vec<f64>> {
        let (poor, rich) = phases(&problem.params)?;
        let pinned = StationaryProblem {
            eps_left: poor.eps,
            m_left: poor.m,
            forcing: None,
            ..problem.clone()
        }
        .with_right_values(rich.eps, rich.m)?;
        let seed = linear_two_phase_seed(&pinned, &poor, &rich);
        let mut x = newton_solve(&pinned, &seed, newton)?.x;
        problem.impose_boundary(&mut x);
        Ok(x)
    }
}

pub type GuessRegistry = Registry<(), dyn InitialGuess>;

pub fn guess_registry() -> GuessRegistry {
    let mut reg: GuessRegistry = Registry::new("initial guess");
    reg.register("fluid-poor", "constant fluid-poor phase", |_| Ok(Box::new(FluidPoorGuess)))
        .register("fluid-rich", "constant fluid-rich phase", |_| Ok(Box::new(FluidRichGuess)))
        .register("two-phase", "solution with both phases pinned at the ends", |_| {
            Ok(Box::new(TwoPhaseGuess))
        });
    reg
}

pub fn make_initial_guess(problem: &StationaryProblem, kind: &str, newton: &NewtonConfig) -> Result<Vec<f64>> {
    guess_registry().build(kind, &())?.build(problem, newton)
}

/// Solves for each `k2` in turn, warm-starting from the previous solution.
pub fn continuation_in_k2(
    problem: &StationaryProblem,
    k2_values: &[f64],
    guess: &[f64],
    config: &NewtonConfig,
) -> Result<Vec<StationarySolution>> {
    let mut out: Vec<StationarySolution> = Vec::with_capacity(k2_values.len());
    let mut start = guess.to_vec();
    for &k2 in k2_values {
        let wrap = |e: Error| Error::Continuation { k2, source: Box::new(e) };
        let p = problem.with_k2(k2).map_err(wrap)?;
        let sol = newton_solve(&p, &start, config).map_err(wrap)?;
        start = sol.x.clone();
        out.push(sol);
    }
    Ok(out)
}
