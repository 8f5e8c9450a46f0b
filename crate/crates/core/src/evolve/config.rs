use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Placement of the `k2 m_xx` second difference in the strain update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CrossStencil {
    /// `m[i-2] - 2 m[i-1] + m[i]`, offset by half a cell towards `l1`.
    #[default]
    Lagged,
    /// `m[i-1] - 2 m[i] + m[i+1]`, with `m[n+1] = m[n]`.
    Centered,
}

impl FromStr for CrossStencil {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lagged" => Ok(Self::Lagged),
            "centered" => Ok(Self::Centered),
            _ => Err(Error::invalid("cross_stencil", format!("`{s}` is not one of lagged, centered"))),
        }
    }
}

/// Treatment of the fluid flux through the Dirichlet end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LeftFlux {
    /// `F_0 = k3 (m_1 - m_0) / h + k2 b_1` with `m_0` the boundary value, so
    /// the Dirichlet datum actually enters the fluid equation.
    #[default]
    Dirichlet,
    /// `F_0 = 0`: the fluid equation is insulated at both ends.
    ZeroFlux,
}

impl FromStr for LeftFlux {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirichlet" => Ok(Self::Dirichlet),
            "zero-flux" | "zero_flux" => Ok(Self::ZeroFlux),
            _ => Err(Error::invalid("left_flux", format!("`{s}` is not one of dirichlet, zero-flux"))),
        }
    }
}

/// Order in which the pointwise updates are swept. Each entry depends only
/// on the previous time level, so the result never depends on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepOrder {
    #[default]
    Ascending,
    Descending,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TimeStep {
    /// `safety * tau_max`.
    Auto { safety: f64 },
    Fixed(f64),
    /// Explicit step sequence; the run ends when it is exhausted or at `T`.
    Sequence(Vec<f64>),
}

impl Default for TimeStep {
    fn default() -> Self {
        TimeStep::Auto { safety: 0.9 }
    }
}

/// Boundary datum as a function of time.
#[derive(Clone)]
pub enum BoundaryValue {
    /// `c0 + c1 t`.
    Affine { c0: f64, c1: f64 },
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl BoundaryValue {
    pub fn constant(c: f64) -> Self {
        BoundaryValue::Affine { c0: c, c1: 0.0 }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            BoundaryValue::Affine { c0, c1 } => c0 + c1 * t,
            BoundaryValue::Function(f) => f(t),
        }
    }
}

impl fmt::Debug for BoundaryValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryValue::Affine { c0, c1 } => write!(f, "Affine({c0} + {c1} t)"),
            BoundaryValue::Function(_) => f.write_str("Function(..)"),
        }
    }
}

/// Dirichlet data at `l1` for strain and fluid content.
#[derive(Debug, Clone)]
pub struct Boundary {
    pub eps: BoundaryValue,
    pub m: BoundaryValue,
}

impl Boundary {
    pub fn constant(eps: f64, m: f64) -> Self {
        Self {
            eps: BoundaryValue::constant(eps),
            m: BoundaryValue::constant(m),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ThetaSchemeConfig {
    pub theta: f64,
    pub tau: TimeStep,
    pub t_final: f64,
    pub cross_stencil: CrossStencil,
    pub left_flux: LeftFlux,
    /// Refuse steps above `min(rho, iota)`.
    pub enforce_stability: bool,
    /// Count positive (and zero) entries every step.
    pub negativity_monitor: bool,
    /// Stop once `max |u^n - u^(n-1)| / tau` falls below this.
    pub steady_tol: Option<f64>,
    pub max_steps: Option<usize>,
    /// Keep a snapshot every this many steps (initial and final always kept).
    pub record_every: Option<usize>,
    pub sweep_order: SweepOrder,
}

impl Default for ThetaSchemeConfig {
    fn default() -> Self {
        Self {
            theta: 1.0,
            tau: TimeStep::default(),
            t_final: 1.0,
            cross_stencil: CrossStencil::Lagged,
            left_flux: LeftFlux::Dirichlet,
            enforce_stability: true,
            negativity_monitor: true,
            steady_tol: Some(1e-8),
            max_steps: None,
            record_every: None,
            sweep_order: SweepOrder::Ascending,
        }
    }
}

impl ThetaSchemeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::invalid("theta", "must lie in [0, 1]"));
        }
        if self.t_final <= 0.0 || !self.t_final.is_finite() {
            return Err(Error::invalid("T", "must be positive and finite"));
        }
        match &self.tau {
            TimeStep::Auto { safety } => {
                if !(*safety > 0.0 && *safety <= 1.0) {
                    return Err(Error::invalid("tau_safety", "must lie in (0, 1]"));
                }
            }
            TimeStep::Fixed(t) => {
                if *t <= 0.0 || !t.is_finite() {
                    return Err(Error::invalid("tau", "must be positive and finite"));
                }
            }
            TimeStep::Sequence(ts) => {
                if ts.is_empty() || ts.iter().any(|t| *t <= 0.0 || !t.is_finite()) {
                    return Err(Error::invalid("tau", "sequence must be non-empty with positive entries"));
                }
            }
        }
        if let Some(tol) = self.steady_tol {
            if tol.is_nan() || tol <= 0.0 {
                return Err(Error::invalid("steady_tol", "must be > 0"));
            }
        }
        if self.record_every == Some(0) {
            return Err(Error::invalid("record_every", "must be >= 1"));
        }
        Ok(())
    }
}

/// Step-size bounds under which the scheme is solvable and sign preserving.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    /// `min(h^2 / (2 (1 - theta)), h / (2 theta))`, inactive branch infinite.
    pub rho: f64,
    /// `h^2 / (2 k2)`, infinite for `k2 = 0`.
    pub iota: f64,
    pub tau_max: f64,
    /// Step the flags below were evaluated at.
    pub tau: f64,
    /// `2 tau theta <= h`.
    pub a1_ok: bool,
    /// `2 tau (1 - theta) <= h^2`.
    pub a2_ok: bool,
    /// Concavity condition on the first two strain gradients; known only
    /// once the first step has been taken.
    pub a3_ok: Option<bool>,
}

pub fn max_stable_tau(theta: f64, h: f64, k2: f64) -> StabilityReport {
    let implicit = if theta > 0.0 { h / (2.0 * theta) } else { f64::INFINITY };
    let explicit = if theta < 1.0 { h * h / (2.0 * (1.0 - theta)) } else { f64::INFINITY };
    let rho = implicit.min(explicit);
    let iota = if k2 > 0.0 { h * h / (2.0 * k2) } else { f64::INFINITY };
    let tau_max = rho.min(iota);
    StabilityReport {
        rho,
        iota,
        tau_max,
        tau: tau_max,
        a1_ok: true,
        a2_ok: true,
        a3_ok: None,
    }
    .at_tau(theta, h, tau_max)
}

impl StabilityReport {
    /// Re-evaluates the step-size assumptions at `tau`.
    pub fn at_tau(mut self, theta: f64, h: f64, tau: f64) -> Self {
        self.tau = tau;
        self.a1_ok = 2.0 * tau * theta <= h;
        self.a2_ok = 2.0 * tau * (1.0 - theta) <= h * h;
        self
    }

    pub fn within_bound(&self) -> bool {
        self.tau <= self.tau_max
    }
}
