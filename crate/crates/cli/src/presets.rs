//! Bundled configurations.

use crate::config::{Config, ConfigError};

const COMMON: &str = "\
model.a = 0.5
model.b = 1
model.alpha = 100
model.k1 = 1e-3
model.k2 = 1e-3
model.k3 = 1e-3
grid.l1 = 0
grid.l2 = 1
";

/// Stationary profiles near the fluid-poor phase, plus the evolution check
/// from the two-phase seed.
const FIG1: &str = "\
model.p = 0.24
grid.N = 1000
boundary.eps_D = -0.141
boundary.m_D = -0.13
steady.guess = fluid-poor, fluid-rich, two-phase
steady.damping = pseudo-transient
steady.max_iters = 2000
steady.tol = 1e-10
steady.continuation_k2 = 0.2e-3, 0.8e-3
initial.kind = guess
initial.guess = two-phase
scheme.theta = 1
scheme.cross_stencil = centered
scheme.tau = 2.25e-4
scheme.T = 200
scheme.steady_tol = 1e-8
scheme.record_every = 20000
";

/// Same as `fig1` with the boundary held at the saddle of the energy.
const FIG2: &str = "\
model.p = 0.24
grid.N = 1000
boundary.eps_D = -0.14543864
boundary.m_D = -0.08969282
steady.guess = fluid-poor, fluid-rich, two-phase
steady.damping = pseudo-transient
steady.max_iters = 2000
steady.tol = 1e-10
steady.continuation_k2 = 0.2e-3, 0.8e-3
";

/// Nonpositive data and nonpositive truncated reactions.
const NEGATIVITY: &str = "\
model.k1 = 0.1
model.k2 = 0.01
model.k3 = 0.1
model.M_eps = 2
model.M_m = 2
grid.N = 100
reaction.kind = polynomial-truncated
reaction.f1 = 0,0:-0.05; 2,0:-0.1
reaction.f2 = 0,0:-0.05; 0,2:-0.1
initial.kind = profile
initial.eps = -1
initial.eps_slope = 1
initial.eps_curvature = -0.5
initial.m = -0.8
initial.m_slope = 0.6
initial.m_curvature = -0.3
boundary.eps_D = -1
boundary.m_D = -0.8
scheme.theta = 0.5
scheme.tau = auto
scheme.T = 1
scheme.max_steps = 2000
scheme.steady_tol = none
scheme.enforce_stability = true
scheme.negativity_monitor = true
scheme.record_every = 100
";

/// Double-well landscape at the coexistence pressure.
const COEXISTENCE: &str = "\
model.p = 0.24221
coexistence.lo = 0.23
coexistence.hi = 0.26
coexistence.scan_points = 21
";

pub const NAMES: &[&str] = &["fig1", "fig2", "negativity", "coexistence"];

pub fn preset_text(name: &str) -> Result<String, ConfigError> {
    let body = match name {
        "fig1" => FIG1,
        "fig2" => FIG2,
        "negativity" => NEGATIVITY,
        "coexistence" => COEXISTENCE,
        _ => {
            return Err(ConfigError::UnknownPreset {
                name: name.to_string(),
                available: NAMES.join(", "),
            })
        }
    };
    Ok(format!("{COMMON}{body}"))
}

pub fn preset(name: &str) -> Result<Config, ConfigError> {
    Config::parse(&preset_text(name)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses_and_validates() {
        for name in NAMES {
            let c = preset(name).unwrap();
            c.model().unwrap();
            c.grid().unwrap();
            c.scheme().unwrap();
            c.newton().unwrap();
            c.boundary().unwrap();
        }
        assert!(preset("fig3").is_err());
    }

    #[test]
    fn negativity_preset_overrides_common_diffusion() {
        let p = preset("negativity").unwrap().model().unwrap();
        assert_eq!((p.k1, p.k2, p.k3), (0.1, 0.01, 0.1));
    }
}
