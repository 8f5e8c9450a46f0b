//! Flat `section.key = value` run configuration.
//!
//! Lines may also use `[section]` headers, after which bare keys belong to
//! that section. `#` starts a comment. Later assignments override earlier
//! ones, which is how a `--config` file layers over a `--preset`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use consolidation::evolve::{Boundary, BoundaryValue, CrossStencil, LeftFlux, SweepOrder, ThetaSchemeConfig, TimeStep};
use consolidation::reaction::{PolynomialPair, PolynomialReaction, ReactionSpec};
use consolidation::steady::{BcMode, NewtonConfig};
use consolidation::{Grid1D, ModelParams};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value` or `[section]`, found `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("`{key}` = `{value}`: {reason}")]
    Value { key: String, value: String, reason: String },
    #[error("unknown preset `{name}` (available: {available})")]
    UnknownPreset { name: String, available: String },
}

/// Every accepted key.
pub const KEYS: &[&str] = &[
    "model.a",
    "model.b",
    "model.p",
    "model.alpha",
    "model.k1",
    "model.k2",
    "model.k3",
    "model.M_eps",
    "model.M_m",
    "grid.l1",
    "grid.l2",
    "grid.N",
    "scheme.theta",
    "scheme.tau",
    "scheme.T",
    "scheme.cross_stencil",
    "scheme.left_flux",
    "scheme.enforce_stability",
    "scheme.negativity_monitor",
    "scheme.steady_tol",
    "scheme.max_steps",
    "scheme.record_every",
    "scheme.sweep_order",
    "scheme.delta",
    "reaction.kind",
    "reaction.f1",
    "reaction.f2",
    "initial.kind",
    "initial.guess",
    "initial.eps",
    "initial.eps_slope",
    "initial.eps_curvature",
    "initial.m",
    "initial.m_slope",
    "initial.m_curvature",
    "boundary.eps_D",
    "boundary.m_D",
    "steady.tol",
    "steady.max_iters",
    "steady.guess",
    "steady.damping",
    "steady.fd_check",
    "steady.bc",
    "steady.eps_right",
    "steady.m_right",
    "steady.ptc_dt",
    "steady.continuation_k2",
    "coexistence.lo",
    "coexistence.hi",
    "coexistence.scan_points",
    "mollifier.deltas",
    "mollifier.fields",
    "mollifier.seed",
    "mollifier.N",
    "mollifier.T",
    "mms.levels",
    "mms.cells",
    "mms.coarse_steps",
    "mms.spatial_cells",
    "output.directory",
    "output.formats",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

fn value_error(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Value {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.into(),
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut config = Config::default();
        config.merge_text(text)?;
        Ok(config)
    }

    /// Applies the assignments in `text` on top of the current entries.
    pub fn merge_text(&mut self, text: &str) -> Result<(), ConfigError> {
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(name) = body.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                return Err(ConfigError::Syntax { line, text: body.to_string() });
            };
            let key = key.trim();
            let full = if key.contains('.') || section.is_empty() {
                key.to_string()
            } else {
                format!("{section}.{key}")
            };
            if !KEYS.contains(&full.as_str()) {
                return Err(ConfigError::UnknownKey { line, key: full });
            }
            self.entries.insert(full, value.trim().to_string());
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|e| value_error(key, v, e.to_string())))
            .transpose()
    }

    pub fn parsed_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    pub fn list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some(v) = self.get(key) else { return Ok(None) };
        v.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().map_err(|e| value_error(key, v, e.to_string())))
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    pub fn model(&self) -> Result<ModelParams, ConfigError> {
        let d = ModelParams::coexistence();
        let params = ModelParams {
            a: self.parsed_or("model.a", d.a)?,
            b: self.parsed_or("model.b", d.b)?,
            p: self.parsed_or("model.p", d.p)?,
            alpha: self.parsed_or("model.alpha", d.alpha)?,
            k1: self.parsed_or("model.k1", d.k1)?,
            k2: self.parsed_or("model.k2", d.k2)?,
            k3: self.parsed_or("model.k3", d.k3)?,
            m_eps: self.parsed_or("model.M_eps", d.m_eps)?,
            m_m: self.parsed_or("model.M_m", d.m_m)?,
        };
        params.validate().map_err(|e| value_error("model", "", e.to_string()))?;
        Ok(params)
    }

    pub fn grid(&self) -> Result<Grid1D, ConfigError> {
        let l1 = self.parsed_or("grid.l1", 0.0)?;
        let l2 = self.parsed_or("grid.l2", 1.0)?;
        let n = self.parsed_or("grid.N", 100usize)?;
        Grid1D::new(l1, l2, n).map_err(|e| value_error("grid.N", &n.to_string(), e.to_string()))
    }

    pub fn scheme(&self) -> Result<ThetaSchemeConfig, ConfigError> {
        let d = ThetaSchemeConfig::default();
        let tau = match self.get("scheme.tau") {
            None | Some("auto") => TimeStep::default(),
            Some(v) => TimeStep::Fixed(v.parse().map_err(|_| value_error("scheme.tau", v, "expected a number or `auto`"))?),
        };
        let steady_tol = match self.get("scheme.steady_tol") {
            Some("none") => None,
            _ => self.parsed("scheme.steady_tol")?.or(d.steady_tol),
        };
        let sweep_order = match self.get("scheme.sweep_order") {
            None | Some("ascending") => SweepOrder::Ascending,
            Some("descending") => SweepOrder::Descending,
            Some(v) => return Err(value_error("scheme.sweep_order", v, "expected `ascending` or `descending`")),
        };
        let config = ThetaSchemeConfig {
            theta: self.parsed_or("scheme.theta", d.theta)?,
            tau,
            t_final: self.parsed_or("scheme.T", d.t_final)?,
            cross_stencil: self.parsed_or::<CrossStencil>("scheme.cross_stencil", d.cross_stencil)?,
            left_flux: self.parsed_or::<LeftFlux>("scheme.left_flux", d.left_flux)?,
            enforce_stability: self.parsed_or("scheme.enforce_stability", d.enforce_stability)?,
            negativity_monitor: self.parsed_or("scheme.negativity_monitor", d.negativity_monitor)?,
            steady_tol,
            max_steps: self.parsed("scheme.max_steps")?.or(d.max_steps),
            record_every: self.parsed("scheme.record_every")?.or(d.record_every),
            sweep_order,
        };
        config.validate().map_err(|e| value_error("scheme", "", e.to_string()))?;
        Ok(config)
    }

    pub fn reaction_spec(&self, params: ModelParams) -> Result<ReactionSpec, ConfigError> {
        let table = |key: &str| -> Result<Option<PolynomialReaction>, ConfigError> {
            self.get(key)
                .map(|v| v.parse::<PolynomialReaction>().map_err(|e| value_error(key, v, e.to_string())))
                .transpose()
        };
        let tables = match (table("reaction.f1")?, table("reaction.f2")?) {
            (None, None) => None,
            (Some(f1), Some(f2)) => Some(PolynomialPair { f1, f2 }),
            _ => return Err(value_error("reaction.f1", "", "`reaction.f1` and `reaction.f2` must be given together")),
        };
        Ok(ReactionSpec { params, tables })
    }

    pub fn reaction_kind(&self) -> &str {
        self.get("reaction.kind").unwrap_or("double-well")
    }

    pub fn boundary(&self) -> Result<Boundary, ConfigError> {
        let read = |key: &str, default: f64| -> Result<BoundaryValue, ConfigError> {
            match self.get(key) {
                None => Ok(BoundaryValue::constant(default)),
                Some(v) => parse_affine(v)
                    .map(|(c0, c1)| BoundaryValue::Affine { c0, c1 })
                    .ok_or_else(|| value_error(key, v, "expected a number or `c0 + c1*t`")),
            }
        };
        Ok(Boundary {
            eps: read("boundary.eps_D", -0.141)?,
            m: read("boundary.m_D", -0.13)?,
        })
    }

    /// Constant boundary values, as needed by stationary solves.
    pub fn boundary_constants(&self) -> Result<(f64, f64), ConfigError> {
        let b = self.boundary()?;
        for (key, value) in [("boundary.eps_D", &b.eps), ("boundary.m_D", &b.m)] {
            if let BoundaryValue::Affine { c1, .. } = value {
                if *c1 != 0.0 {
                    return Err(value_error(key, self.get(key).unwrap_or(""), "must be constant for a stationary solve"));
                }
            }
        }
        Ok((b.eps.eval(0.0), b.m.eval(0.0)))
    }

    pub fn newton(&self) -> Result<NewtonConfig, ConfigError> {
        let d = NewtonConfig::default();
        let config = NewtonConfig {
            tol: self.parsed_or("steady.tol", d.tol)?,
            max_iters: self.parsed_or("steady.max_iters", d.max_iters)?,
            damping: self.get("steady.damping").unwrap_or(&d.damping).to_string(),
            fd_check: self.parsed_or("steady.fd_check", d.fd_check)?,
            ptc_dt: self.parsed_or("steady.ptc_dt", d.ptc_dt)?,
        };
        config.validate().map_err(|e| value_error("steady", "", e.to_string()))?;
        Ok(config)
    }

    pub fn steady_bc(&self) -> Result<BcMode, ConfigError> {
        match self.get("steady.bc") {
            None | Some("dirichlet-neumann") => Ok(BcMode::DirichletNeumann),
            Some("dirichlet-dirichlet") => Ok(BcMode::DirichletDirichlet {
                eps_right: self.required("steady.eps_right")?,
                m_right: self.required("steady.m_right")?,
            }),
            Some(v) => Err(value_error("steady.bc", v, "expected `dirichlet-neumann` or `dirichlet-dirichlet`")),
        }
    }

    pub fn required<T: FromStr>(&self, key: &str) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        self.parsed(key)?.ok_or_else(|| value_error(key, "", "required"))
    }

    pub fn formats(&self) -> Vec<String> {
        self.get("output.formats")
            .unwrap_or("csv,svg")
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect()
    }

    pub fn wants(&self, format: &str) -> bool {
        self.formats().iter().any(|f| f == format)
    }
}

/// Parses `c`, `c1*t`, or `c0 + c1*t` (either order, `-` allowed).
pub fn parse_affine(text: &str) -> Option<(f64, f64)> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bytes = s.as_bytes();
    let mut parts = Vec::new();
    let mut start = 0;
    for i in 1..bytes.len() {
        let sign = bytes[i] == b'+' || bytes[i] == b'-';
        let exponent = matches!(bytes[i - 1], b'e' | b'E');
        if sign && !exponent {
            parts.push(&s[start..i]);
            start = i;
        }
    }
    parts.push(&s[start..]);
    let (mut c0, mut c1) = (0.0, 0.0);
    let mut seen = (false, false);
    for part in parts {
        let part = part.strip_prefix('+').unwrap_or(part);
        if let Some(coeff) = part.strip_suffix("*t") {
            if seen.1 {
                return None;
            }
            c1 = coeff.parse().ok()?;
            seen.1 = true;
        } else if part == "t" || part == "-t" {
            c1 = if part == "t" { 1.0 } else { -1.0 };
            seen.1 = true;
        } else {
            if seen.0 {
                return None;
            }
            c0 = part.parse().ok()?;
            seen.0 = true;
        }
    }
    Some((c0, c1))
}
