//! Reaction terms `(f1, f2)` driving the strain and fluid-content equations.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::potential::{reaction_f1, reaction_f2, ModelParams};
use crate::registry::Registry;

/// A pair of reaction rates evaluated pointwise.
pub trait Reaction: Send + Sync {
    fn name(&self) -> &str;
    /// Source in the strain equation.
    fn f1(&self, eps: f64, m: f64) -> f64;
    /// Source in the fluid-content equation.
    fn f2(&self, eps: f64, m: f64) -> f64;
}

impl fmt::Debug for dyn Reaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Reaction({})", self.name())
    }
}

/// Returns `f(eps, m)` inside the closed box `|eps| <= m_eps`, `|m| <= m_m`
/// and zero outside it.
pub fn truncate_reaction<F: Fn(f64, f64) -> f64>(f: F, eps: f64, m: f64, m_eps: f64, m_m: f64) -> f64 {
    if eps.abs() <= m_eps && m.abs() <= m_m {
        f(eps, m)
    } else {
        0.0
    }
}

/// The reactions derived from the double-well energy.
#[derive(Debug, Clone, Copy)]
pub struct DoubleWell {
    pub params: ModelParams,
}

impl Reaction for DoubleWell {
    fn name(&self) -> &str {
        "double-well"
    }
    fn f1(&self, eps: f64, m: f64) -> f64 {
        reaction_f1(eps, m, &self.params)
    }
    fn f2(&self, eps: f64, m: f64) -> f64 {
        reaction_f2(eps, m, &self.params)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroReaction;

impl Reaction for ZeroReaction {
    fn name(&self) -> &str {
        "zero"
    }
    fn f1(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn f2(&self, _: f64, _: f64) -> f64 {
        0.0
    }
}

/// Bivariate polynomial `sum c[(i, j)] eps^i m^j`, keyed by
/// `(eps power, m power)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PolynomialReaction {
    coeffs: BTreeMap<(u32, u32), f64>,
}

impl PolynomialReaction {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a table from `((eps power, m power), coefficient)` terms;
    /// repeated keys accumulate.
    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), f64)>>(terms: I) -> Result<Self> {
        let mut poly = Self::new();
        for (key, c) in terms {
            poly.add_term(key, c)?;
        }
        Ok(poly)
    }

    pub fn add_term(&mut self, key: (u32, u32), coeff: f64) -> Result<()> {
        if !coeff.is_finite() {
            return Err(Error::invalid("coefficient", format!("non-finite value at {key:?}")));
        }
        *self.coeffs.entry(key).or_insert(0.0) += coeff;
        Ok(())
    }

    pub fn coefficient(&self, eps_power: u32, m_power: u32) -> f64 {
        self.coeffs.get(&(eps_power, m_power)).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), f64)> + '_ {
        self.coeffs.iter().map(|(k, c)| (*k, *c))
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest power of `eps` and of `m` present in the table.
    pub fn degrees(&self) -> (u32, u32) {
        self.coeffs
            .keys()
            .fold((0, 0), |(de, dm), &(i, j)| (de.max(i), dm.max(j)))
    }

    pub fn eval(&self, eps: f64, m: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(&(i, j), &c)| c * eps.powi(i as i32) * m.powi(j as i32))
            .sum()
    }

    /// Expansion of the double-well `f1` into monomials.
    pub fn double_well_f1(params: &ModelParams) -> Self {
        let ModelParams { a, b, p, alpha, .. } = *params;
        let mut poly = Self::new();
        for (key, c) in [
            ((0, 3), 2.0 / 3.0 * b * alpha),
            ((1, 2), -alpha * b * b),
            ((0, 0), -p),
            ((1, 0), -1.0 - a * b * b),
            ((0, 1), a * b),
        ] {
            poly.coeffs.insert(key, c);
        }
        poly
    }

    /// Expansion of the double-well `f2` into monomials.
    pub fn double_well_f2(params: &ModelParams) -> Self {
        let ModelParams { a, b, alpha, .. } = *params;
        let mut poly = Self::new();
        for (key, c) in [
            ((0, 3), -alpha),
            ((1, 2), 2.0 * alpha * b),
            ((2, 1), -b * b * alpha),
            ((0, 1), -a),
            ((1, 0), a * b),
        ] {
            poly.coeffs.insert(key, c);
        }
        poly
    }
}

impl std::str::FromStr for PolynomialReaction {
    type Err = Error;

    /// Parses `i,j:c; i,j:c; ...`; an empty string is the zero polynomial.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |t: &str| Error::invalid("polynomial", format!("cannot parse term `{t}`, expected `i,j:c`"));
        let mut poly = Self::new();
        for term in s.split(';').map(str::trim).filter(|t| !t.is_empty()) {
            let (powers, coeff) = term.split_once(':').ok_or_else(|| bad(term))?;
            let (i, j) = powers.split_once(',').ok_or_else(|| bad(term))?;
            let i: u32 = i.trim().parse().map_err(|_| bad(term))?;
            let j: u32 = j.trim().parse().map_err(|_| bad(term))?;
            let c: f64 = coeff.trim().parse().map_err(|_| bad(term))?;
            poly.add_term((i, j), c)?;
        }
        Ok(poly)
    }
}

/// Reactions given by two coefficient tables.
#[derive(Debug, Clone, Default)]
pub struct PolynomialPair {
    pub f1: PolynomialReaction,
    pub f2: PolynomialReaction,
}

impl PolynomialPair {
    pub fn double_well(params: &ModelParams) -> Self {
        Self {
            f1: PolynomialReaction::double_well_f1(params),
            f2: PolynomialReaction::double_well_f2(params),
        }
    }
}

impl Reaction for PolynomialPair {
    fn name(&self) -> &str {
        "polynomial"
    }
    fn f1(&self, eps: f64, m: f64) -> f64 {
        self.f1.eval(eps, m)
    }
    fn f2(&self, eps: f64, m: f64) -> f64 {
        self.f2.eval(eps, m)
    }
}

/// Cuts an inner reaction off outside `|eps| <= m_eps, |m| <= m_m`.
pub struct Truncated<R: ?Sized> {
    pub inner: Box<R>,
    pub m_eps: f64,
    pub m_m: f64,
    name: String,
}

impl Truncated<dyn Reaction> {
    pub fn new(inner: Box<dyn Reaction>, m_eps: f64, m_m: f64) -> Result<Self> {
        if m_eps.is_nan() || m_eps <= 0.0 {
            return Err(Error::invalid("M_eps", "must be > 0"));
        }
        if m_m.is_nan() || m_m <= 0.0 {
            return Err(Error::invalid("M_m", "must be > 0"));
        }
        let name = format!("truncated {}", inner.name());
        Ok(Self { inner, m_eps, m_m, name })
    }
}

impl Reaction for Truncated<dyn Reaction> {
    fn name(&self) -> &str {
        &self.name
    }
    fn f1(&self, eps: f64, m: f64) -> f64 {
        truncate_reaction(|e, m| self.inner.f1(e, m), eps, m, self.m_eps, self.m_m)
    }
    fn f2(&self, eps: f64, m: f64) -> f64 {
        truncate_reaction(|e, m| self.inner.f2(e, m), eps, m, self.m_eps, self.m_m)
    }
}

/// Everything a reaction constructor may draw on.
#[derive(Debug, Clone, Default)]
pub struct ReactionSpec {
    pub params: ModelParams,
    /// Explicit tables for the `polynomial` variants; when absent the
    /// double-well expansion of `params` is used.
    pub tables: Option<PolynomialPair>,
}

impl ReactionSpec {
    pub fn from_params(params: ModelParams) -> Self {
        Self { params, tables: None }
    }

    fn tables_or_default(&self) -> PolynomialPair {
        self.tables
            .clone()
            .unwrap_or_else(|| PolynomialPair::double_well(&self.params))
    }
}

pub type ReactionRegistry = Registry<ReactionSpec, dyn Reaction>;

/// Registry with the built-in reactions:
///
/// | name | reaction |
/// |------|----------|
/// | `double-well` | closed-form energy reactions |
/// | `double-well-truncated` | same, cut off at `M_eps`, `M_m` |
/// | `polynomial` | coefficient tables |
/// | `polynomial-truncated` | coefficient tables, cut off |
/// | `zero` | no reaction |
pub fn reaction_registry() -> ReactionRegistry {
    let mut reg: ReactionRegistry = Registry::new("reaction");
    reg.register("double-well", "reactions of the double-well energy", |s| {
        Ok(Box::new(DoubleWell { params: s.params }))
    })
    .register(
        "double-well-truncated",
        "double-well reactions cut off outside the M_eps x M_m box",
        |s| {
            let inner: Box<dyn Reaction> = Box::new(DoubleWell { params: s.params });
            Ok(Box::new(Truncated::new(inner, s.params.m_eps, s.params.m_m)?))
        },
    )
    .register("polynomial", "explicit coefficient tables", |s| {
        Ok(Box::new(s.tables_or_default()))
    })
    .register(
        "polynomial-truncated",
        "coefficient tables cut off outside the M_eps x M_m box",
        |s| {
            let inner: Box<dyn Reaction> = Box::new(s.tables_or_default());
            Ok(Box::new(Truncated::new(inner, s.params.m_eps, s.params.m_m)?))
        },
    )
    .register("zero", "no reaction", |_| Ok(Box::new(ZeroReaction)));
    reg
}
