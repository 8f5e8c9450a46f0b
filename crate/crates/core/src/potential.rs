//! Porous-media energy landscape.
//!
//! `psi_total(eps, m) = alpha/12 m^2 (3 m^2 - 8 b eps m + 6 b^2 eps^2) + psi_biot(eps, m)`
//! with the Biot part `p eps + eps^2/2 + a (m - b eps)^2 / 2`. The reaction
//! terms are the negative gradient of `psi_total`.

use crate::error::{Error, Result};

/// Material and loading constants of the consolidation model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Fluid-to-solid rigidity ratio.
    pub a: f64,
    /// Solid–fluid coupling.
    pub b: f64,
    /// External pressure.
    pub p: f64,
    /// Double-well strength.
    pub alpha: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    /// Truncation bound on `|eps|` for the cut-off reactions.
    pub m_eps: f64,
    /// Truncation bound on `|m|` for the cut-off reactions.
    pub m_m: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::coexistence()
    }
}

impl ModelParams {
    /// `a = 0.5, b = 1, alpha = 100` at the equal-depth pressure `p = 0.24221`,
    /// with `k1 = k2 = k3 = 1e-3`.
    pub fn coexistence() -> Self {
        Self {
            a: 0.5,
            b: 1.0,
            p: 0.24221,
            alpha: 100.0,
            k1: 1e-3,
            k2: 1e-3,
            k3: 1e-3,
            m_eps: 1.0,
            m_m: 1.0,
        }
    }

    pub fn with_pressure(self, p: f64) -> Self {
        Self { p, ..self }
    }

    pub fn with_k2(self, k2: f64) -> Self {
        Self { k2, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        fn finite(name: &'static str, v: f64) -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("must be finite, got {v}")))
            }
        }
        for (name, v) in [
            ("a", self.a),
            ("b", self.b),
            ("p", self.p),
            ("alpha", self.alpha),
            ("k1", self.k1),
            ("k2", self.k2),
            ("k3", self.k3),
            ("M_eps", self.m_eps),
            ("M_m", self.m_m),
        ] {
            finite(name, v)?;
        }
        if self.a <= 0.0 {
            return Err(Error::invalid("a", "must be > 0"));
        }
        if self.b <= 0.0 {
            return Err(Error::invalid("b", "must be > 0"));
        }
        if self.p < 0.0 {
            return Err(Error::invalid("p", "must be >= 0"));
        }
        if self.alpha < 0.0 {
            return Err(Error::invalid("alpha", "must be >= 0"));
        }
        if self.k1 <= 0.0 {
            return Err(Error::invalid("k1", "must be > 0"));
        }
        if self.k3 <= 0.0 {
            return Err(Error::invalid("k3", "must be > 0"));
        }
        if self.k2 < 0.0 {
            return Err(Error::invalid("k2", "must be >= 0"));
        }
        // k1 k3 - k2^2 >= 0, with a relative allowance for the k1 = k2 = k3 case
        let det = self.k1 * self.k3 - self.k2 * self.k2;
        if det < -1e-12 * self.k1 * self.k3 {
            return Err(Error::invalid(
                "k2",
                format!("k1*k3 - k2^2 = {det:e} must be >= 0"),
            ));
        }
        if self.m_eps <= 0.0 {
            return Err(Error::invalid("M_eps", "must be > 0"));
        }
        if self.m_m <= 0.0 {
            return Err(Error::invalid("M_m", "must be > 0"));
        }
        Ok(())
    }

    /// `k2 < min(k1, k3)`, the regime where the evolution problem is known to
    /// have a unique solution.
    pub fn uniqueness_regime(&self) -> bool {
        self.k2 < self.k1.min(self.k3)
    }
}

pub fn psi_biot(eps: f64, m: f64, params: &ModelParams) -> f64 {
    let ModelParams { a, b, p, .. } = *params;
    let c = m - b * eps;
    p * eps + 0.5 * eps * eps + 0.5 * a * c * c
}

pub fn psi_total(eps: f64, m: f64, params: &ModelParams) -> f64 {
    let ModelParams { b, alpha, .. } = *params;
    let quartic = alpha / 12.0 * m * m * (3.0 * m * m - 8.0 * b * eps * m + 6.0 * b * b * eps * eps);
    quartic + psi_biot(eps, m, params)
}

/// `-dPsi/deps`.
pub fn reaction_f1(eps: f64, m: f64, params: &ModelParams) -> f64 {
    let ModelParams { a, b, p, alpha, .. } = *params;
    2.0 / 3.0 * b * alpha * m * m * m - alpha * b * b * m * m * eps - p - eps + a * b * m
        - a * b * b * eps
}

/// `-dPsi/dm`.
pub fn reaction_f2(eps: f64, m: f64, params: &ModelParams) -> f64 {
    let ModelParams { a, b, alpha, .. } = *params;
    -alpha * m * m * m + 2.0 * alpha * b * eps * m * m - b * b * alpha * eps * eps * m - a * m
        + a * b * eps
}

/// `(dPsi/deps, dPsi/dm)`.
pub fn grad_psi(eps: f64, m: f64, params: &ModelParams) -> [f64; 2] {
    [-reaction_f1(eps, m, params), -reaction_f2(eps, m, params)]
}

/// Analytic Hessian of [`psi_total`], ordered `(eps, m)`.
pub fn hessian_psi(eps: f64, m: f64, params: &ModelParams) -> [[f64; 2]; 2] {
    let ModelParams { a, b, alpha, .. } = *params;
    let ee = alpha * b * b * m * m + 1.0 + a * b * b;
    let mm = 3.0 * alpha * m * m - 4.0 * alpha * b * eps * m + alpha * b * b * eps * eps + a;
    let em = -2.0 * alpha * b * m * m + 2.0 * alpha * b * b * eps * m - a * b;
    [[ee, em], [em, mm]]
}

/// Eigenvalues of a symmetric 2x2 matrix, ascending.
pub fn symmetric_eigenvalues(h: &[[f64; 2]; 2]) -> [f64; 2] {
    let mean = 0.5 * (h[0][0] + h[1][1]);
    let half_diff = 0.5 * (h[0][0] - h[1][1]);
    let r = half_diff.hypot(h[0][1]);
    [mean - r, mean + r]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CriticalKind {
    Minimum,
    Saddle,
    Maximum,
    Degenerate,
}

impl CriticalKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CriticalKind::Minimum => "minimum",
            CriticalKind::Saddle => "saddle",
            CriticalKind::Maximum => "maximum",
            CriticalKind::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumPoint {
    pub eps: f64,
    pub m: f64,
    pub psi: f64,
    pub kind: CriticalKind,
}

/// Determinants below this magnitude classify a critical point as degenerate.
pub const DEGENERATE_DET: f64 = 1e-12;

pub fn classify(eps: f64, m: f64, params: &ModelParams) -> CriticalKind {
    let h = hessian_psi(eps, m, params);
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    if det.abs() < DEGENERATE_DET {
        return CriticalKind::Degenerate;
    }
    let [lo, hi] = symmetric_eigenvalues(&h);
    if lo > 0.0 {
        CriticalKind::Minimum
    } else if hi < 0.0 {
        CriticalKind::Maximum
    } else {
        CriticalKind::Saddle
    }
}

/// Rectangle `[eps_lo, eps_hi] x [m_lo, m_hi]` in the state plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBox {
    pub eps: (f64, f64),
    pub m: (f64, f64),
}

impl SearchBox {
    pub fn square(lo: f64, hi: f64) -> Self {
        Self {
            eps: (lo, hi),
            m: (lo, hi),
        }
    }
}

impl Default for SearchBox {
    fn default() -> Self {
        Self::square(-0.3, 0.1)
    }
}

const EQ_MAX_ITERS: usize = 50;
const EQ_GRAD_TOL: f64 = 1e-12;
const EQ_DEDUP: f64 = 1e-6;

/// Damped Newton on `grad psi = 0` from one seed.
fn newton_critical_point(seed: (f64, f64), params: &ModelParams) -> Option<(f64, f64)> {
    let (mut e, mut m) = seed;
    let mut g = grad_psi(e, m, params);
    let mut gn = g[0].hypot(g[1]);
    for _ in 0..EQ_MAX_ITERS {
        if gn < EQ_GRAD_TOL {
            return Some((e, m));
        }
        let h = hessian_psi(e, m, params);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let de = (h[1][1] * g[0] - h[0][1] * g[1]) / det;
        let dm = (h[0][0] * g[1] - h[1][0] * g[0]) / det;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let (en, mn) = (e - t * de, m - t * dm);
            let gnew = grad_psi(en, mn, params);
            let nn = gnew[0].hypot(gnew[1]);
            if nn < gn {
                e = en;
                m = mn;
                g = gnew;
                gn = nn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            return if gn < EQ_GRAD_TOL { Some((e, m)) } else { None };
        }
    }
    (gn < EQ_GRAD_TOL).then_some((e, m))
}

/// Locates all critical points of [`psi_total`] reachable by damped Newton
/// from a `seeds_per_axis^2` lattice over `search_box`; sorted by energy.
///
/// An empty list means no seed converged.
pub fn find_equilibria(
    params: &ModelParams,
    search_box: &SearchBox,
    seeds_per_axis: usize,
) -> Result<Vec<EquilibriumPoint>> {
    let SearchBox { eps: (e0, e1), m: (m0, m1) } = *search_box;
    if e1 <= e0 || m1 <= m0 || ![e0, e1, m0, m1].iter().all(|v| v.is_finite()) {
        return Err(Error::invalid("search_box", "must be a non-degenerate finite rectangle"));
    }
    if seeds_per_axis < 2 {
        return Err(Error::invalid("seeds_per_axis", "must be >= 2"));
    }
    let step = |lo: f64, hi: f64, k: usize| lo + (hi - lo) * k as f64 / (seeds_per_axis - 1) as f64;
    let mut roots: Vec<(f64, f64)> = Vec::new();
    for i in 0..seeds_per_axis {
        for j in 0..seeds_per_axis {
            let seed = (step(e0, e1, i), step(m0, m1, j));
            if let Some(r) = newton_critical_point(seed, params) {
                if roots
                    .iter()
                    .all(|q| (q.0 - r.0).hypot(q.1 - r.1) > EQ_DEDUP)
                {
                    roots.push(r);
                }
            }
        }
    }
    let mut points: Vec<EquilibriumPoint> = roots
        .into_iter()
        .map(|(eps, m)| EquilibriumPoint {
            eps,
            m,
            psi: psi_total(eps, m, params),
            kind: classify(eps, m, params),
        })
        .collect();
    points.sort_by(|a, b| a.psi.total_cmp(&b.psi));
    Ok(points)
}

/// The fluid-poor (lower `m`) and fluid-rich (higher `m`) minima, when the
/// landscape has at least two minima.
pub fn phase_minima(points: &[EquilibriumPoint]) -> Option<(EquilibriumPoint, EquilibriumPoint)> {
    let mut minima: Vec<EquilibriumPoint> = points
        .iter()
        .copied()
        .filter(|p| p.kind == CriticalKind::Minimum)
        .collect();
    if minima.len() < 2 {
        return None;
    }
    minima.sort_by(|a, b| a.m.total_cmp(&b.m));
    Some((minima[0], *minima.last().unwrap()))
}

/// Options for [`find_coexistence_pressure`].
#[derive(Debug, Clone, Copy)]
pub struct CoexistenceOptions {
    pub search_box: SearchBox,
    pub seeds_per_axis: usize,
    /// Number of pressures sampled across the bracket before bisection.
    pub scan_points: usize,
    /// Bisection stops once `|dPsi|` falls below this.
    pub energy_tol: f64,
}

impl Default for CoexistenceOptions {
    fn default() -> Self {
        Self {
            search_box: SearchBox::default(),
            seeds_per_axis: 16,
            scan_points: 21,
            energy_tol: 1e-13,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CoexistenceReport {
    pub pressure: f64,
    pub fluid_poor: EquilibriumPoint,
    pub fluid_rich: EquilibriumPoint,
    /// `psi(fluid_poor) - psi(fluid_rich)` at `pressure`.
    pub energy_gap: f64,
    /// Range of pressures inside the bracket with two minima. An end equal to
    /// the bracket end means the interval may extend beyond it.
    pub bistable_interval: (f64, f64),
    /// `(p, dPsi)` scan samples; `None` where the landscape is monostable.
    pub scan: Vec<(f64, Option<f64>)>,
    pub sign_changes: usize,
}

fn energy_gap_at(
    base: &ModelParams,
    p: f64,
    opts: &CoexistenceOptions,
) -> Result<Option<(f64, EquilibriumPoint, EquilibriumPoint)>> {
    let params = base.with_pressure(p);
    let points = find_equilibria(&params, &opts.search_box, opts.seeds_per_axis)?;
    Ok(phase_minima(&points).map(|(poor, rich)| (poor.psi - rich.psi, poor, rich)))
}

/// Pressure at which the two minima of `psi_total` have equal depth.
///
/// The bracket is scanned first; bisection runs between the bistable samples
/// where the energy difference changes sign.
pub fn find_coexistence_pressure(
    params: &ModelParams,
    bracket: (f64, f64),
    opts: &CoexistenceOptions,
) -> Result<CoexistenceReport> {
    let (lo, hi) = bracket;
    if hi <= lo || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid("bracket", "must satisfy lo < hi"));
    }
    if opts.scan_points < 2 {
        return Err(Error::invalid("scan_points", "must be >= 2"));
    }
    let n = opts.scan_points;
    let mut scan = Vec::with_capacity(n);
    for k in 0..n {
        let p = lo + (hi - lo) * k as f64 / (n - 1) as f64;
        scan.push((p, energy_gap_at(params, p, opts)?.map(|g| g.0)));
    }
    let bistable: Vec<(f64, f64)> = scan
        .iter()
        .filter_map(|&(p, g)| g.map(|g| (p, g)))
        .collect();
    if bistable.len() < 2 {
        return Err(Error::BracketInvalid { lo, hi });
    }

    let mut change = None;
    let mut sign_changes = 0;
    for w in bistable.windows(2) {
        if w[0].1 == 0.0 {
            change.get_or_insert((w[0].0, w[0].0));
        }
        if w[0].1 * w[1].1 < 0.0 {
            sign_changes += 1;
            change.get_or_insert((w[0].0, w[1].0));
        }
    }
    if bistable.last().unwrap().1 == 0.0 {
        let p = bistable.last().unwrap().0;
        change.get_or_insert((p, p));
    }
    let (mut a, mut b) = change.ok_or(Error::NoSignChange { lo, hi })?;

    let gap = |p: f64| -> Result<(f64, EquilibriumPoint, EquilibriumPoint)> {
        energy_gap_at(params, p, opts)?.ok_or(Error::BracketInvalid { lo: p, hi: p })
    };
    let (mut ga, _, _) = gap(a)?;
    let mut best = gap(a)?;
    let mut best_p = a;
    if a != b {
        let fb = gap(b)?;
        if fb.0.abs() < best.0.abs() {
            best = fb;
            best_p = b;
        }
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let gm = gap(mid)?;
            if gm.0.abs() < best.0.abs() {
                best = gm;
                best_p = mid;
            }
            if gm.0.abs() < opts.energy_tol {
                break;
            }
            if ga * gm.0 < 0.0 {
                b = mid;
            } else {
                a = mid;
                ga = gm.0;
            }
        }
    }

    let bistable_interval = bistability_interval(params, &scan, opts)?;
    Ok(CoexistenceReport {
        pressure: best_p,
        fluid_poor: best.1,
        fluid_rich: best.2,
        energy_gap: best.0,
        bistable_interval,
        scan,
        sign_changes,
    })
}

/// Refines the edges of the bistable part of the scan by bisection on the
/// number of minima.
fn bistability_interval(
    params: &ModelParams,
    scan: &[(f64, Option<f64>)],
    opts: &CoexistenceOptions,
) -> Result<(f64, f64)> {
    let first = scan.iter().position(|s| s.1.is_some()).unwrap_or(0);
    let last = scan.iter().rposition(|s| s.1.is_some()).unwrap_or(scan.len() - 1);
    let is_bistable = |p: f64| -> Result<bool> { Ok(energy_gap_at(params, p, opts)?.is_some()) };
    let refine = |mut mono: f64, mut bi: f64| -> Result<f64> {
        for _ in 0..40 {
            let mid = 0.5 * (mono + bi);
            if is_bistable(mid)? {
                bi = mid;
            } else {
                mono = mid;
            }
        }
        Ok(bi)
    };
    let lower = if first > 0 {
        refine(scan[first - 1].0, scan[first].0)?
    } else {
        scan[first].0
    };
    let upper = if last + 1 < scan.len() {
        refine(scan[last + 1].0, scan[last].0)?
    } else {
        scan[last].0
    };
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coex() -> ModelParams {
        ModelParams::coexistence()
    }

    #[test]
    fn biot_energy_vanishes_at_origin_and_is_stationary_at_minus_p() {
        let params = ModelParams { alpha: 0.0, p: 0.3, ..coex() };
        assert_eq!(psi_biot(0.0, 0.0, &params), 0.0);
        // m = b eps kills the coupling term, p + eps = 0 kills the linear term
        let g = grad_psi(-0.3, -0.3 * params.b, &params);
        assert!(g[0].abs() < 1e-15 && g[1].abs() < 1e-15);
    }

    #[test]
    fn biot_energy_matches_high_precision_value() {
        // 40-digit evaluation of the closed form
        let v = psi_biot(-0.1436, -0.1436, &coex());
        assert!((v - (-0.024470876)).abs() < 1e-15);
    }

    #[test]
    fn total_energy_matches_high_precision_value() {
        let params = coex().with_pressure(0.24);
        let v = psi_total(-0.15, -0.10, &params);
        assert!((v - (-0.020375)).abs() <= 1e-14 * 0.020375);
        assert_eq!(psi_total(0.0, 0.0, &params), 0.0);
        assert_eq!(psi_total(0.2, 0.0, &params), psi_biot(0.2, 0.0, &params));
    }

    #[test]
    fn reactions_at_origin() {
        let params = coex().with_pressure(0.24);
        assert_eq!(reaction_f1(0.0, 0.0, &params), -0.24);
        assert_eq!(reaction_f2(0.0, 0.0, &params), 0.0);
        assert_eq!(grad_psi(0.0, 0.0, &params), [0.24, 0.0]);
    }

    #[test]
    fn reactions_nearly_vanish_at_printed_phases() {
        let params = coex();
        for (e, m) in [(-0.1436, -0.1436), (-0.1598, -0.0427)] {
            assert!(reaction_f1(e, m, &params).abs() < 5e-3);
            assert!(reaction_f2(e, m, &params).abs() < 5e-3);
        }
    }

    #[test]
    fn quadratic_hessian_is_constant() {
        let params = ModelParams { alpha: 0.0, ..coex() };
        for (e, m) in [(0.0, 0.0), (0.3, -0.2)] {
            let h = hessian_psi(e, m, &params);
            assert_eq!(h, [[1.5, -0.5], [-0.5, 0.5]]);
        }
    }

    #[test]
    fn equilibria_of_quadratic_landscapes() {
        let base = ModelParams { alpha: 0.0, p: 0.0, ..coex() };
        let eq = find_equilibria(&base, &SearchBox::square(-1.0, 1.0), 16).unwrap();
        assert_eq!(eq.len(), 1);
        assert_eq!(eq[0].kind, CriticalKind::Minimum);
        assert!(eq[0].eps.abs() < 1e-12 && eq[0].m.abs() < 1e-12);

        let loaded = base.with_pressure(0.24);
        let eq = find_equilibria(&loaded, &SearchBox::square(-1.0, 1.0), 16).unwrap();
        assert_eq!(eq.len(), 1);
        assert!((eq[0].eps + 0.24).abs() < 1e-12 && (eq[0].m + 0.24).abs() < 1e-12);
    }

    #[test]
    fn double_well_has_two_minima_and_a_saddle() {
        let eq = find_equilibria(&coex(), &SearchBox::default(), 16).unwrap();
        let minima: Vec<_> = eq.iter().filter(|p| p.kind == CriticalKind::Minimum).collect();
        let saddles: Vec<_> = eq.iter().filter(|p| p.kind == CriticalKind::Saddle).collect();
        assert_eq!(minima.len(), 2);
        assert_eq!(saddles.len(), 1);
        let (poor, rich) = phase_minima(&eq).unwrap();
        assert!((poor.eps + 0.1436).abs() < 5e-3 && (poor.m + 0.1436).abs() < 5e-3);
        assert!((rich.eps + 0.1598).abs() < 5e-3 && (rich.m + 0.0427).abs() < 5e-3);
        // f2 vanishes on m = b eps for b = 1, so the fluid-poor phase sits on it exactly
        assert!((poor.eps - poor.m).abs() < 1e-12);
        let h = hessian_psi(saddles[0].eps, saddles[0].m, &coex());
        assert!(h[0][0] * h[1][1] - h[0][1] * h[1][0] < 0.0);
    }

    #[test]
    fn degenerate_search_box_is_rejected() {
        let b = SearchBox { eps: (0.0, 0.0), m: (0.0, 1.0) };
        assert!(find_equilibria(&coex(), &b, 16).is_err());
        assert!(find_equilibria(&coex(), &SearchBox::default(), 1).is_err());
    }

    #[test]
    fn coexistence_pressure_matches_equal_depth() {
        let report =
            find_coexistence_pressure(&coex(), (0.20, 0.30), &CoexistenceOptions::default()).unwrap();
        assert!((report.pressure - 0.24221).abs() < 1e-3, "{}", report.pressure);
        assert!(report.energy_gap.abs() < 1e-10);
        assert_eq!(report.sign_changes, 1);
        assert!(report.bistable_interval.0 > 0.20 && report.bistable_interval.0 < report.pressure);
    }

    #[test]
    fn coexistence_errors() {
        let opts = CoexistenceOptions::default();
        // monostable everywhere
        assert!(matches!(
            find_coexistence_pressure(&coex(), (0.10, 0.15), &opts),
            Err(Error::BracketInvalid { .. })
        ));
        // bistable but the fluid-rich phase stays deeper
        assert!(matches!(
            find_coexistence_pressure(&coex(), (0.25, 0.30), &opts),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn uniqueness_flag_and_validation() {
        let p = coex();
        assert!(!p.uniqueness_regime());
        assert!(p.with_k2(0.2e-3).uniqueness_regime());
        assert!(p.validate().is_ok());
        assert!(p.with_k2(2e-3).validate().is_err());
        assert!(ModelParams { a: 0.0, ..p }.validate().is_err());
        assert!(ModelParams { m_eps: 0.0, ..p }.validate().is_err());
    }
}
