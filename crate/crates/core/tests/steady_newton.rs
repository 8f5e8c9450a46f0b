use consolidation::grid::Grid1D;
use consolidation::potential::ModelParams;
use consolidation::steady::*;
use consolidation::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fig1(n: usize) -> StationaryProblem {
    let params = ModelParams::coexistence().with_pressure(0.24);
    StationaryProblem::new(Grid1D::new(0.0, 1.0, n).unwrap(), params, -0.141, -0.13).unwrap()
}

/// Stencil-by-stencil transliteration of the interior residual.
fn residual_oracle(p: &StationaryProblem, x: &[f64], i: usize) -> (f64, f64) {
    let s2 = p.grid.h().powi(2);
    let n = p.grid.n();
    let at = |k: usize| (x[2 * k], x[2 * k + 1]);
    let (e, m) = at(i);
    let (el, ml) = at(i - 1);
    let (er, mr) = if i == n { (el, ml) } else { at(i + 1) };
    let le = (el - 2.0 * e + er) / s2;
    let lm = (ml - 2.0 * m + mr) / s2;
    let q = &p.params;
    let f1 = -(q.p + e - q.a * (m - q.b * e) * q.b + q.alpha / 12.0 * m * m * (-8.0 * q.b * m + 12.0 * q.b * q.b * e));
    let f2 = -(q.a * (m - q.b * e) + q.alpha / 12.0 * (12.0 * m.powi(3) - 24.0 * q.b * e * m * m + 12.0 * q.b * q.b * e * e * m));
    (-q.k1 * le - q.k2 * lm - f1, -q.k2 * le - q.k3 * lm - f2)
}

#[test]
fn residual_matches_transliteration() {
    let p = fig1(25);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let x: Vec<f64> = (0..p.unknowns()).map(|_| rng.random_range(-0.2..0.0)).collect();
    let r = p.residual(&x).unwrap();
    for i in 1..=25 {
        let (re, rm) = residual_oracle(&p, &x, i);
        assert!((r[2 * i] - re).abs() < 1e-9 * re.abs().max(1.0));
        assert!((r[2 * i + 1] - rm).abs() < 1e-9 * rm.abs().max(1.0));
    }
}

#[test]
fn analytic_jacobian_matches_differences_at_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for k in 0..20 {
        let mut p = fig1(30);
        if k % 2 == 1 {
            p = p.with_right_values(-0.16, -0.04).unwrap();
        }
        let x: Vec<f64> = (0..p.unknowns()).map(|_| rng.random_range(-0.25..0.05)).collect();
        assert!(p.jacobian_fd_error(&x).unwrap() < 1e-5);
    }
}

#[test]
fn newton_converges_quadratically_from_a_nearby_guess() {
    let p = fig1(200);
    let guess = make_initial_guess(&p, "fluid-poor", &NewtonConfig::default()).unwrap();
    let sol = newton_solve(&p, &guess, &NewtonConfig { damping: "none".into(), ..Default::default() }).unwrap();
    let r = &sol.report.residual_norms;
    assert!(*r.last().unwrap() < 1e-10);
    assert!(sol.report.iterations() <= 8, "{r:?}");
    let k = r.len() - 2;
    assert!(r[k + 1] < 10.0 * r[k] * r[k].max(1e-3));
}

#[test]
fn damping_strategies_reach_the_same_solution() {
    let p = fig1(100);
    let guess = make_initial_guess(&p, "fluid-poor", &NewtonConfig::default()).unwrap();
    let reg = damping_registry();
    let sols: Vec<_> = reg
        .names()
        .map(|name| newton_solve(&p, &guess, &NewtonConfig { damping: name.into(), max_iters: 2000, ..Default::default() }).unwrap())
        .collect();
    for s in &sols[1..] {
        let d = s.x.iter().zip(&sols[0].x).fold(0.0f64, |a, (u, v)| a.max((u - v).abs()));
        assert!(d < 1e-9);
    }
}

#[test]
fn continuation_is_order_independent() {
    let p = fig1(100);
    let guess = make_initial_guess(&p, "fluid-poor", &NewtonConfig::default()).unwrap();
    let cfg = NewtonConfig::default();
    let up = continuation_in_k2(&p, &[0.2e-3, 0.5e-3, 0.8e-3], &guess, &cfg).unwrap();
    let down = continuation_in_k2(&p, &[0.8e-3, 0.5e-3, 0.2e-3], &guess, &cfg).unwrap();
    for (a, b) in up.iter().zip(down.iter().rev()) {
        let d = a.x.iter().zip(&b.x).fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
        assert!(d < 1e-8);
    }
}

#[test]
fn continuation_reports_the_failing_value() {
    let p = fig1(20);
    let guess = vec![-0.14; p.unknowns()];
    let err = continuation_in_k2(&p, &[0.5e-3, 2e-3], &guess, &NewtonConfig::default()).unwrap_err();
    assert!(matches!(err, Error::Continuation { k2, .. } if k2 == 2e-3));
}

#[test]
fn fluid_poor_solution_has_no_interface() {
    let p = fig1(400);
    let cfg = NewtonConfig::pseudo_transient();
    let guess = make_initial_guess(&p, "fluid-poor", &cfg).unwrap();
    let sol = newton_solve(&p, &guess, &cfg).unwrap();
    let (poor, _) = phases(&p.params).unwrap();
    assert!((sol.m().last().unwrap() - poor.m).abs() < 0.01);
    assert!(sol.m().iter().all(|&m| m < -0.12));
    assert!(sol.to_csv().starts_with("x,eps,m\n"));
}
