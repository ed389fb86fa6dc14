use std::sync::Arc;

use radialmp_core::exponents::ProblemParams;
use radialmp_core::functional::Nonlinearity;
use radialmp_core::grid::{Grading, RadialGrid};
use radialmp_core::potentials::{End, PotentialSpec};
use radialmp_core::probes::{Prober, ProbeSettings};
use radialmp_core::sampling::{self, BumpWindow};
use radialmp_core::solver::{solve, Problem, SolveConfig};

fn ex2(m: usize, nl: Nonlinearity, v_scale: f64) -> Problem {
    Problem {
        grid: Arc::new(RadialGrid::build(6, 1e-6, 1e3, m, Grading::Geometric).unwrap()),
        a: PotentialSpec::max_power(1.0, -2.0, 1.0, -3.0),
        v: PotentialSpec::pure_power(v_scale, -4.0),
        k: PotentialSpec::min_power(1.0, 0.0, 1.0, -2.0),
        nl,
        params: Some(ProblemParams {
            n: 6,
            a0: -3.0,
            ainf: -2.0,
            alpha0: 0.0,
            alphainf: -2.0,
            beta0: 0.0,
            betainf: 0.0,
            s: None,
        }),
    }
}

#[test]
fn converged_solution_satisfies_weak_form() {
    let p = ex2(800, Nonlinearity::MinPower { q1: 3.0, q2: 5.0 }, 1.0);
    let cfg = SolveConfig { restarts: 2, seed: 5, ..Default::default() };
    let r = solve(&p, &cfg).unwrap();
    assert!(r.converged);
    assert!(r.warnings.is_empty(), "{:?}", r.warnings);
    let fun = p.functional().unwrap();
    let u = r.u.values();
    let nu = fun.norm_x(u);
    let mut rng = sampling::rng(77);
    for _ in 0..50 {
        let h = sampling::random_bumps(&p.grid, BumpWindow::decades(1e-3, 1e2), true, &mut rng);
        let d = fun.derivative(u, &h).abs();
        assert!(d <= 2.0 * cfg.residual_tol * nu * fun.norm_x(&h));
    }
    assert!(r.min_before_clamp >= -1e-12 * r.u.max_abs());
    // I = \int K (f(u)u/2 - F(u)) >= (1/2 - 1/theta) \int K f(u) u
    let theta = 3.0;
    let fu: f64 = u.iter().zip(fun.k_weights()).map(|(x, w)| w * p.nl.f(*x) * x).sum();
    assert!(r.energy.total >= (0.5 - 1.0 / theta) * fu * (1.0 - 1e-6));
}

#[test]
fn larger_potential_raises_the_level() {
    let cfg = SolveConfig { restarts: 2, seed: 1, ..Default::default() };
    let base = solve(&ex2(800, Nonlinearity::PurePower { q: 5.0 }, 1.0), &cfg).unwrap();
    let heavy = solve(&ex2(800, Nonlinearity::PurePower { q: 5.0 }, 4.0), &cfg).unwrap();
    assert!(base.converged && heavy.converged);
    assert!(heavy.energy.total > base.energy.total);
}

#[test]
fn outside_intervals_only_warns() {
    // q1 = 13 lies beyond q*_0 = 12
    let p = ex2(400, Nonlinearity::MinPower { q1: 13.0, q2: 5.0 }, 1.0);
    let cfg = SolveConfig { restarts: 1, max_iter: 50, ..Default::default() };
    let r = solve(&p, &cfg).unwrap();
    assert!(r.warnings.iter().any(|w| w.contains("I1")));
}

#[test]
fn random_functions_are_not_critical() {
    let p = ex2(300, Nonlinearity::MinPower { q1: 3.0, q2: 5.0 }, 1.0);
    let fun = p.functional().unwrap();
    let mut rng = sampling::rng(3);
    for _ in 0..10 {
        let u = sampling::random_bumps(&p.grid, BumpWindow::decades(1e-2, 1e1), false, &mut rng);
        assert!(fun.ps_residual(&u).unwrap() > 0.0);
    }
    assert_eq!(fun.ps_residual(&vec![0.0; p.grid.len()]).unwrap(), 0.0);
}

#[test]
fn probe_restart_stability_and_witness() {
    let p = ex2(800, Nonlinearity::PurePower { q: 8.0 }, 1.0);
    let fun = p.functional().unwrap();
    let prober = Prober::new(fun.operator());
    let few = ProbeSettings { restarts: 4, ..Default::default() };
    let many = ProbeSettings { restarts: 8, ..Default::default() };
    let a = prober.estimate(End::Zero, 8.0, 1e-2, &few).unwrap();
    let b = prober.estimate(End::Zero, 8.0, 1e-2, &many).unwrap();
    assert!(b.value >= a.value);
    assert!((b.value - a.value) / b.value < 0.02);

    // q1 = 8 in I1, q2 = 8 in I2: finite estimates at R1 < R2 that persist under refinement
    let fine = ex2(1600, Nonlinearity::PurePower { q: 8.0 }, 1.0).functional().unwrap();
    let pf = Prober::new(fine.operator());
    for (end, r) in [(End::Zero, 1e-2), (End::Infinity, 10.0)] {
        let c = prober.estimate(end, 8.0, r, &few).unwrap();
        let f = pf.estimate(end, 8.0, r, &few).unwrap();
        assert!(c.converged && f.converged);
        assert!(c.value.is_finite() && c.value > 0.0);
        assert!((f.value - c.value).abs() / c.value < 0.1, "{end:?}: {} vs {}", c.value, f.value);
    }
}
