use std::sync::Arc;

use radialmp_core::functional::{EnergyFunctional, Nonlinearity};
use radialmp_core::grid::{Grading, RadialGrid};
use radialmp_core::potentials::PotentialSpec;
use radialmp_core::sampling::{self, BumpWindow};
use radialmp_core::spaces::RadialOperator;

fn ex2_functional(m: usize, nl: Nonlinearity) -> EnergyFunctional {
    let grid = Arc::new(RadialGrid::build(6, 1e-6, 1e3, m, Grading::Geometric).unwrap());
    let op = RadialOperator::new(
        grid,
        &PotentialSpec::max_power(1.0, -2.0, 1.0, -3.0),
        &PotentialSpec::pure_power(1.0, -4.0),
        &PotentialSpec::min_power(1.0, 0.0, 1.0, -2.0),
    )
    .unwrap();
    EnergyFunctional::new(op, nl)
}

fn random(fun: &EnergyFunctional, seed: u64, signed: bool) -> Vec<f64> {
    let mut rng = sampling::rng(seed);
    let mut win = BumpWindow::decades(1e-1, 1e1);
    win.max_width = 1.0;
    sampling::random_bumps(fun.operator().grid(), win, signed, &mut rng)
}

#[test]
fn central_differences_match_derivative() {
    let fun = ex2_functional(500, Nonlinearity::MinPower { q1: 3.0, q2: 5.0 });
    let eps = 1e-5;
    for seed in 0..50u64 {
        let u = random(&fun, 2 * seed, true);
        let h = random(&fun, 2 * seed + 1, true);
        let plus: Vec<f64> = u.iter().zip(&h).map(|(a, b)| a + eps * b).collect();
        let minus: Vec<f64> = u.iter().zip(&h).map(|(a, b)| a - eps * b).collect();
        let fd = (fun.energy(&plus).total - fun.energy(&minus).total) / (2.0 * eps);
        let d = fun.derivative(&u, &h);
        assert!((d - fd).abs() / (1.0 + d.abs()) < 1e-6, "seed {seed}: {d} vs {fd}");
    }
}

#[test]
fn riesz_identity_on_test_functions() {
    let fun = ex2_functional(400, Nonlinearity::MinPower { q1: 3.0, q2: 5.0 });
    let u = random(&fun, 99, false);
    let g = fun.x_gradient(&u).unwrap();
    for seed in 0..20u64 {
        let h = random(&fun, 1000 + seed, true);
        let lhs = fun.operator().inner(&g, &h);
        let rhs = fun.derivative(&u, &h);
        let scale = fun.norm_x(&g) * fun.norm_x(&h);
        assert!((lhs - rhs).abs() <= 1e-8 * scale, "{lhs} vs {rhs}");
    }
}

#[test]
fn ambrosetti_rabinowitz_discrete() {
    for (q1, q2) in [(3.0, 5.0), (3.0, 13.0), (7.0, 2.5)] {
        let nl = Nonlinearity::MinPower { q1, q2 };
        let theta = f64::min(q1, q2);
        let fun = ex2_functional(300, nl.clone());
        for seed in 0..20u64 {
            let u: Vec<f64> = random(&fun, seed, false).iter().map(|x| x * (1.0 + seed as f64)).collect();
            let lhs = theta * fun.potential(&u);
            let rhs: f64 = u.iter().zip(fun.k_weights()).map(|(x, w)| w * nl.f(*x) * x).sum();
            assert!(lhs <= rhs * (1.0 + 1e-12));
        }
    }
}

#[test]
fn nehari_points_energy_identity_and_ray_maximum() {
    let nl = Nonlinearity::MinPower { q1: 3.0, q2: 5.0 };
    let fun = ex2_functional(400, nl.clone());
    for seed in 0..10u64 {
        let u = random(&fun, seed, false);
        let lam = fun.nehari_scale(&u).unwrap();
        let w: Vec<f64> = u.iter().map(|x| lam * x).collect();
        assert!(fun.derivative(&w, &w).abs() <= 1e-10 * fun.operator().norm_x2(&w));
        let e = fun.energy(&w).total;
        let identity: f64 = w
            .iter()
            .zip(fun.k_weights())
            .map(|(x, k)| k * (0.5 * nl.f(*x) * x - nl.big_f(*x)))
            .sum();
        assert!((e - identity).abs() <= 1e-9 * e.abs());
        assert!(e >= 0.0);
        for i in 1..=100 {
            let s = 2.0 * lam * i as f64 / 100.0;
            let us: Vec<f64> = u.iter().map(|x| s * x).collect();
            assert!(fun.energy(&us).total <= e * (1.0 + 1e-12));
        }
    }
}

#[test]
fn energy_refinement() {
    let nl = Nonlinearity::MinPower { q1: 3.0, q2: 5.0 };
    let coarse = ex2_functional(4000, nl.clone());
    let fine = ex2_functional(7999, nl);
    // a smooth function sampled on both grids
    let f = |r: f64| (-(r.ln() - 0.2).powi(2)).exp() * (1.0 - r / 1e3);
    let uc: Vec<f64> = coarse.operator().grid().nodes().iter().map(|&r| f(r)).collect();
    let uf: Vec<f64> = fine.operator().grid().nodes().iter().map(|&r| f(r)).collect();
    let (ec, ef) = (coarse.energy(&uc).total, fine.energy(&uf).total);
    assert!(((ec - ef) / ef).abs() < 1e-4, "{ec} vs {ef}");
}
