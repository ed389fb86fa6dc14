//! Nehari-constrained descent for a nonnegative nontrivial critical point of `I`,
//! with the mountain-pass diagnostics (floor on small spheres, escape direction).

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exponents::{ExponentReport, ProblemParams};
use crate::functional::{check_f_hypotheses, EnergyBreakdown, EnergyFunctional, Nonlinearity};
use crate::grid::RadialGrid;
use crate::math;
use crate::potentials::PotentialSpec;
use crate::sampling::{self, BumpWindow, SampleRng};
use crate::spaces::{DiscreteRadialFunction, RadialOperator};

/// Grid, coefficients and nonlinearity of one problem instance.
#[derive(Debug, Clone)]
pub struct Problem {
    pub grid: Arc<RadialGrid>,
    pub a: PotentialSpec,
    pub v: PotentialSpec,
    pub k: PotentialSpec,
    pub nl: Nonlinearity,
    /// Exponent data used only to warn when `(q1, q2)` leaves the admissible intervals.
    pub params: Option<ProblemParams<f64>>,
}

impl Problem {
    pub fn functional(&self) -> Result<EnergyFunctional> {
        self.nl.validate().or_else(|e| if self.nl.is_zero() { Ok(()) } else { Err(e) })?;
        let op = RadialOperator::new(self.grid.clone(), &self.a, &self.v, &self.k)?;
        Ok(EnergyFunctional::new(op, self.nl.clone()))
    }

    /// Same problem on another grid.
    pub fn regrid(&self, grid: Arc<RadialGrid>) -> Self {
        Self { grid, ..self.clone() }
    }

    /// Warnings for exponents outside `I1` and `I2`.
    pub fn interval_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let (Some(p), Some((q1, q2))) = (&self.params, self.nl.exponents()) else {
            return out;
        };
        match ExponentReport::compute(p) {
            Ok(rep) => {
                if !rep.i1.contains(&q1) {
                    out.push(format!("q1 = {q1} lies outside I1; existence is not guaranteed"));
                }
                if !rep.i2.contains(&q2) {
                    out.push(format!("q2 = {q2} lies outside I2; existence is not guaranteed"));
                }
            }
            Err(e) => out.push(format!("exponent report unavailable: {e}")),
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(default))]
pub struct SolveConfig {
    pub max_iter: usize,
    /// Relative to `||u||_X`.
    pub residual_tol: f64,
    pub shrink: f64,
    pub sufficient_decrease: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Random points on the sphere `||u||_X = rho` used for `alpha_mp`.
    pub geometry_samples: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            residual_tol: 1e-6,
            shrink: 0.5,
            sufficient_decrease: 1e-4,
            restarts: 5,
            seed: 0,
            geometry_samples: 100,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.residual_tol > 0.0
            && self.shrink > 0.0
            && self.shrink < 1.0
            && self.sufficient_decrease > 0.0
            && self.sufficient_decrease < 1.0
            && self.restarts >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter("solver tolerances must be positive, shrink in (0,1), restarts >= 1".into()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeometryWitness {
    pub rho: f64,
    pub alpha_mp: f64,
    pub escape_lambda: Option<f64>,
}

/// Outcome of one descent run.
#[derive(Debug, Clone)]
pub struct RestartOutcome {
    pub u: Vec<f64>,
    pub energy: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub u: DiscreteRadialFunction,
    pub energy: EnergyBreakdown,
    pub residual: f64,
    pub nehari_defect: f64,
    pub iterations: usize,
    pub geometry: GeometryWitness,
    pub converged: bool,
    /// Set when the run converged to `u = 0` (only possible for `f = 0`).
    pub trivial: bool,
    /// Smallest nodal value before clamping.
    pub min_before_clamp: f64,
    pub restart_energies: Vec<f64>,
    pub restart_converged: Vec<bool>,
    pub warnings: Vec<String>,
}

/// The bump `psi` of the escape argument and the first `lambda` on the doubling ladder with `I(lambda psi) < 0`.
#[derive(Debug, Clone)]
pub struct EscapeDirection {
    pub psi: Vec<f64>,
    pub delta: f64,
    pub lambda: f64,
    pub energy: f64,
    /// `||lambda psi||_X`.
    pub norm: f64,
}

fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

/// C^1 piecewise cubic: 1 on `[d, 1/d]`, 0 outside `(d/2, 1 + 1/d)`.
pub fn escape_bump(r: f64, delta: f64) -> f64 {
    let inv = 1.0 / delta;
    if r <= 0.5 * delta || r >= 1.0 + inv {
        0.0
    } else if r < delta {
        smoothstep((r - 0.5 * delta) / (0.5 * delta))
    } else if r <= inv {
        1.0
    } else {
        smoothstep(1.0 + inv - r)
    }
}

/// Finds `delta` with `|{r in (delta, 1/delta) : K(r) > delta}| > delta` by sampling.
fn find_delta(k: &PotentialSpec) -> Option<f64> {
    const SAMPLES: usize = 2000;
    let mut delta = 0.5;
    for _ in 0..40 {
        let (lo, hi) = (math::ln(delta), -math::ln(delta));
        let step = (hi - lo) / SAMPLES as f64;
        let mut measure = 0.0;
        for i in 0..SAMPLES {
            let a = math::exp(lo + i as f64 * step);
            let b = math::exp(lo + (i + 1) as f64 * step);
            let mid = math::exp(lo + (i as f64 + 0.5) * step);
            if k.eval(mid).map(|x| x > delta).unwrap_or(false) {
                measure += b - a;
            }
        }
        if measure > delta {
            return Some(delta);
        }
        delta *= 0.5;
    }
    None
}

pub fn build_escape_direction(k: &PotentialSpec, fun: &EnergyFunctional) -> Result<EscapeDirection> {
    let grid = fun.operator().grid().clone();
    let delta = find_delta(k).ok_or_else(|| Error::Support("K does not exceed any delta on (delta, 1/delta)".into()))?;
    if 0.5 * delta < grid.r_min() || 1.0 + 1.0 / delta > grid.r_max() {
        return Err(Error::Support(format!(
            "escape bump support ({}, {}) leaves the grid [{}, {}]",
            0.5 * delta,
            1.0 + 1.0 / delta,
            grid.r_min(),
            grid.r_max()
        )));
    }
    let psi: Vec<f64> = grid.nodes().iter().map(|&r| escape_bump(r, delta)).collect();
    let t0 = check_f_hypotheses(fun.nonlinearity()).t0.unwrap_or(1e-6);
    let mut lambda = t0;
    for _ in 0..=60 {
        let w: Vec<f64> = psi.iter().map(|x| lambda * x).collect();
        let energy = fun.energy(&w).total;
        if energy < 0.0 {
            let norm = fun.norm_x(&w);
            return Ok(EscapeDirection {
                psi,
                delta,
                lambda,
                energy,
                norm,
            });
        }
        lambda *= 2.0;
    }
    Err(Error::EscapeFailed(60))
}

/// Dual norm of `I'(u)`.
pub fn ps_residual(fun: &EnergyFunctional, u: &[f64]) -> Result<f64> {
    fun.ps_residual(u)
}

/// The sampling window for random initial data and test directions.
fn bump_window(grid: &RadialGrid) -> BumpWindow {
    let lo = (grid.r_min() * 10.0).max(1e-3);
    let hi = (grid.r_max() / 10.0).min(1e2);
    if lo < hi {
        BumpWindow::decades(lo, hi)
    } else {
        BumpWindow::decades(grid.r_min(), grid.r_max())
    }
}

pub struct Solver<'a> {
    problem: &'a Problem,
    config: SolveConfig,
    fun: EnergyFunctional,
    escape: Option<EscapeDirection>,
}

impl<'a> Solver<'a> {
    pub fn new(problem: &'a Problem, config: &SolveConfig) -> Result<Self> {
        config.validate()?;
        let fun = problem.functional()?;
        let escape = if problem.nl.is_zero() {
            None
        } else {
            build_escape_direction(&problem.k, &fun).ok()
        };
        Ok(Self {
            problem,
            config: config.clone(),
            fun,
            escape,
        })
    }

    pub fn functional(&self) -> &EnergyFunctional {
        &self.fun
    }

    pub fn escape(&self) -> Option<&EscapeDirection> {
        self.escape.as_ref()
    }

    fn initial(&self, rng: &mut SampleRng) -> Vec<f64> {
        let grid = self.fun.operator().grid();
        let win = bump_window(grid);
        let modulation = sampling::random_bumps(grid, win, false, rng);
        let extra = sampling::random_bumps(grid, win, false, rng);
        match &self.escape {
            Some(e) => e
                .psi
                .iter()
                .zip(&modulation)
                .zip(&extra)
                .map(|((p, m), x)| p * (0.5 + m) + 0.5 * x)
                .collect(),
            None => modulation.iter().zip(&extra).map(|(m, x)| m + x).collect(),
        }
    }

    /// Runs restart `k` from its seeded initial guess.
    pub fn run_restart(&self, k: usize) -> RestartOutcome {
        let mut rng = sampling::stream(self.config.seed, k as u64);
        for _ in 0..5 {
            let u0 = self.initial(&mut rng);
            match self.descend(u0) {
                Ok(out) => return out,
                Err(_) => continue,
            }
        }
        RestartOutcome {
            u: alloc::vec![0.0; self.fun.operator().grid().len()],
            energy: f64::INFINITY,
            residual: f64::INFINITY,
            iterations: 0,
            converged: false,
        }
    }

    /// Nehari descent from `u0`; errors only when `u0` has no Nehari scale.
    pub fn descend(&self, mut u: Vec<f64>) -> Result<RestartOutcome> {
        if let Some(last) = u.last_mut() {
            *last = 0.0;
        }
        if self.problem.nl.is_zero() {
            return self.descend_quadratic(u);
        }
        let fun = &self.fun;
        let lam = fun.nehari_scale(&u)?;
        u.iter_mut().for_each(|x| *x *= lam);
        let mut energy = fun.energy(&u).total;
        let mut step: f64 = 1.0;
        let mut residual = f64::INFINITY;
        let mut iterations = 0;
        let mut converged = false;
        let mut trial = alloc::vec![0.0; u.len()];
        while iterations < self.config.max_iter {
            let g = fun.x_gradient(&u)?;
            let g2 = fun.operator().norm_x2(&g);
            let u2 = fun.operator().norm_x2(&u);
            residual = math::sqrt(g2 / u2);
            if residual <= self.config.residual_tol {
                converged = true;
                break;
            }
            iterations += 1;
            let mut s = (2.0 * step).min(1.0);
            let mut accepted = false;
            while s > 1e-14 {
                for ((t, &x), &d) in trial.iter_mut().zip(&u).zip(&g) {
                    *t = x - s * d;
                }
                if let Ok(l) = fun.nehari_scale(&trial) {
                    trial.iter_mut().for_each(|x| *x *= l);
                    let e = fun.energy(&trial).total;
                    let slack = 8.0 * f64::EPSILON * libm::fabs(energy);
                    if e <= energy - self.config.sufficient_decrease * s * g2 + slack {
                        core::mem::swap(&mut u, &mut trial);
                        energy = e;
                        step = s;
                        accepted = true;
                        break;
                    }
                }
                s *= self.config.shrink;
            }
            if !accepted {
                break;
            }
        }
        if !converged {
            residual = fun.ps_residual(&u)? / fun.norm_x(&u);
            converged = residual <= self.config.residual_tol;
        }
        Ok(RestartOutcome {
            u,
            energy,
            residual,
            iterations,
            converged,
        })
    }

    /// Plain X-gradient descent for `f = 0`; the minimizer is `u = 0`.
    fn descend_quadratic(&self, mut u: Vec<f64>) -> Result<RestartOutcome> {
        let fun = &self.fun;
        let scale = fun.norm_x(&u).max(f64::MIN_POSITIVE);
        let mut iterations = 0;
        let mut residual = fun.ps_residual(&u)? / scale;
        while residual > self.config.residual_tol && iterations < self.config.max_iter {
            let g = fun.x_gradient(&u)?;
            u.iter_mut().zip(&g).for_each(|(x, d)| *x -= d);
            iterations += 1;
            residual = fun.ps_residual(&u)? / scale;
        }
        Ok(RestartOutcome {
            energy: fun.energy(&u).total,
            u,
            residual,
            iterations,
            converged: residual <= self.config.residual_tol,
        })
    }

    /// Picks the best restart, clamps, re-verifies and attaches diagnostics.
    pub fn finish(&self, outcomes: Vec<RestartOutcome>) -> Result<SolveResult> {
        let fun = &self.fun;
        let restart_energies: Vec<f64> = outcomes.iter().map(|o| o.energy).collect();
        let restart_converged: Vec<bool> = outcomes.iter().map(|o| o.converged).collect();
        let trivial_mode = self.problem.nl.is_zero();
        let best = outcomes
            .into_iter()
            .enumerate()
            .min_by(|(i, a), (j, b)| {
                let key = |o: &RestartOutcome| {
                    let positive = trivial_mode || o.energy > 0.0;
                    (!(o.converged && positive), o.energy)
                };
                let (ka, kb) = (key(a), key(b));
                ka.0.cmp(&kb.0)
                    .then(ka.1.partial_cmp(&kb.1).unwrap_or(core::cmp::Ordering::Equal))
                    .then(i.cmp(j))
            })
            .map(|(_, o)| o)
            .ok_or_else(|| Error::Parameter("no restarts".into()))?;

        let mut u = best.u;
        let max_abs = u.iter().fold(0.0f64, |m, x| m.max(libm::fabs(*x)));
        let min_before_clamp = u.iter().cloned().fold(f64::INFINITY, f64::min);
        u.iter_mut().for_each(|x| {
            if *x < 0.0 {
                *x = 0.0
            }
        });
        let norm = fun.norm_x(&u);
        let residual = if norm > 0.0 { fun.ps_residual(&u)? / norm } else { fun.ps_residual(&u)? };
        let nehari_defect = fun.nehari_defect(&u);
        let energy = fun.energy(&u);
        let trivial = norm == 0.0;
        let nonneg = min_before_clamp >= -1e-12 * max_abs;
        let converged = best.converged
            && residual <= self.config.residual_tol
            && ((nonneg && norm > 0.0) || (trivial_mode && trivial));

        let geometry = self.witness(norm);
        let mut warnings = self.problem.interval_warnings();
        if !nonneg {
            warnings.push(format!("negative nodal value {min_before_clamp:e} clamped"));
        }
        Ok(SolveResult {
            u: DiscreteRadialFunction::new(fun.operator().grid().clone(), u)?,
            energy,
            residual,
            nehari_defect,
            iterations: best.iterations,
            geometry,
            converged,
            trivial,
            min_before_clamp,
            restart_energies,
            restart_converged,
            warnings,
        })
    }

    fn witness(&self, norm: f64) -> GeometryWitness {
        let rho = norm / 10.0;
        let mut alpha = f64::INFINITY;
        if rho > 0.0 {
            let grid = self.fun.operator().grid();
            let win = bump_window(grid);
            let mut rng = sampling::stream(self.config.seed, u64::MAX - 1);
            for _ in 0..self.config.geometry_samples {
                let mut d = sampling::random_bumps(grid, win, true, &mut rng);
                let n = self.fun.norm_x(&d);
                if n == 0.0 {
                    continue;
                }
                d.iter_mut().for_each(|x| *x *= rho / n);
                alpha = alpha.min(self.fun.energy(&d).total);
            }
        }
        GeometryWitness {
            rho,
            alpha_mp: if alpha.is_finite() { alpha } else { 0.0 },
            escape_lambda: self.escape.as_ref().map(|e| e.lambda),
        }
    }
}

/// Best of `config.restarts` seeded Nehari descents.
pub fn solve(problem: &Problem, config: &SolveConfig) -> Result<SolveResult> {
    let solver = Solver::new(problem, config)?;
    let outcomes = (0..config.restarts).map(|k| solver.run_restart(k)).collect();
    solver.finish(outcomes)
}

/// Single descent from a given initial function, e.g. an interpolated coarse solution.
pub fn solve_with_initial(problem: &Problem, config: &SolveConfig, u0: &[f64]) -> Result<SolveResult> {
    let solver = Solver::new(problem, config)?;
    if u0.len() != problem.grid.len() {
        return Err(Error::GridMismatch);
    }
    let outcome = match solver.descend(u0.to_vec()) {
        Ok(o) => o,
        Err(_) => solver.run_restart(0),
    };
    solver.finish(alloc::vec![outcome])
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(default))]
pub struct GeometryConfig {
    pub rho_min: f64,
    pub rho_max: f64,
    pub per_decade: usize,
    pub directions: usize,
    pub seed: u64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            rho_min: 1e-3,
            rho_max: 1.0,
            per_decade: 4,
            directions: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeometryReport {
    pub rhos: Vec<f64>,
    pub floors: Vec<f64>,
    pub c3: f64,
    pub c4: f64,
    /// `floor >= rho^2/2 - c3 rho^q1 - c4 rho^q2` on the whole ladder.
    pub bound_holds: bool,
    pub rho_positive: Option<f64>,
    pub alpha_positive: Option<f64>,
    pub escape_lambda: Option<f64>,
    pub escape_energy: Option<f64>,
    pub escape_norm: Option<f64>,
    pub escape_negative: bool,
    pub escape_beyond_rho: bool,
    pub passed: bool,
    pub messages: Vec<String>,
}

/// Nonnegative least squares in relative error for `d ~ c3 x + c4 y`.
fn fit_two_terms(d: &[f64], x: &[f64], y: &[f64]) -> (f64, f64) {
    let rows: Vec<(f64, f64)> = d
        .iter()
        .zip(x.iter().zip(y))
        .filter(|(di, _)| **di > 0.0)
        .map(|(di, (xi, yi))| (xi / di, yi / di))
        .collect();
    if rows.is_empty() {
        return (0.0, 0.0);
    }
    let cost = |c3: f64, c4: f64| rows.iter().map(|(a, b)| (1.0 - c3 * a - c4 * b).powi(2)).sum::<f64>();
    let single = |col: usize| {
        let (mut num, mut den) = (0.0, 0.0);
        for &(a, b) in &rows {
            let v = if col == 0 { a } else { b };
            num += v;
            den += v * v;
        }
        if den > 0.0 {
            (num / den).max(0.0)
        } else {
            0.0
        }
    };
    let mut best = {
        let c = single(0);
        (c, 0.0, cost(c, 0.0))
    };
    let c = single(1);
    let cand = (0.0, c, cost(0.0, c));
    if cand.2 < best.2 {
        best = cand;
    }
    let (mut saa, mut sab, mut sbb, mut sa, mut sb) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(a, b) in &rows {
        saa += a * a;
        sab += a * b;
        sbb += b * b;
        sa += a;
        sb += b;
    }
    let det = saa * sbb - sab * sab;
    if det > 1e-12 * saa * sbb {
        let c3 = (sa * sbb - sb * sab) / det;
        let c4 = (saa * sb - sab * sa) / det;
        if c3 >= 0.0 && c4 >= 0.0 {
            let cc = cost(c3, c4);
            if cc < best.2 {
                best = (c3, c4, cc);
            }
        }
    }
    (best.0, best.1)
}

/// Samples `I` on spheres `||u||_X = rho` and evaluates the escape direction.
pub fn verify_geometry(problem: &Problem, config: &GeometryConfig) -> Result<GeometryReport> {
    let fun = problem.functional()?;
    let grid = fun.operator().grid().clone();
    let (q1, q2) = problem.nl.exponents().unwrap_or((4.0, 4.0));
    let mut messages = Vec::new();
    if !(q1 > 2.0 && q2 > 2.0) {
        return Err(Error::Parameter(format!("geometry needs q1, q2 > 2; got {q1}, {q2}")));
    }

    let win = bump_window(&grid);
    let mut rng = sampling::rng(config.seed);
    let mut dirs = Vec::with_capacity(config.directions);
    while dirs.len() < config.directions {
        let mut d = sampling::random_bumps(&grid, win, true, &mut rng);
        let n = fun.norm_x(&d);
        if n > 0.0 {
            d.iter_mut().for_each(|x| *x /= n);
            dirs.push(d);
        }
    }

    let decades = math::log10(config.rho_max / config.rho_min);
    let count = (decades * config.per_decade as f64).round() as usize + 1;
    let rhos: Vec<f64> = (0..count)
        .map(|i| config.rho_min * math::pow(10.0, decades * i as f64 / (count - 1).max(1) as f64))
        .collect();
    let mut floors = Vec::with_capacity(count);
    let mut deficits = Vec::with_capacity(count);
    let mut scratch = alloc::vec![0.0; grid.len()];
    for &rho in &rhos {
        // the quadratic part is exactly rho^2/2 on the sphere; the deficit is the largest potential term
        let mut deficit = 0.0f64;
        for d in &dirs {
            scratch.iter_mut().zip(d).for_each(|(s, x)| *s = rho * x);
            deficit = deficit.max(fun.potential(&scratch));
        }
        deficits.push(deficit);
        floors.push(0.5 * rho * rho - deficit);
    }
    let xs: Vec<f64> = rhos.iter().map(|r| math::pow(*r, q1)).collect();
    let ys: Vec<f64> = rhos.iter().map(|r| math::pow(*r, q2)).collect();
    let (mut c3, mut c4) = fit_two_terms(&deficits, &xs, &ys);
    let mut inflate = 1.0f64;
    for i in 0..rhos.len() {
        let model = c3 * xs[i] + c4 * ys[i];
        if deficits[i] > 0.0 {
            inflate = inflate.max(if model > 0.0 { deficits[i] / model } else { f64::INFINITY });
        }
    }
    if inflate.is_finite() {
        c3 *= inflate;
        c4 *= inflate;
    }
    let bound_holds = inflate.is_finite()
        && (0..rhos.len()).all(|i| floors[i] >= 0.5 * rhos[i] * rhos[i] - c3 * xs[i] - c4 * ys[i] - 1e-15 * rhos[i] * rhos[i]);

    let positive = rhos.iter().zip(&floors).filter(|(_, f)| **f > 0.0).last();
    let rho_positive = positive.map(|(r, _)| *r);
    let alpha_positive = positive.map(|(_, f)| *f);
    if rho_positive.is_none() {
        messages.push("geometry failed: no positive floor on the rho ladder".into());
    }

    let escape = if problem.nl.is_zero() {
        None
    } else {
        match build_escape_direction(&problem.k, &fun) {
            Ok(e) => Some(e),
            Err(e) => {
                messages.push(format!("escape direction: {e}"));
                None
            }
        }
    };
    let escape_negative = escape.as_ref().is_some_and(|e| e.energy < 0.0);
    let escape_beyond_rho = match (&escape, rho_positive) {
        (Some(e), Some(r)) => e.norm > r,
        _ => false,
    };
    let passed = rho_positive.is_some() && escape_negative && escape_beyond_rho;
    Ok(GeometryReport {
        rhos,
        floors,
        c3,
        c4,
        bound_holds,
        rho_positive,
        alpha_positive,
        escape_lambda: escape.as_ref().map(|e| e.lambda),
        escape_energy: escape.as_ref().map(|e| e.energy),
        escape_norm: escape.as_ref().map(|e| e.norm),
        escape_negative,
        escape_beyond_rho,
        passed,
        messages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grading;
    use approx::assert_relative_eq;

    fn flat(nl: Nonlinearity, m: usize) -> Problem {
        Problem {
            grid: Arc::new(RadialGrid::build(3, 1e-3, 30.0, m, Grading::Geometric).unwrap()),
            a: PotentialSpec::constant(1.0),
            v: PotentialSpec::constant(1.0),
            k: PotentialSpec::constant(1.0),
            nl,
            params: None,
        }
    }

    #[test]
    fn bump_shape() {
        let d = 0.25;
        assert_eq!(escape_bump(0.1, d), 0.0);
        assert_eq!(escape_bump(1.0, d), 1.0);
        assert_eq!(escape_bump(4.0, d), 1.0);
        assert_eq!(escape_bump(5.0, d), 0.0);
        assert_relative_eq!(escape_bump(0.1875, d), 0.5, max_relative = 1e-15);
        // C^1 at the joins
        let h = 1e-7;
        for &r in &[0.125, 0.25, 4.0, 5.0] {
            let slope_l = (escape_bump(r, d) - escape_bump(r - h, d)) / h;
            let slope_r = (escape_bump(r + h, d) - escape_bump(r, d)) / h;
            assert!((slope_l - slope_r).abs() < 1e-3);
        }
    }

    #[test]
    fn escape_ladder() {
        let p = flat(Nonlinearity::MinPower { q1: 3.0, q2: 5.0 }, 300);
        let fun = p.functional().unwrap();
        let e = build_escape_direction(&p.k, &fun).unwrap();
        assert!(e.energy < 0.0);
        let zero: Vec<f64> = e.psi.iter().map(|_| 0.0).collect();
        assert_eq!(fun.energy(&zero).total, 0.0);
        let w2: Vec<f64> = e.psi.iter().map(|x| 2.0 * e.lambda * x).collect();
        assert!(fun.energy(&w2).total < e.energy);
    }

    #[test]
    fn zero_nonlinearity_goes_to_zero() {
        let p = flat(Nonlinearity::Zero, 200);
        let cfg = SolveConfig { restarts: 2, ..Default::default() };
        let r = solve(&p, &cfg).unwrap();
        assert!(r.converged);
        assert!(r.trivial);
        assert!(r.u.max_abs() < 1e-12);
    }

    #[test]
    fn pure_power_flat_solution() {
        let p = flat(Nonlinearity::PurePower { q: 4.0 }, 400);
        let cfg = SolveConfig { restarts: 2, seed: 3, ..Default::default() };
        let r = solve(&p, &cfg).unwrap();
        assert!(r.converged, "residual {}", r.residual);
        assert!(r.nehari_defect < 1e-8);
        assert!(r.energy.total > 0.0);
        assert!(r.min_before_clamp >= 0.0);
        assert!(r.geometry.alpha_mp > 0.0);
        // energy identity at a critical point: I = (1/2 - 1/q) \int K u^q
        let q = 4.0;
        assert_relative_eq!(r.energy.total, (0.5 - 1.0 / q) * q * r.energy.potential, max_relative = 1e-6);
        // determinism
        let again = solve(&p, &cfg).unwrap();
        assert_eq!(again.energy.total, r.energy.total);
        assert_eq!(again.iterations, r.iterations);
    }

    #[test]
    fn geometry_of_pure_quadratic() {
        let p = flat(Nonlinearity::Zero, 100);
        let rep = verify_geometry(&p, &GeometryConfig::default()).unwrap();
        for (r, f) in rep.rhos.iter().zip(&rep.floors) {
            assert_eq!(*f, 0.5 * r * r);
        }
    }

    #[test]
    fn two_term_fit_recovers_model() {
        let rhos: Vec<f64> = (0..13).map(|i| 1e-3 * 10f64.powf(i as f64 / 4.0)).collect();
        let x: Vec<f64> = rhos.iter().map(|r| r.powi(3)).collect();
        let y: Vec<f64> = rhos.iter().map(|r| r.powi(5)).collect();
        let d: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.3 * a + 2.0 * b).collect();
        let (c3, c4) = fit_two_terms(&d, &x, &y);
        assert_relative_eq!(c3, 0.3, max_relative = 1e-8);
        assert_relative_eq!(c4, 2.0, max_relative = 1e-8);
    }
}
