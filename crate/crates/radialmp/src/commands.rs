//! Subcommand runners. Each writes its artifacts and then maps the outcome to
//! an exit code through [`CliError`].

use std::path::Path;

use radialmp_core::exponents::ProblemParams;
use radialmp_core::functional::{check_f_hypotheses, EnergyBreakdown, FReport};
use radialmp_core::potentials::{
    check_hypothesis_a, check_hypothesis_k, check_hypothesis_v, fit_asymptotics, ratio_bound, End,
    HypothesisReport, RatioBound, RatioRegion,
};
use radialmp_core::probes::{fit_decay, Estimate, ProbeResult, ProbeSettings, Prober};
use radialmp_core::sampling::{self, BumpWindow};
use radialmp_core::solver::{
    solve_with_initial, verify_geometry, GeometryConfig, GeometryReport, GeometryWitness, Solver,
};
use radialmp_core::spaces::{verify_decay_infinity_with, verify_decay_origin_with, DiscreteRadialFunction};
use radialmp_core::grid::RadialGrid;
use rayon::prelude::*;
use serde::Serialize;

use crate::artifacts::{csv_text, envelope_json, fmt17, write_file, ExponentSummary, Targets};
use crate::config::{parse_radii, ProblemConfig};
use crate::{fixtures, CliError, Flags};

#[derive(Debug, Clone)]
pub enum Command {
    Check,
    Exponents,
    Solve {
        refine: bool,
    },
    Probe {
        end: Option<End>,
        q: Option<f64>,
        radii: Option<String>,
    },
    VerifyEstimates {
        trials: usize,
        radius: f64,
        slack: f64,
    },
    ReproduceExamples,
}

pub fn run(cmd: &Command, flags: &Flags) -> Result<(), CliError> {
    match cmd {
        Command::ReproduceExamples => reproduce_examples(flags),
        _ => {
            let cfg = flags.load_config()?;
            let ctx = Context::new(cfg, flags);
            match cmd {
                Command::Check => check(&ctx),
                Command::Exponents => exponents(&ctx),
                Command::Solve { refine } => solve(&ctx, *refine),
                Command::Probe { end, q, radii } => probe(&ctx, *end, *q, radii.as_deref()),
                Command::VerifyEstimates { trials, radius, slack } => {
                    verify_estimates(&ctx, *trials, *radius, *slack)
                }
                Command::ReproduceExamples => unreachable!(),
            }
        }
    }
}

struct Context<'a> {
    cfg: ProblemConfig,
    hash: String,
    flags: &'a Flags,
}

impl<'a> Context<'a> {
    fn new(cfg: ProblemConfig, flags: &'a Flags) -> Self {
        let hash = cfg.hash();
        Self { cfg, hash, flags }
    }

    fn targets(&self, stem: &str) -> Targets {
        Targets::resolve(self.flags.out.as_deref(), self.flags.report.as_deref(), stem)
    }

    fn json<T: Serialize>(&self, command: &str, target: Option<&Path>, report: &T) -> Result<(), CliError> {
        let text = envelope_json(command, &self.hash, self.cfg.seed, report);
        match target {
            Some(p) => write_file(p, &text),
            None => {
                if !self.flags.quiet {
                    print!("{text}");
                }
                Ok(())
            }
        }
    }

    fn csv(&self, target: Option<&Path>, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        if let Some(p) = target {
            write_file(p, &csv_text(&self.hash, self.cfg.seed, header, rows)?)?;
        }
        Ok(())
    }

    fn say(&self, line: impl AsRef<str>) {
        if !self.flags.quiet {
            eprintln!("{}", line.as_ref());
        }
    }
}

/// Radius separating the two ends in the ratio hypotheses.
pub const RATIO_RADIUS: f64 = 1.0;

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub a: HypothesisReport,
    pub v: HypothesisReport,
    pub k: Option<HypothesisReport>,
    pub f: FReport,
    pub params: Option<ProblemParams<f64>>,
    pub ratio_radius: f64,
    /// `sup_{r < R} K / (r^alpha0 V^beta0)`.
    pub ratio0: Option<RatioBound>,
    /// `sup_{r > R} K / (r^alpha_inf V^beta_inf)`.
    pub ratio_inf: Option<RatioBound>,
    pub passed: bool,
    pub failures: Vec<String>,
}

pub fn check_report(cfg: &ProblemConfig) -> CheckReport {
    let pot = &cfg.potentials;
    let a = check_hypothesis_a(&pot.a, cfg.n);
    let v = check_hypothesis_v(&pot.v);
    let f = check_f_hypotheses(&cfg.f);
    let mut failures: Vec<String> = Vec::new();
    failures.extend(a.messages.iter().filter(|_| !a.passed).cloned());
    failures.extend(v.messages.iter().filter(|_| !v.passed).cloned());
    if !f.passed {
        failures.extend(f.messages.iter().map(|m| format!("[f] {m}")));
    }
    let params = match cfg.resolve_params() {
        Ok(r) => Some(r.float),
        Err(e) => {
            failures.push(format!("exponents: {e}"));
            None
        }
    };
    let k = match (&params, a.a0_est, a.ainf_est) {
        (Some(p), _, _) => Some(check_hypothesis_k(&pot.k, cfg.n, p.a0, p.ainf)),
        (None, Some(a0), Some(ainf)) => Some(check_hypothesis_k(&pot.k, cfg.n, a0, ainf)),
        _ => None,
    };
    match &k {
        Some(k) if !k.passed => failures.extend(k.messages.iter().cloned()),
        None => failures.push("[K] not checked: exponents of A unavailable".into()),
        _ => {}
    }
    let (mut ratio0, mut ratio_inf) = (None, None);
    if let Some(p) = &params {
        for (end, alpha, beta, region) in [
            (End::Zero, p.alpha0, p.beta0, RatioRegion::Ball(RATIO_RADIUS)),
            (End::Infinity, p.alphainf, p.betainf, RatioRegion::Complement(RATIO_RADIUS)),
        ] {
            let lim = if end == End::Zero { "r->0+" } else { "r->+inf" };
            match ratio_bound(&pot.k, &pot.v, alpha, beta, region) {
                Ok(b) => {
                    if !b.lambda.is_finite() {
                        failures.push(format!(
                            "ratio bound fails at {lim}: sup K/(r^{alpha} V^{beta}) is infinite{}",
                            b.message.as_ref().map(|m| format!(" ({m})")).unwrap_or_default()
                        ));
                    }
                    if end == End::Zero {
                        ratio0 = Some(b);
                    } else {
                        ratio_inf = Some(b);
                    }
                }
                Err(e) => failures.push(format!("ratio bound at {lim}: {e}")),
            }
        }
    }
    CheckReport {
        passed: failures.is_empty(),
        a,
        v,
        k,
        f,
        params,
        ratio_radius: RATIO_RADIUS,
        ratio0,
        ratio_inf,
        failures,
    }
}

fn check(ctx: &Context) -> Result<(), CliError> {
    let report = check_report(&ctx.cfg);
    let t = ctx.targets("check");
    ctx.json("check", t.json.as_deref(), &report)?;
    if report.passed {
        ctx.say("all hypotheses hold");
        Ok(())
    } else {
        for f in &report.failures {
            eprintln!("{f}");
        }
        Err(CliError::Validation(report.failures.join("; ")))
    }
}

pub fn exponent_summary(cfg: &ProblemConfig) -> Result<ExponentSummary, CliError> {
    let r = cfg.resolve_params()?;
    ExponentSummary::compute(&r.float, r.exact.as_ref(), r.inferred)
}

fn exponents(ctx: &Context) -> Result<(), CliError> {
    let summary = exponent_summary(&ctx.cfg)?;
    if !ctx.flags.quiet {
        print!("{}", summary.table());
    }
    let t = ctx.targets("exponents");
    ctx.json("exponents", t.json.as_deref(), &summary)
}

#[derive(Debug, Serialize)]
pub struct Refinement {
    pub nodes: usize,
    pub energy: f64,
    pub residual: f64,
    pub converged: bool,
    /// `|I_fine - I| / |I|`.
    pub relative_change: f64,
}

#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub nodes: usize,
    pub norm_x: f64,
    pub energy: EnergyBreakdown,
    pub residual: f64,
    pub nehari_defect: f64,
    pub iterations: usize,
    pub geometry: GeometryWitness,
    pub converged: bool,
    pub trivial: bool,
    pub min_before_clamp: f64,
    pub min_after_clamp: f64,
    pub restart_energies: Vec<f64>,
    pub restart_converged: Vec<bool>,
    pub warnings: Vec<String>,
    pub geometry_check: Option<GeometryReport>,
    pub refinement: Option<Refinement>,
    pub exponents: Option<ExponentSummary>,
}

fn solve(ctx: &Context, refine: bool) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let problem = cfg.problem()?;
    let scfg = cfg.solve_config();
    let solver = Solver::new(&problem, &scfg)?;
    let outcomes = (0..scfg.restarts)
        .into_par_iter()
        .map(|k| solver.run_restart(k))
        .collect();
    let result = solver.finish(outcomes)?;
    let fun = solver.functional();
    let u = result.u.values();

    let mut warnings = result.warnings.clone();
    let geometry_check = if cfg.f.is_zero() {
        None
    } else {
        let gcfg = GeometryConfig {
            seed: cfg.seed,
            ..Default::default()
        };
        match verify_geometry(&problem, &gcfg) {
            Ok(g) => Some(g),
            Err(e) => {
                warnings.push(format!("geometry check: {e}"));
                None
            }
        }
    };
    let refinement = if refine {
        let g = &cfg.grid;
        let m = 2 * g.nodes - 1;
        let fine = std::sync::Arc::new(
            RadialGrid::build(cfg.n, g.r_min, g.r_max, m, g.grading)
                .map_err(|e| CliError::Validation(format!("refined grid: {e}")))?,
        );
        let fine_problem = problem.regrid(fine.clone());
        let u0 = result.u.interpolate_to(fine);
        let r = solve_with_initial(&fine_problem, &scfg, u0.values())?;
        let e = result.energy.total;
        Some(Refinement {
            nodes: m,
            energy: r.energy.total,
            residual: r.residual,
            converged: r.converged,
            relative_change: ((r.energy.total - e) / e).abs(),
        })
    } else {
        None
    };
    let exponents = match exponent_summary(cfg) {
        Ok(s) => Some(s),
        Err(e) => {
            warnings.push(format!("exponent report: {e}"));
            None
        }
    };
    let report = SolveReport {
        nodes: u.len(),
        norm_x: fun.norm_x(u),
        energy: result.energy,
        residual: result.residual,
        nehari_defect: result.nehari_defect,
        iterations: result.iterations,
        geometry: result.geometry,
        converged: result.converged,
        trivial: result.trivial,
        min_before_clamp: result.min_before_clamp,
        min_after_clamp: u.iter().cloned().fold(f64::INFINITY, f64::min),
        restart_energies: result.restart_energies.clone(),
        restart_converged: result.restart_converged.clone(),
        warnings,
        geometry_check,
        refinement,
        exponents,
    };

    let t = ctx.targets("solution");
    let rows: Vec<Vec<String>> = problem
        .grid
        .nodes()
        .iter()
        .zip(u)
        .map(|(r, x)| vec![fmt17(*r), fmt17(*x)])
        .collect();
    ctx.csv(t.csv.as_deref(), &["r", "u"], &rows)?;
    ctx.json("solve", t.json.as_deref(), &report)?;
    for w in &report.warnings {
        ctx.say(format!("warning: {w}"));
    }
    ctx.say(format!(
        "I(u) = {:e}, residual = {:e}, nehari defect = {:e}, converged = {}",
        report.energy.total, report.residual, report.nehari_defect, report.converged
    ));
    if report.converged {
        Ok(())
    } else {
        Err(CliError::NotConverged(format!(
            "residual {:e} after {} iterations",
            report.residual, report.iterations
        )))
    }
}

#[derive(Debug, Serialize)]
pub struct ProbeReport {
    pub result: ProbeResult,
    pub settings: ProbeSettings,
    pub requested_radii: Vec<f64>,
    pub estimates: Vec<Estimate>,
}

fn probe(ctx: &Context, end: Option<End>, q: Option<f64>, radii: Option<&str>) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let end = end.unwrap_or(cfg.probe.end);
    let q = match q.or(cfg.probe.q) {
        Some(q) => q,
        None => {
            let (q1, q2) = cfg
                .f
                .exponents()
                .ok_or_else(|| CliError::Validation("probe needs --q or probe.q".into()))?;
            if end == End::Zero {
                q1
            } else {
                q2
            }
        }
    };
    if !(q > 2.0) {
        return Err(CliError::Validation(format!("probe exponent q = {q} must exceed 2")));
    }
    let requested = match radii {
        Some(s) => parse_radii(s)?,
        None => cfg.probe.radii.expand()?,
    };
    let params = cfg.resolve_params()?.float;
    let settings = cfg.probe_settings();
    let problem = cfg.problem()?;
    let fun = problem.functional()?;
    let prober = Prober::new(fun.operator());
    let estimates = requested
        .par_iter()
        .map(|&r| prober.estimate(end, q, r, &settings))
        .collect::<Result<Vec<_>, _>>()?;
    let result = fit_decay(end, q, &estimates, &params, settings.restarts)?;

    let t = ctx.targets("probe");
    let rows: Vec<Vec<String>> = estimates
        .iter()
        .map(|e| vec![fmt17(e.radius), fmt17(e.value), e.converged.to_string()])
        .collect();
    ctx.csv(t.csv.as_deref(), &["R", "S_estimate", "converged"], &rows)?;
    let all_converged = result.converged_flags.iter().all(|c| *c);
    ctx.say(format!(
        "fitted slope {:.6}, predicted delta {:.6}, q in interval: {}",
        result.fitted_slope, result.predicted_delta, result.in_interval
    ));
    let report = ProbeReport {
        result,
        settings,
        requested_radii: requested,
        estimates,
    };
    ctx.json("probe", t.json.as_deref(), &report)?;
    if all_converged {
        Ok(())
    } else {
        Err(CliError::NotConverged("some probe estimates did not converge".into()))
    }
}

#[derive(Debug, Serialize, Default)]
pub struct Battery {
    pub trials: usize,
    pub passed: usize,
    pub c_bound: f64,
    /// Largest `max_ratio / c_bound` over the battery.
    pub worst_fraction: f64,
    pub failures: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct EstimatesReport {
    pub radius: f64,
    pub slack: f64,
    pub infinity: Battery,
    pub origin: Battery,
    pub passed: bool,
}

pub fn decay_batteries(cfg: &ProblemConfig, trials: usize, radius: f64, slack: f64) -> Result<EstimatesReport, CliError> {
    let grid = cfg.build_grid()?;
    let a = &cfg.potentials.a;
    fit_asymptotics(a, End::Zero)?;
    fit_asymptotics(a, End::Infinity)?;
    if !(radius > grid.r_min() && radius < grid.r_max()) {
        return Err(CliError::Validation(format!("radius {radius} outside the grid")));
    }
    let (lo, hi) = (grid.r_min() * 10.0, grid.r_max() / 10.0);
    let run = |origin: bool| -> Result<Battery, CliError> {
        let window = if origin {
            BumpWindow::decades(lo, radius)
        } else {
            BumpWindow::decades(lo, hi)
        };
        let (j, _) = grid.snap(radius);
        let checks = (0..trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = sampling::stream(cfg.seed, i as u64 + if origin { 1 << 32 } else { 0 });
                let mut v = sampling::random_bumps(&grid, window, true, &mut rng);
                if origin {
                    v[j..].iter_mut().for_each(|x| *x = 0.0);
                }
                let u = DiscreteRadialFunction::new(grid.clone(), v)?;
                if origin {
                    verify_decay_origin_with(&u, a, radius, slack)
                } else {
                    verify_decay_infinity_with(&u, a, radius, slack)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut b = Battery {
            trials,
            ..Default::default()
        };
        for (i, c) in checks.iter().enumerate() {
            b.c_bound = c.c_bound;
            b.worst_fraction = b.worst_fraction.max(c.max_ratio / c.c_bound);
            if c.passed {
                b.passed += 1;
            } else {
                b.failures.push(i);
            }
        }
        Ok(b)
    };
    let infinity = run(false)?;
    let origin = run(true)?;
    Ok(EstimatesReport {
        radius,
        slack,
        passed: infinity.failures.is_empty() && origin.failures.is_empty(),
        infinity,
        origin,
    })
}

fn verify_estimates(ctx: &Context, trials: usize, radius: f64, slack: f64) -> Result<(), CliError> {
    if trials == 0 {
        return Err(CliError::Validation("--trials must be positive".into()));
    }
    let report = decay_batteries(&ctx.cfg, trials, radius, slack)?;
    let t = ctx.targets("estimates");
    ctx.json("verify-estimates", t.json.as_deref(), &report)?;
    ctx.say(format!(
        "decay at infinity: {}/{} (worst {:.4} of the bound); decay at the origin: {}/{} (worst {:.4})",
        report.infinity.passed,
        trials,
        report.infinity.worst_fraction,
        report.origin.passed,
        trials,
        report.origin.worst_fraction
    ));
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Validation("pointwise decay bound violated".into()))
    }
}

#[derive(Debug, Serialize)]
pub struct ExamplesReport {
    pub rows: Vec<fixtures::ExampleRow>,
    pub passed: bool,
}

fn reproduce_examples(flags: &Flags) -> Result<(), CliError> {
    let n = flags.n.unwrap_or(6);
    let rows = fixtures::reproduce(n)?;
    if !flags.quiet {
        print!("{}", fixtures::table(&rows));
    }
    let passed = rows.iter().all(|r| r.status != "FAIL");
    let report = ExamplesReport { rows, passed };
    let text = envelope_json("reproduce-examples", &fixtures::builtin_hash(n), flags.seed.unwrap_or(0), &report);
    let t = Targets::resolve(flags.out.as_deref(), flags.report.as_deref(), "examples");
    if let Some(p) = t.json {
        write_file(&p, &text)?;
    }
    if passed {
        Ok(())
    } else {
        Err(CliError::Validation("an example does not reproduce".into()))
    }
}
