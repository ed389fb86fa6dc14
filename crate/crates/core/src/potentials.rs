//! Radial potentials `A`, `V`, `K`: evaluation, asymptotic power-law fits and
//! the hypothesis checks `[A]`, `[V]`, `[K]` together with the ratio bound
//! `sup K / (r^alpha V^beta)` used by the compactness criteria.
//!
//! All hypotheses are stated as limits or essential suprema; they are verified
//! here by sampling on geometric ladders. The in-scope potentials are piecewise
//! powers or exponentials, for which the ladders are exact up to round-off.
//! Potentials are continuous, so pointwise suprema stand in for ess-sups.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// One power term `c * r^e`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PowerTerm {
    pub c: f64,
    pub e: f64,
}

impl PowerTerm {
    pub fn new(c: f64, e: f64) -> Self {
        Self { c, e }
    }

    fn ln_eval(&self, ln_r: f64) -> f64 {
        math::ln(self.c) + self.e * ln_r
    }
}

/// Closed forms of a radial potential.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "form", rename_all = "snake_case")
)]
pub enum PotentialForm {
    /// `c * r^e`
    PurePower { c: f64, e: f64 },
    /// `min_i c_i r^{e_i}`
    MinPower { terms: Vec<PowerTerm> },
    /// `max_i c_i r^{e_i}`
    MaxPower { terms: Vec<PowerTerm> },
    /// `c * exp(k r)`
    #[cfg_attr(feature = "serde", serde(rename = "exp"))]
    ExpScaled { c: f64, k: f64 },
    /// Samples `(r, v)` joined by log-log interpolation.
    #[cfg_attr(feature = "serde", serde(rename = "table"))]
    Tabulated {
        points: Vec<[f64; 2]>,
        #[cfg_attr(feature = "serde", serde(default))]
        extrapolate: bool,
    },
}

/// A radial potential with optionally declared exponents at `0+` and `+inf`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PotentialSpec {
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub form: PotentialForm,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub declared_a0: Option<f64>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub declared_ainf: Option<f64>,
}

/// Which end of `(0, inf)` an asymptotic statement refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum End {
    Zero,
    Infinity,
}

/// Role of a potential in the equation; decides the sign requirement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    A,
    V,
    K,
}

impl PotentialSpec {
    pub fn new(form: PotentialForm) -> Self {
        Self {
            form,
            declared_a0: None,
            declared_ainf: None,
        }
    }

    pub fn pure_power(c: f64, e: f64) -> Self {
        Self::new(PotentialForm::PurePower { c, e })
    }

    pub fn constant(c: f64) -> Self {
        Self::pure_power(c, 0.0)
    }

    pub fn min_power(c1: f64, e1: f64, c2: f64, e2: f64) -> Self {
        Self::new(PotentialForm::MinPower {
            terms: alloc::vec![PowerTerm::new(c1, e1), PowerTerm::new(c2, e2)],
        })
    }

    pub fn max_power(c1: f64, e1: f64, c2: f64, e2: f64) -> Self {
        Self::new(PotentialForm::MaxPower {
            terms: alloc::vec![PowerTerm::new(c1, e1), PowerTerm::new(c2, e2)],
        })
    }

    pub fn exp_scaled(c: f64, k: f64) -> Self {
        Self::new(PotentialForm::ExpScaled { c, k })
    }

    pub fn tabulated(points: Vec<[f64; 2]>, extrapolate: bool) -> Self {
        Self::new(PotentialForm::Tabulated {
            points,
            extrapolate,
        })
    }

    pub fn with_declared(mut self, a0: f64, ainf: f64) -> Self {
        self.declared_a0 = Some(a0);
        self.declared_ainf = Some(ainf);
        self
    }

    /// Checks the structural invariants of the form for the given role.
    pub fn validate(&self, role: Role) -> Result<()> {
        let strict = role != Role::V;
        let check_c = |c: f64| -> Result<()> {
            if !c.is_finite() || c < 0.0 || (strict && c == 0.0) {
                return Err(Error::Parameter(format!(
                    "coefficient {c} is not admissible for potential {role:?}"
                )));
            }
            Ok(())
        };
        match &self.form {
            PotentialForm::PurePower { c, e } => {
                check_c(*c)?;
                finite(*e, "exponent")
            }
            PotentialForm::MinPower { terms } | PotentialForm::MaxPower { terms } => {
                if terms.is_empty() {
                    return Err(Error::Parameter("min/max power needs at least one term".into()));
                }
                for t in terms {
                    check_c(t.c)?;
                    finite(t.e, "exponent")?;
                }
                Ok(())
            }
            PotentialForm::ExpScaled { c, k } => {
                check_c(*c)?;
                finite(*k, "rate")
            }
            PotentialForm::Tabulated { points, .. } => {
                if points.len() < 2 {
                    return Err(Error::Parameter("table needs at least two points".into()));
                }
                for w in points.windows(2) {
                    if !(w[1][0] > w[0][0]) {
                        return Err(Error::Parameter("table radii must increase strictly".into()));
                    }
                }
                for p in points {
                    if !(p[0] > 0.0) || !p[1].is_finite() || p[1] < 0.0 || (strict && p[1] == 0.0) {
                        return Err(Error::Parameter(format!(
                            "table point ({}, {}) is not admissible for potential {role:?}",
                            p[0], p[1]
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Natural logarithm of the potential at `r`; `-inf` where it vanishes.
    pub fn ln_eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("potential evaluated at r = {r}")));
        }
        let ln_r = math::ln(r);
        Ok(match &self.form {
            PotentialForm::PurePower { c, e } => PowerTerm::new(*c, *e).ln_eval(ln_r),
            PotentialForm::MinPower { terms } => terms
                .iter()
                .map(|t| t.ln_eval(ln_r))
                .fold(f64::INFINITY, f64::min),
            PotentialForm::MaxPower { terms } => terms
                .iter()
                .map(|t| t.ln_eval(ln_r))
                .fold(f64::NEG_INFINITY, f64::max),
            PotentialForm::ExpScaled { c, k } => math::ln(*c) + k * r,
            PotentialForm::Tabulated {
                points,
                extrapolate,
            } => return table_ln_eval(points, *extrapolate, r),
        })
    }

    /// Value of the potential at `r > 0`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("potential evaluated at r = {r}")));
        }
        let power = |c: f64, e: f64| {
            if r < 1e-6 || r > 1e6 {
                c * math::exp(e * math::ln(r))
            } else {
                c * math::pow(r, e)
            }
        };
        Ok(match &self.form {
            PotentialForm::PurePower { c, e } => power(*c, *e),
            PotentialForm::MinPower { terms } => terms
                .iter()
                .map(|t| power(t.c, t.e))
                .fold(f64::INFINITY, f64::min),
            PotentialForm::MaxPower { terms } => terms
                .iter()
                .map(|t| power(t.c, t.e))
                .fold(f64::NEG_INFINITY, f64::max),
            PotentialForm::ExpScaled { c, k } => c * math::exp(k * r),
            PotentialForm::Tabulated {
                points,
                extrapolate,
            } => math::exp(table_ln_eval(points, *extrapolate, r)?),
        })
    }

    /// Crossover radius `(c2/c1)^{1/(e1-e2)}` of a two-term min/max form.
    pub fn crossover(&self) -> Option<f64> {
        match &self.form {
            PotentialForm::MinPower { terms } | PotentialForm::MaxPower { terms }
                if terms.len() == 2 && terms[0].e != terms[1].e =>
            {
                let (a, b) = (terms[0], terms[1]);
                Some(math::pow(b.c / a.c, 1.0 / (a.e - b.e)))
            }
            _ => None,
        }
    }
}

fn finite(x: f64, what: &str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{what} must be finite")))
    }
}

fn table_ln_eval(points: &[[f64; 2]], extrapolate: bool, r: f64) -> Result<f64> {
    let lo = points[0][0];
    let hi = points[points.len() - 1][0];
    if (r < lo || r > hi) && !extrapolate {
        return Err(Error::ExtrapolationRefused { r, lo, hi });
    }
    // segment index: clamp to the end segments when extrapolating
    let i = match points.iter().position(|p| p[0] >= r) {
        Some(0) => 0,
        Some(i) => i - 1,
        None => points.len() - 2,
    };
    let (p, q) = (points[i], points[i + 1]);
    if p[1] == 0.0 || q[1] == 0.0 {
        // log-log interpolation is undefined through a zero; fall back to linear
        let t = (r - p[0]) / (q[0] - p[0]);
        let v = p[1] + t * (q[1] - p[1]);
        return Ok(if v > 0.0 { math::ln(v) } else { f64::NEG_INFINITY });
    }
    let t = (math::ln(r) - math::ln(p[0])) / (math::ln(q[0]) - math::ln(p[0]));
    Ok(math::ln(p[1]) + t * (math::ln(q[1]) - math::ln(p[1])))
}

/// Geometric sample ladder for asymptotic fits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitLadder {
    pub points: usize,
    /// log10 of the first sample radius' distance from 1 (0.1 or 10 by default).
    pub start_decade: f64,
    pub per_decade: f64,
    pub tolerance: f64,
}

impl Default for FitLadder {
    fn default() -> Self {
        Self {
            points: 40,
            start_decade: 1.0,
            per_decade: 4.0,
            tolerance: 1e-3,
        }
    }
}

impl FitLadder {
    /// Sample radii ordered from the start toward the end being probed.
    pub fn radii(&self, end: End) -> Vec<f64> {
        let sign = match end {
            End::Zero => -1.0,
            End::Infinity => 1.0,
        };
        (0..self.points)
            .map(|k| math::pow(10.0, sign * (self.start_decade + k as f64 / self.per_decade)))
            .collect()
    }
}

/// Result of a power-law fit at one end.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AsymptoticFit {
    pub exponent: f64,
    pub liminf: f64,
    pub limsup: f64,
    pub residual: f64,
}

/// Fits `spec(r) ~ c r^a` on the tail half of the ladder toward `end`.
pub fn fit_asymptotics(spec: &PotentialSpec, end: End) -> Result<AsymptoticFit> {
    fit_asymptotics_with(spec, end, &FitLadder::default())
}

pub fn fit_asymptotics_with(
    spec: &PotentialSpec,
    end: End,
    ladder: &FitLadder,
) -> Result<AsymptoticFit> {
    let radii = ladder.radii(end);
    let tail = &radii[radii.len() / 2..];
    let mut xs = Vec::with_capacity(tail.len());
    let mut ys = Vec::with_capacity(tail.len());
    for &r in tail {
        let y = spec.ln_eval(r)?;
        if !y.is_finite() {
            return Err(Error::FitFailed {
                residual: f64::INFINITY,
                tolerance: ladder.tolerance,
            });
        }
        xs.push(math::ln(r));
        ys.push(y);
    }
    let (slope, _, residual) = math::linear_fit(&xs, &ys);
    if !(residual <= ladder.tolerance) {
        return Err(Error::FitFailed {
            residual,
            tolerance: ladder.tolerance,
        });
    }
    let mut liminf = f64::INFINITY;
    let mut limsup = 0.0f64;
    for (x, y) in xs.iter().zip(&ys) {
        let ratio = math::exp(y - slope * x);
        liminf = liminf.min(ratio);
        limsup = limsup.max(ratio);
    }
    Ok(AsymptoticFit {
        exponent: slope,
        liminf,
        limsup,
        residual,
    })
}

/// Outcome of a hypothesis check.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HypothesisReport {
    pub passed: bool,
    pub a0_est: Option<f64>,
    pub ainf_est: Option<f64>,
    pub liminf0: Option<f64>,
    pub limsup0: Option<f64>,
    pub liminf_inf: Option<f64>,
    pub limsup_inf: Option<f64>,
    pub s_required: Option<f64>,
    pub s_used: Option<f64>,
    pub messages: Vec<String>,
}

/// Slack on exponent comparisons; fitted exponents carry round-off.
pub const EXPONENT_TOL: f64 = 1e-9;

/// Hypothesis `[A]`: `2 - N < a0, a_inf <= 2` with positive finite liminf/limsup at both ends.
pub fn check_hypothesis_a(spec: &PotentialSpec, n: u32) -> HypothesisReport {
    let mut report = HypothesisReport {
        passed: true,
        ..Default::default()
    };
    if let Err(e) = spec.validate(Role::A) {
        report.passed = false;
        report.messages.push(format!("[A] invalid potential: {e}"));
        return report;
    }
    let lower = 2.0 - n as f64;
    for end in [End::Zero, End::Infinity] {
        let (name, lim) = match end {
            End::Zero => ("a0", "r->0+"),
            End::Infinity => ("a_inf", "r->+inf"),
        };
        match fit_asymptotics(spec, end) {
            Ok(fit) => {
                match end {
                    End::Zero => {
                        report.a0_est = Some(fit.exponent);
                        report.liminf0 = Some(fit.liminf);
                        report.limsup0 = Some(fit.limsup);
                    }
                    End::Infinity => {
                        report.ainf_est = Some(fit.exponent);
                        report.liminf_inf = Some(fit.liminf);
                        report.limsup_inf = Some(fit.limsup);
                    }
                }
                if fit.exponent <= lower + EXPONENT_TOL {
                    report.passed = false;
                    report.messages.push(format!(
                        "[A] fails at {lim}: {name} = {} is not > 2-N = {lower}",
                        fit.exponent
                    ));
                }
                if fit.exponent > 2.0 + EXPONENT_TOL {
                    report.passed = false;
                    report.messages.push(format!(
                        "[A] fails at {lim}: {name} = {} exceeds 2",
                        fit.exponent
                    ));
                }
                if !(fit.liminf > 0.0) {
                    report.passed = false;
                    report.messages.push(format!(
                        "[A] fails at {lim}: liminf A/r^{name} is not positive"
                    ));
                }
                if !fit.limsup.is_finite() {
                    report.passed = false;
                    report.messages.push(format!(
                        "[A] fails at {lim}: limsup A/r^{name} is not finite"
                    ));
                }
            }
            Err(e) => {
                report.passed = false;
                report.messages.push(format!("[A] fails at {lim}: {e}"));
            }
        }
    }
    report
}

/// Hypothesis `[V]`: nonnegative and locally integrable.
pub fn check_hypothesis_v(spec: &PotentialSpec) -> HypothesisReport {
    let mut report = HypothesisReport {
        passed: true,
        ..Default::default()
    };
    if let Err(e) = spec.validate(Role::V) {
        report.passed = false;
        report.messages.push(format!("[V] invalid potential: {e}"));
        return report;
    }
    for (lo, hi) in COMPACT_FAMILY {
        match ln_integral(|r| spec.ln_eval(r), lo, hi) {
            Ok(v) if v.is_finite() || v == f64::NEG_INFINITY => {}
            Ok(_) => {
                report.passed = false;
                report
                    .messages
                    .push(format!("[V] not integrable on [{lo}, {hi}]"));
            }
            Err(e) => {
                report.passed = false;
                report.messages.push(format!("[V] on [{lo}, {hi}]: {e}"));
            }
        }
    }
    report
}

/// Representative compact intervals on which local integrability is tested.
pub const COMPACT_FAMILY: [(f64, f64); 2] = [(1e-3, 1.0), (1.0, 1e3)];

/// `max{2N/(N - a0 + 2), 2N/(N - a_inf + 2)}`.
pub fn s_required(n: u32, a0: f64, ainf: f64) -> f64 {
    let n = n as f64;
    (2.0 * n / (n - a0 + 2.0)).max(2.0 * n / (n - ainf + 2.0))
}

/// Hypothesis `[K]`: `K in L^s_loc` for `s = s_required + 1`.
pub fn check_hypothesis_k(spec_k: &PotentialSpec, n: u32, a0: f64, ainf: f64) -> HypothesisReport {
    let s_req = s_required(n, a0, ainf);
    let s_used = s_req + 1.0;
    let mut report = HypothesisReport {
        passed: true,
        a0_est: Some(a0),
        ainf_est: Some(ainf),
        s_required: Some(s_req),
        s_used: Some(s_used),
        ..Default::default()
    };
    let lower = 2.0 - n as f64;
    if a0 <= lower || a0 > 2.0 + EXPONENT_TOL || ainf <= lower || ainf > 2.0 + EXPONENT_TOL {
        report.passed = false;
        report
            .messages
            .push(format!("[K] needs a0, a_inf in (2-N, 2]; got {a0}, {ainf}"));
        return report;
    }
    if let Err(e) = spec_k.validate(Role::K) {
        report.passed = false;
        report.messages.push(format!("[K] invalid potential: {e}"));
        return report;
    }
    for (lo, hi) in COMPACT_FAMILY {
        match ln_integral(|r| spec_k.ln_eval(r).map(|l| s_used * l), lo, hi) {
            Ok(v) if v.is_finite() => {}
            Ok(_) => {
                report.passed = false;
                report
                    .messages
                    .push(format!("[K] K^{s_used} diverges on [{lo}, {hi}]"));
            }
            Err(e) => {
                report.passed = false;
                report.messages.push(format!("[K] on [{lo}, {hi}]: {e}"));
            }
        }
    }
    report
}

/// `ln \int_lo^hi g(r) dr` for `g` given through `ln g`, by adaptive Simpson in `t = ln r`.
///
/// The integrand is rescaled by its sampled maximum so exponentially large
/// potentials do not overflow. Returns `+inf` when the refinement fails to
/// converge (the divergence indicator).
pub fn ln_integral<F>(ln_g: F, lo: f64, hi: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let (t0, t1) = (math::ln(lo), math::ln(hi));
    let lg = |t: f64| -> Result<f64> { Ok(ln_g(math::exp(t))? + t) };
    let mut shift = f64::NEG_INFINITY;
    let samples = 257;
    for i in 0..samples {
        let t = t0 + (t1 - t0) * i as f64 / (samples - 1) as f64;
        let v = lg(t)?;
        if v.is_nan() || v == f64::INFINITY {
            return Ok(f64::INFINITY);
        }
        shift = shift.max(v);
    }
    if shift == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let g = |t: f64| -> Result<f64> { Ok(math::exp(lg(t)? - shift)) };
    let (a, b) = (t0, t1);
    let (fa, fb, fm) = (g(a)?, g(b)?, g(0.5 * (a + b))?);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut converged = true;
    let value = simpson(&g, a, b, fa, fm, fb, whole, 1e-12, 50, &mut converged)?;
    if !converged || !value.is_finite() {
        return Ok(f64::INFINITY);
    }
    Ok(shift + math::ln(value))
}

#[allow(clippy::too_many_arguments)]
fn simpson<G: Fn(f64) -> Result<f64>>(
    g: &G,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    converged: &mut bool,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (g(lm)?, g(rm)?);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if libm::fabs(delta) <= 15.0 * tol * (1.0 + libm::fabs(left + right)) {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        *converged = false;
        return Ok(left + right);
    }
    Ok(simpson(g, a, m, fa, flm, fm, left, tol, depth - 1, converged)?
        + simpson(g, m, b, fm, frm, fb, right, tol, depth - 1, converged)?)
}

/// Region of a ratio bound.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "kind", content = "radius", rename_all = "snake_case")
)]
pub enum RatioRegion {
    Ball(f64),
    Complement(f64),
}

/// Sampling and divergence-detection constants of [`ratio_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioSettings {
    /// Points per decade of the universal sampling lattice `10^(k/P)`.
    pub per_decade: u32,
    /// Open-end cutoffs: the ball is sampled down to `inner`, the complement up to `outer`.
    pub inner: f64,
    pub outer: f64,
    /// Number of trailing decades that must all grow to declare divergence.
    pub growth_decades: usize,
    /// Relative growth per decade counted as growth.
    pub growth: f64,
}

impl Default for RatioSettings {
    fn default() -> Self {
        Self {
            per_decade: 1250,
            inner: 1e-8,
            outer: 1e8,
            growth_decades: 3,
            growth: 0.01,
        }
    }
}

/// Result of [`ratio_bound`]; `lambda` is `+inf` when the supremum diverges.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RatioBound {
    pub lambda: f64,
    pub argmax: f64,
    pub message: Option<String>,
}

/// `sup K(r) / (r^alpha V(r)^beta)` over the region.
pub fn ratio_bound(
    spec_k: &PotentialSpec,
    spec_v: &PotentialSpec,
    alpha: f64,
    beta: f64,
    region: RatioRegion,
) -> Result<RatioBound> {
    ratio_bound_with(spec_k, spec_v, alpha, beta, region, &RatioSettings::default())
}

pub fn ratio_bound_with(
    spec_k: &PotentialSpec,
    spec_v: &PotentialSpec,
    alpha: f64,
    beta: f64,
    region: RatioRegion,
    settings: &RatioSettings,
) -> Result<RatioBound> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::Parameter(format!("beta = {beta} outside [0, 1]")));
    }
    let p = settings.per_decade as f64;
    // lattice points ordered from R toward the open end
    let (radius, toward_zero) = match region {
        RatioRegion::Ball(r) => (r, true),
        RatioRegion::Complement(r) => (r, false),
    };
    if !(radius > 0.0) {
        return Err(Error::Parameter(format!("region radius {radius} must be positive")));
    }
    let k_r = math::log10(radius) * p;
    let (k_first, k_last): (i64, i64) = if toward_zero {
        (
            libm::floor(k_r) as i64,
            libm::ceil(math::log10(settings.inner) * p) as i64,
        )
    } else {
        (
            libm::ceil(k_r) as i64,
            libm::floor(math::log10(settings.outer) * p) as i64,
        )
    };
    let step: i64 = if toward_zero { -1 } else { 1 };
    let mut samples = Vec::new();
    samples.push(radius);
    let mut k = k_first;
    while (toward_zero && k >= k_last) || (!toward_zero && k <= k_last) {
        let r = math::pow(10.0, k as f64 / p);
        if r != radius {
            samples.push(r);
        }
        k += step;
    }

    let mut best = f64::NEG_INFINITY;
    let mut argmax = radius;
    let n = settings.growth_decades;
    let open_end = *samples.last().unwrap_or(&radius);
    // maxima over whole decades counted back from the open end; index 0 touches it
    let mut decade_max = alloc::vec![f64::NEG_INFINITY; n + 1];
    for &r in &samples {
        let ln_k = spec_k.ln_eval(r)?;
        let mut ln_ratio = ln_k - alpha * math::ln(r);
        if beta > 0.0 {
            let ln_v = spec_v.ln_eval(r)?;
            if ln_v == f64::NEG_INFINITY {
                return Ok(RatioBound {
                    lambda: f64::INFINITY,
                    argmax: r,
                    message: Some(format!("V vanishes at r = {r} while beta = {beta} > 0")),
                });
            }
            ln_ratio -= beta * ln_v;
        }
        if ln_ratio > best {
            best = ln_ratio;
            argmax = r;
        }
        let b = libm::floor(libm::fabs(math::log10(r / open_end)) + 1e-12) as usize;
        if b <= n {
            decade_max[b] = decade_max[b].max(ln_ratio);
        }
    }

    let span = libm::fabs(math::log10(open_end / radius));
    let ln_growth = math::ln(1.0 + settings.growth);
    if span >= (n + 1) as f64 && decade_max.windows(2).all(|w| w[0] - w[1] > ln_growth) {
        return Ok(RatioBound {
            lambda: f64::INFINITY,
            argmax,
            message: Some(format!(
                "ratio still growing over the last {n} decades toward the open end"
            )),
        });
    }
    Ok(RatioBound {
        lambda: math::exp(best),
        argmax,
        message: None,
    })
}
