//! Nonlinearity `f`, its primitive `F`, and the energy functional
//!
//! `I(u) = 1/2 \int A |u'|^2 + 1/2 \int V u^2 - \int K F(u)`
//!
//! together with its directional derivative, the Riesz representative of
//! `I'(u)` in the discrete `X` inner product, and the Nehari ray scaling.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::grid::Region;
use crate::linalg::SymTridiagonal;
use crate::math;
use crate::potentials::PotentialSpec;
use crate::spaces::{DiscreteRadialFunction, RadialOperator};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-supplied `f` and `F` with the constants of the growth hypotheses.
#[derive(Clone)]
pub struct CustomNonlinearity {
    pub name: String,
    pub f: ScalarFn,
    pub primitive: ScalarFn,
    pub q1: f64,
    pub q2: f64,
    /// Constant `M` of the growth bound.
    pub bound: f64,
    pub theta: f64,
    pub odd: bool,
}

impl fmt::Debug for CustomNonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomNonlinearity")
            .field("name", &self.name)
            .field("q1", &self.q1)
            .field("q2", &self.q2)
            .finish_non_exhaustive()
    }
}

/// The nonlinearity `f`. Built-in forms vanish on `t <= 0` except the odd one.
#[derive(Debug, Clone)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "form", rename_all = "snake_case")
)]
pub enum Nonlinearity {
    /// `min{t^(q1-1), t^(q2-1)}` for `t >= 0`, zero for `t < 0`.
    MinPower { q1: f64, q2: f64 },
    /// Odd extension of `MinPower`.
    MinPowerOdd { q1: f64, q2: f64 },
    /// `t^(q-1)` for `t >= 0`, zero for `t < 0`.
    PurePower { q: f64 },
    /// `f = 0`; turns the functional into the bare quadratic form.
    Zero,
    #[cfg_attr(feature = "serde", serde(skip))]
    Custom(CustomNonlinearity),
}

impl Nonlinearity {
    pub fn custom<F, G>(name: &str, f: F, primitive: G, q1: f64, q2: f64, theta: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Nonlinearity::Custom(CustomNonlinearity {
            name: name.into(),
            f: Arc::new(f),
            primitive: Arc::new(primitive),
            q1,
            q2,
            bound: 1.0,
            theta,
            odd: false,
        })
    }

    pub fn f(&self, t: f64) -> f64 {
        match self {
            Nonlinearity::MinPower { q1, q2 } => {
                if t <= 0.0 {
                    0.0
                } else {
                    min_power_f(*q1, *q2, t)
                }
            }
            Nonlinearity::MinPowerOdd { q1, q2 } => {
                if t < 0.0 {
                    -min_power_f(*q1, *q2, -t)
                } else if t == 0.0 {
                    0.0
                } else {
                    min_power_f(*q1, *q2, t)
                }
            }
            Nonlinearity::PurePower { q } => {
                if t <= 0.0 {
                    0.0
                } else {
                    math::pow(t, q - 1.0)
                }
            }
            Nonlinearity::Zero => 0.0,
            Nonlinearity::Custom(c) => (c.f)(t),
        }
    }

    /// Primitive `F(t) = \int_0^t f`.
    pub fn big_f(&self, t: f64) -> f64 {
        match self {
            Nonlinearity::MinPower { q1, q2 } => {
                if t <= 0.0 {
                    0.0
                } else {
                    min_power_primitive(*q1, *q2, t)
                }
            }
            Nonlinearity::MinPowerOdd { q1, q2 } => min_power_primitive(*q1, *q2, libm::fabs(t)),
            Nonlinearity::PurePower { q } => {
                if t <= 0.0 {
                    0.0
                } else {
                    math::pow(t, *q) / q
                }
            }
            Nonlinearity::Zero => 0.0,
            Nonlinearity::Custom(c) => (c.primitive)(t),
        }
    }

    /// Growth exponents `(q1, q2)`; a pure power reports `(q, q)`.
    pub fn exponents(&self) -> Option<(f64, f64)> {
        match self {
            Nonlinearity::MinPower { q1, q2 } | Nonlinearity::MinPowerOdd { q1, q2 } => Some((*q1, *q2)),
            Nonlinearity::PurePower { q } => Some((*q, *q)),
            Nonlinearity::Zero => None,
            Nonlinearity::Custom(c) => Some((c.q1, c.q2)),
        }
    }

    /// Ambrosetti-Rabinowitz constant used by the checks.
    pub fn theta(&self) -> Option<f64> {
        match self {
            Nonlinearity::MinPower { q1, q2 } | Nonlinearity::MinPowerOdd { q1, q2 } => Some(q1.min(*q2)),
            Nonlinearity::PurePower { q } => Some(*q),
            Nonlinearity::Zero => None,
            Nonlinearity::Custom(c) => Some(c.theta),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Nonlinearity::Zero)
    }

    fn claims_odd(&self) -> bool {
        match self {
            Nonlinearity::MinPowerOdd { .. } => true,
            Nonlinearity::Custom(c) => c.odd,
            _ => false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((q1, q2)) = self.exponents() {
            if !(q1 > 2.0 && q2 > 2.0) || !q1.is_finite() || !q2.is_finite() {
                return Err(Error::Parameter(format!(
                    "nonlinearity exponents must exceed 2, got q1 = {q1}, q2 = {q2}"
                )));
            }
        }
        Ok(())
    }
}

fn min_power_f(q1: f64, q2: f64, t: f64) -> f64 {
    math::pow(t, q1 - 1.0).min(math::pow(t, q2 - 1.0))
}

fn min_power_primitive(q1: f64, q2: f64, t: f64) -> f64 {
    let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
    if t <= 1.0 {
        math::pow(t, hi) / hi
    } else {
        1.0 / hi + (math::pow(t, lo) - 1.0) / lo
    }
}

/// Result of sampling the growth hypotheses.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FReport {
    pub passed: bool,
    pub growth_bound: Option<f64>,
    pub theta: Option<f64>,
    pub t0: Option<f64>,
    pub m: Option<f64>,
    pub odd: Option<bool>,
    /// First sample violating a hypothesis.
    pub witness: Option<f64>,
    pub messages: Vec<String>,
}

/// Samples (f1)-(f4) on a log ladder over `[1e-6, 1e6]` and its mirror image.
pub fn check_f_hypotheses(nl: &Nonlinearity) -> FReport {
    let mut report = FReport {
        passed: true,
        ..Default::default()
    };
    let Some((q1, q2)) = nl.exponents() else {
        report.passed = false;
        report.messages.push("f = 0 has no growth exponents; (f2) needs F(t0) > 0".into());
        return report;
    };
    let fail = |report: &mut FReport, t: f64, msg: String| {
        if report.passed {
            report.witness = Some(t);
        }
        report.passed = false;
        report.messages.push(msg);
    };
    if !(q1 > 2.0 && q2 > 2.0) {
        fail(&mut report, f64::NAN, format!("(f1) needs q1, q2 > 2; got {q1}, {q2}"));
    }
    let bound = match nl {
        Nonlinearity::Custom(c) => c.bound,
        _ => 1.0,
    };
    let theta = nl.theta().unwrap_or(0.0);
    if !(theta > 2.0) {
        fail(&mut report, f64::NAN, format!("(f2) needs theta > 2; got {theta}"));
    }
    let m = 1.0 / q1.max(q2);
    report.growth_bound = Some(bound);
    report.theta = Some(theta);
    report.m = Some(m);

    let tol = 1e-12;
    let per_decade = 25;
    let ladder: Vec<f64> = (0..=12 * per_decade)
        .map(|k| math::pow(10.0, -6.0 + k as f64 / per_decade as f64))
        .collect();
    let mut f1_ok = true;
    let mut f2_ok = true;
    let mut f3_ok = true;
    for &a in &ladder {
        for t in [a, -a] {
            let (f, big_f) = (nl.f(t), nl.big_f(t));
            let at = libm::fabs(t);
            let g = math::pow(at, q1 - 1.0).min(math::pow(at, q2 - 1.0));
            if f1_ok && libm::fabs(f) > bound * g * (1.0 + tol) {
                f1_ok = false;
                fail(&mut report, t, format!("(f1) violated at t = {t:e}: |f| = {f:e} > M min = {:e}", bound * g));
            }
            let lhs = theta * big_f;
            let rhs = f * t;
            if f2_ok && (big_f < -tol * at || lhs > rhs + tol * libm::fabs(rhs).max(1e-300)) {
                f2_ok = false;
                fail(&mut report, t, format!("(f2) violated at t = {t:e}: theta F = {lhs:e}, f t = {rhs:e}"));
            }
            if t > 0.0 {
                if report.t0.is_none() && big_f > 0.0 {
                    report.t0 = Some(t);
                }
                let floor = m * math::pow(t, q1).min(math::pow(t, q2));
                if f3_ok && big_f < floor * (1.0 - tol) {
                    f3_ok = false;
                    report.messages.push(format!("(f3) fails at t = {t:e} with m = {m:e}"));
                }
            }
        }
    }
    if report.t0.is_none() {
        fail(&mut report, f64::NAN, "(f2) no t0 with F(t0) > 0 on the ladder".into());
    }
    if !f3_ok {
        report.m = None;
    }
    if nl.claims_odd() {
        let odd = ladder
            .iter()
            .all(|&t| libm::fabs(nl.f(-t) + nl.f(t)) <= tol * libm::fabs(nl.f(t)).max(1e-300));
        report.odd = Some(odd);
        if !odd {
            fail(&mut report, f64::NAN, "(f4) f is not odd".into());
        }
    }
    report
}

/// `1/2 ||u||_X^2`, `\int K F(u)` and their difference.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnergyBreakdown {
    pub quadratic: f64,
    pub potential: f64,
    pub total: f64,
}

/// The energy functional on a fixed discretization.
#[derive(Debug, Clone)]
pub struct EnergyFunctional {
    op: RadialOperator,
    nl: Nonlinearity,
    /// `omega w_i K_i`.
    kw: Vec<f64>,
    gram: SymTridiagonal,
}

impl EnergyFunctional {
    pub fn new(op: RadialOperator, nl: Nonlinearity) -> Self {
        let kw = op.k_weights(Region::All);
        let gram = op.gram();
        Self { op, nl, kw, gram }
    }

    pub fn operator(&self) -> &RadialOperator {
        &self.op
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nl
    }

    pub fn k_weights(&self) -> &[f64] {
        &self.kw
    }

    pub fn gram(&self) -> &SymTridiagonal {
        &self.gram
    }

    pub fn norm_x(&self, u: &[f64]) -> f64 {
        math::sqrt(self.op.norm_x2(u))
    }

    pub fn potential(&self, u: &[f64]) -> f64 {
        u.iter().zip(&self.kw).map(|(&x, &w)| w * self.nl.big_f(x)).sum()
    }

    pub fn energy(&self, u: &[f64]) -> EnergyBreakdown {
        let quadratic = 0.5 * self.op.norm_x2(u);
        let potential = self.potential(u);
        EnergyBreakdown {
            quadratic,
            potential,
            total: quadratic - potential,
        }
    }

    /// `I'(u)[h]`.
    pub fn derivative(&self, u: &[f64], h: &[f64]) -> f64 {
        let nonlinear: f64 = u
            .iter()
            .zip(h)
            .zip(&self.kw)
            .map(|((&x, &y), &w)| w * self.nl.f(x) * y)
            .sum();
        self.op.inner(u, h) - nonlinear
    }

    /// Nodal partial derivatives of `I` on the free nodes (the outermost entry is dropped by the solve).
    pub fn dual(&self, u: &[f64]) -> Vec<f64> {
        let free = u.len() - 1;
        let mut d = alloc::vec![0.0; free];
        self.gram.matvec(&u[..free], &mut d);
        for (i, di) in d.iter_mut().enumerate() {
            *di -= self.kw[i] * self.nl.f(u[i]);
        }
        d
    }

    /// `g` with `(g|h)_X = I'(u)[h]` for every `h` vanishing at the outer node.
    pub fn x_gradient(&self, u: &[f64]) -> Result<Vec<f64>> {
        let d = self.dual(u);
        self.op.riesz_with(&self.gram, &d)
    }

    /// Dual norm of `I'(u)`.
    pub fn ps_residual(&self, u: &[f64]) -> Result<f64> {
        let g = self.x_gradient(u)?;
        Ok(self.norm_x(&g))
    }

    /// `phi(l) = I'(l u)[u] / l = ||u||^2 - \int K f(l u) u / l`, nonincreasing in `l`.
    fn ray_slope(&self, u: &[f64], norm2: f64, l: f64) -> f64 {
        let s: f64 = u
            .iter()
            .zip(&self.kw)
            .map(|(&x, &w)| w * self.nl.f(l * x) * x)
            .sum();
        norm2 - s / l
    }

    /// `l > 0` with `I'(l u)[u] = 0`: the maximum of `I` along the ray through `u`.
    ///
    /// Bracketed root finding (false position with the Illinois modification,
    /// falling back to bisection) on the monotone map `l -> I'(l u)[u] / l`,
    /// to relative tolerance `1e-12` in `l`.
    pub fn nehari_scale(&self, u: &[f64]) -> Result<f64> {
        let charged = u
            .iter()
            .zip(&self.kw)
            .any(|(&x, &w)| w > 0.0 && self.nl.f(x) * x > 0.0);
        if !charged {
            return Err(Error::NoScale);
        }
        let norm2 = self.op.norm_x2(u);
        let (mut lo, mut hi, mut f_lo, mut f_hi);
        let f1 = self.ray_slope(u, norm2, 1.0);
        if f1 >= 0.0 {
            (lo, f_lo) = (1.0, f1);
            loop {
                hi = 2.0 * lo;
                f_hi = self.ray_slope(u, norm2, hi);
                if f_hi < 0.0 {
                    break;
                }
                if !hi.is_finite() {
                    return Err(Error::NoScale);
                }
                (lo, f_lo) = (hi, f_hi);
            }
        } else {
            (hi, f_hi) = (1.0, f1);
            loop {
                lo = 0.5 * hi;
                f_lo = self.ray_slope(u, norm2, lo);
                if f_lo >= 0.0 {
                    break;
                }
                if lo == 0.0 {
                    return Err(Error::NoScale);
                }
                (hi, f_hi) = (lo, f_lo);
            }
        }
        let mut side = 0i8;
        for _ in 0..200 {
            if hi - lo <= 1e-12 * hi {
                break;
            }
            let mut m = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
            if !(m > lo && m < hi) {
                m = 0.5 * (lo + hi);
            }
            let fm = self.ray_slope(u, norm2, m);
            if fm == 0.0 {
                return Ok(m);
            }
            if fm > 0.0 {
                lo = m;
                f_lo = fm;
                if side == 1 {
                    f_hi *= 0.5;
                }
                side = 1;
            } else {
                hi = m;
                f_hi = fm;
                if side == -1 {
                    f_lo *= 0.5;
                }
                side = -1;
            }
            // keep the bracket shrinking geometrically even when false position stalls
            if hi - lo > 0.5 * (hi + lo) * 1e-3 {
                let mid = 0.5 * (lo + hi);
                let fmid = self.ray_slope(u, norm2, mid);
                if fmid >= 0.0 {
                    lo = mid;
                    f_lo = fmid;
                } else {
                    hi = mid;
                    f_hi = fmid;
                }
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// `|I'(u)[u]| / ||u||^2`.
    pub fn nehari_defect(&self, u: &[f64]) -> f64 {
        let n2 = self.op.norm_x2(u);
        if n2 == 0.0 {
            return 0.0;
        }
        libm::fabs(self.derivative(u, u)) / n2
    }
}

fn functional(
    grid_fn: &DiscreteRadialFunction,
    a: &PotentialSpec,
    v: &PotentialSpec,
    k: &PotentialSpec,
    nl: &Nonlinearity,
) -> Result<EnergyFunctional> {
    let op = RadialOperator::new(grid_fn.grid().clone(), a, v, k)?;
    Ok(EnergyFunctional::new(op, nl.clone()))
}

pub fn energy(
    u: &DiscreteRadialFunction,
    a: &PotentialSpec,
    v: &PotentialSpec,
    k: &PotentialSpec,
    nl: &Nonlinearity,
) -> Result<EnergyBreakdown> {
    Ok(functional(u, a, v, k, nl)?.energy(u.values()))
}

pub fn derivative(
    u: &DiscreteRadialFunction,
    h: &DiscreteRadialFunction,
    a: &PotentialSpec,
    v: &PotentialSpec,
    k: &PotentialSpec,
    nl: &Nonlinearity,
) -> Result<f64> {
    if !u.same_grid(h) {
        return Err(Error::GridMismatch);
    }
    Ok(functional(u, a, v, k, nl)?.derivative(u.values(), h.values()))
}

pub fn x_gradient(
    u: &DiscreteRadialFunction,
    a: &PotentialSpec,
    v: &PotentialSpec,
    k: &PotentialSpec,
    nl: &Nonlinearity,
) -> Result<DiscreteRadialFunction> {
    let g = functional(u, a, v, k, nl)?.x_gradient(u.values())?;
    DiscreteRadialFunction::new(u.grid().clone(), g)
}

pub fn nehari_scale(
    u: &DiscreteRadialFunction,
    a: &PotentialSpec,
    v: &PotentialSpec,
    k: &PotentialSpec,
    nl: &Nonlinearity,
) -> Result<f64> {
    functional(u, a, v, k, nl)?.nehari_scale(u.values())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grading, RadialGrid};
    use approx::assert_relative_eq;

    #[test]
    fn min_power_values() {
        let nl = Nonlinearity::MinPower { q1: 3.0, q2: 5.0 };
        assert_relative_eq!(nl.f(0.5), 1.0 / 16.0, max_relative = 1e-15);
        assert_relative_eq!(nl.f(2.0), 4.0, max_relative = 1e-15);
        assert_eq!(nl.f(0.0), 0.0);
        assert_eq!(nl.big_f(0.0), 0.0);
        assert_eq!(nl.f(-3.0), 0.0);
        // primitive: t^5/5 below 1, 1/5 + (t^3 - 1)/3 above
        assert_relative_eq!(nl.big_f(0.5), 0.5f64.powi(5) / 5.0, max_relative = 1e-15);
        assert_relative_eq!(nl.big_f(2.0), 0.2 + 7.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn primitive_matches_quadrature() {
        for nl in [
            Nonlinearity::MinPower { q1: 3.0, q2: 13.0 },
            Nonlinearity::MinPower { q1: 7.0, q2: 2.5 },
            Nonlinearity::PurePower { q: 5.0 },
        ] {
            for &t in &[0.3, 1.0, 1.7, 4.0] {
                let n = 20000;
                let h = t / n as f64;
                let mut s = 0.0;
                for i in 0..n {
                    let x = (i as f64 + 0.5) * h;
                    s += nl.f(x) * h;
                }
                assert_relative_eq!(nl.big_f(t), s, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn odd_extension() {
        let nl = Nonlinearity::MinPowerOdd { q1: 3.0, q2: 5.0 };
        assert_eq!(nl.f(-2.0), -4.0);
        assert_eq!(nl.big_f(-2.0), nl.big_f(2.0));
        let rep = check_f_hypotheses(&nl);
        assert!(rep.passed, "{:?}", rep.messages);
        assert_eq!(rep.odd, Some(true));
    }

    #[test]
    fn hypotheses_for_builtins() {
        let rep = check_f_hypotheses(&Nonlinearity::MinPower { q1: 3.0, q2: 5.0 });
        assert!(rep.passed, "{:?}", rep.messages);
        assert_eq!(rep.theta, Some(3.0));
        assert_eq!(rep.m, Some(0.2));
        assert_eq!(rep.t0, Some(1e-6));

        let pure = Nonlinearity::PurePower { q: 4.5 };
        let rep = check_f_hypotheses(&pure);
        assert!(rep.passed, "{:?}", rep.messages);
        assert_eq!(rep.theta, Some(4.5));
        for t in [0.1, 1.0, 3.0] {
            assert_relative_eq!(4.5 * pure.big_f(t), pure.f(t) * t, max_relative = 1e-14);
        }
    }

    #[test]
    fn linear_custom_fails() {
        let nl = Nonlinearity::custom("linear", |t| t, |t| 0.5 * t * t, 3.0, 3.0, 3.0);
        let rep = check_f_hypotheses(&nl);
        assert!(!rep.passed);
        assert!(rep.witness.is_some());
    }

    #[test]
    fn invalid_exponents() {
        assert!(Nonlinearity::PurePower { q: 2.0 }.validate().is_err());
        assert!(Nonlinearity::MinPower { q1: 3.0, q2: 5.0 }.validate().is_ok());
    }

    fn setup(nl: Nonlinearity) -> (EnergyFunctional, Arc<RadialGrid>) {
        let g = Arc::new(RadialGrid::build(3, 1e-4, 40.0, 300, Grading::Geometric).unwrap());
        let op = RadialOperator::new(
            g.clone(),
            &PotentialSpec::constant(1.0),
            &PotentialSpec::constant(1.0),
            &PotentialSpec::constant(1.0),
        )
        .unwrap();
        (EnergyFunctional::new(op, nl), g)
    }

    fn bump(g: &RadialGrid, amp: f64) -> Vec<f64> {
        let mut u: Vec<f64> = g.nodes().iter().map(|r| amp * math::exp(-r * r / 4.0)).collect();
        *u.last_mut().unwrap() = 0.0;
        u
    }

    #[test]
    fn zero_function_and_nonpositive_u() {
        let (fun, g) = setup(Nonlinearity::MinPower { q1: 3.0, q2: 5.0 });
        let zero = alloc::vec![0.0; g.len()];
        assert_eq!(fun.energy(&zero).total, 0.0);
        let h = bump(&g, 1.0);
        assert_eq!(fun.derivative(&zero, &h), 0.0);
        let neg: Vec<f64> = h.iter().map(|x| -x).collect();
        let e = fun.energy(&neg);
        assert_eq!(e.potential, 0.0);
        assert_eq!(e.total, e.quadratic);
        assert!(matches!(fun.nehari_scale(&neg), Err(Error::NoScale)));
    }

    #[test]
    fn quadratic_gradient_is_identity() {
        let (fun, g) = setup(Nonlinearity::Zero);
        let u = bump(&g, 2.0);
        let grad = fun.x_gradient(&u).unwrap();
        for (a, b) in u.iter().zip(&grad) {
            assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()));
        }
        let (fun, _) = setup(Nonlinearity::MinPower { q1: 3.0, q2: 5.0 });
        let z = alloc::vec![0.0; g.len()];
        assert!(fun.x_gradient(&z).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn pure_power_scale_closed_form() {
        let q = 5.0;
        let (fun, g) = setup(Nonlinearity::PurePower { q });
        let u = bump(&g, 0.3);
        let lam = fun.nehari_scale(&u).unwrap();
        let norm2 = fun.operator().norm_x2(&u);
        let s: f64 = u.iter().zip(fun.k_weights()).map(|(x, w)| w * math::pow(*x, q)).sum();
        let exact = math::pow(norm2 / s, 1.0 / (q - 2.0));
        assert_relative_eq!(lam, exact, max_relative = 1e-10);
        let w: Vec<f64> = u.iter().map(|x| lam * x).collect();
        assert!(fun.nehari_defect(&w) < 1e-10);
        // ray reparametrization
        let u3: Vec<f64> = u.iter().map(|x| 3.0 * x).collect();
        assert_relative_eq!(fun.nehari_scale(&u3).unwrap(), lam / 3.0, max_relative = 1e-10);
    }
}
