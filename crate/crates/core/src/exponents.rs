//! Closed-form exponent calculus.
//!
//! Every formula is written once over [`Scalar`], which is implemented for
//! `f64` and for exact rationals ([`Rational`]). With rational inputs the
//! identities such as `q*(2, 1/2, 0) = (2N+1)/N` hold exactly.

use core::fmt::Debug;
use core::ops::{Add, Div, Mul, Neg, Sub};

use alloc::format;
use num_rational::Rational64;

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Rational = Rational64;

/// Field operations needed by the exponent formulas.
pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;

    fn from_int(i: i64) -> Self {
        Self::from_ratio(i, 1)
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for Rational {
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(num, den)
    }

    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

/// Open interval `(lo, hi)`; `hi = None` is `+inf`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Interval<T> {
    pub lo: T,
    pub hi: Option<T>,
}

impl<T: Scalar> Interval<T> {
    pub fn is_empty(&self) -> bool {
        matches!(&self.hi, Some(hi) if self.lo >= *hi)
    }

    pub fn contains(&self, x: &T) -> bool {
        *x > self.lo && self.hi.as_ref().is_none_or(|hi| x < hi)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let lo = self.lo.clone().max_of(other.lo.clone());
        let hi = match (&self.hi, &other.hi) {
            (Some(a), Some(b)) => Some(a.clone().min_of(b.clone())),
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        };
        Self { lo, hi }
    }

    pub fn to_f64(&self) -> Interval<f64> {
        Interval {
            lo: self.lo.to_f64(),
            hi: self.hi.as_ref().map(Scalar::to_f64),
        }
    }
}

/// Dimension, asymptotic exponents of `A`, and the ratio-bound parameters at both ends.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProblemParams<T> {
    pub n: u32,
    pub a0: T,
    pub ainf: T,
    pub alpha0: T,
    pub alphainf: T,
    pub beta0: T,
    pub betainf: T,
    /// Local integrability exponent of `K`; defaults to `sigma + 1`.
    pub s: Option<T>,
}

impl<T: Scalar> ProblemParams<T> {
    pub fn validate(&self) -> Result<()> {
        check_dimension(self.n)?;
        check_a(self.n, &self.a0, "a0")?;
        check_a(self.n, &self.ainf, "a_inf")?;
        for (b, name) in [(&self.beta0, "beta0"), (&self.betainf, "beta_inf")] {
            if *b < T::from_int(0) || *b > T::from_int(1) {
                return Err(Error::Parameter(format!("{name} = {b:?} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn to_f64(&self) -> ProblemParams<f64> {
        ProblemParams {
            n: self.n,
            a0: self.a0.to_f64(),
            ainf: self.ainf.to_f64(),
            alpha0: self.alpha0.to_f64(),
            alphainf: self.alphainf.to_f64(),
            beta0: self.beta0.to_f64(),
            betainf: self.betainf.to_f64(),
            s: self.s.as_ref().map(Scalar::to_f64),
        }
    }
}

fn check_dimension(n: u32) -> Result<()> {
    if n < 3 {
        return Err(Error::Parameter(format!("dimension N = {n} must be >= 3")));
    }
    Ok(())
}

fn check_a<T: Scalar>(n: u32, a: &T, name: &str) -> Result<()> {
    let lower = T::from_int(2 - n as i64);
    if *a <= lower || *a > T::from_int(2) {
        return Err(Error::Parameter(format!(
            "{name} = {a:?} outside (2-N, 2] for N = {n}"
        )));
    }
    Ok(())
}

/// `p0`, `p_inf`, `p* = min{p0, p_inf}`, `a = max{a0, a_inf}` and the conjugate `sigma` of `p*`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BaseExponents<T> {
    pub p0: T,
    pub pinf: T,
    pub pstar: T,
    pub a: T,
    pub sigma: T,
}

pub fn base_exponents<T: Scalar>(n: u32, a0: T, ainf: T) -> Result<BaseExponents<T>> {
    check_dimension(n)?;
    check_a(n, &a0, "a0")?;
    check_a(n, &ainf, "a_inf")?;
    let nn = T::from_int(n as i64);
    let two = T::from_int(2);
    let p = |a: &T| two.clone() * nn.clone() / (nn.clone() + a.clone() - two.clone());
    let a = a0.clone().max_of(ainf.clone());
    Ok(BaseExponents {
        p0: p(&a0),
        pinf: p(&ainf),
        pstar: p(&a),
        sigma: two.clone() * nn.clone() / (nn - a.clone() + two),
        a,
    })
}

/// `alpha*(a, beta) = max{2beta - 1 - N/2 - a beta + a/2, -(1 - beta) N}`.
pub fn alpha_star<T: Scalar>(n: u32, a: T, beta: T) -> T {
    let nn = T::from_int(n as i64);
    let one = T::from_int(1);
    let two = T::from_int(2);
    let first = two.clone() * beta.clone() - one.clone() - nn.clone() / two.clone()
        - a.clone() * beta.clone()
        + a / two;
    let second = -((one - beta) * nn);
    first.max_of(second)
}

/// `q*(a, alpha, beta) = 2 (alpha - 2beta + N + a beta) / (N + a - 2)`.
pub fn q_star<T: Scalar>(n: u32, a: T, alpha: T, beta: T) -> T {
    let nn = T::from_int(n as i64);
    let two = T::from_int(2);
    two.clone() * (alpha - two.clone() * beta.clone() + nn.clone() + a.clone() * beta)
        / (nn + a - two)
}

/// `q~ = 2 (1 + 1/N - 1/s) - a/N`, defined for `s > sigma`.
pub fn q_tilde<T: Scalar>(n: u32, a: T, s: T) -> Result<T> {
    let nn = T::from_int(n as i64);
    let one = T::from_int(1);
    let two = T::from_int(2);
    let sigma = two.clone() * nn.clone() / (nn.clone() - a.clone() + two.clone());
    if s <= sigma {
        return Err(Error::Parameter(format!(
            "s = {s:?} must exceed sigma = {sigma:?}"
        )));
    }
    Ok(two * (one.clone() + one.clone() / nn.clone() - one / s) - a / nn)
}

/// Admissible exponent intervals `I1`, `I2` and their intersection.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Admissible<T> {
    pub i1: Interval<T>,
    pub i2: Interval<T>,
    pub overlap: Interval<T>,
    /// `alpha0 <= alpha*(a0, beta0)`.
    pub i1_empty: bool,
}

pub fn admissible_intervals<T: Scalar>(p: &ProblemParams<T>) -> Result<Admissible<T>> {
    p.validate()?;
    let one = T::from_int(1);
    let two = T::from_int(2);
    let q0 = q_star(p.n, p.a0.clone(), p.alpha0.clone(), p.beta0.clone());
    let qinf = q_star(p.n, p.ainf.clone(), p.alphainf.clone(), p.betainf.clone());
    let i1 = Interval {
        lo: one.clone().max_of(two.clone() * p.beta0.clone()),
        hi: Some(q0),
    };
    let i2 = Interval {
        lo: one.max_of(two * p.betainf.clone()).max_of(qinf),
        hi: None,
    };
    let i1_empty = p.alpha0 <= alpha_star(p.n, p.a0.clone(), p.beta0.clone());
    let overlap = i1.intersect(&i2);
    Ok(Admissible {
        i1,
        i2,
        overlap,
        i1_empty,
    })
}

/// `delta0 = (N + a0 - 2)(q*(a0, alpha0, beta0) - q1)/2` and
/// `delta_inf = (N + a_inf - 2)(q2 - q*(a_inf, alpha_inf, beta_inf))/2`.
///
/// The case split over `beta` in the compactness estimates collapses to this
/// single expression: the power of `R` is `alpha - 2beta + N + a beta - nu q = nu (q* - q)`
/// with `nu = (N + a - 2)/2`.
pub fn decay_exponents<T: Scalar>(p: &ProblemParams<T>, q1: T, q2: T) -> Result<(T, T)> {
    let adm = admissible_intervals(p)?;
    if adm.i1_empty || !adm.i1.contains(&q1) {
        return Err(Error::Parameter(format!("q1 = {q1:?} is not in I1")));
    }
    if !adm.i2.contains(&q2) {
        return Err(Error::Parameter(format!("q2 = {q2:?} is not in I2")));
    }
    Ok((delta0(p, q1), delta_inf(p, q2)))
}

/// `(N + a - 2)/2`.
pub fn nu<T: Scalar>(n: u32, a: T) -> T {
    let two = T::from_int(2);
    (T::from_int(n as i64) + a - two.clone()) / two
}

/// Unchecked `delta0(q1)`; negative when `q1 > q*`.
pub fn delta0<T: Scalar>(p: &ProblemParams<T>, q1: T) -> T {
    let q0 = q_star(p.n, p.a0.clone(), p.alpha0.clone(), p.beta0.clone());
    nu(p.n, p.a0.clone()) * (q0 - q1)
}

/// Unchecked `delta_inf(q2)`; negative when `q2 < q*`.
pub fn delta_inf<T: Scalar>(p: &ProblemParams<T>, q2: T) -> T {
    let qinf = q_star(p.n, p.ainf.clone(), p.alphainf.clone(), p.betainf.clone());
    nu(p.n, p.ainf.clone()) * (q2 - qinf)
}

/// Every derived exponent of one problem instance.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExponentReport<T> {
    pub n: u32,
    pub p0: T,
    pub pinf: T,
    pub pstar: T,
    pub a: T,
    pub sigma: T,
    pub s: T,
    pub qtilde: T,
    pub alphastar0: T,
    pub alphastarinf: T,
    pub qstar0: T,
    pub qstarinf: T,
    pub i1: Interval<T>,
    pub i2: Interval<T>,
    pub overlap: Interval<T>,
    pub i1_empty: bool,
    pub nu0: T,
    pub nuinf: T,
}

impl<T: Scalar> ExponentReport<T> {
    pub fn compute(p: &ProblemParams<T>) -> Result<Self> {
        p.validate()?;
        let base = base_exponents(p.n, p.a0.clone(), p.ainf.clone())?;
        let s = p
            .s
            .clone()
            .unwrap_or_else(|| base.sigma.clone() + T::from_int(1));
        let qtilde = q_tilde(p.n, base.a.clone(), s.clone())?;
        let adm = admissible_intervals(p)?;
        Ok(Self {
            n: p.n,
            alphastar0: alpha_star(p.n, p.a0.clone(), p.beta0.clone()),
            alphastarinf: alpha_star(p.n, p.ainf.clone(), p.betainf.clone()),
            qstar0: q_star(p.n, p.a0.clone(), p.alpha0.clone(), p.beta0.clone()),
            qstarinf: q_star(p.n, p.ainf.clone(), p.alphainf.clone(), p.betainf.clone()),
            nu0: nu(p.n, p.a0.clone()),
            nuinf: nu(p.n, p.ainf.clone()),
            p0: base.p0,
            pinf: base.pinf,
            pstar: base.pstar,
            a: base.a,
            sigma: base.sigma,
            s,
            qtilde,
            i1: adm.i1,
            i2: adm.i2,
            overlap: adm.overlap,
            i1_empty: adm.i1_empty,
        })
    }

    /// `delta0(q1) = nu0 (q*_0 - q1)`.
    pub fn delta0(&self, q1: T) -> T {
        self.nu0.clone() * (self.qstar0.clone() - q1)
    }

    /// `delta_inf(q2) = nu_inf (q2 - q*_inf)`.
    pub fn delta_inf(&self, q2: T) -> T {
        self.nuinf.clone() * (q2 - self.qstarinf.clone())
    }

    pub fn to_f64(&self) -> ExponentReport<f64> {
        ExponentReport {
            n: self.n,
            p0: self.p0.to_f64(),
            pinf: self.pinf.to_f64(),
            pstar: self.pstar.to_f64(),
            a: self.a.to_f64(),
            sigma: self.sigma.to_f64(),
            s: self.s.to_f64(),
            qtilde: self.qtilde.to_f64(),
            alphastar0: self.alphastar0.to_f64(),
            alphastarinf: self.alphastarinf.to_f64(),
            qstar0: self.qstar0.to_f64(),
            qstarinf: self.qstarinf.to_f64(),
            i1: self.i1.to_f64(),
            i2: self.i2.to_f64(),
            overlap: self.overlap.to_f64(),
            i1_empty: self.i1_empty,
            nu0: self.nu0.to_f64(),
            nuinf: self.nuinf.to_f64(),
        }
    }
}
