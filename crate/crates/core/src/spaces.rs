//! Discrete radial functions and the weighted norms built on them.
//!
//! Functions are nodal values on a [`RadialGrid`]; derivatives are cell
//! differences and `A` is evaluated at cell midpoints, which keeps the
//! discrete energy positive definite. `V` and `K` enter through the hat
//! weights of the grid (lumped at the nodes).
//!
//! The discrete space `X` pins the outermost node to zero; the inner end
//! carries the natural (no-flux) condition.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{RadialGrid, Region};
use crate::linalg::SymTridiagonal;
use crate::math;
use crate::potentials::{fit_asymptotics, End, PotentialSpec};

/// Nodal values of a radial function.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteRadialFunction {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl DiscreteRadialFunction {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Parameter(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!("non-finite value at node {i}")));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let values = alloc::vec![0.0; grid.len()];
        Self { grid, values }
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: Arc<RadialGrid>, f: F) -> Self {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(libm::fabs(*v)))
    }

    /// Cell derivatives `(u_{i+1} - u_i) / (r_{i+1} - r_i)`.
    pub fn derivative(&self) -> Vec<f64> {
        let r = self.grid.nodes();
        self.values
            .windows(2)
            .zip(r.windows(2))
            .map(|(u, r)| (u[1] - u[0]) / (r[1] - r[0]))
            .collect()
    }

    /// Linear interpolation onto another grid; zero outside this grid's range.
    pub fn interpolate_to(&self, grid: Arc<RadialGrid>) -> Self {
        let src = self.grid.nodes();
        let values = grid
            .nodes()
            .iter()
            .map(|&r| {
                if r < src[0] {
                    return self.values[0];
                }
                let i = src.partition_point(|&x| x < r);
                if i == 0 {
                    self.values[0]
                } else if i >= src.len() {
                    0.0
                } else {
                    let t = (r - src[i - 1]) / (src[i] - src[i - 1]);
                    self.values[i - 1] + t * (self.values[i] - self.values[i - 1])
                }
            })
            .collect();
        Self { grid, values }
    }
}

/// `A`, `V`, `K` sampled on a grid: the discrete operator behind every norm,
/// the energy functional and the probes.
#[derive(Debug, Clone)]
pub struct RadialOperator {
    grid: Arc<RadialGrid>,
    /// `omega A(mid) |cell| / h^2` per cell.
    stiffness: Vec<f64>,
    /// `V` at the nodes.
    v: Vec<f64>,
    /// `K` at the nodes.
    k: Vec<f64>,
}

impl RadialOperator {
    pub fn new(
        grid: Arc<RadialGrid>,
        a: &PotentialSpec,
        v: &PotentialSpec,
        k: &PotentialSpec,
    ) -> Result<Self> {
        let omega = grid.omega();
        let nodes = grid.nodes();
        let mut stiffness = Vec::with_capacity(grid.len() - 1);
        for c in 0..grid.len() - 1 {
            let h = nodes[c + 1] - nodes[c];
            let a_mid = a.eval(grid.midpoint(c))?;
            stiffness.push(omega * a_mid * grid.cell_mass(c) / (h * h));
        }
        let v: Vec<f64> = nodes.iter().map(|&r| v.eval(r)).collect::<Result<_>>()?;
        let k: Vec<f64> = nodes.iter().map(|&r| k.eval(r)).collect::<Result<_>>()?;
        if let Some(bad) = stiffness
            .iter()
            .chain(&v)
            .chain(&k)
            .find(|x| !x.is_finite())
        {
            return Err(Error::Domain(format!(
                "potential value {bad} on the grid is not finite; shrink the grid range"
            )));
        }
        Ok(Self {
            grid,
            stiffness,
            v,
            k,
        })
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn k_nodes(&self) -> &[f64] {
        &self.k
    }

    fn check(&self, u: &DiscreteRadialFunction) -> Result<()> {
        if Arc::ptr_eq(u.grid(), &self.grid) || **u.grid() == *self.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `\int_region A |u'|^2`.
    pub fn a_energy(&self, u: &[f64], region: Region) -> f64 {
        let (first, last, _) = self.grid.cell_range(region);
        (first..last)
            .map(|c| {
                let d = u[c + 1] - u[c];
                self.stiffness[c] * d * d
            })
            .sum()
    }

    /// `\int_region V u^2`.
    pub fn v_energy(&self, u: &[f64], region: Region) -> f64 {
        let (first, last, _) = self.grid.cell_range(region);
        let omega = self.grid.omega();
        let mut s = 0.0;
        for c in first..last {
            let (wl, wr) = self.grid.cell_weights(c);
            s += wl * self.v[c] * u[c] * u[c] + wr * self.v[c + 1] * u[c + 1] * u[c + 1];
        }
        omega * s
    }

    /// `(u|h)_X`.
    pub fn inner(&self, u: &[f64], h: &[f64]) -> f64 {
        let omega = self.grid.omega();
        let w = self.grid.weights();
        let mut s = 0.0;
        for c in 0..self.stiffness.len() {
            s += self.stiffness[c] * (u[c + 1] - u[c]) * (h[c + 1] - h[c]);
        }
        let mut m = 0.0;
        for i in 0..u.len() {
            m += w[i] * self.v[i] * u[i] * h[i];
        }
        s + omega * m
    }

    pub fn norm_x2(&self, u: &[f64]) -> f64 {
        self.inner(u, u)
    }

    /// Per-node weights `omega w_i K_i` restricted to a region.
    pub fn k_weights(&self, region: Region) -> Vec<f64> {
        let omega = self.grid.omega();
        let mut out = alloc::vec![0.0; self.grid.len()];
        let (first, last, _) = self.grid.cell_range(region);
        for c in first..last {
            let (wl, wr) = self.grid.cell_weights(c);
            out[c] += omega * wl * self.k[c];
            out[c + 1] += omega * wr * self.k[c + 1];
        }
        out
    }

    /// Gram matrix of `(.|.)_X` on the free nodes (all but the outermost).
    pub fn gram(&self) -> SymTridiagonal {
        let free = self.grid.len() - 1;
        let omega = self.grid.omega();
        let w = self.grid.weights();
        let mut diag: Vec<f64> = (0..free).map(|i| omega * w[i] * self.v[i]).collect();
        let mut off = Vec::with_capacity(free.saturating_sub(1));
        for (c, &s) in self.stiffness.iter().enumerate() {
            diag[c] += s;
            if c + 1 < free {
                diag[c + 1] += s;
                off.push(-s);
            }
        }
        SymTridiagonal { diag, off }
    }

    /// Riesz representative in `X` of the functional `h -> sum_i dual_i h_i`.
    pub fn riesz(&self, dual: &[f64]) -> Result<Vec<f64>> {
        let free = self.grid.len() - 1;
        let mut g = self.gram().solve(&dual[..free])?;
        g.push(0.0);
        Ok(g)
    }

    /// Same as [`riesz`](Self::riesz) with a pre-assembled Gram matrix.
    pub fn riesz_with(&self, gram: &SymTridiagonal, dual: &[f64]) -> Result<Vec<f64>> {
        let free = self.grid.len() - 1;
        let mut g = gram.solve(&dual[..free])?;
        g.push(0.0);
        Ok(g)
    }

    pub fn checked_inner(&self, u: &DiscreteRadialFunction, h: &DiscreteRadialFunction) -> Result<f64> {
        self.check(u)?;
        self.check(h)?;
        Ok(self.inner(u.values(), h.values()))
    }
}

fn operator_av(u: &DiscreteRadialFunction, a: &PotentialSpec, v: &PotentialSpec) -> Result<RadialOperator> {
    RadialOperator::new(u.grid().clone(), a, v, &PotentialSpec::constant(1.0))
}

/// `||u||_A` over the whole grid.
pub fn norm_a(u: &DiscreteRadialFunction, a: &PotentialSpec) -> Result<f64> {
    norm_a_region(u, a, Region::All)
}

pub fn norm_a_region(u: &DiscreteRadialFunction, a: &PotentialSpec, region: Region) -> Result<f64> {
    let op = operator_av(u, a, &PotentialSpec::constant(0.0))?;
    Ok(math::sqrt(op.a_energy(u.values(), region)))
}

/// `||u||_A`, `(\int V u^2)^{1/2}`, `||u||_X`, optionally split at a radius.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormBundle {
    pub norm_a: f64,
    pub norm_v: f64,
    pub norm_x: f64,
    /// `(norm_a, norm_v)` on the ball and on its complement.
    pub ball: Option<(f64, f64)>,
    pub complement: Option<(f64, f64)>,
}

pub fn norm_bundle(
    u: &DiscreteRadialFunction,
    a: &PotentialSpec,
    v: &PotentialSpec,
    split: Option<f64>,
) -> Result<NormBundle> {
    let op = operator_av(u, a, v)?;
    let x = u.values();
    let a2 = op.a_energy(x, Region::All);
    let v2 = op.v_energy(x, Region::All);
    let part = |region| {
        (
            math::sqrt(op.a_energy(x, region)),
            math::sqrt(op.v_energy(x, region)),
        )
    };
    Ok(NormBundle {
        norm_a: math::sqrt(a2),
        norm_v: math::sqrt(v2),
        norm_x: math::sqrt(a2 + v2),
        ball: split.map(|r| part(Region::Ball(r))),
        complement: split.map(|r| part(Region::Complement(r))),
    })
}

pub fn norm_x(u: &DiscreteRadialFunction, a: &PotentialSpec, v: &PotentialSpec) -> Result<f64> {
    Ok(norm_bundle(u, a, v, None)?.norm_x)
}

/// `(u|h)_X = \int A u' h' + \int V u h`.
pub fn inner_product_x(
    u: &DiscreteRadialFunction,
    h: &DiscreteRadialFunction,
    a: &PotentialSpec,
    v: &PotentialSpec,
) -> Result<f64> {
    if !u.same_grid(h) {
        return Err(Error::GridMismatch);
    }
    let op = operator_av(u, a, v)?;
    op.checked_inner(u, h)
}

/// `(\int_region K |u|^q)^{1/q}`.
pub fn norm_lqk(u: &DiscreteRadialFunction, k: &PotentialSpec, q: f64, region: Region) -> Result<f64> {
    if !(q > 1.0) {
        return Err(Error::Parameter(format!("q = {q} must exceed 1")));
    }
    let kv: Vec<f64> = u
        .values()
        .iter()
        .zip(u.grid().nodes())
        .map(|(x, &r)| Ok(k.eval(r)? * math::pow(libm::fabs(*x), q)))
        .collect::<Result<_>>()?;
    let s = u.grid().quadrature(&kv, region).value;
    Ok(math::pow(s, 1.0 / q))
}

/// Computational norm of `L^{q1}_K + L^{q2}_K` and the minimizing level.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SumNorm {
    pub value: f64,
    pub threshold: f64,
}

/// Level-set splitting `u = u 1_{|u|>T} + u 1_{|u|<=T}` evaluated at a threshold.
#[derive(Debug, Clone)]
pub struct LevelSplit {
    abs: Vec<f64>,
    /// `omega w_i K_i`.
    kw: Vec<f64>,
    q1: f64,
    q2: f64,
}

impl LevelSplit {
    pub fn new(u: &DiscreteRadialFunction, k: &PotentialSpec, q1: f64, q2: f64) -> Result<Self> {
        if !(q1 > 1.0 && q2 > 1.0) {
            return Err(Error::Parameter(format!("q1 = {q1}, q2 = {q2} must exceed 1")));
        }
        let omega = u.grid().omega();
        let kw = u
            .grid()
            .nodes()
            .iter()
            .zip(u.grid().weights())
            .map(|(&r, w)| Ok(omega * w * k.eval(r)?))
            .collect::<Result<_>>()?;
        Ok(Self {
            abs: u.values().iter().map(|x| libm::fabs(*x)).collect(),
            kw,
            q1,
            q2,
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.abs.iter().fold(0.0, |m, &v| m.max(v))
    }

    /// `(||u 1_{|u|>T}||_{q1}, ||u 1_{|u|<=T}||_{q2})`.
    pub fn parts(&self, t: f64) -> (f64, f64) {
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for (&x, &w) in self.abs.iter().zip(&self.kw) {
            if x > t {
                s1 += w * math::pow(x, self.q1);
            } else {
                s2 += w * math::pow(x, self.q2);
            }
        }
        (math::pow(s1, 1.0 / self.q1), math::pow(s2, 1.0 / self.q2))
    }

    pub fn value(&self, t: f64) -> f64 {
        let (a, b) = self.parts(t);
        a.max(b)
    }
}

/// Sum-space norm restricted to level-set decompositions, minimized over the
/// level by golden-section search.
///
/// The objective is the max of a nonincreasing and a nondecreasing step
/// function of `T`. Ties between the two probes are broken by which part
/// dominates, which keeps the bracket on the correct side of flat stretches.
pub fn sum_norm(u: &DiscreteRadialFunction, k: &PotentialSpec, q1: f64, q2: f64) -> Result<SumNorm> {
    let split = LevelSplit::new(u, k, q1, q2)?;
    Ok(golden_threshold(&split, 1e-10))
}

pub fn golden_threshold(split: &LevelSplit, rel_tol: f64) -> SumNorm {
    let top = split.max_abs();
    if top == 0.0 {
        return SumNorm {
            value: 0.0,
            threshold: 0.0,
        };
    }
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (0.0, top);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut pc, mut pd) = (split.parts(c), split.parts(d));
    let mut best = SumNorm {
        value: f64::INFINITY,
        threshold: 0.0,
    };
    let consider = |t: f64, v: f64, best: &mut SumNorm| {
        if v < best.value {
            *best = SumNorm { value: v, threshold: t };
        }
    };
    while b - a > rel_tol * top {
        let fc = pc.0.max(pc.1);
        let fd = pd.0.max(pd.1);
        consider(c, fc, &mut best);
        consider(d, fd, &mut best);
        // upper part dominating at c: every T < c is at least as bad
        let keep_right = fc > fd || (fc == fd && pc.0 > pc.1);
        if keep_right {
            a = c;
            c = d;
            pc = pd;
            d = a + INV_PHI * (b - a);
            pd = split.parts(d);
        } else {
            b = d;
            d = c;
            pd = pc;
            c = b - INV_PHI * (b - a);
            pc = split.parts(c);
        }
    }
    for t in [0.5 * (a + b), 0.0, top] {
        consider(t, split.value(t), &mut best);
    }
    best
}

/// Outcome of a pointwise decay check.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayCheck {
    pub max_ratio: f64,
    pub c_bound: f64,
    pub passed: bool,
}

/// Default relative slack of the decay checks.
pub const DECAY_SLACK: f64 = 0.05;

/// `|u(r)| r^{(N + a_inf - 2)/2} <= C ||u||_{A, |x| > R}` for `r >= R`, with
/// `C = (omega_N C_inf(R) (N + a_inf - 2))^{-1/2}` and `C_inf(R) = inf_{r >= R} A / r^{a_inf}`.
pub fn verify_decay_infinity(u: &DiscreteRadialFunction, a: &PotentialSpec, r: f64) -> Result<DecayCheck> {
    verify_decay_infinity_with(u, a, r, DECAY_SLACK)
}

pub fn verify_decay_infinity_with(
    u: &DiscreteRadialFunction,
    a: &PotentialSpec,
    radius: f64,
    slack: f64,
) -> Result<DecayCheck> {
    let values = u.values();
    if values[values.len() - 1] != 0.0 {
        return Err(Error::Support("u does not vanish at the outer grid node".into()));
    }
    let ainf = fit_asymptotics(a, End::Infinity)?.exponent;
    let grid = u.grid();
    let (j, _) = grid.snap(radius);
    let r_snap = grid.nodes()[j];
    let n = grid.dim() as f64;
    let expo = (n + ainf - 2.0) / 2.0;
    let c_inf = ratio_inf(a, ainf, grid, j, grid.len(), r_snap, 1e11)?;
    let c_bound = 1.0 / math::sqrt(grid.omega() * c_inf * (n + ainf - 2.0));
    let norm = norm_a_region(u, a, Region::Complement(r_snap))?;
    let mut max_ratio: f64 = 0.0;
    if norm > 0.0 {
        for i in j..grid.len() {
            let rr = grid.nodes()[i];
            max_ratio = max_ratio.max(libm::fabs(values[i]) * math::pow(rr, expo) / norm);
        }
    }
    Ok(DecayCheck {
        max_ratio,
        c_bound,
        passed: max_ratio <= c_bound * (1.0 + slack),
    })
}

/// Origin analogue of [`verify_decay_infinity`] for `u` supported in `B_R`.
pub fn verify_decay_origin(u: &DiscreteRadialFunction, a: &PotentialSpec, r: f64) -> Result<DecayCheck> {
    verify_decay_origin_with(u, a, r, DECAY_SLACK)
}

pub fn verify_decay_origin_with(
    u: &DiscreteRadialFunction,
    a: &PotentialSpec,
    radius: f64,
    slack: f64,
) -> Result<DecayCheck> {
    let grid = u.grid();
    let (j, _) = grid.snap(radius);
    let values = u.values();
    if let Some(i) = (j..values.len()).find(|&i| values[i] != 0.0) {
        return Err(Error::Support(format!(
            "u is nonzero at r = {} >= R = {}",
            grid.nodes()[i],
            grid.nodes()[j]
        )));
    }
    let a0 = fit_asymptotics(a, End::Zero)?.exponent;
    let r_snap = grid.nodes()[j];
    let n = grid.dim() as f64;
    let expo = (n + a0 - 2.0) / 2.0;
    let c0 = ratio_inf(a, a0, grid, 0, j + 1, r_snap, 1e-11)?;
    let c_bound = 1.0 / math::sqrt(grid.omega() * c0 * (n + a0 - 2.0));
    let norm = norm_a_region(u, a, Region::Ball(r_snap))?;
    let mut max_ratio: f64 = 0.0;
    if norm > 0.0 {
        for i in 0..j {
            let rr = grid.nodes()[i];
            max_ratio = max_ratio.max(libm::fabs(values[i]) * math::pow(rr, expo) / norm);
        }
    }
    Ok(DecayCheck {
        max_ratio,
        c_bound,
        passed: max_ratio <= c_bound * (1.0 + slack),
    })
}

/// Sampled `inf A(r) / r^e` over grid nodes and midpoints in `[first, last)`
/// plus a geometric ladder from `anchor` out to `far`.
fn ratio_inf(
    a: &PotentialSpec,
    e: f64,
    grid: &RadialGrid,
    first: usize,
    last: usize,
    anchor: f64,
    far: f64,
) -> Result<f64> {
    let ratio = |r: f64| -> Result<f64> { Ok(math::exp(a.ln_eval(r)? - e * math::ln(r))) };
    let mut inf = f64::INFINITY;
    for i in first..last {
        inf = inf.min(ratio(grid.nodes()[i])?);
        if i + 1 < last {
            inf = inf.min(ratio(grid.midpoint(i))?);
        }
    }
    let (lo, hi) = (math::log10(anchor), math::log10(far));
    let steps = 400;
    for s in 0..=steps {
        let r = math::pow(10.0, lo + (hi - lo) * s as f64 / steps as f64);
        inf = inf.min(ratio(r)?);
    }
    Ok(inf)
}
