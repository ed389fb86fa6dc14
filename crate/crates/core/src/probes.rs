//! Lower-bound estimates of the embedding suprema
//!
//! `S0(q, R) = sup_{||u||_X = 1} \int_{B_R} K |u|^q`,
//! `S_inf(q, R) = sup_{||u||_X = 1} \int_{|x| > R} K |u|^q`,
//!
//! and fits of their power-law decay in `R`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exponents::{self, ProblemParams};
use crate::grid::Region;
use crate::linalg::SymTridiagonal;
use crate::math;
use crate::potentials::End;
use crate::sampling::{self, BumpWindow};
use crate::spaces::RadialOperator;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(default))]
pub struct ProbeSettings {
    pub restarts: usize,
    pub max_iter: usize,
    /// Relative change of the objective below which a restart counts as converged.
    pub tol: f64,
    pub seed: u64,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_iter: 2000,
            tol: 1e-8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Estimate {
    /// The radius after snapping to the grid.
    pub radius: f64,
    pub value: f64,
    pub converged: bool,
    pub restart_values: Vec<f64>,
    pub restart_converged: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProbeResult {
    pub q: f64,
    pub end: End,
    pub radii: Vec<f64>,
    pub estimates: Vec<f64>,
    pub fitted_slope: f64,
    /// `delta0` at the zero end, `delta_inf` at infinity; the slope should approach `+delta0` or `-delta_inf`.
    pub predicted_delta: f64,
    /// `q` lies in `I1` (zero end) or `I2` (infinity end).
    pub in_interval: bool,
    pub restarts_used: usize,
    pub converged_flags: Vec<bool>,
}

/// The operator data an ascent needs; assemble once and share across radii.
#[derive(Debug, Clone)]
pub struct Prober<'a> {
    op: &'a RadialOperator,
    gram: SymTridiagonal,
}

impl<'a> Prober<'a> {
    pub fn new(op: &'a RadialOperator) -> Self {
        Self { op, gram: op.gram() }
    }

    pub fn region(&self, end: End, r: f64) -> (Region, f64) {
        let grid = self.op.grid();
        let (j, _) = grid.snap(r);
        let snapped = grid.nodes()[j];
        let region = match end {
            End::Zero => Region::Ball(snapped),
            End::Infinity => Region::Complement(snapped),
        };
        (region, snapped)
    }

    fn window(&self, end: End, r: f64) -> BumpWindow {
        let grid = self.op.grid();
        let (lo, hi) = match end {
            End::Zero => ((r * 1e-3).max(grid.r_min()), r),
            End::Infinity => (r, (r * 1e3).min(grid.r_max())),
        };
        let mut w = BumpWindow::decades(lo, hi);
        if w.ln_hi <= w.ln_lo {
            w.ln_hi = w.ln_lo;
        }
        w
    }

    /// Best value of `\int_region K |u|^q` on the unit sphere over seeded restarts.
    pub fn estimate(&self, end: End, q: f64, r: f64, settings: &ProbeSettings) -> Result<Estimate> {
        if !(q > 1.0) {
            return Err(Error::Parameter(format!("probe exponent must exceed 1, got {q}")));
        }
        let (region, radius) = self.region(end, r);
        let kw = self.op.k_weights(region);
        let free = kw.len() - 1;
        if kw[..free].iter().all(|&w| w == 0.0) {
            return Ok(Estimate {
                radius,
                value: 0.0,
                converged: true,
                restart_values: alloc::vec![0.0; settings.restarts],
                restart_converged: alloc::vec![true; settings.restarts],
            });
        }
        let window = self.window(end, radius);
        let mut restart_values = Vec::with_capacity(settings.restarts);
        let mut restart_converged = Vec::with_capacity(settings.restarts);
        for k in 0..settings.restarts {
            let mut rng = sampling::stream(settings.seed ^ radius.to_bits(), k as u64);
            let mut u0 = sampling::random_bumps(self.op.grid(), window, false, &mut rng);
            let mut tries = 0;
            while objective(&kw, &u0, q) == 0.0 && tries < 20 {
                u0 = sampling::random_bumps(self.op.grid(), window, false, &mut rng);
                tries += 1;
            }
            let (v, c) = self.ascend(&kw, q, u0, settings)?;
            restart_values.push(v);
            restart_converged.push(c);
        }
        let (best, _) = restart_values
            .iter()
            .enumerate()
            .fold((0usize, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
        Ok(Estimate {
            radius,
            value: restart_values[best],
            converged: restart_converged[best],
            restart_values,
            restart_converged,
        })
    }

    /// Projected ascent in the X metric: `u <- (u + s g) / ||u + s g||` with `g` the Riesz
    /// representative of the objective's derivative; `s = inf` (the normalized gradient) is tried first.
    pub fn ascend(&self, kw: &[f64], q: f64, mut u: Vec<f64>, settings: &ProbeSettings) -> Result<(f64, bool)> {
        let n = self.op.norm_x2(&u).sqrt();
        if n == 0.0 {
            return Ok((0.0, false));
        }
        u.iter_mut().for_each(|x| *x /= n);
        let mut phi = objective(kw, &u, q);
        let free = u.len() - 1;
        let mut dual = alloc::vec![0.0; free];
        let mut trial = alloc::vec![0.0; u.len()];
        for _ in 0..settings.max_iter {
            for i in 0..free {
                let x = u[i];
                dual[i] = q * kw[i] * math::pow(libm::fabs(x), q - 2.0) * x;
            }
            let g = self.op.riesz_with(&self.gram, &dual)?;
            let gn = self.op.norm_x2(&g).sqrt();
            if gn == 0.0 {
                return Ok((phi, true));
            }
            let mut next = None;
            // normalized gradient first, then finite steps of X-length tau
            let mut tau = f64::INFINITY;
            for _ in 0..40 {
                if tau.is_infinite() {
                    trial.iter_mut().zip(&g).for_each(|(t, x)| *t = x / gn);
                } else {
                    let s = tau / gn;
                    trial.iter_mut().zip(u.iter().zip(&g)).for_each(|(t, (a, b))| *t = a + s * b);
                    let tn = self.op.norm_x2(&trial).sqrt();
                    trial.iter_mut().for_each(|t| *t /= tn);
                }
                let p = objective(kw, &trial, q);
                if p > phi {
                    next = Some(p);
                    break;
                }
                tau = if tau.is_infinite() { 1.0 } else { tau * 0.5 };
            }
            match next {
                Some(p) => {
                    let change = (p - phi) / p;
                    core::mem::swap(&mut u, &mut trial);
                    phi = p;
                    if change < settings.tol {
                        return Ok((phi, true));
                    }
                }
                None => return Ok((phi, true)),
            }
        }
        Ok((phi, false))
    }
}

fn objective(kw: &[f64], u: &[f64], q: f64) -> f64 {
    kw.iter()
        .zip(u)
        .map(|(&w, &x)| if w == 0.0 { 0.0 } else { w * math::pow(libm::fabs(x), q) })
        .sum()
}

pub fn estimate_s0(op: &RadialOperator, q: f64, r: f64, settings: &ProbeSettings) -> Result<Estimate> {
    Prober::new(op).estimate(End::Zero, q, r, settings)
}

pub fn estimate_sinfty(op: &RadialOperator, q: f64, r: f64, settings: &ProbeSettings) -> Result<Estimate> {
    Prober::new(op).estimate(End::Infinity, q, r, settings)
}

/// Predicted decay exponent and interval membership for `q` at the given end.
pub fn predicted_delta(end: End, q: f64, p: &ProblemParams<f64>) -> Result<(f64, bool)> {
    let adm = exponents::admissible_intervals(p)?;
    Ok(match end {
        End::Zero => (exponents::delta0(p, q), adm.i1.contains(&q)),
        End::Infinity => (exponents::delta_inf(p, q), adm.i2.contains(&q)),
    })
}

/// Assembles a [`ProbeResult`] from per-radius estimates.
pub fn fit_decay(
    end: End,
    q: f64,
    estimates: &[Estimate],
    p: &ProblemParams<f64>,
    restarts: usize,
) -> Result<ProbeResult> {
    if estimates.len() < 3 {
        return Err(Error::Parameter("decay study needs at least 3 radii".into()));
    }
    let radii: Vec<f64> = estimates.iter().map(|e| e.radius).collect();
    if radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Parameter("radii must be strictly increasing after snapping to the grid".into()));
    }
    let values: Vec<f64> = estimates.iter().map(|e| e.value).collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = radii
        .iter()
        .zip(&values)
        .filter(|(_, v)| **v > 0.0)
        .map(|(r, v)| (math::ln(*r), math::ln(*v)))
        .unzip();
    let fitted_slope = if xs.len() >= 2 {
        math::linear_fit(&xs, &ys).0
    } else {
        f64::NAN
    };
    let (predicted, in_interval) = predicted_delta(end, q, p)?;
    Ok(ProbeResult {
        q,
        end,
        radii,
        estimates: values,
        fitted_slope,
        predicted_delta: predicted,
        in_interval,
        restarts_used: restarts,
        converged_flags: estimates.iter().map(|e| e.converged).collect(),
    })
}

/// Estimates `S` at each radius and fits `ln S` against `ln R`.
pub fn decay_study(
    op: &RadialOperator,
    end: End,
    q: f64,
    radii: &[f64],
    p: &ProblemParams<f64>,
    settings: &ProbeSettings,
) -> Result<ProbeResult> {
    if radii.len() < 3 {
        return Err(Error::Parameter("decay study needs at least 3 radii".into()));
    }
    let prober = Prober::new(op);
    let estimates = radii
        .iter()
        .map(|&r| prober.estimate(end, q, r, settings))
        .collect::<Result<Vec<_>>>()?;
    fit_decay(end, q, &estimates, p, settings.restarts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grading, RadialGrid};
    use crate::potentials::PotentialSpec;
    use alloc::sync::Arc;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn op(grid: RadialGrid, k: f64) -> RadialOperator {
        RadialOperator::new(
            Arc::new(grid),
            &PotentialSpec::constant(1.0),
            &PotentialSpec::constant(1.0),
            &PotentialSpec::constant(k),
        )
        .unwrap()
    }

    /// Dense symmetric matrices on the free nodes.
    fn dense(op: &RadialOperator) -> (Vec<Vec<f64>>, Vec<f64>) {
        let g = op.gram();
        let m = g.len();
        let mut a = alloc::vec![alloc::vec![0.0; m]; m];
        for i in 0..m {
            let mut e = alloc::vec![0.0; m];
            e[i] = 1.0;
            let mut col = alloc::vec![0.0; m];
            g.matvec(&e, &mut col);
            for j in 0..m {
                a[j][i] = col[j];
            }
        }
        (a, op.k_weights(Region::All)[..m].to_vec())
    }

    fn gauss_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut m: Vec<Vec<f64>> = a.to_vec();
        let mut x = b.to_vec();
        for c in 0..n {
            let p = (c..n).max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap()).unwrap();
            m.swap(c, p);
            x.swap(c, p);
            for r in c + 1..n {
                let f = m[r][c] / m[c][c];
                for k in c..n {
                    m[r][k] -= f * m[c][k];
                }
                x[r] -= f * x[c];
            }
        }
        for c in (0..n).rev() {
            for k in c + 1..n {
                x[c] -= m[c][k] * x[k];
            }
            x[c] /= m[c][c];
        }
        x
    }

    #[test]
    fn rayleigh_quotient_oracle() {
        let grid = RadialGrid::build(3, 1e-2, 10.0, 40, Grading::Geometric).unwrap();
        let r_max = grid.r_max();
        let o = op(grid, 1.0);
        let (a, w) = dense(&o);
        // inverse iteration for the largest eigenvalue of G^{-1} W
        let mut y = alloc::vec![1.0; w.len()];
        let mut lam = 0.0;
        for _ in 0..5000 {
            let rhs: Vec<f64> = y.iter().zip(&w).map(|(a, b)| a * b).collect();
            let z = gauss_solve(&a, &rhs);
            let num: f64 = z.iter().zip(&w).zip(&z).map(|((a, b), c)| a * b * c).sum();
            let zz: Vec<f64> = {
                let mut out = alloc::vec![0.0; z.len()];
                for i in 0..z.len() {
                    out[i] = (0..z.len()).map(|j| a[i][j] * z[j]).sum();
                }
                out
            };
            let den: f64 = z.iter().zip(&zz).map(|(a, b)| a * b).sum();
            lam = num / den;
            let nz = den.sqrt();
            y = z.iter().map(|x| x / nz).collect();
        }
        let settings = ProbeSettings { max_iter: 20000, tol: 1e-14, ..Default::default() };
        let est = estimate_s0(&o, 2.0, r_max, &settings).unwrap();
        assert!(est.value <= 1.0 + 1e-12);
        assert_relative_eq!(est.value, lam, max_relative = 1e-6);
    }

    #[test]
    fn homogeneous_in_k() {
        let grid = RadialGrid::build(3, 1e-3, 10.0, 120, Grading::Geometric).unwrap();
        let s = ProbeSettings { restarts: 3, ..Default::default() };
        let e1 = estimate_s0(&op(grid.clone(), 1.0), 4.0, 1.0, &s).unwrap();
        let e2 = estimate_s0(&op(grid.clone(), 2.0), 4.0, 1.0, &s).unwrap();
        assert_relative_eq!(e2.value, 2.0 * e1.value, max_relative = 1e-9);
        let f1 = estimate_sinfty(&op(grid.clone(), 1.0), 4.0, 1.0, &s).unwrap();
        let f2 = estimate_sinfty(&op(grid, 2.0), 4.0, 1.0, &s).unwrap();
        assert_relative_eq!(f2.value, 2.0 * f1.value, max_relative = 1e-9);
    }

    #[test]
    fn tiny_grid_sphere_sampling() {
        let grid = RadialGrid::from_nodes(3, alloc::vec![0.5, 1.0, 1.5, 2.0]).unwrap();
        let o = op(grid, 1.0);
        let q = 4.0;
        let (a, _) = dense(&o);
        let kw = o.k_weights(Region::All);
        // Cholesky G = L L^T, sample u = L^{-T} z / |z|
        let mut l = [[0.0f64; 3]; 3];
        for i in 0..3 {
            for j in 0..=i {
                let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
                if i == j {
                    l[i][j] = (a[i][i] - s).sqrt();
                } else {
                    l[i][j] = (a[i][j] - s) / l[j][j];
                }
            }
        }
        let mut rng = sampling::rng(11);
        let mut best = 0.0f64;
        for _ in 0..1_000_000 {
            let mut z = [0.0f64; 3];
            for zi in z.iter_mut() {
                let (u1, u2): (f64, f64) = (rng.random::<f64>().max(1e-300), rng.random());
                *zi = (-2.0 * u1.ln()).sqrt() * (2.0 * core::f64::consts::PI * u2).cos();
            }
            let nz = (z[0] * z[0] + z[1] * z[1] + z[2] * z[2]).sqrt();
            // back-substitution with L^T
            let mut u = [0.0f64; 3];
            for i in (0..3).rev() {
                let s: f64 = (i + 1..3).map(|k| l[k][i] * u[k]).sum();
                u[i] = (z[i] / nz - s) / l[i][i];
            }
            let phi: f64 = (0..3).map(|i| kw[i] * u[i].abs().powf(q)).sum();
            best = best.max(phi);
        }
        let est = estimate_s0(&o, q, 2.0, &ProbeSettings::default()).unwrap();
        assert!(est.value >= best * (1.0 - 1e-9));
        assert!((est.value - best) / est.value < 0.01, "{} vs {}", est.value, best);
    }

    #[test]
    fn monotone_in_radius() {
        let grid = RadialGrid::build(3, 1e-4, 100.0, 300, Grading::Geometric).unwrap();
        let o = op(grid, 1.0);
        let s = ProbeSettings { restarts: 3, ..Default::default() };
        let p = Prober::new(&o);
        let radii = [0.01, 0.1, 1.0, 10.0];
        let zero: Vec<f64> = radii.iter().map(|&r| p.estimate(End::Zero, 3.0, r, &s).unwrap().value).collect();
        let inf: Vec<f64> = radii.iter().map(|&r| p.estimate(End::Infinity, 3.0, r, &s).unwrap().value).collect();
        assert!(zero.windows(2).all(|w| w[1] >= w[0]));
        assert!(inf.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn too_few_radii() {
        let grid = RadialGrid::build(3, 1e-4, 100.0, 100, Grading::Geometric).unwrap();
        let o = op(grid, 1.0);
        let p = ProblemParams {
            n: 3,
            a0: 0.0,
            ainf: 0.0,
            alpha0: 0.0,
            alphainf: 0.0,
            beta0: 0.0,
            betainf: 0.0,
            s: None,
        };
        let r = decay_study(&o, End::Zero, 3.0, &[0.1, 1.0], &p, &ProbeSettings::default());
        assert!(matches!(r, Err(Error::Parameter(_))));
    }
}
