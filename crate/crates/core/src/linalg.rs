//! Symmetric tridiagonal systems.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix: `diag[i]` and `off[i]` coupling `i` and `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        let n = self.diag.len();
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            out[i] = s;
        }
    }

    /// Solves `M x = rhs` by the Thomas algorithm. No pivoting: meant for
    /// the positive-definite matrices assembled in this crate.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.diag.len();
        let mut c = Vec::with_capacity(n);
        let mut d = Vec::with_capacity(n);
        for i in 0..n {
            let (denom, num) = if i == 0 {
                (self.diag[0], rhs[0])
            } else {
                (
                    self.diag[i] - self.off[i - 1] * c[i - 1],
                    rhs[i] - self.off[i - 1] * d[i - 1],
                )
            };
            if !(denom.abs() > 0.0) || !denom.is_finite() {
                return Err(Error::Singular(i));
            }
            c.push(if i + 1 < n { self.off[i] / denom } else { 0.0 });
            d.push(num / denom);
        }
        let mut x = d;
        for i in (0..n.saturating_sub(1)).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_matches_matvec() {
        let m = SymTridiagonal {
            diag: alloc::vec![4.0, 5.0, 6.0, 3.0],
            off: alloc::vec![-1.0, -2.0, 0.5],
        };
        let x = alloc::vec![1.0, -2.0, 0.25, 3.0];
        let mut b = alloc::vec![0.0; 4];
        m.matvec(&x, &mut b);
        let y = m.solve(&b).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_is_reported() {
        let m = SymTridiagonal {
            diag: alloc::vec![1.0, 1.0],
            off: alloc::vec![1.0],
        };
        assert_eq!(m.solve(&[1.0, 1.0]), Err(Error::Singular(1)));
    }
}
