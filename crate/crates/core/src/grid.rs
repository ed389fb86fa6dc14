//! Graded radial meshes on `[r_min, r_max]` and quadrature against the radial
//! measure `omega_N r^(N-1) dr`.
//!
//! Each cell `[r_i, r_{i+1}]` carries the exact integrals of the two hat
//! functions against `r^(N-1)`, so the radial weight is integrated exactly
//! even where it varies by orders of magnitude across a cell near the origin.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Node placement rule.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum Grading {
    /// Constant ratio `r_{i+1}/r_i` over the whole range.
    #[default]
    Geometric,
    /// Geometric up to `switch` using `inner_nodes` nodes, then
    /// `r = switch + (r_max - switch) t^power` on uniform `t`.
    TwoZone {
        switch: f64,
        inner_nodes: usize,
        power: f64,
    },
}

/// Integration region; radii are snapped to the nearest node.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum Region {
    All,
    Ball(f64),
    Complement(f64),
    Annulus(f64, f64),
}

/// Immutable radial mesh with per-cell hat weights.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    n: u32,
    nodes: Vec<f64>,
    grading: Grading,
    /// `\int_cell r^(N-1) phi_left`, `\int_cell r^(N-1) phi_right`.
    cell_left: Vec<f64>,
    cell_right: Vec<f64>,
    weights: Vec<f64>,
}

/// Quadrature value with the bookkeeping of region snapping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub empty: bool,
    /// Largest distance between a requested radius and the node it snapped to.
    pub snap: f64,
}

impl RadialGrid {
    pub fn build(n: u32, r_min: f64, r_max: f64, m: usize, grading: Grading) -> Result<Self> {
        if n < 1 {
            return Err(Error::Parameter("dimension must be positive".into()));
        }
        if !(r_min > 0.0) || !(r_max > r_min) || !r_max.is_finite() {
            return Err(Error::Parameter(format!(
                "grid bounds must satisfy 0 < r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        if m < 3 {
            return Err(Error::Parameter(format!("grid needs at least 3 nodes, got {m}")));
        }
        let nodes = match grading {
            Grading::Geometric => geometric(r_min, r_max, m),
            Grading::TwoZone {
                switch,
                inner_nodes,
                power,
            } => {
                if !(switch > r_min && switch < r_max) || inner_nodes < 2 || inner_nodes >= m || !(power > 0.0)
                {
                    return Err(Error::Parameter(format!(
                        "invalid two-zone grading (switch {switch}, inner nodes {inner_nodes}, power {power})"
                    )));
                }
                let mut nodes = geometric(r_min, switch, inner_nodes);
                let outer = m - inner_nodes;
                for k in 1..=outer {
                    let t = k as f64 / outer as f64;
                    nodes.push(switch + (r_max - switch) * math::pow(t, power));
                }
                nodes[m - 1] = r_max;
                nodes
            }
        };
        Self::from_nodes_with(n, nodes, grading)
    }

    /// Grid on explicit, strictly increasing positive nodes.
    pub fn from_nodes(n: u32, nodes: Vec<f64>) -> Result<Self> {
        Self::from_nodes_with(n, nodes, Grading::Geometric)
    }

    fn from_nodes_with(n: u32, nodes: Vec<f64>, grading: Grading) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::Parameter("grid needs at least 3 nodes".into()));
        }
        if !(nodes[0] > 0.0) || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Parameter("grid nodes must be positive and strictly increasing".into()));
        }
        let cells = nodes.len() - 1;
        let mut cell_left = Vec::with_capacity(cells);
        let mut cell_right = Vec::with_capacity(cells);
        let mut weights = alloc::vec![0.0; nodes.len()];
        for i in 0..cells {
            let (l, r) = hat_masses(n, nodes[i], nodes[i + 1]);
            cell_left.push(l);
            cell_right.push(r);
            weights[i] += l;
            weights[i + 1] += r;
        }
        Ok(Self {
            n,
            nodes,
            grading,
            cell_left,
            cell_right,
            weights,
        })
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn r_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    /// Per-node weights for `\int (.) r^(N-1) dr` (without `omega_N`).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `\int_cell r^(N-1) dr` for each cell.
    pub fn cell_mass(&self, cell: usize) -> f64 {
        self.cell_left[cell] + self.cell_right[cell]
    }

    pub fn cell_weights(&self, cell: usize) -> (f64, f64) {
        (self.cell_left[cell], self.cell_right[cell])
    }

    pub fn midpoint(&self, cell: usize) -> f64 {
        0.5 * (self.nodes[cell] + self.nodes[cell + 1])
    }

    /// Largest `r_{i+1}/r_i`.
    pub fn max_ratio(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] / w[0])
            .fold(1.0, f64::max)
    }

    pub fn omega(&self) -> f64 {
        sphere_area(self.n)
    }

    /// Index of the node nearest to `r` and the snap distance.
    pub fn snap(&self, r: f64) -> (usize, f64) {
        let i = self.nodes.partition_point(|&x| x < r);
        if i == 0 {
            return (0, libm::fabs(self.nodes[0] - r));
        }
        if i == self.nodes.len() {
            let last = self.nodes.len() - 1;
            return (last, libm::fabs(r - self.nodes[last]));
        }
        let (lo, hi) = (self.nodes[i - 1], self.nodes[i]);
        if r - lo <= hi - r {
            (i - 1, r - lo)
        } else {
            (i, hi - r)
        }
    }

    /// Half-open cell range `[first, last)` covered by the region, and the snap distance.
    pub fn cell_range(&self, region: Region) -> (usize, usize, f64) {
        let cells = self.nodes.len() - 1;
        match region {
            Region::All => (0, cells, 0.0),
            Region::Ball(r) => {
                let (j, d) = self.snap(r);
                (0, j, d)
            }
            Region::Complement(r) => {
                let (j, d) = self.snap(r);
                (j, cells, d)
            }
            Region::Annulus(a, b) => {
                let (i, da) = self.snap(a);
                let (j, db) = self.snap(b);
                (i, j.max(i), da.max(db))
            }
        }
    }

    /// `omega_N \int_region g r^(N-1) dr` for nodal values `g`.
    pub fn quadrature(&self, g: &[f64], region: Region) -> Quadrature {
        let (first, last, snap) = self.cell_range(region);
        let mut value = 0.0;
        for c in first..last {
            value += self.cell_left[c] * g[c] + self.cell_right[c] * g[c + 1];
        }
        Quadrature {
            value: self.omega() * value,
            empty: first >= last,
            snap,
        }
    }

    /// Quadrature of a callable sampled at the nodes.
    pub fn quadrature_fn<F: Fn(f64) -> f64>(&self, g: F, region: Region) -> Quadrature {
        let values: Vec<f64> = self.nodes.iter().map(|&r| g(r)).collect();
        self.quadrature(&values, region)
    }
}

fn geometric(r_min: f64, r_max: f64, m: usize) -> Vec<f64> {
    let ratio = math::pow(r_max / r_min, 1.0 / (m - 1) as f64);
    let mut nodes: Vec<f64> = (0..m)
        .map(|i| r_min * math::pow(ratio, i as f64))
        .collect();
    nodes[0] = r_min;
    nodes[m - 1] = r_max;
    nodes
}

/// Exact `\int_a^b r^(N-1) phi dr` for the two hat functions on `[a, b]`,
/// expanded in `h = b - a` so no cancellation occurs for thin cells.
fn hat_masses(n: u32, a: f64, b: f64) -> (f64, f64) {
    let h = b - a;
    let p = n as i32 - 1;
    let mut left = 0.0;
    let mut right = 0.0;
    let mut binom = 1.0;
    for k in 0..=p {
        let term = binom * math::powi(a, p - k) * math::powi(h, k);
        let kf = k as f64;
        left += term / ((kf + 1.0) * (kf + 2.0));
        right += term / (kf + 2.0);
        binom = binom * (p - k) as f64 / (kf + 1.0);
    }
    (h * left, h * right)
}

/// Surface measure of the unit sphere in R^N, `2 pi^(N/2) / Gamma(N/2)`.
pub fn sphere_area(n: u32) -> f64 {
    // Gamma(N/2) by the half-integer recursion
    let mut gamma = if n % 2 == 0 { 1.0 } else { math::sqrt(math::PI) };
    let mut x = if n % 2 == 0 { 1.0 } else { 0.5 };
    let half = n as f64 / 2.0;
    while x < half {
        gamma *= x;
        x += 1.0;
    }
    2.0 * math::pow(math::PI, half) / gamma
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn geometric_ratio() {
        let g = RadialGrid::build(3, 1e-4, 1e2, 1000, Grading::Geometric).unwrap();
        let expected = math::pow(1e6, 1.0 / 999.0);
        for w in g.nodes().windows(2) {
            assert_relative_eq!(w[1] / w[0], expected, max_relative = 1e-12);
        }
        assert_eq!(g.r_min(), 1e-4);
        assert_eq!(g.r_max(), 1e2);
    }

    #[test]
    fn volume_quadrature() {
        let g = RadialGrid::build(3, 1e-4, 1e2, 1000, Grading::Geometric).unwrap();
        let total: f64 = g.weights().iter().sum();
        let exact = (1e6 - 1e-12) / 3.0;
        assert!(((total - exact) / exact).abs() < 1e-10);
    }

    #[test]
    fn inverse_r_quadrature() {
        let g = RadialGrid::build(3, 1e-4, 1e2, 1000, Grading::Geometric).unwrap();
        let q: f64 = g
            .nodes()
            .iter()
            .zip(g.weights())
            .map(|(r, w)| w / r)
            .sum();
        let exact = (1e4 - 1e-8) / 2.0;
        // second-order error with ratio 1.014
        assert!(((q - exact) / exact).abs() < 5e-5);
    }

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(sphere_area(3), 4.0 * math::PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(2), 2.0 * math::PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(6), math::PI * math::PI * math::PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_area(1), 2.0, max_relative = 1e-15);
        // Gamma oracle from libm for odd N
        for n in 2..12u32 {
            let g = libm::tgamma(n as f64 / 2.0);
            assert_relative_eq!(
                sphere_area(n),
                2.0 * math::pow(math::PI, n as f64 / 2.0) / g,
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn ball_and_annulus() {
        let g = RadialGrid::build(3, 1e-6, 10.0, 800, Grading::Geometric).unwrap();
        let (j, _) = g.snap(2.0);
        let r = g.nodes()[j];
        let q = g.quadrature_fn(|_| 1.0, Region::Ball(r));
        let exact = 4.0 * math::PI * r * r * r / 3.0;
        assert!(((q.value - exact) / exact).abs() < 1e-8);
        assert!(!q.empty);

        let (ia, _) = g.snap(0.5);
        let (ib, _) = g.snap(3.0);
        let (a, b) = (g.nodes()[ia], g.nodes()[ib]);
        let q = g.quadrature_fn(|r| 1.0 / (r * r), Region::Annulus(a, b));
        let exact = 4.0 * math::PI * (b - a);
        assert!(((q.value - exact) / exact).abs() < 5e-4);

        let zero = g.quadrature_fn(|_| 0.0, Region::All);
        assert_eq!(zero.value, 0.0);
    }

    #[test]
    fn empty_region_is_flagged() {
        let g = RadialGrid::build(3, 1e-3, 10.0, 50, Grading::Geometric).unwrap();
        let q = g.quadrature_fn(|_| 1.0, Region::Ball(1e-3));
        assert!(q.empty);
        assert_eq!(q.value, 0.0);
    }

    #[test]
    fn region_additivity() {
        let g = RadialGrid::build(4, 1e-5, 50.0, 333, Grading::Geometric).unwrap();
        let vals: Vec<f64> = g.nodes().iter().map(|r| math::exp(-r) * (1.0 + r)).collect();
        let all = g.quadrature(&vals, Region::All).value;
        let ball = g.quadrature(&vals, Region::Ball(1.7)).value;
        let comp = g.quadrature(&vals, Region::Complement(1.7)).value;
        assert_relative_eq!(ball + comp, all, max_relative = 1e-14);
    }

    #[test]
    fn second_order_refinement() {
        let exact = {
            // \int_0^inf e^{-r} r^2 dr = 2 on a truncated range, minus the tails
            let tail = |r: f64| math::exp(-r) * (r * r + 2.0 * r + 2.0);
            tail(1e-3) - tail(20.0)
        };
        let err = |m: usize| {
            let g = RadialGrid::build(3, 1e-3, 20.0, m, Grading::Geometric).unwrap();
            let q: f64 = g
                .nodes()
                .iter()
                .zip(g.weights())
                .map(|(r, w)| w * math::exp(-r))
                .sum();
            ((q - exact) / exact).abs()
        };
        let coarse = err(200);
        // 399 nodes halves ratio - 1 to first order
        let fine = err(399);
        assert!(coarse / fine >= 3.9, "{coarse} {fine}");
    }

    #[test]
    fn two_zone_grid() {
        let grading = Grading::TwoZone {
            switch: 1.0,
            inner_nodes: 300,
            power: 2.0,
        };
        let g = RadialGrid::build(3, 1e-6, 100.0, 500, grading).unwrap();
        assert_eq!(g.len(), 500);
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
        let total: f64 = g.weights().iter().sum();
        let exact = (1e6 - 1e-18) / 3.0;
        assert!(((total - exact) / exact).abs() < 1e-10);
    }

    #[test]
    fn invalid_bounds() {
        assert!(RadialGrid::build(3, 0.0, 1.0, 10, Grading::Geometric).is_err());
        assert!(RadialGrid::build(3, 2.0, 1.0, 10, Grading::Geometric).is_err());
        assert!(RadialGrid::build(3, 1.0, 2.0, 2, Grading::Geometric).is_err());
    }
}
