//! Numerics for the radial problem `-div(A(|x|) grad u) + V(|x|) u = K(|x|) f(u)` on R^N.
//!
//! The crate is `no_std` (it needs `alloc`) and contains no IO. It provides:
//!
//! * [`potentials`]: radial potentials `A`, `V`, `K`, their asymptotic fits and hypothesis checks;
//! * [`exponents`]: closed-form exponent calculus (`p0`, `p_inf`, `q*`, `alpha*`, admissible intervals);
//! * [`grid`]: graded radial meshes and quadrature against `r^(N-1) dr`;
//! * [`spaces`]: discrete weighted norms, the sum-space norm and pointwise decay checks;
//! * [`functional`]: the nonlinearity, the energy functional and its X-gradient;
//! * [`solver`]: Nehari-constrained descent with mountain-pass diagnostics;
//! * [`probes`]: lower-bound estimates of the embedding suprema `S0(q, R)` and `S_inf(q, R)`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod exponents;
pub mod functional;
pub mod grid;
pub mod linalg;
pub mod math;
pub mod potentials;
pub mod probes;
pub mod sampling;
pub mod solver;
pub mod spaces;

pub use error::{Error, Result};
pub use exponents::{ExponentReport, Interval, ProblemParams, Scalar};
pub use functional::{EnergyBreakdown, Nonlinearity};
pub use grid::{Grading, RadialGrid, Region};
pub use potentials::{HypothesisReport, PotentialSpec};
pub use solver::{Problem, SolveConfig, SolveResult};
pub use spaces::{DiscreteRadialFunction, RadialOperator};
