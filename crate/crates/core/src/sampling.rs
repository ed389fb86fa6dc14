//! Seeded random test functions on a radial grid.

use alloc::vec::Vec;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::grid::RadialGrid;
use crate::math;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for restart `k` of a run seeded by `seed`.
pub fn stream(seed: u64, k: u64) -> SampleRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(k.wrapping_add(1));
    r
}

/// Where bump centres are drawn, in `ln r`.
#[derive(Debug, Clone, Copy)]
pub struct BumpWindow {
    pub ln_lo: f64,
    pub ln_hi: f64,
    pub min_width: f64,
    pub max_width: f64,
}

impl BumpWindow {
    pub fn decades(lo: f64, hi: f64) -> Self {
        Self {
            ln_lo: math::ln(lo),
            ln_hi: math::ln(hi),
            min_width: 0.2,
            max_width: 1.5,
        }
    }
}

/// Sum of 1 to 4 Gaussian bumps in `ln r`, zero at the outer node.
///
/// With `signed` the amplitudes take either sign; otherwise the result is nonnegative.
pub fn random_bumps(grid: &RadialGrid, window: BumpWindow, signed: bool, rng: &mut SampleRng) -> Vec<f64> {
    let count = rng.random_range(1..=4);
    let mut u = alloc::vec![0.0; grid.len()];
    for _ in 0..count {
        let c = rng.random_range(window.ln_lo..=window.ln_hi);
        let w = rng.random_range(window.min_width..=window.max_width);
        let mut amp = rng.random_range(0.2..=1.0);
        if signed && rng.random_bool(0.5) {
            amp = -amp;
        }
        for (ui, &r) in u.iter_mut().zip(grid.nodes()) {
            let z = (math::ln(r) - c) / w;
            if z.abs() < 40.0 {
                *ui += amp * math::exp(-z * z);
            }
        }
    }
    if let Some(last) = u.last_mut() {
        *last = 0.0;
    }
    u
}
