//! Initial data.
//!
//! Random fields use ChaCha8 seeded through `SeedableRng::seed_from_u64`. Values
//! are drawn in row-major order (`i` outer, `j` inner), one `u64` each, mapped
//! to `lo + (hi - lo) · (x >> 11) · 2⁻⁵³`. Both steps are fully specified, so a
//! seed gives the same field on every platform.

use std::f64::consts::PI;

use gsav_core::{GridFunction, GridSpec};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{HarnessError, Result};

/// `amplitude · sin(2πx/L) · sin(2πy/L)` at the mesh points.
pub fn init_sine(grid: GridSpec, amplitude: f64) -> GridFunction {
    let w = 2.0 * PI / grid.length();
    GridFunction::from_fn(grid, |x, y| amplitude * (w * x).sin() * (w * y).sin())
}

/// I.i.d. uniform values in `[lo, hi]`.
pub fn init_random(grid: GridSpec, lo: f64, hi: f64, seed: u64) -> Result<GridFunction> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(HarnessError::Config(format!("random init needs lo <= hi, got [{lo}, {hi}]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.len())
        .map(|_| {
            let unit = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            lo + (hi - lo) * unit
        })
        .collect();
    Ok(GridFunction::from_vec(grid, values)?)
}
