#![allow(dead_code)]

use gsav_core::expkernel::dense::DenseMatrix;
use gsav_core::{GridFunction, GridSpec};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_field(grid: GridSpec, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> GridFunction {
    let values = (0..grid.len()).map(|_| rng.gen_range(lo..=hi)).collect();
    GridFunction::from_vec(grid, values).unwrap()
}

pub fn sine_init(grid: GridSpec, amp: f64) -> GridFunction {
    let l = grid.length();
    let w = 2.0 * std::f64::consts::PI / l;
    GridFunction::from_fn(grid, |x, y| amp * (w * x).sin() * (w * y).sin())
}

pub fn to_nalgebra(a: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(a.n(), a.n(), a.data())
}

pub fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}
