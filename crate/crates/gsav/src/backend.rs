//! rustfft-backed line transforms for the spectral engine.

use std::sync::Arc;

use gsav_core::{FftBackend, LineFft};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Plans every line length with rustfft (mixed radix, SIMD where available).
#[derive(Debug, Clone, Copy, Default)]
pub struct RustFft;

struct Plan {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl LineFft for Plan {
    fn len(&self) -> usize {
        self.len
    }

    fn scratch_len(&self) -> usize {
        self.forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len())
    }

    fn forward(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        let n = self.forward.get_inplace_scratch_len();
        self.forward.process_with_scratch(data, &mut scratch[..n]);
    }

    fn inverse(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        let n = self.inverse.get_inplace_scratch_len();
        self.inverse.process_with_scratch(data, &mut scratch[..n]);
    }
}

impl FftBackend for RustFft {
    fn plan(&self, len: usize) -> Box<dyn LineFft> {
        let mut planner = FftPlanner::new();
        Box::new(Plan {
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        })
    }
}
