//! One-dimensional complex FFTs over batches of contiguous lines.
//!
//! The spectral engine only needs "transform every line of this buffer"; the
//! [`LineFft`] trait captures exactly that so faster implementations (the
//! `gsav` crate wires in rustfft) can replace the built-in ones.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::math;

/// Unnormalized DFT of every consecutive chunk of [`len`](LineFft::len) values.
///
/// `forward` uses the kernel `e^{-2πi kn/N}`, `inverse` uses `e^{+2πi kn/N}`;
/// neither scales by `1/N`.
pub trait LineFft: Send + Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn scratch_len(&self) -> usize {
        0
    }

    fn forward(&self, data: &mut [Complex64], scratch: &mut [Complex64]);

    fn inverse(&self, data: &mut [Complex64], scratch: &mut [Complex64]);
}

/// Factory for [`LineFft`] plans.
pub trait FftBackend {
    fn plan(&self, len: usize) -> Box<dyn LineFft>;
}

/// Radix-2 for power-of-two lengths, direct `O(N²)` DFT otherwise.
#[derive(Debug, Clone, Copy, Default)]
pub struct BuiltinFft;

impl FftBackend for BuiltinFft {
    fn plan(&self, len: usize) -> Box<dyn LineFft> {
        if len.is_power_of_two() {
            Box::new(Radix2::new(len))
        } else {
            Box::new(DirectDft::new(len))
        }
    }
}

/// Iterative decimation-in-time radix-2 FFT.
#[derive(Debug, Clone)]
pub struct Radix2 {
    n: usize,
    bitrev: Vec<u32>,
    twiddles: Vec<Complex64>,
}

impl Radix2 {
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two(), "radix-2 FFT needs a power-of-two length");
        let bits = n.trailing_zeros();
        let bitrev = (0..n as u32)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (32 - bits) })
            .collect();
        let twiddles = (0..n / 2)
            .map(|k| {
                let a = -2.0 * PI * k as f64 / n as f64;
                Complex64::new(math::cos(a), math::sin(a))
            })
            .collect();
        Self { n, bitrev, twiddles }
    }

    fn line(&self, x: &mut [Complex64], inverse: bool) {
        let n = self.n;
        for i in 0..n {
            let j = self.bitrev[i] as usize;
            if j > i {
                x.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let w = if inverse { w.conj() } else { w };
                    let t = x[start + k + half] * w;
                    let a = x[start + k];
                    x[start + k] = a + t;
                    x[start + k + half] = a - t;
                }
            }
            len <<= 1;
        }
    }
}

impl LineFft for Radix2 {
    fn len(&self) -> usize {
        self.n
    }

    fn forward(&self, data: &mut [Complex64], _scratch: &mut [Complex64]) {
        for line in data.chunks_exact_mut(self.n) {
            self.line(line, false);
        }
    }

    fn inverse(&self, data: &mut [Complex64], _scratch: &mut [Complex64]) {
        for line in data.chunks_exact_mut(self.n) {
            self.line(line, true);
        }
    }
}

/// Textbook `O(N²)` DFT; any length.
#[derive(Debug, Clone)]
pub struct DirectDft {
    n: usize,
    roots: Vec<Complex64>,
}

impl DirectDft {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "DFT length must be positive");
        let roots = (0..n)
            .map(|k| {
                let a = -2.0 * PI * k as f64 / n as f64;
                Complex64::new(math::cos(a), math::sin(a))
            })
            .collect();
        Self { n, roots }
    }

    fn line(&self, x: &mut [Complex64], scratch: &mut [Complex64], inverse: bool) {
        let n = self.n;
        for (k, out) in scratch[..n].iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, xt) in x.iter().enumerate() {
                let w = self.roots[(k * t) % n];
                acc += xt * if inverse { w.conj() } else { w };
            }
            *out = acc;
        }
        x.copy_from_slice(&scratch[..n]);
    }
}

impl LineFft for DirectDft {
    fn len(&self) -> usize {
        self.n
    }

    fn scratch_len(&self) -> usize {
        self.n
    }

    fn forward(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        for line in data.chunks_exact_mut(self.n) {
            self.line(line, scratch, false);
        }
    }

    fn inverse(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        for line in data.chunks_exact_mut(self.n) {
            self.line(line, scratch, true);
        }
    }
}
