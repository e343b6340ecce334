//! Fast diagonalization of the discrete Laplacian.
//!
//! Periodic grids use the 2D discrete Fourier basis; Neumann grids use the
//! type-II cosine basis `cos(πk(i+½)/M)`, computed through a `2M`-point FFT of
//! the even extension of each line. In both cases the mode `(k, l)` is an
//! eigenvector of `Δ_h` with eigenvalue [`GridSpec::laplacian_eigenvalue`].
//!
//! Coefficient conventions (`x_i` the value at storage offset `i`):
//!
//! * periodic: `X_k = Σ x_i e^{-2πi·ki/M}`, inverse scaled by `1/M`;
//! * Neumann: `X_k = Σ x_i cos(πk(i+½)/M)`, inverse
//!   `x_i = (X_0 + 2 Σ_{k≥1} X_k cos(πk(i+½)/M)) / M`.
//!
//! Every symbol applied here is a function of `λ_k + λ_l`, hence symmetric in
//! `(k, l)`; the hot paths exploit that by leaving coefficients in transposed
//! order between the forward and inverse sweeps.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::fft::{BuiltinFft, FftBackend, LineFft};
use crate::math;
use crate::mesh::{Boundary, GridFunction, GridSpec};
use crate::{Error, Result};

/// Largest grid accepted by the `O(M⁴)` reference transforms.
pub const DIRECT_TRANSFORM_MAX_M: usize = 16;

/// Coefficients of a grid function in the basis that diagonalizes `Δ_h`.
///
/// Stored row-major by `(k, l)`. For Neumann grids the coefficients are real
/// and the imaginary parts are exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoeffs {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralCoeffs {
    pub fn new(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                found: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn get(&self, k: usize, l: usize) -> Complex64 {
        self.coeffs[k * self.grid.m() + l]
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// True when the basis is real (Neumann).
    pub fn is_real(&self) -> bool {
        self.grid.boundary() == Boundary::Neumann
    }
}

/// Reusable transform engine for one grid. Holds the FFT plan and work buffers,
/// so a trajectory keeps one `Spectral` and calls it every step.
pub struct Spectral {
    grid: GridSpec,
    fft: Box<dyn LineFft>,
    eig: Vec<f64>,
    buf: Vec<Complex64>,
    ext: Vec<Complex64>,
    scratch: Vec<Complex64>,
    // e^{-iπk/(2M)}, Neumann only
    phase: Vec<Complex64>,
}

impl core::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish_non_exhaustive()
    }
}

impl Spectral {
    /// Engine backed by the built-in FFT.
    pub fn new(grid: GridSpec) -> Self {
        Self::with_backend(grid, &BuiltinFft)
    }

    pub fn with_backend(grid: GridSpec, backend: &dyn FftBackend) -> Self {
        let m = grid.m();
        let (line_len, phase, ext) = match grid.boundary() {
            Boundary::Periodic => (m, Vec::new(), Vec::new()),
            Boundary::Neumann => {
                let phase = (0..m)
                    .map(|k| {
                        let a = -PI * k as f64 / (2.0 * m as f64);
                        Complex64::new(math::cos(a), math::sin(a))
                    })
                    .collect();
                (2 * m, phase, vec![Complex64::default(); 2 * m * m])
            }
        };
        let fft = backend.plan(line_len);
        assert_eq!(fft.len(), line_len, "FFT backend returned a plan of the wrong length");
        let scratch = vec![Complex64::default(); fft.scratch_len()];
        Self {
            grid,
            fft,
            eig: grid.eigenvalues_1d(),
            buf: vec![Complex64::default(); m * m],
            ext,
            scratch,
            phase,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// One-dimensional Laplacian eigenvalues, `λ_kl = eig[k] + eig[l]`.
    pub fn eigenvalues_1d(&self) -> &[f64] {
        &self.eig
    }

    fn check(&self, v: &GridFunction) {
        assert!(
            *v.grid() == self.grid,
            "grid function on {:?} passed to a transform for {:?}",
            v.grid(),
            self.grid
        );
    }

    fn lines_forward(&mut self) {
        let m = self.grid.m();
        match self.grid.boundary() {
            Boundary::Periodic => self.fft.forward(&mut self.buf, &mut self.scratch),
            Boundary::Neumann => {
                for (row, ext) in self.buf.chunks_exact(m).zip(self.ext.chunks_exact_mut(2 * m)) {
                    for (n, &x) in row.iter().enumerate() {
                        ext[n] = x;
                        ext[2 * m - 1 - n] = x;
                    }
                }
                self.fft.forward(&mut self.ext, &mut self.scratch);
                for (row, ext) in self.buf.chunks_exact_mut(m).zip(self.ext.chunks_exact(2 * m)) {
                    for k in 0..m {
                        row[k] = self.phase[k] * ext[k] * 0.5;
                    }
                }
            }
        }
    }

    fn lines_inverse(&mut self) {
        let m = self.grid.m();
        match self.grid.boundary() {
            Boundary::Periodic => {
                self.fft.inverse(&mut self.buf, &mut self.scratch);
                let s = 1.0 / m as f64;
                for c in self.buf.iter_mut() {
                    *c *= s;
                }
            }
            Boundary::Neumann => {
                for (row, ext) in self.buf.chunks_exact(m).zip(self.ext.chunks_exact_mut(2 * m)) {
                    ext[0] = row[0] * 2.0;
                    ext[m] = Complex64::new(0.0, 0.0);
                    for k in 1..m {
                        ext[k] = self.phase[k].conj() * row[k] * 2.0;
                        ext[2 * m - k] = self.phase[k] * row[k] * 2.0;
                    }
                }
                self.fft.inverse(&mut self.ext, &mut self.scratch);
                let s = 1.0 / (2 * m) as f64;
                for (row, ext) in self.buf.chunks_exact_mut(m).zip(self.ext.chunks_exact(2 * m)) {
                    for n in 0..m {
                        row[n] = ext[n] * s;
                    }
                }
            }
        }
    }

    fn transpose(&mut self) {
        let m = self.grid.m();
        for i in 0..m {
            for j in i + 1..m {
                self.buf.swap(i * m + j, j * m + i);
            }
        }
    }

    /// Forward 2D transform of `buf`, leaving coefficient `(k, l)` at `l * M + k`.
    fn forward_transposed(&mut self) {
        self.lines_forward();
        self.transpose();
        self.lines_forward();
    }

    /// Inverse of [`forward_transposed`](Self::forward_transposed).
    fn inverse_transposed(&mut self) {
        self.lines_inverse();
        self.transpose();
        self.lines_inverse();
    }

    fn load_real(&mut self, x: &[f64]) {
        for (c, &v) in self.buf.iter_mut().zip(x) {
            *c = Complex64::new(v, 0.0);
        }
    }

    fn load_pair(&mut self, x: &[f64], y: &[f64]) {
        for ((c, &a), &b) in self.buf.iter_mut().zip(x).zip(y) {
            *c = Complex64::new(a, b);
        }
    }

    fn store_real(&self, out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.buf) {
            *o = c.re;
        }
    }

    pub fn to_spectral(&mut self, v: &GridFunction) -> SpectralCoeffs {
        self.check(v);
        self.load_real(v.values());
        self.forward_transposed();
        self.transpose();
        if self.grid.boundary() == Boundary::Neumann {
            for c in self.buf.iter_mut() {
                c.im = 0.0;
            }
        }
        SpectralCoeffs {
            grid: self.grid,
            coeffs: self.buf.clone(),
        }
    }

    /// Inverse transform; returns the real part (exact for coefficients of a
    /// real field).
    pub fn from_spectral(&mut self, c: &SpectralCoeffs) -> GridFunction {
        assert!(c.grid == self.grid, "coefficients belong to a different grid");
        self.buf.copy_from_slice(&c.coeffs);
        self.transpose();
        self.inverse_transposed();
        let mut out = vec![0.0; self.grid.len()];
        self.store_real(&mut out);
        GridFunction::from_raw(self.grid, out)
    }

    /// `out = S x` where `S` multiplies mode `(k, l)` by `symbol(k, l)`.
    ///
    /// `symbol` must be symmetric in its arguments and, on periodic grids,
    /// invariant under `k → M-k`, `l → M-l` (any function of `λ_k + λ_l`).
    pub fn apply_into<F>(&mut self, x: &[f64], out: &mut [f64], mut symbol: F)
    where
        F: FnMut(usize, usize) -> f64,
    {
        let m = self.grid.m();
        assert_eq!(x.len(), m * m);
        assert_eq!(out.len(), m * m);
        self.load_real(x);
        self.forward_transposed();
        for (p, c) in self.buf.iter_mut().enumerate() {
            *c *= symbol(p / m, p % m);
        }
        self.inverse_transposed();
        self.store_real(out);
    }

    /// `out = A x + B y` for two diagonal operators sharing one transform pair:
    /// `symbols(k, l)` returns the multipliers `(a, b)` of mode `(k, l)`.
    ///
    /// The two real inputs travel as the real and imaginary parts of one complex
    /// field, so this costs a single forward and a single inverse 2D FFT.
    /// Symmetry requirements are those of [`apply_into`](Self::apply_into).
    pub fn apply_pair_into<F>(&mut self, x: &[f64], y: &[f64], out: &mut [f64], mut symbols: F)
    where
        F: FnMut(usize, usize) -> (f64, f64),
    {
        let m = self.grid.m();
        assert_eq!(x.len(), m * m);
        assert_eq!(y.len(), m * m);
        assert_eq!(out.len(), m * m);
        self.load_pair(x, y);
        self.forward_transposed();
        match self.grid.boundary() {
            Boundary::Neumann => {
                // Real basis: the coefficients of x and y are the real and
                // imaginary parts.
                for (r, row) in self.buf.chunks_exact_mut(m).enumerate() {
                    for (s, c) in row.iter_mut().enumerate() {
                        let (a, b) = symbols(r, s);
                        *c = Complex64::new(a * c.re + b * c.im, 0.0);
                    }
                }
            }
            Boundary::Periodic => {
                // X_p = (Z_p + conj Z_q)/2, Y_p = (Z_p - conj Z_q)/(2i) with q
                // the mode of (-k, -l); the combination stays Hermitian.
                for r in 0..m {
                    let qr = ((m - r) % m) * m;
                    for s in 0..m {
                        let p = r * m + s;
                        let q = qr + (m - s) % m;
                        if q < p {
                            continue;
                        }
                        let zp = self.buf[p];
                        let zq = self.buf[q].conj();
                        let xp = (zp + zq) * 0.5;
                        let d = (zp - zq) * 0.5;
                        let yp = Complex64::new(d.im, -d.re);
                        let (a, b) = symbols(r, s);
                        let w = xp * a + yp * b;
                        self.buf[p] = w;
                        if q != p {
                            self.buf[q] = w.conj();
                        }
                    }
                }
            }
        }
        self.inverse_transposed();
        self.store_real(out);
    }

    /// `Δ_h v` evaluated through the eigen-decomposition.
    pub fn laplacian(&mut self, v: &GridFunction) -> GridFunction {
        self.check(v);
        let eig = self.eig.clone();
        let mut out = vec![0.0; self.grid.len()];
        self.apply_into(v.values(), &mut out, |k, l| eig[k] + eig[l]);
        GridFunction::from_raw(self.grid, out)
    }
}

/// Reference `O(M⁴)` forward transform, same conventions as
/// [`Spectral::to_spectral`]. Refuses `M > 16`.
pub fn direct_to_spectral(v: &GridFunction) -> Result<SpectralCoeffs> {
    let grid = *v.grid();
    let m = grid.m();
    if m > DIRECT_TRANSFORM_MAX_M {
        return Err(Error::TooLarge {
            m,
            max: DIRECT_TRANSFORM_MAX_M,
        });
    }
    let basis = basis_table(&grid);
    let mut coeffs = vec![Complex64::default(); m * m];
    for k in 0..m {
        for l in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..m {
                for j in 0..m {
                    acc += basis[k * m + i] * basis[l * m + j] * v.get(i, j);
                }
            }
            coeffs[k * m + l] = acc;
        }
    }
    Ok(SpectralCoeffs { grid, coeffs })
}

/// Reference `O(M⁴)` inverse transform. Refuses `M > 16`.
pub fn direct_from_spectral(c: &SpectralCoeffs) -> Result<GridFunction> {
    let grid = c.grid;
    let m = grid.m();
    if m > DIRECT_TRANSFORM_MAX_M {
        return Err(Error::TooLarge {
            m,
            max: DIRECT_TRANSFORM_MAX_M,
        });
    }
    let basis = basis_table(&grid);
    let inv = |k: usize, i: usize| -> Complex64 {
        let b = basis[k * m + i];
        match grid.boundary() {
            Boundary::Periodic => b.conj() / m as f64,
            Boundary::Neumann => b * if k == 0 { 1.0 } else { 2.0 } / m as f64,
        }
    };
    let mut out = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..m {
                for l in 0..m {
                    acc += inv(k, i) * inv(l, j) * c.get(k, l);
                }
            }
            out[i * m + j] = acc.re;
        }
    }
    Ok(GridFunction::from_raw(grid, out))
}

fn basis_table(grid: &GridSpec) -> Vec<Complex64> {
    let m = grid.m();
    let mf = m as f64;
    let mut t = Vec::with_capacity(m * m);
    for k in 0..m {
        for i in 0..m {
            t.push(match grid.boundary() {
                Boundary::Periodic => {
                    let a = -2.0 * PI * ((k * i) % m) as f64 / mf;
                    Complex64::new(math::cos(a), math::sin(a))
                }
                Boundary::Neumann => {
                    Complex64::new(math::cos(PI * k as f64 * (i as f64 + 0.5) / mf), 0.0)
                }
            });
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(grid: GridSpec, seed: u64) -> GridFunction {
        // small LCG, enough for deterministic test data
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut vals = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            vals.push(((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0);
        }
        GridFunction::from_vec(grid, vals).unwrap()
    }

    fn rel_l2(a: &GridFunction, b: &GridFunction) -> f64 {
        a.sub(b).norm2() / b.norm2().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn zero_and_constant_fields() {
        for b in [Boundary::Periodic, Boundary::Neumann] {
            let g = GridSpec::new(1.0, 8, b).unwrap();
            let mut s = Spectral::new(g);
            let z = s.to_spectral(&GridFunction::zeros(g));
            assert!(z.coeffs().iter().all(|c| c.norm() == 0.0));
            let c = s.to_spectral(&GridFunction::constant(g, 0.5));
            assert!((c.get(0, 0).re - 32.0).abs() < 1e-12);
            for k in 0..8 {
                for l in 0..8 {
                    if (k, l) != (0, 0) {
                        assert!(c.get(k, l).norm() < 1e-13, "{b:?} ({k},{l})");
                    }
                }
            }
        }
    }

    #[test]
    fn fast_matches_direct_both_boundaries() {
        for (b, m) in [
            (Boundary::Periodic, 8),
            (Boundary::Periodic, 6),
            (Boundary::Neumann, 8),
            (Boundary::Neumann, 5),
        ] {
            let g = GridSpec::new(1.3, m, b).unwrap();
            let v = field(g, m as u64);
            let fast = Spectral::new(g).to_spectral(&v);
            let slow = direct_to_spectral(&v).unwrap();
            for (p, q) in fast.coeffs().iter().zip(slow.coeffs()) {
                assert!((p - q).norm() < 1e-12, "{b:?} m={m}");
            }
            let back = direct_from_spectral(&slow).unwrap();
            assert!(rel_l2(&back, &v) < 1e-13);
        }
    }

    #[test]
    fn round_trip() {
        for b in [Boundary::Periodic, Boundary::Neumann] {
            for m in [2, 7, 16, 32] {
                let g = GridSpec::new(1.0, m, b).unwrap();
                let v = field(g, 3);
                let mut s = Spectral::new(g);
                let c = s.to_spectral(&v);
                let w = s.from_spectral(&c);
                assert!(rel_l2(&w, &v) <= 1e-12, "{b:?} m={m}");
            }
        }
    }

    #[test]
    fn neumann_coefficients_are_real() {
        let g = GridSpec::new(1.0, 6, Boundary::Neumann).unwrap();
        let c = Spectral::new(g).to_spectral(&field(g, 9));
        assert!(c.is_real());
        assert!(c.coeffs().iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn laplacian_is_diagonal_in_the_basis() {
        for b in [Boundary::Periodic, Boundary::Neumann] {
            let g = GridSpec::new(1.0, 16, b).unwrap();
            let v = field(g, 11);
            let mut s = Spectral::new(g);
            let cv = s.to_spectral(&v);
            let clap = s.to_spectral(&v.laplacian());
            let scale = cv.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max)
                * 8.0
                / (g.h() * g.h());
            for k in 0..16 {
                for l in 0..16 {
                    let lam = g.laplacian_eigenvalue(k, l).unwrap();
                    let d = (clap.get(k, l) - cv.get(k, l) * lam).norm();
                    assert!(d <= 1e-11 * scale, "{b:?} ({k},{l}) diff {d}");
                }
            }
            let spectral_lap = s.laplacian(&v);
            assert!(rel_l2(&spectral_lap, &v.laplacian()) < 1e-11);
        }
    }

    #[test]
    fn pair_application_equals_two_single_applications() {
        for b in [Boundary::Periodic, Boundary::Neumann] {
            let g = GridSpec::new(2.0, 12, b).unwrap();
            let x = field(g, 1);
            let y = field(g, 2);
            let mut s = Spectral::new(g);
            let eig = s.eigenvalues_1d().to_vec();
            let sa = |k: usize, l: usize| 1.0 / (1.0 - 0.01 * (eig[k] + eig[l]));
            let sb = |k: usize, l: usize| math::exp(0.003 * (eig[k] + eig[l]));
            let mut ax = vec![0.0; g.len()];
            let mut by = vec![0.0; g.len()];
            let mut both = vec![0.0; g.len()];
            s.apply_into(x.values(), &mut ax, sa);
            s.apply_into(y.values(), &mut by, sb);
            s.apply_pair_into(x.values(), y.values(), &mut both, |k, l| (sa(k, l), sb(k, l)));
            for p in 0..g.len() {
                assert!((both[p] - ax[p] - by[p]).abs() < 1e-13, "{b:?}");
            }
        }
    }

    #[test]
    fn transforms_are_deterministic() {
        let g = GridSpec::new(1.0, 16, Boundary::Periodic).unwrap();
        let v = field(g, 5);
        let a = Spectral::new(g).to_spectral(&v);
        let b = Spectral::new(g).to_spectral(&v);
        assert_eq!(a, b);
    }

    #[test]
    fn direct_transform_refuses_large_grids() {
        let g = GridSpec::new(1.0, 17, Boundary::Periodic).unwrap();
        assert!(matches!(
            direct_to_spectral(&GridFunction::zeros(g)),
            Err(Error::TooLarge { .. })
        ));
    }
}
