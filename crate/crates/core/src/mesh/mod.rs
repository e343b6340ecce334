//! Uniform square grids, grid functions and the central-difference operators.
//!
//! Storage is row-major: value `(i, j)` (the `i`-th point along `x`, the `j`-th
//! along `y`) sits at offset `i * M + j`.
//!
//! * Periodic grids place point `(i, j)` at `((i + 1) h, (j + 1) h)`, i.e. the
//!   mesh points `1..=M` of the torus stored at offsets `0..M`.
//! * Neumann grids are cell-centered: point `(i, j)` sits at
//!   `((i + ½) h, (j + ½) h)` and the stencil mirrors across the boundary
//!   (`v[-1] = v[0]`, `v[M] = v[M-1]`).

mod sum;

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::math;
use crate::{Error, Result};

pub use sum::{pairwise_dot, pairwise_sum, PAIRWISE_BLOCK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    Neumann,
}

/// Square domain `(0, L)²` split into `M × M` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    length: f64,
    m: usize,
    boundary: Boundary,
}

impl GridSpec {
    pub fn new(length: f64, m: usize, boundary: Boundary) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidParameter {
                name: "L",
                reason: "domain length must be positive and finite",
            });
        }
        if m < 2 {
            return Err(Error::InvalidParameter {
                name: "M",
                reason: "at least two points per dimension are required",
            });
        }
        Ok(Self { length, m, boundary })
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.length
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    /// Mesh size `L / M`.
    #[inline]
    pub fn h(&self) -> f64 {
        self.length / self.m as f64
    }

    #[inline]
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Number of grid values, `M²`.
    #[inline]
    pub fn len(&self) -> usize {
        self.m * self.m
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of the `i`-th mesh point along one axis.
    pub fn coordinate(&self, i: usize) -> f64 {
        let h = self.h();
        match self.boundary {
            Boundary::Periodic => (i + 1) as f64 * h,
            Boundary::Neumann => (i as f64 + 0.5) * h,
        }
    }

    /// Index of the right neighbour along one axis (wrap or mirror).
    #[inline]
    pub(crate) fn next(&self, i: usize) -> usize {
        match self.boundary {
            Boundary::Periodic => {
                if i + 1 == self.m {
                    0
                } else {
                    i + 1
                }
            }
            Boundary::Neumann => (i + 1).min(self.m - 1),
        }
    }

    /// Index of the left neighbour along one axis (wrap or mirror).
    #[inline]
    pub(crate) fn prev(&self, i: usize) -> usize {
        match self.boundary {
            Boundary::Periodic => {
                if i == 0 {
                    self.m - 1
                } else {
                    i - 1
                }
            }
            Boundary::Neumann => i.saturating_sub(1),
        }
    }

    /// Eigenvalues of the one-dimensional second difference, `k = 0..M`.
    ///
    /// Periodic: `-(4/h²) sin²(kπ/M)`; Neumann (cosine basis):
    /// `-(4/h²) sin²(kπ/(2M))`.
    pub fn eigenvalues_1d(&self) -> Vec<f64> {
        (0..self.m).map(|k| self.eigenvalue_1d(k)).collect()
    }

    #[inline]
    fn eigenvalue_1d(&self, k: usize) -> f64 {
        let h = self.h();
        let m = self.m as f64;
        let angle = match self.boundary {
            Boundary::Periodic => k as f64 * PI / m,
            Boundary::Neumann => k as f64 * PI / (2.0 * m),
        };
        -4.0 / (h * h) * math::sin2(angle)
    }

    /// Eigenvalue `λ_kl` of the discrete Laplacian for the mode `(k, l)`.
    pub fn laplacian_eigenvalue(&self, k: usize, l: usize) -> Result<f64> {
        if k >= self.m || l >= self.m {
            return Err(Error::IndexOutOfRange { k, l, m: self.m });
        }
        Ok(self.eigenvalue_1d(k) + self.eigenvalue_1d(l))
    }
}

/// Real field on the mesh points of a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: GridSpec,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(grid: GridSpec) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    /// Takes ownership of row-major values; rejects wrong lengths and
    /// non-finite entries.
    pub fn from_vec(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: "grid values must be finite",
            });
        }
        Ok(Self { grid, values })
    }

    /// Samples `f(x_i, y_j)` at the mesh points.
    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: GridSpec, f: F) -> Self {
        let m = grid.m();
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..m {
            let x = grid.coordinate(i);
            for j in 0..m {
                values.push(f(x, grid.coordinate(j)));
            }
        }
        Self { grid, values }
    }

    /// Builds from an index function `f(i, j)`.
    pub fn from_index_fn<F: Fn(usize, usize) -> f64>(grid: GridSpec, f: F) -> Self {
        let m = grid.m();
        let values = (0..grid.len()).map(|p| f(p / m, p % m)).collect();
        Self { grid, values }
    }

    pub(crate) fn from_raw(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.m() + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let m = self.grid.m();
        self.values[i * m + j] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    fn check_same_grid(&self, other: &GridFunction) {
        assert!(
            self.grid == other.grid,
            "grid functions live on different grids: {:?} vs {:?}",
            self.grid,
            other.grid
        );
    }

    /// Five-point discrete Laplacian `Δ_h v`.
    pub fn laplacian(&self) -> GridFunction {
        let mut out = vec![0.0; self.grid.len()];
        laplacian_into(&self.grid, &self.values, &mut out);
        GridFunction::from_raw(self.grid, out)
    }

    /// Forward differences `((v[i+1,j] - v[i,j]) / h, (v[i,j+1] - v[i,j]) / h)`.
    pub fn gradient(&self) -> (GridFunction, GridFunction) {
        let g = &self.grid;
        let m = g.m();
        let inv_h = 1.0 / g.h();
        let mut gx = vec![0.0; g.len()];
        let mut gy = vec![0.0; g.len()];
        for i in 0..m {
            let ip = g.next(i);
            for j in 0..m {
                let jp = g.next(j);
                let c = self.values[i * m + j];
                gx[i * m + j] = (self.values[ip * m + j] - c) * inv_h;
                gy[i * m + j] = (self.values[i * m + jp] - c) * inv_h;
            }
        }
        (
            GridFunction::from_raw(*g, gx),
            GridFunction::from_raw(*g, gy),
        )
    }

    /// `⟨v, w⟩ = h² Σ v_ij w_ij`, summed pairwise.
    pub fn inner(&self, other: &GridFunction) -> f64 {
        self.check_same_grid(other);
        let h = self.grid.h();
        h * h * pairwise_dot(&self.values, &other.values)
    }

    pub fn norm2(&self) -> f64 {
        math::sqrt(self.inner(self))
    }

    pub fn norm_inf(&self) -> f64 {
        norm_inf(&self.values)
    }

    /// `‖∇_h v‖²`, without materializing the gradient.
    pub fn grad_norm_sq(&self) -> f64 {
        grad_norm_sq(&self.grid, &self.values)
    }

    /// `h² Σ v_ij`.
    pub fn integral(&self) -> f64 {
        let h = self.grid.h();
        h * h * pairwise_sum(self.values.len(), |p| self.values[p])
    }

    /// `self - other`, pointwise.
    pub fn sub(&self, other: &GridFunction) -> GridFunction {
        self.check_same_grid(other);
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        GridFunction::from_raw(self.grid, values)
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        GridFunction::from_raw(self.grid, self.values.iter().map(|v| c * v).collect())
    }
}

pub(crate) fn norm_inf(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub(crate) fn laplacian_into(g: &GridSpec, v: &[f64], out: &mut [f64]) {
    let m = g.m();
    let h = g.h();
    let inv_h2 = 1.0 / (h * h);
    for i in 0..m {
        let (ip, im) = (g.next(i), g.prev(i));
        for j in 0..m {
            let (jp, jm) = (g.next(j), g.prev(j));
            let c = v[i * m + j];
            out[i * m + j] =
                (v[ip * m + j] + v[im * m + j] + v[i * m + jp] + v[i * m + jm] - 4.0 * c) * inv_h2;
        }
    }
}

pub(crate) fn grad_norm_sq(g: &GridSpec, v: &[f64]) -> f64 {
    let m = g.m();
    // h² (Δx/h)² = Δx², so the mesh size cancels.
    pairwise_sum(v.len(), |p| {
        let (i, j) = (p / m, p % m);
        let c = v[p];
        let dx = v[g.next(i) * m + j] - c;
        let dy = v[i * m + g.next(j)] - c;
        dx * dx + dy * dy
    })
}
