//! Explicit `M² × M²` matrices for small grids; the oracles behind the
//! spectral fast path. Clarity over speed.

use alloc::vec;
use alloc::vec::Vec;

use crate::expkernel::StabilizedOperator;
use crate::mesh::GridSpec;
use crate::{Error, Result};

/// Largest `M` for which dense operators are built (`M² = 256` unknowns).
pub const DENSE_MAX_M: usize = 16;

/// Degree of the Taylor polynomial used inside scaling and squaring.
pub const TAYLOR_DEGREE: usize = 18;

/// Square row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m.data[i * d.len() + i] = x;
        }
        m
    }

    pub fn from_rows(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::ShapeMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Self { n, data: out }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        self.data
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Induced ∞-norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        self.data
            .chunks_exact(self.n)
            .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm_1(&self) -> f64 {
        let n = self.n;
        (0..n)
            .map(|j| (0..n).map(|i| self.data[i * n + j].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Solves `A x = b` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&p, &q| a[p * n + col].abs().total_cmp(&a[q * n + col].abs()))
                .unwrap_or(col);
            if a[pivot * n + col] == 0.0 {
                return Err(Error::InvalidParameter {
                    name: "matrix",
                    reason: "singular",
                });
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                x.swap(col, pivot);
            }
            let d = a[col * n + col];
            for r in col + 1..n {
                let factor = a[r * n + col] / d;
                if factor == 0.0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] -= factor * a[col * n + j];
                }
                x[r] -= factor * x[col];
            }
        }
        for col in (0..n).rev() {
            let mut acc = x[col];
            for j in col + 1..n {
                acc -= a[col * n + j] * x[j];
            }
            x[col] = acc / a[col * n + col];
        }
        Ok(x)
    }
}

fn check_size(grid: &GridSpec) -> Result<()> {
    if grid.m() > DENSE_MAX_M {
        Err(Error::TooLarge {
            m: grid.m(),
            max: DENSE_MAX_M,
        })
    } else {
        Ok(())
    }
}

/// Stencil matrix of `Δ_h`, built entry by entry from the neighbour rules.
pub fn dense_laplacian(grid: &GridSpec) -> Result<DenseMatrix> {
    check_size(grid)?;
    let m = grid.m();
    let inv_h2 = 1.0 / (grid.h() * grid.h());
    let mut a = DenseMatrix::zeros(m * m);
    for i in 0..m {
        for j in 0..m {
            let row = i * m + j;
            let neighbours = [
                (grid.next(i), j),
                (grid.prev(i), j),
                (i, grid.next(j)),
                (i, grid.prev(j)),
            ];
            for (p, q) in neighbours {
                let col = p * m + q;
                a.set(row, col, a.get(row, col) + inv_h2);
            }
            a.set(row, row, a.get(row, row) - 4.0 * inv_h2);
        }
    }
    Ok(a)
}

/// Dense `L = cI - ε²Δ_h`.
pub fn dense_matrix(op: &StabilizedOperator) -> Result<DenseMatrix> {
    let lap = dense_laplacian(op.grid())?;
    let n = lap.n();
    Ok(DenseMatrix::identity(n)
        .scale(op.c())
        .sub(&lap.scale(op.eps2())))
}

/// `e^{τA}` by scaling and squaring: halve `τA` until its 1-norm is at most
/// `1/2`, sum the degree-[`TAYLOR_DEGREE`] Taylor polynomial, square back.
pub fn dense_exp(a: &DenseMatrix, tau: f64) -> DenseMatrix {
    let n = a.n();
    let scaled = a.scale(tau);
    let norm = scaled.norm_1();
    let mut squarings = 0u32;
    let mut s = 1.0;
    while norm * s > 0.5 {
        s *= 0.5;
        squarings += 1;
    }
    let x = scaled.scale(s);
    // Horner: I + X(I + X/2(I + X/3(...)))
    let mut acc = DenseMatrix::identity(n);
    for k in (1..=TAYLOR_DEGREE).rev() {
        acc = DenseMatrix::identity(n).add(&x.matmul(&acc).scale(1.0 / k as f64));
    }
    for _ in 0..squarings {
        acc = acc.matmul(&acc);
    }
    acc
}
