//! `φ`-functions and the action of `e^{-τL}` and `φ₁(-τL)` for the stabilized
//! operator `L = cI - ε²Δ_h`.
//!
//! The production path multiplies spectral coefficients; [`dense`] holds the
//! explicit-matrix oracles used to check it on small grids.

pub mod dense;

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::mesh::{GridFunction, GridSpec};
use crate::spectral::Spectral;
use crate::{Error, Result};

/// Below this `|z|` the series branch of [`phi1`] is used.
pub const PHI1_SERIES_THRESHOLD: f64 = 1e-2;

/// `φ₁(z) = (e^z - 1)/z`, with `φ₁(0) = 1`.
///
/// For `|z| < 1e-2` an 8-term Taylor series `Σ zʲ/(j+1)!` is used; its
/// relative truncation error is below `3e-22` there.
pub fn phi1(z: f64) -> f64 {
    if z.abs() >= PHI1_SERIES_THRESHOLD {
        math::exp_m1(z) / z
    } else {
        // Horner form of 1 + z/2! + z²/3! + … + z⁷/8!
        let mut acc = 1.0 / 40320.0;
        for d in [5040.0, 720.0, 120.0, 24.0, 6.0, 2.0, 1.0] {
            acc = acc * z + 1.0 / d;
        }
        acc
    }
}

/// `L = cI - ε²Δ_h` with `c > 0`; symmetric positive definite with eigenvalues
/// `c - ε²λ_kl ≥ c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilizedOperator {
    c: f64,
    eps2: f64,
    grid: GridSpec,
}

impl StabilizedOperator {
    pub fn new(c: f64, eps2: f64, grid: GridSpec) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter {
                name: "c",
                reason: "the shift of the stabilized operator must be positive",
            });
        }
        if !(eps2.is_finite() && eps2 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "eps2",
                reason: "must be positive",
            });
        }
        Ok(Self { c, eps2, grid })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn eps2(&self) -> f64 {
        self.eps2
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Eigenvalue of `L` on the mode with Laplacian eigenvalue `lambda`.
    #[inline]
    pub fn mode_value(&self, lambda: f64) -> f64 {
        self.c - self.eps2 * lambda
    }

    fn check_engine(&self, engine: &Spectral, v: &GridFunction) {
        assert!(*engine.grid() == self.grid, "engine built for another grid");
        assert!(*v.grid() == self.grid, "field lives on another grid");
    }

    /// `e^{-τL} v` on a caller-owned engine.
    pub fn apply_exp_with(&self, engine: &mut Spectral, tau: f64, v: &GridFunction) -> GridFunction {
        assert!(tau >= 0.0, "tau must be non-negative");
        self.check_engine(engine, v);
        let eig = engine.eigenvalues_1d().to_vec();
        let mut out = vec![0.0; self.grid.len()];
        engine.apply_into(v.values(), &mut out, |k, l| {
            math::exp(-tau * self.mode_value(eig[k] + eig[l]))
        });
        GridFunction::from_raw(self.grid, out)
    }

    /// `φ₁(-τL) v` on a caller-owned engine.
    pub fn apply_phi1_with(&self, engine: &mut Spectral, tau: f64, v: &GridFunction) -> GridFunction {
        assert!(tau > 0.0, "tau must be positive");
        self.check_engine(engine, v);
        let eig = engine.eigenvalues_1d().to_vec();
        let mut out = vec![0.0; self.grid.len()];
        engine.apply_into(v.values(), &mut out, |k, l| {
            phi1(-tau * self.mode_value(eig[k] + eig[l]))
        });
        GridFunction::from_raw(self.grid, out)
    }

    /// `(I + τL)⁻¹ v` on a caller-owned engine.
    pub fn apply_resolvent_with(&self, engine: &mut Spectral, tau: f64, v: &GridFunction) -> GridFunction {
        assert!(tau >= 0.0, "tau must be non-negative");
        self.check_engine(engine, v);
        let eig = engine.eigenvalues_1d().to_vec();
        let mut out = vec![0.0; self.grid.len()];
        engine.apply_into(v.values(), &mut out, |k, l| {
            1.0 / (1.0 + tau * self.mode_value(eig[k] + eig[l]))
        });
        GridFunction::from_raw(self.grid, out)
    }
}

/// `e^{-τL} v`, building a transform engine for the call.
pub fn apply_exp(op: &StabilizedOperator, tau: f64, v: &GridFunction) -> GridFunction {
    op.apply_exp_with(&mut Spectral::new(op.grid), tau, v)
}

/// `φ₁(-τL) v`, building a transform engine for the call.
pub fn apply_phi1(op: &StabilizedOperator, tau: f64, v: &GridFunction) -> GridFunction {
    op.apply_phi1_with(&mut Spectral::new(op.grid), tau, v)
}

/// Per-step multiplier tables for the fused update
/// `e^{-τL} u + τ φ₁(-τL) n`.
///
/// `e^{-τ(c - ε²(λ_k + λ_l))}` factors as `e^{-τc} · e^{τε²λ_k} · e^{τε²λ_l}`,
/// so only `M + 1` exponentials are evaluated per step; `τφ₁` then follows as
/// `(1 - e)/μ` except on modes with `τμ ≤ 1e-2`, where the cancellation would
/// cost digits and [`phi1`] is called directly.
#[derive(Debug, Clone, Default)]
pub(crate) struct ExpTables {
    eig: Vec<f64>,
    ek: Vec<f64>,
}

const DIRECT_PHI_BELOW: f64 = 1e-2;

impl ExpTables {
    pub(crate) fn new(engine: &Spectral) -> Self {
        let eig = engine.eigenvalues_1d().to_vec();
        let ek = vec![0.0; eig.len()];
        Self { eig, ek }
    }

    /// `out = e^{-τL} u + τ φ₁(-τL) n` with `L = cI - eps2 Δ_h`.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn exp_integrator(
        &mut self,
        engine: &mut Spectral,
        c: f64,
        eps2: f64,
        tau: f64,
        u: &[f64],
        n: &[f64],
        out: &mut [f64],
    ) {
        for (e, &lam) in self.ek.iter_mut().zip(&self.eig) {
            *e = math::exp(tau * eps2 * lam);
        }
        let ec = math::exp(-tau * c);
        let (eig, ek) = (&self.eig, &self.ek);
        engine.apply_pair_into(u, n, out, |k, l| {
            let e = ec * ek[k] * ek[l];
            let mu = c - eps2 * (eig[k] + eig[l]);
            let z = tau * mu;
            let p = if z > DIRECT_PHI_BELOW {
                (1.0 - e) / mu
            } else {
                tau * phi1(-z)
            };
            (e, p)
        });
    }

    /// `out = (I + τL)⁻¹ (u + τ n)`.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn resolvent(
        &mut self,
        engine: &mut Spectral,
        c: f64,
        eps2: f64,
        tau: f64,
        u: &[f64],
        n: &[f64],
        out: &mut [f64],
    ) {
        let eig = &self.eig;
        engine.apply_pair_into(u, n, out, |k, l| {
            let r = 1.0 / (1.0 + tau * (c - eps2 * (eig[k] + eig[l])));
            (r, tau * r)
        });
    }
}
