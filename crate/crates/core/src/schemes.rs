//! One-step updates of the pair `(u, s)`.
//!
//! With `g_n = σ(sⁿ)/σ(E₁ₕ(uⁿ))`, `L = κ g_n I - ε²Δ_h` and
//! `N = g_n (f(uⁿ) + κ uⁿ)`:
//!
//! * [`Scheme::Ei1`]: `uⁿ⁺¹ = e^{-τL} uⁿ + τ φ₁(-τL) N`,
//!   `sⁿ⁺¹ = sⁿ - g_n ⟨f(uⁿ), uⁿ⁺¹ - uⁿ⟩`.
//! * [`Scheme::Ei2`]: an `Ei1` predictor `(ũ, s̃)`, then the same update frozen
//!   at the midpoint `(uⁿ + ũ)/2`, `(sⁿ + s̃)/2`, with the auxiliary update
//!   `sⁿ⁺¹ = sⁿ - g_m ⟨f(ũ_m), uⁿ⁺¹ - uⁿ⟩ + (κ/2) g_m ⟨uⁿ⁺¹ - ũ, uⁿ⁺¹ - uⁿ⟩`.
//! * [`Scheme::Stab1`]: `(I + τL) uⁿ⁺¹ = uⁿ + τN`, i.e. `e^{-τL}` replaced by
//!   `(I + τL)⁻¹`, with the `Ei1` auxiliary update.
//!
//! For `κ ≥ ‖f'‖` on `[-β, β]` all three keep `‖uⁿ‖_∞ ≤ β` and never increase
//! `ℰ_h(uⁿ, sⁿ) = ε²/2 ‖∇_h uⁿ‖² + sⁿ`, whatever the step size.

use alloc::vec;
use alloc::vec::Vec;

use crate::expkernel::ExpTables;
use crate::fft::{BuiltinFft, FftBackend};
use crate::mesh::{pairwise_sum, GridFunction, GridSpec};
use crate::model::{bulk_energy, modified_energy, Potential, Sigma};
use crate::spectral::Spectral;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// First-order exponential integrator.
    Ei1,
    /// Second-order prediction–correction exponential integrator.
    Ei2,
    /// First-order stabilized semi-implicit variant.
    Stab1,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Ei1 => "ei1",
            Scheme::Ei2 => "ei2",
            Scheme::Stab1 => "stab1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    eps: f64,
    kappa: f64,
    potential: Potential,
    sigma: Sigma,
    scheme: Scheme,
}

impl SchemeConfig {
    pub fn new(eps: f64, kappa: f64, potential: Potential, sigma: Sigma, scheme: Scheme) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidParameter {
                name: "eps",
                reason: "must be positive",
            });
        }
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::InvalidParameter {
                name: "kappa",
                reason: "must be positive",
            });
        }
        Ok(Self {
            eps,
            kappa,
            potential,
            sigma,
            scheme,
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn sigma(&self) -> &Sigma {
        &self.sigma
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    /// Whether `κ` reaches the Lipschitz bound, the hypothesis under which the
    /// bound `β` is preserved.
    pub fn mbp_hypothesis_holds(&self) -> bool {
        self.kappa >= self.potential.lipschitz()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub u: GridFunction,
    /// Auxiliary variable tracking `E₁ₕ(u)`.
    pub s: f64,
    pub t: f64,
    pub step: u64,
}

impl SolverState {
    /// Initial state with `s = E₁ₕ(u)`.
    pub fn new(u: GridFunction, potential: &Potential) -> Result<Self> {
        if !u.is_finite() {
            return Err(Error::InvalidParameter {
                name: "u",
                reason: "initial field must be finite",
            });
        }
        let s = bulk_energy(potential, &u)?;
        Ok(Self { u, s, t: 0.0, step: 0 })
    }

    pub fn modified_energy(&self, eps: f64) -> f64 {
        modified_energy(eps, &self.u, self.s)
    }
}

/// A completed step together with the quantities that the invariants talk
/// about.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: SolverState,
    /// The frozen coefficient of the linear part (`g_n`, or `g_m` for `Ei2`).
    pub g: f64,
    /// `s̃ⁿ⁺¹` of the `Ei2` predictor.
    pub predicted_s: Option<f64>,
}

/// Owns the transform engine and work buffers for one trajectory.
pub struct Stepper {
    cfg: SchemeConfig,
    grid: GridSpec,
    engine: Spectral,
    tables: ExpTables,
    f: Vec<f64>,
    pot: Vec<f64>,
    n: Vec<f64>,
    mid: Vec<f64>,
    pred: Vec<f64>,
}

impl core::fmt::Debug for Stepper {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Stepper")
            .field("cfg", &self.cfg)
            .field("grid", &self.grid)
            .finish_non_exhaustive()
    }
}

impl Stepper {
    pub fn new(cfg: SchemeConfig, grid: GridSpec) -> Self {
        Self::with_backend(cfg, grid, &BuiltinFft)
    }

    pub fn with_backend(cfg: SchemeConfig, grid: GridSpec, backend: &dyn FftBackend) -> Self {
        let engine = Spectral::with_backend(grid, backend);
        let tables = ExpTables::new(&engine);
        let len = grid.len();
        Self {
            cfg,
            grid,
            engine,
            tables,
            f: vec![0.0; len],
            pot: vec![0.0; len],
            n: vec![0.0; len],
            mid: vec![0.0; len],
            pred: vec![0.0; len],
        }
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn engine(&mut self) -> &mut Spectral {
        &mut self.engine
    }

    fn h2(&self) -> f64 {
        let h = self.grid.h();
        h * h
    }

    fn check_state(&self, state: &SolverState, tau: f64) {
        assert!(*state.u.grid() == self.grid, "state lives on another grid");
        assert!(tau > 0.0 && tau.is_finite(), "tau must be positive and finite");
    }

    /// `g(u, s) = σ(s)/σ(E₁ₕ(u))`.
    pub fn g(&mut self, u: &GridFunction, s: f64) -> Result<f64> {
        self.cfg.potential.eval_into(u.values(), &mut self.f, &mut self.pot)?;
        let e1 = self.h2() * pairwise_sum(self.pot.len(), |i| self.pot[i]);
        self.cfg.sigma.g_ratio(s, e1)
    }

    /// `N = g(u, s) f(u) + κ g_fixed u`.
    pub fn nonlinear_term(&mut self, u: &GridFunction, s: f64, g_fixed: f64) -> Result<GridFunction> {
        let g = self.g(u, s)?;
        let kappa = self.cfg.kappa;
        let values = self
            .f
            .iter()
            .zip(u.values())
            .map(|(&f, &x)| g * f + kappa * g_fixed * x)
            .collect();
        Ok(GridFunction::from_raw(self.grid, values))
    }

    /// Step with the configured scheme.
    pub fn step(&mut self, state: &SolverState, tau: f64) -> Result<SolverState> {
        self.advance(state, tau).map(|o| o.state)
    }

    pub fn step_ei1(&mut self, state: &SolverState, tau: f64) -> Result<SolverState> {
        self.advance_with(Scheme::Ei1, state, tau).map(|o| o.state)
    }

    pub fn step_ei2(&mut self, state: &SolverState, tau: f64) -> Result<SolverState> {
        self.advance_with(Scheme::Ei2, state, tau).map(|o| o.state)
    }

    pub fn step_stab1(&mut self, state: &SolverState, tau: f64) -> Result<SolverState> {
        self.advance_with(Scheme::Stab1, state, tau).map(|o| o.state)
    }

    /// Step with the configured scheme, reporting the frozen coefficient.
    pub fn advance(&mut self, state: &SolverState, tau: f64) -> Result<StepOutcome> {
        self.advance_with(self.cfg.scheme, state, tau)
    }

    pub fn advance_with(&mut self, scheme: Scheme, state: &SolverState, tau: f64) -> Result<StepOutcome> {
        self.check_state(state, tau);
        let step = state.step + 1;
        let mut out = vec![0.0; self.grid.len()];
        let (s, g, predicted_s) = match scheme {
            Scheme::Ei1 | Scheme::Stab1 => {
                let (s, g) = self.first_order(scheme, state.u.values(), state.s, tau, &mut out, step)?;
                (s, g, None)
            }
            Scheme::Ei2 => {
                let (s, g, sp) = self.second_order(state.u.values(), state.s, tau, &mut out, step)?;
                (s, g, Some(sp))
            }
        };
        if !s.is_finite() {
            return Err(Error::NonFinite { step, what: "s" });
        }
        if out.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { step, what: "u" });
        }
        Ok(StepOutcome {
            state: SolverState {
                u: GridFunction::from_raw(self.grid, out),
                s,
                t: state.t + tau,
                step,
            },
            g,
            predicted_s,
        })
    }

    /// `Ei1` or `Stab1` update of `(u, s)` into `out`; returns `(sⁿ⁺¹, g_n)`.
    fn first_order(
        &mut self,
        scheme: Scheme,
        u: &[f64],
        s: f64,
        tau: f64,
        out: &mut [f64],
        step: u64,
    ) -> Result<(f64, f64)> {
        let kappa = self.cfg.kappa;
        let eps2 = self.cfg.eps * self.cfg.eps;
        let h2 = self.h2();
        self.cfg.potential.eval_into(u, &mut self.f, &mut self.pot)?;
        let e1 = h2 * pairwise_sum(self.pot.len(), |i| self.pot[i]);
        let g = self.frozen_g(s, e1, step)?;
        for ((n, &f), &x) in self.n.iter_mut().zip(&self.f).zip(u) {
            *n = g * (f + kappa * x);
        }
        let c = kappa * g;
        match scheme {
            Scheme::Stab1 => self.tables.resolvent(&mut self.engine, c, eps2, tau, u, &self.n, out),
            _ => self.tables.exp_integrator(&mut self.engine, c, eps2, tau, u, &self.n, out),
        }
        let f = &self.f;
        let s_new = s - g * h2 * pairwise_sum(u.len(), |i| f[i] * (out[i] - u[i]));
        Ok((s_new, g))
    }

    /// `Ei2` update into `out`; returns `(sⁿ⁺¹, g_m, s̃ⁿ⁺¹)`.
    fn second_order(
        &mut self,
        u: &[f64],
        s: f64,
        tau: f64,
        out: &mut [f64],
        step: u64,
    ) -> Result<(f64, f64, f64)> {
        let kappa = self.cfg.kappa;
        let eps2 = self.cfg.eps * self.cfg.eps;
        let h2 = self.h2();

        let mut pred = core::mem::take(&mut self.pred);
        let (s_pred, _) = self.first_order(Scheme::Ei1, u, s, tau, &mut pred, step)?;
        if pred.iter().any(|x| !x.is_finite()) {
            self.pred = pred;
            return Err(Error::NonFinite { step, what: "predictor u" });
        }

        for ((m, &a), &b) in self.mid.iter_mut().zip(u).zip(&pred) {
            *m = 0.5 * (a + b);
        }
        let s_mid = 0.5 * (s + s_pred);
        self.cfg.potential.eval_into(&self.mid, &mut self.f, &mut self.pot)?;
        let e1 = h2 * pairwise_sum(self.pot.len(), |i| self.pot[i]);
        let g = self.frozen_g(s_mid, e1, step)?;
        for ((n, &f), &x) in self.n.iter_mut().zip(&self.f).zip(&self.mid) {
            *n = g * (f + kappa * x);
        }
        self.tables
            .exp_integrator(&mut self.engine, kappa * g, eps2, tau, u, &self.n, out);

        let f = &self.f;
        let p = &pred;
        let crank_nicolson = pairwise_sum(u.len(), |i| f[i] * (out[i] - u[i]));
        let stabilization = pairwise_sum(u.len(), |i| (out[i] - p[i]) * (out[i] - u[i]));
        let s_new = s - g * h2 * crank_nicolson + 0.5 * kappa * g * h2 * stabilization;
        self.pred = pred;
        Ok((s_new, g, s_pred))
    }

    fn frozen_g(&self, s: f64, e1: f64, step: u64) -> Result<f64> {
        match self.cfg.sigma.g_ratio(s, e1) {
            Ok(g) => Ok(g),
            Err(Error::NumericRange { .. }) => Err(Error::NonFinite { step, what: "g" }),
            Err(e) => Err(e),
        }
    }
}

/// Fine-step `Ei2` trajectory used as ground truth for convergence studies.
///
/// `tau_ref` must divide `t_end` to within `1e-12`.
pub fn reference_solution(
    cfg: &SchemeConfig,
    u0: GridFunction,
    t_end: f64,
    tau_ref: f64,
) -> Result<SolverState> {
    reference_solution_with(cfg, u0, t_end, tau_ref, &BuiltinFft)
}

pub fn reference_solution_with(
    cfg: &SchemeConfig,
    u0: GridFunction,
    t_end: f64,
    tau_ref: f64,
    backend: &dyn FftBackend,
) -> Result<SolverState> {
    let steps = steps_dividing(t_end, tau_ref)?;
    let grid = *u0.grid();
    let mut state = SolverState::new(u0, cfg.potential())?;
    let mut stepper = Stepper::with_backend(*cfg, grid, backend);
    for _ in 0..steps {
        state = stepper.step_ei2(&state, tau_ref)?;
    }
    Ok(state)
}

/// Number of steps of size `tau` covering `[0, t_end]` exactly.
pub fn steps_dividing(t_end: f64, tau: f64) -> Result<u64> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "tau",
            reason: "must be positive",
        });
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "t_end",
            reason: "must be non-negative",
        });
    }
    let n = (t_end / tau + 0.5) as u64;
    if (n as f64 * tau - t_end).abs() > 1e-12 {
        return Err(Error::InvalidParameter {
            name: "tau",
            reason: "does not divide t_end",
        });
    }
    Ok(n)
}
