//! Uniform and energy-driven adaptive step sizes.
//!
//! The adaptive rule is
//! `τₙ₊₁ = max(τ_min, τ_max / √(1 + α |dₜE|²))` with
//! `dₜE = (E_h(uⁿ) - E_h(uⁿ⁻¹)) / τₙ`, evaluated on the original discrete energy.
//! The first step, which has no energy history, uses `τ_min`.

use crate::math;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepMode {
    Uniform { tau: f64 },
    Adaptive { tau_min: f64, tau_max: f64, alpha: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepController {
    mode: StepMode,
    last_energy: Option<f64>,
    prev_energy: Option<f64>,
    last_tau: Option<f64>,
}

impl StepController {
    pub fn uniform(tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tau",
                reason: "must be positive",
            });
        }
        Ok(Self::from_mode(StepMode::Uniform { tau }))
    }

    pub fn adaptive(tau_min: f64, tau_max: f64, alpha: f64) -> Result<Self> {
        if !(tau_min.is_finite() && tau_min > 0.0 && tau_max.is_finite() && tau_min <= tau_max) {
            return Err(Error::InvalidParameter {
                name: "tau_min/tau_max",
                reason: "need 0 < tau_min <= tau_max",
            });
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: "must be positive",
            });
        }
        Ok(Self::from_mode(StepMode::Adaptive {
            tau_min,
            tau_max,
            alpha,
        }))
    }

    fn from_mode(mode: StepMode) -> Self {
        Self {
            mode,
            last_energy: None,
            prev_energy: None,
            last_tau: None,
        }
    }

    pub fn mode(&self) -> StepMode {
        self.mode
    }

    pub fn is_adaptive(&self) -> bool {
        matches!(self.mode, StepMode::Adaptive { .. })
    }

    /// Bounds every proposed step respects (`[τ, τ]` for uniform stepping).
    pub fn bounds(&self) -> (f64, f64) {
        match self.mode {
            StepMode::Uniform { tau } => (tau, tau),
            StepMode::Adaptive { tau_min, tau_max, .. } => (tau_min, tau_max),
        }
    }

    /// The step-size formula for given energy history; uniform mode ignores it.
    pub fn next_tau(&self, e_prev: f64, e_curr: f64, tau_prev: f64) -> f64 {
        match self.mode {
            StepMode::Uniform { tau } => tau,
            StepMode::Adaptive {
                tau_min,
                tau_max,
                alpha,
            } => {
                debug_assert!(tau_prev > 0.0);
                let rate = (e_curr - e_prev) / tau_prev;
                let damped = tau_max / math::sqrt(1.0 + alpha * rate * rate);
                // NaN rates (infinite energies) fall back to the smallest step.
                if damped.is_nan() {
                    tau_min
                } else {
                    damped.max(tau_min).min(tau_max)
                }
            }
        }
    }

    /// Records the energy of the newest state and the step that produced it
    /// (`None` for the initial state).
    pub fn observe(&mut self, energy: f64, tau: Option<f64>) {
        self.prev_energy = self.last_energy;
        self.last_energy = Some(energy);
        self.last_tau = tau;
    }

    /// Step size before end-of-interval clipping.
    pub fn propose(&self) -> f64 {
        match self.mode {
            StepMode::Uniform { tau } => tau,
            StepMode::Adaptive { tau_min, .. } => match (self.prev_energy, self.last_energy, self.last_tau) {
                (Some(e_prev), Some(e_curr), Some(tau_prev)) => self.next_tau(e_prev, e_curr, tau_prev),
                _ => tau_min,
            },
        }
    }

    /// Step size for the state at time `t`, shortened so the trajectory lands
    /// exactly on `t_end`.
    ///
    /// In adaptive mode the final approach never strands a remainder shorter
    /// than `τ_min`: the remainder is taken whole when it fits under `τ_max`,
    /// otherwise halved. Every step then stays in `[τ_min, τ_max]` whenever
    /// `τ_max ≥ 2τ_min` and `t_end - t ≥ τ_min`.
    pub fn step_size(&self, t: f64, t_end: f64) -> f64 {
        let tau = self.propose();
        let remaining = t_end - t;
        if remaining <= tau * (1.0 + 1e-9) {
            return remaining;
        }
        if let StepMode::Adaptive { tau_min, tau_max, .. } = self.mode {
            if remaining - tau < tau_min * (1.0 + 1e-9) {
                return if remaining <= tau_max { remaining } else { 0.5 * remaining };
            }
        }
        tau
    }
}
