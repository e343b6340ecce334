use std::path::PathBuf;

use gsav_core::{GridFunction, GridSpec, SchemeConfig, StepController, StepMode};

use crate::error::{HarnessError, Result};
use crate::init::{init_random, init_sine};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Init {
    Sine { amplitude: f64 },
    Random { lo: f64, hi: f64, seed: u64 },
}

/// Everything a trajectory run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub scheme: SchemeConfig,
    pub stepping: StepMode,
    pub t_end: f64,
    pub init: Init,
    /// Directory for `diagnostics.csv` and snapshots; nothing is written when unset.
    pub output: Option<PathBuf>,
    /// Snapshot period in steps; 0 disables snapshots.
    pub snapshot_every: u64,
    /// Abort on any violation of the bound or the energy law. The bound is only
    /// guaranteed for `κ` at least the Lipschitz bound; smaller `κ` is allowed
    /// so violations can be observed.
    pub verify_invariants: bool,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(HarnessError::Config(format!("t_end must be positive, got {}", self.t_end)));
        }
        let beta = self.scheme.potential().beta();
        match self.init {
            Init::Sine { amplitude } => {
                if !(amplitude.abs() <= beta) {
                    return Err(HarnessError::Config(format!(
                        "sine amplitude {amplitude} exceeds the bound {beta}"
                    )));
                }
            }
            Init::Random { lo, hi, .. } => {
                if !(lo <= hi && lo >= -beta && hi <= beta) {
                    return Err(HarnessError::Config(format!(
                        "random init range [{lo}, {hi}] must lie inside [-{beta}, {beta}]"
                    )));
                }
            }
        }
        self.controller()?;
        Ok(())
    }

    pub fn controller(&self) -> Result<StepController> {
        Ok(match self.stepping {
            StepMode::Uniform { tau } => StepController::uniform(tau)?,
            StepMode::Adaptive {
                tau_min,
                tau_max,
                alpha,
            } => StepController::adaptive(tau_min, tau_max, alpha)?,
        })
    }

    pub fn initial_field(&self) -> Result<GridFunction> {
        match self.init {
            Init::Sine { amplitude } => Ok(init_sine(self.grid, amplitude)),
            Init::Random { lo, hi, seed } => init_random(self.grid, lo, hi, seed),
        }
    }
}
