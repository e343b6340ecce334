//! The trajectory driver.

use gsav_core::model::total_energy;
use gsav_core::{SolverState, Stepper};

use crate::backend::RustFft;
use crate::config::RunConfig;
use crate::error::{HarnessError, Result};
use crate::output::{write_snapshot, DiagnosticsRow, DiagnosticsWriter};

/// Absolute slack on the bound `‖u‖_∞ ≤ β`.
pub const BOUND_TOL: f64 = 1e-12;
/// Absolute slack on the growth of the modified energy per step.
pub const ENERGY_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub state: SolverState,
    /// Initial row followed by one row per step.
    pub rows: Vec<DiagnosticsRow>,
}

/// Steps from `t = 0` to `t_end`, recording diagnostics and writing
/// `diagnostics.csv` and snapshots when an output directory is configured.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let potential = *cfg.scheme.potential();
    let eps = cfg.scheme.eps();
    let beta = potential.beta();
    let mut ctrl = cfg.controller()?;
    let mut stepper = Stepper::with_backend(cfg.scheme, cfg.grid, &RustFft);
    let mut writer = match &cfg.output {
        Some(dir) => Some(DiagnosticsWriter::create(dir)?),
        None => None,
    };
    let snapshot = |step: u64, state: &SolverState| -> Result<()> {
        if let Some(dir) = &cfg.output {
            if cfg.snapshot_every > 0 && step.is_multiple_of(cfg.snapshot_every) {
                write_snapshot(dir, step, &state.u)?;
            }
        }
        Ok(())
    };

    let mut state = SolverState::new(cfg.initial_field()?, &potential)?;
    let e0 = total_energy(&potential, eps, &state.u)?;
    let g0 = stepper.g(&state.u, state.s).map_err(|source| HarnessError::Numeric { step: 0, source })?;
    let mut rows = vec![DiagnosticsRow {
        step: 0,
        t: 0.0,
        tau: 0.0,
        sup_norm: state.u.norm_inf(),
        energy: e0,
        modified_energy: state.modified_energy(eps),
        s: state.s,
        g: g0,
    }];
    if let Some(w) = writer.as_mut() {
        w.write(&rows[0])?;
    }
    snapshot(0, &state)?;
    ctrl.observe(e0, None);

    while state.t < cfg.t_end {
        let tau = ctrl.step_size(state.t, cfg.t_end);
        let last = tau >= cfg.t_end - state.t;
        let step = state.step + 1;
        let outcome = stepper
            .advance(&state, tau)
            .map_err(|source| HarnessError::Numeric { step, source })?;
        let mut next = outcome.state;
        if last {
            next.t = cfg.t_end;
        }
        let energy = total_energy(&potential, eps, &next.u).map_err(|source| HarnessError::Numeric { step, source })?;
        let row = DiagnosticsRow {
            step,
            t: next.t,
            tau,
            sup_norm: next.u.norm_inf(),
            energy,
            modified_energy: next.modified_energy(eps),
            s: next.s,
            g: outcome.g,
        };
        if let Some(w) = writer.as_mut() {
            w.write(&row)?;
        }
        if cfg.verify_invariants {
            let prev = rows.last().expect("initial row");
            let mut broken = Vec::new();
            if row.sup_norm > beta + BOUND_TOL {
                broken.push(format!("sup norm {} exceeds beta {}", row.sup_norm, beta));
            }
            if row.modified_energy - prev.modified_energy > ENERGY_TOL {
                broken.push(format!(
                    "modified energy rose from {} to {}",
                    prev.modified_energy, row.modified_energy
                ));
            }
            if row.s > e0 + ENERGY_TOL || outcome.predicted_s.is_some_and(|sp| sp > e0 + ENERGY_TOL) {
                broken.push(format!("auxiliary variable {} above the initial energy {}", row.s, e0));
            }
            if !broken.is_empty() {
                if let Some(dir) = &cfg.output {
                    write_snapshot(dir, step, &next.u)?;
                }
                return Err(HarnessError::Invariant {
                    step,
                    detail: format!("{}; row: {}", broken.join("; "), row.to_csv()),
                });
            }
        }
        rows.push(row);
        ctrl.observe(energy, Some(tau));
        snapshot(step, &next)?;
        state = next;
    }
    Ok(RunOutput { state, rows })
}
