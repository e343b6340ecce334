//! Temporal convergence studies against a fine-step `Ei2` reference.

use std::path::Path;

use gsav_core::schemes::{reference_solution_with, steps_dividing};
use gsav_core::{GridFunction, SolverState, Stepper};
use serde::Serialize;

use crate::backend::RustFft;
use crate::config::RunConfig;
use crate::error::{HarnessError, Result};
use crate::output::fmt_float;

/// `2⁻⁴, …, 2⁻⁹`.
pub const DEFAULT_TAUS: [f64; 6] = [0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625, 0.001953125];
/// `2⁻¹⁴`.
pub const DEFAULT_TAU_REF: f64 = 6.103515625e-5;
/// The reference step must be this many times finer than the finest sweep step.
pub const REFERENCE_RATIO: f64 = 32.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub tau: f64,
    pub l2_error: f64,
    pub linf_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub scheme: &'static str,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log(error)` against `log(τ)`.
    pub slope_l2: f64,
    pub slope_linf: f64,
}

impl ConvergenceTable {
    /// Errors strictly decrease as `τ` decreases.
    pub fn errors_decrease(&self) -> bool {
        let mut rows = self.rows.clone();
        rows.sort_by(|a, b| b.tau.total_cmp(&a.tau));
        rows.windows(2).all(|w| w[1].l2_error < w[0].l2_error)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau,l2_error,linf_error\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", fmt_float(r.tau), fmt_float(r.l2_error), fmt_float(r.linf_error)));
        }
        out
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.to_csv())
    }
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn check_sweep(cfg: &RunConfig, taus: &[f64], tau_ref: f64) -> Result<()> {
    if taus.is_empty() {
        return Err(HarnessError::Config("the step-size sweep is empty".into()));
    }
    for &tau in taus.iter().chain([&tau_ref]) {
        steps_dividing(cfg.t_end, tau)
            .map_err(|_| HarnessError::Config(format!("tau = {tau} does not divide t_end = {}", cfg.t_end)))?;
    }
    let finest = taus.iter().copied().fold(f64::INFINITY, f64::min);
    if tau_ref > finest / REFERENCE_RATIO * (1.0 + 1e-12) {
        return Err(HarnessError::Config(format!(
            "tau_ref = {tau_ref} must be at most min(taus)/{REFERENCE_RATIO} = {}",
            finest / REFERENCE_RATIO
        )));
    }
    Ok(())
}

/// Fine-step `Ei2` solution at `t_end`.
pub fn reference(cfg: &RunConfig, tau_ref: f64) -> Result<SolverState> {
    cfg.validate()?;
    reference_solution_with(&cfg.scheme, cfg.initial_field()?, cfg.t_end, tau_ref, &RustFft)
        .map_err(|source| HarnessError::Numeric { step: 0, source })
}

/// Errors of `cfg.scheme` at `t_end` for each `τ`, measured against `reference`.
pub fn sweep(cfg: &RunConfig, taus: &[f64], reference: &GridFunction) -> Result<ConvergenceTable> {
    cfg.validate()?;
    let potential = *cfg.scheme.potential();
    let mut stepper = Stepper::with_backend(cfg.scheme, cfg.grid, &RustFft);
    let mut rows = Vec::with_capacity(taus.len());
    for &tau in taus {
        let steps = steps_dividing(cfg.t_end, tau)?;
        let mut state = SolverState::new(cfg.initial_field()?, &potential)?;
        for _ in 0..steps {
            let step = state.step + 1;
            state = stepper
                .step(&state, tau)
                .map_err(|source| HarnessError::Numeric { step, source })?;
        }
        let diff = state.u.sub(reference);
        rows.push(ConvergenceRow {
            tau,
            l2_error: diff.norm2(),
            linf_error: diff.norm_inf(),
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.tau).collect();
    let slope_l2 = least_squares_slope(&xs, &rows.iter().map(|r| r.l2_error).collect::<Vec<_>>());
    let slope_linf = least_squares_slope(&xs, &rows.iter().map(|r| r.linf_error).collect::<Vec<_>>());
    Ok(ConvergenceTable {
        scheme: cfg.scheme.scheme().name(),
        rows,
        slope_l2,
        slope_linf,
    })
}

/// Reference plus sweep, after checking that every step divides `t_end` and
/// that the reference is at least 32 times finer than the sweep.
pub fn converge(cfg: &RunConfig, taus: &[f64], tau_ref: f64) -> Result<ConvergenceTable> {
    check_sweep(cfg, taus, tau_ref)?;
    let reference = reference(cfg, tau_ref)?;
    sweep(cfg, taus, &reference.u)
}
