//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::time::Instant;

use gsav::config::{Init, RunConfig};
use gsav::converge::{reference, sweep, ConvergenceTable, DEFAULT_TAUS, DEFAULT_TAU_REF};
use gsav::run::{run, BOUND_TOL, ENERGY_TOL};
use gsav::verify::{
    contraction, expkernel_errors, fixed_points, phi_inequalities, potentials, stabilization_bound, trajectory, Draw,
};
use gsav_core::schemes::steps_dividing;
use gsav_core::{Boundary, GridSpec, Potential, Scheme, SchemeConfig, Sigma, StepMode};

const SEED: u64 = 2024;
const M: usize = 128;

type Outcome = Result<String, String>;
type Sweeps = Result<(ConvergenceTable, ConvergenceTable), String>;

fn name(p: &Potential) -> &'static str {
    if p.beta() == 1.0 {
        "double-well"
    } else {
        "flory-huggins"
    }
}

fn convergence_config(p: Potential, a: f64, scheme: Scheme) -> RunConfig {
    RunConfig {
        grid: GridSpec::new(1.0, M, Boundary::Periodic).unwrap(),
        scheme: SchemeConfig::new(0.01, p.lipschitz(), p, Sigma::exp(a).unwrap(), scheme).unwrap(),
        stepping: StepMode::Uniform { tau: DEFAULT_TAUS[0] },
        t_end: 2.0,
        init: Init::Sine { amplitude: 0.1 },
        output: None,
        snapshot_every: 0,
        verify_invariants: false,
    }
}

/// Ei1 and Ei2 sweeps for one `(potential, a)`, sharing one reference.
fn sweeps(p: Potential, a: f64) -> Sweeps {
    let reference = reference(&convergence_config(p, a, Scheme::Ei2), DEFAULT_TAU_REF).map_err(|e| e.to_string())?;
    let ei1 = sweep(&convergence_config(p, a, Scheme::Ei1), &DEFAULT_TAUS, &reference.u).map_err(|e| e.to_string())?;
    let ei2 = sweep(&convergence_config(p, a, Scheme::Ei2), &DEFAULT_TAUS, &reference.u).map_err(|e| e.to_string())?;
    Ok((ei1, ei2))
}

fn order_criterion(
    results: &[(String, Sweeps)],
    pick: fn(&(ConvergenceTable, ConvergenceTable)) -> &ConvergenceTable,
    lo: f64,
    hi: f64,
) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (label, r) in results {
        match r {
            Ok(pair) => {
                let t = pick(pair);
                let inside = (lo..=hi).contains(&t.slope_l2);
                ok &= inside;
                let mono = if t.errors_decrease() { "" } else { " (errors not decreasing)" };
                parts.push(format!("{label}: {:.3}{mono}", t.slope_l2));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{label}: error {e}"));
            }
        }
    }
    let msg = format!("slopes in [{lo}, {hi}]: {}", parts.join(", "));
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Criteria 3 and 4 share their trajectories.
fn bound_and_energy() -> (Outcome, Outcome) {
    let grid = GridSpec::new(1.0, M, Boundary::Periodic).unwrap();
    let (mut sup, mut energy) = (Vec::new(), Vec::new());
    let (mut ok3, mut ok4) = (true, true);
    for p in potentials() {
        let u0 = Draw::new(SEED).field(grid, -0.8, 0.8);
        for scheme in [Scheme::Ei1, Scheme::Ei2] {
            let cfg = SchemeConfig::new(0.01, p.lipschitz(), p, Sigma::exp(1.0).unwrap(), scheme).unwrap();
            for tau in [0.01, 0.1, 1.0] {
                let st = trajectory(&cfg, u0.clone(), StepMode::Uniform { tau }, 50.0);
                let label = format!("{}/{}/tau={tau}", name(&p), scheme.name());
                if let Some(e) = &st.error {
                    ok3 = false;
                    ok4 = false;
                    sup.push(format!("{label}: {e}"));
                    energy.push(format!("{label}: {e}"));
                    continue;
                }
                ok3 &= st.max_sup_norm <= p.beta() + BOUND_TOL && st.t_final == 50.0;
                ok4 &= st.max_energy_rise <= ENERGY_TOL && st.max_s_excess <= ENERGY_TOL;
                sup.push(format!("{label}: {:.15} <= {:.15}", st.max_sup_norm, p.beta()));
                energy.push(format!(
                    "{label}: rise {:.2e}, s - E0 {:.2e}",
                    st.max_energy_rise, st.max_s_excess
                ));
            }
        }
    }
    let c3 = format!("max sup norms {}", sup.join("; "));
    let c4 = format!("max modified-energy rise and s excess {}", energy.join("; "));
    (if ok3 { Ok(c3) } else { Err(c3) }, if ok4 { Ok(c4) } else { Err(c4) })
}

fn expkernel() -> Outcome {
    let (e, p) = expkernel_errors(SEED)?;
    let msg = format!("worst relative L2 error exp {e:.2e}, phi1 {p:.2e}");
    if e <= 1e-9 && p <= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn lemmas() -> Outcome {
    let parts = [
        ("stabilization", stabilization_bound()),
        ("contraction", contraction(SEED)),
        ("phi1", phi_inequalities(SEED)),
    ];
    let ok = parts.iter().all(|(_, r)| r.is_ok());
    let msg = parts
        .iter()
        .map(|(n, r)| format!("{n}: {}", r.as_ref().unwrap_or_else(|e| e)))
        .collect::<Vec<_>>()
        .join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn adaptive() -> Outcome {
    let p = Potential::flory_huggins(0.8, 1.6).unwrap();
    let grid = GridSpec::new(1.0, M, Boundary::Neumann).unwrap();
    let cfg = SchemeConfig::new(0.01, p.lipschitz(), p, Sigma::exp(1.0).unwrap(), Scheme::Ei2).unwrap();
    let u0 = Draw::new(SEED).field(grid, -0.8, 0.8);
    let (tau_min, tau_max) = (1e-4, 0.1);
    let t_end = 200.0;
    let st = trajectory(
        &cfg,
        u0,
        StepMode::Adaptive {
            tau_min,
            tau_max,
            alpha: 1e5,
        },
        t_end,
    );
    let uniform = steps_dividing(t_end, 0.01).map_err(|e| e.to_string())?;
    let mut bad = st.violations();
    if st.min_tau < tau_min || st.max_tau > tau_max {
        bad.push(format!("tau left the bounds: [{:e}, {:e}]", st.min_tau, st.max_tau));
    }
    if st.t_final != t_end {
        bad.push(format!("stopped at t = {}", st.t_final));
    }
    if 3 * st.steps > uniform {
        bad.push(format!("{} adaptive steps is not 3x fewer than {uniform}", st.steps));
    }
    let msg = format!(
        "{} adaptive steps vs {uniform} uniform ({:.1}x), tau in [{:.3e}, {:.3e}], max sup {:.15} <= {:.15}, max rise {:.2e}, max s - E0 {:.2e}",
        st.steps,
        uniform as f64 / st.steps as f64,
        st.min_tau,
        st.max_tau,
        st.max_sup_norm,
        st.beta,
        st.max_energy_rise,
        st.max_s_excess
    );
    if bad.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}; {}", bad.join("; ")))
    }
}

fn constant_sigma() -> Outcome {
    let mut rows = 0;
    for p in potentials() {
        for scheme in [Scheme::Ei1, Scheme::Ei2, Scheme::Stab1] {
            let cfg = RunConfig {
                grid: GridSpec::new(1.0, 64, Boundary::Periodic).unwrap(),
                scheme: SchemeConfig::new(0.01, p.lipschitz(), p, Sigma::constant(1.0).unwrap(), scheme).unwrap(),
                stepping: StepMode::Uniform { tau: 0.05 },
                t_end: 5.0,
                init: Init::Random {
                    lo: -0.8,
                    hi: 0.8,
                    seed: SEED,
                },
                output: None,
                snapshot_every: 0,
                verify_invariants: true,
            };
            let out = run(&cfg).map_err(|e| format!("{}/{}: {e}", name(&p), scheme.name()))?;
            if let Some(r) = out.rows.iter().find(|r| r.g.to_bits() != 1f64.to_bits()) {
                return Err(format!("{}/{}: g = {:e} at step {}", name(&p), scheme.name(), r.g, r.step));
            }
            rows += out.rows.len();
        }
    }
    Ok(format!("g == 1.0 bitwise in all {rows} rows (2 potentials x 3 schemes)"))
}

fn main() {
    let start = Instant::now();
    let mut failed = 0;
    let mut report = |n: usize, outcome: Outcome, since: Instant| {
        let secs = since.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("criterion {n} [PRIMARY]: PASS ({d}) [{secs:.1}s]"),
            Err(d) => {
                failed += 1;
                println!("criterion {n} [PRIMARY]: FAIL ({d}) [{secs:.1}s]");
            }
        }
    };

    let t = Instant::now();
    let combos: Vec<(Potential, f64)> = potentials()
        .into_iter()
        .flat_map(|p| [1.0, 10.0, 100.0].map(move |a| (p, a)))
        .collect();
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = combos
            .iter()
            .map(|&(p, a)| (format!("{}/a={a}", name(&p)), s.spawn(move || sweeps(p, a))))
            .collect();
        handles
            .into_iter()
            .map(|(label, h)| (label, h.join().unwrap_or_else(|_| Err("sweep panicked".into()))))
            .collect()
    });
    report(1, order_criterion(&results, |r| &r.0, 0.85, 1.15), t);
    report(2, order_criterion(&results, |r| &r.1, 1.85, 2.15), t);

    let t = Instant::now();
    let (c3, c4) = bound_and_energy();
    report(3, c3, t);
    report(4, c4, t);

    let t = Instant::now();
    report(5, expkernel(), t);
    let t = Instant::now();
    report(6, lemmas(), t);
    let t = Instant::now();
    report(7, adaptive(), t);
    let t = Instant::now();
    report(8, constant_sigma(), t);
    let t = Instant::now();
    report(9, fixed_points(), t);

    println!(
        "acceptance: {} of 9 criteria passed in {:.1}s",
        9 - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
