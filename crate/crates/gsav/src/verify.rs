//! Executable checks of the properties the schemes rest on, grouped into
//! profiles. Every check is deterministic for a fixed seed.

use gsav_core::expkernel::dense::{dense_exp, dense_laplacian, dense_matrix, DenseMatrix};
use gsav_core::expkernel::{apply_exp, apply_phi1};
use gsav_core::model::{bulk_energy, sample_interval, total_energy};
use gsav_core::spectral::direct_to_spectral;
use gsav_core::{
    phi1, Boundary, GridFunction, GridSpec, Potential, Scheme, SchemeConfig, Sigma, SolverState, Spectral,
    StabilizedOperator, StepController, StepMode, Stepper,
};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::backend::RustFft;
use crate::run::{BOUND_TOL, ENERGY_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Lemmas,
    Invariants,
    Oracles,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub profile: Profile,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(profile: Profile, name: impl Into<String>, outcome: Result<String, String>) -> Self {
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        Self {
            name: name.into(),
            profile,
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is plain data")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Grid size of the invariant trajectories.
    pub grid_m: usize,
    pub t_end: f64,
    /// `κ` used by the trajectories, as a multiple of the Lipschitz bound.
    pub kappa_factor: f64,
    pub eps: f64,
    pub taus: Vec<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 2024,
            grid_m: 32,
            t_end: 2.0,
            kappa_factor: 1.0,
            eps: 0.01,
            taus: vec![0.01, 0.1, 1.0],
        }
    }
}

/// Runs the requested profiles in order; repeated profiles run once.
pub fn verify(profiles: &[Profile], opts: &VerifyOptions) -> Report {
    let mut seen = Vec::new();
    let mut checks = Vec::new();
    for &p in profiles {
        if seen.contains(&p) {
            continue;
        }
        seen.push(p);
        checks.extend(match p {
            Profile::Lemmas => lemma_checks(opts),
            Profile::Oracles => oracle_checks(opts),
            Profile::Invariants => invariant_checks(opts),
        });
    }
    Report { checks }
}

/// Uniform draws with the same mapping as the random initial data.
pub struct Draw(ChaCha8Rng);

impl Draw {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn field(&mut self, grid: GridSpec, lo: f64, hi: f64) -> GridFunction {
        let values = (0..grid.len()).map(|_| self.uniform(lo, hi)).collect();
        GridFunction::from_vec(grid, values).expect("finite draws")
    }
}

pub fn potentials() -> [Potential; 2] {
    [
        Potential::double_well(),
        Potential::flory_huggins(0.8, 1.6).expect("valid parameters"),
    ]
}

fn potential_name(p: &Potential) -> &'static str {
    match p.kind() {
        gsav_core::PotentialKind::DoubleWell => "double-well",
        gsav_core::PotentialKind::FloryHuggins { .. } => "flory-huggins",
    }
}

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

fn within(value: f64, limit: f64, what: &str) -> Result<String, String> {
    let msg = format!("{what} = {value:.3e} (limit {limit:.1e})");
    if value <= limit {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// ---------------------------------------------------------------- lemmas

pub fn lemma_checks(opts: &VerifyOptions) -> Vec<Check> {
    let s = opts.seed;
    vec![
        Check::new(Profile::Lemmas, "stabilization_bound", stabilization_bound()),
        Check::new(Profile::Lemmas, "heat_semigroup_contraction", contraction(s)),
        Check::new(Profile::Lemmas, "phi1_inequalities", phi_inequalities(s)),
        Check::new(Profile::Lemmas, "summation_by_parts", summation_by_parts(s)),
        Check::new(Profile::Lemmas, "potential_consistency", potential_consistency()),
        Check::new(Profile::Lemmas, "potential_constants", potential_constants()),
        Check::new(Profile::Lemmas, "sigma_ratio_positive_monotone", sigma_ratio(s)),
    ]
}

/// `|f(ξ) + κξ| ≤ κβ` on `10⁴` points of `[-β, β]` with `κ` the Lipschitz bound.
pub fn stabilization_bound() -> Result<String, String> {
    let mut worst = f64::NEG_INFINITY;
    for p in potentials() {
        let kappa = p.lipschitz();
        for xi in sample_interval(p.beta(), 10_000) {
            let f = p.f(xi).map_err(|e| e.to_string())?;
            worst = worst.max((f + kappa * xi).abs() - kappa * p.beta());
        }
    }
    within(worst, 1e-12, "max |f(xi) + kappa xi| - kappa beta")
}

/// `‖e^{aΔ_h - bI}‖_∞ ≤ e^{-b}` for 50 random `(a, b)` on grids up to `M = 8`.
pub fn contraction(seed: u64) -> Result<String, String> {
    let mut d = Draw::new(seed ^ 0x11);
    let mut worst = f64::NEG_INFINITY;
    for trial in 0..50 {
        let m = 2 + trial % 7;
        let b = if trial % 2 == 0 { Boundary::Periodic } else { Boundary::Neumann };
        let g = GridSpec::new(1.0, m, b).map_err(|e| e.to_string())?;
        let a = d.uniform(0.0, 0.1);
        let shift = d.uniform(0.0, 5.0);
        let gen = dense_laplacian(&g)
            .map_err(|e| e.to_string())?
            .scale(a)
            .sub(&DenseMatrix::identity(m * m).scale(shift));
        let norm = dense_exp(&gen, 1.0).norm_inf();
        worst = worst.max(norm - (-shift).exp());
    }
    within(worst, 1e-12, "max ||e^{a Lap - b I}||_inf - e^{-b}")
}

/// `0 < 1 - e^{-a} < a`, `0 < φ₁(-a) < 1`, `1 < (1 + a)φ₁(-a) < 2` for `10⁴`
/// random `a ∈ (0, 50]`.
pub fn phi_inequalities(seed: u64) -> Result<String, String> {
    let mut d = Draw::new(seed ^ 0x22);
    for _ in 0..10_000 {
        let a = 50.0 * (1.0 - d.unit());
        let one_minus = -(-a).exp_m1();
        let p = phi1(-a);
        let q = (1.0 + a) * p;
        if !(0.0 < one_minus && one_minus < a && 0.0 < p && p < 1.0 && 1.0 < q && q < 2.0) {
            return Err(format!("violated at a = {a}: 1-e^-a = {one_minus}, phi1 = {p}, (1+a)phi1 = {q}"));
        }
    }
    Ok("10000 samples".into())
}

/// `⟨v, Δ_h w⟩ = -⟨∇_h v, ∇_h w⟩ = ⟨Δ_h v, w⟩` on 100 random pairs per boundary.
pub fn summation_by_parts(seed: u64) -> Result<String, String> {
    let mut d = Draw::new(seed ^ 0x33);
    let mut worst: f64 = 0.0;
    for b in [Boundary::Periodic, Boundary::Neumann] {
        for pair in 0..100 {
            let g = GridSpec::new(1.0, 3 + pair % 14, b).map_err(|e| e.to_string())?;
            let v = d.field(g, -1.0, 1.0);
            let w = d.field(g, -1.0, 1.0);
            let lw = w.laplacian();
            let a = v.inner(&lw);
            let (vx, vy) = v.gradient();
            let (wx, wy) = w.gradient();
            let c = -(vx.inner(&wx) + vy.inner(&wy));
            let e = v.laplacian().inner(&w);
            let scale = v.norm2() * lw.norm2();
            worst = worst.max((a - c).abs() / scale).max((a - e).abs() / scale);
        }
    }
    within(worst, 1e-12, "max relative defect")
}

/// `-F' = f` by central differences on 200 interior points.
pub fn potential_consistency() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for p in potentials() {
        let h = 1e-5;
        for k in 0..200 {
            let u = -p.beta() + (k as f64 + 0.5) * 2.0 * p.beta() / 200.0;
            let fd = -(p.F(u + h).map_err(|e| e.to_string())? - p.F(u - h).map_err(|e| e.to_string())?) / (2.0 * h);
            worst = worst.max((fd - p.f(u).map_err(|e| e.to_string())?).abs());
        }
    }
    within(worst, 1e-8, "max |-F'(u) - f(u)|")
}

/// The bounds `β` and Lipschitz constants of both potentials.
pub fn potential_constants() -> Result<String, String> {
    let [dw, fh] = potentials();
    let msg = format!(
        "double-well beta = {}, L = {}; flory-huggins beta = {:.6}, L = {:.4}",
        dw.beta(),
        dw.lipschitz(),
        fh.beta(),
        fh.lipschitz()
    );
    let ok = dw.beta() == 1.0
        && dw.lipschitz() == 2.0
        && (fh.beta() - 0.9575).abs() <= 5e-5
        && (fh.lipschitz() - 8.02).abs() <= 0.01
        && fh.f(fh.beta()).is_ok_and(|f| f <= 0.0);
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// `g > 0` and `g` non-decreasing in `r` on `10⁴` random triples per `σ`.
pub fn sigma_ratio(seed: u64) -> Result<String, String> {
    let mut d = Draw::new(seed ^ 0x44);
    let sigmas = [
        Sigma::Constant(2.0),
        Sigma::Exp(1.0),
        Sigma::Exp(10.0),
        Sigma::Exp(100.0),
        Sigma::ArctanShift,
        Sigma::TanhShift,
    ];
    for s in sigmas {
        for _ in 0..10_000 {
            let r1 = d.uniform(-5.0, 5.0);
            let r2 = r1 + d.uniform(0.0, 2.0);
            let e1 = r1 + d.uniform(-2.0, 2.0);
            let g1 = s.g_ratio(r1, e1).map_err(|e| format!("{s:?}: {e}"))?;
            let g2 = s.g_ratio(r2, e1).map_err(|e| format!("{s:?}: {e}"))?;
            if !(g1 > 0.0 && g1 <= g2) {
                return Err(format!("{s:?}: g({r1}) = {g1}, g({r2}) = {g2} at e1 = {e1}"));
            }
        }
    }
    Ok("6 sigma kinds x 10000 triples".into())
}

// ---------------------------------------------------------------- oracles

pub fn oracle_checks(opts: &VerifyOptions) -> Vec<Check> {
    let s = opts.seed;
    vec![
        Check::new(Profile::Oracles, "expkernel_vs_dense", expkernel_oracle(s)),
        Check::new(Profile::Oracles, "stencil_vs_dense_matrix", stencil_oracle(s)),
        Check::new(Profile::Oracles, "spectral_laplacian", spectral_laplacian(s)),
        Check::new(Profile::Oracles, "fast_vs_direct_transform", fast_vs_direct(s)),
        Check::new(Profile::Oracles, "scheme_steps_vs_dense", step_oracles(s)),
        Check::new(Profile::Oracles, "transform_determinism", determinism(s)),
    ]
}

/// Spectral `e^{-τL}` and `φ₁(-τL)` against scaling-and-squaring on 50 random
/// `M = 8` triples. Returns the worst relative L² errors.
pub fn expkernel_errors(seed: u64) -> Result<(f64, f64), String> {
    let mut d = Draw::new(seed ^ 0x55);
    let (mut worst_exp, mut worst_phi): (f64, f64) = (0.0, 0.0);
    for trial in 0..50 {
        let b = if trial % 2 == 0 { Boundary::Periodic } else { Boundary::Neumann };
        let g = GridSpec::new(d.uniform(0.5, 2.0), 8, b).map_err(|e| e.to_string())?;
        let op = StabilizedOperator::new(d.uniform(0.05, 10.0), d.uniform(1e-4, 0.05), g).map_err(|e| e.to_string())?;
        let tau = d.uniform(1e-6, 1.0);
        let v = d.field(g, -1.0, 1.0);
        let l = dense_matrix(&op).map_err(|e| e.to_string())?;
        let e = dense_exp(&l.scale(-1.0), tau);
        let ev = e.matvec(v.values());
        worst_exp = worst_exp.max(rel_l2(apply_exp(&op, tau, &v).values(), &ev));
        // φ₁(-τL)v = (τL)⁻¹(v - e^{-τL}v)
        let rhs: Vec<f64> = v.values().iter().zip(&ev).map(|(a, b)| a - b).collect();
        let pv = l.scale(tau).solve(&rhs).map_err(|e| e.to_string())?;
        worst_phi = worst_phi.max(rel_l2(apply_phi1(&op, tau, &v).values(), &pv));
    }
    Ok((worst_exp, worst_phi))
}

pub fn expkernel_oracle(seed: u64) -> Result<String, String> {
    let (e, p) = expkernel_errors(seed)?;
    let msg = format!("worst relative L2 error: exp {e:.3e}, phi1 {p:.3e} (limit 1e-9)");
    if e <= 1e-9 && p <= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

pub fn stencil_oracle(seed: u64) -> Result<String, String> {
    let mut d = Draw::new(seed ^ 0x66);
    let mut worst: f64 = 0.0;
    for b in [Boundary::Periodic, Boundary::Neumann] {
        for m in 2..=8 {
            let g = GridSpec::new(1.0, m, b).map_err(|e| e.to_string())?;
            let v = d.field(g, -1.0, 1.0);
            let dense = dense_laplacian(&g).map_err(|e| e.to_string())?.matvec(v.values());
            worst = worst.max(rel_l2(v.laplacian().values(), &dense));
        }
    }
    within(worst, 1e-13, "max relative L2 defect")
}

pub fn spectral_laplacian(seed: u64) -> Result<String, String> {
    let mut d = Draw::new(seed ^ 0x77);
    let (mut lap, mut trip): (f64, f64) = (0.0, 0.0);
    for b in [Boundary::Periodic, Boundary::Neumann] {
        for m in [16, 24, 64] {
            let g = GridSpec::new(1.0, m, b).map_err(|e| e.to_string())?;
            let mut engine = Spectral::with_backend(g, &RustFft);
            let v = d.field(g, -1.0, 1.0);
            lap = lap.max(rel_l2(engine.laplacian(&v).values(), v.laplacian().values()));
            let c = engine.to_spectral(&v);
            trip = trip.max(rel_l2(engine.from_spectral(&c).values(), v.values()));
        }
    }
    let msg = format!("spectral vs stencil {lap:.3e} (limit 1e-11), round trip {trip:.3e} (limit 1e-12)");
    if lap <= 1e-11 && trip <= 1e-12 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

pub fn fast_vs_direct(seed: u64) -> Result<String, String> {
    let mut d = Draw::new(seed ^ 0x88);
    let mut worst: f64 = 0.0;
    for b in [Boundary::Periodic, Boundary::Neumann] {
        for m in [3, 8, 16] {
            let g = GridSpec::new(1.0, m, b).map_err(|e| e.to_string())?;
            let v = d.field(g, -1.0, 1.0);
            let fast = Spectral::with_backend(g, &RustFft).to_spectral(&v);
            let slow = direct_to_spectral(&v).map_err(|e| e.to_string())?;
            let scale = slow.coeffs().iter().map(|c| c.re.hypot(c.im)).fold(0.0, f64::max);
            for (x, y) in fast.coeffs().iter().zip(slow.coeffs()) {
                let d = x - y;
                worst = worst.max(d.re.hypot(d.im) / scale);
            }
        }
    }
    within(worst, 1e-12, "max coefficient defect")
}

fn dense_ei(op: &StabilizedOperator, tau: f64, u: &[f64], n: &[f64]) -> Result<Vec<f64>, String> {
    let l = dense_matrix(op).map_err(|e| e.to_string())?;
    let e = dense_exp(&l.scale(-1.0), tau);
    let eu = e.matvec(u);
    let en = e.matvec(n);
    let rhs: Vec<f64> = n.iter().zip(&en).map(|(a, b)| a - b).collect();
    let pn = l.solve(&rhs).map_err(|e| e.to_string())?;
    Ok(eu.iter().zip(&pn).map(|(a, b)| a + b).collect())
}

fn dense_resolvent(op: &StabilizedOperator, tau: f64, u: &[f64], n: &[f64]) -> Result<Vec<f64>, String> {
    let l = dense_matrix(op).map_err(|e| e.to_string())?;
    let a = DenseMatrix::identity(l.n()).add(&l.scale(tau));
    let rhs: Vec<f64> = u.iter().zip(n).map(|(x, y)| x + tau * y).collect();
    a.solve(&rhs).map_err(|e| e.to_string())
}

/// Dense evaluation of one step of `scheme`; returns `(uⁿ⁺¹, sⁿ⁺¹)`.
pub fn dense_step(cfg: &SchemeConfig, scheme: Scheme, u: &GridFunction, s: f64, tau: f64) -> Result<(Vec<f64>, f64), String> {
    let grid = *u.grid();
    let h2 = grid.h() * grid.h();
    let dot = |a: &[f64], b: &[f64]| h2 * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let p = cfg.potential();
    let kappa = cfg.kappa();
    let eps2 = cfg.eps() * cfg.eps();
    let freeze = |v: &GridFunction, r: f64| -> Result<(f64, Vec<f64>, Vec<f64>), String> {
        let e1 = bulk_energy(p, v).map_err(|e| e.to_string())?;
        let g = cfg.sigma().g_ratio(r, e1).map_err(|e| e.to_string())?;
        let f = p.f_eval(v).map_err(|e| e.to_string())?.into_values();
        let n = f.iter().zip(v.values()).map(|(a, x)| g * (a + kappa * x)).collect();
        Ok((g, f, n))
    };
    let first = |implicit: bool| -> Result<(Vec<f64>, f64), String> {
        let (g, f, n) = freeze(u, s)?;
        let op = StabilizedOperator::new(kappa * g, eps2, grid).map_err(|e| e.to_string())?;
        let next = if implicit {
            dense_resolvent(&op, tau, u.values(), &n)?
        } else {
            dense_ei(&op, tau, u.values(), &n)?
        };
        let du: Vec<f64> = next.iter().zip(u.values()).map(|(a, b)| a - b).collect();
        let s_next = s - g * dot(&f, &du);
        Ok((next, s_next))
    };
    match scheme {
        Scheme::Ei1 => first(false),
        Scheme::Stab1 => first(true),
        Scheme::Ei2 => {
            let (pred, s_pred) = first(false)?;
            let mid: Vec<f64> = u.values().iter().zip(&pred).map(|(a, b)| 0.5 * (a + b)).collect();
            let mid = GridFunction::from_vec(grid, mid).map_err(|e| e.to_string())?;
            let (g, f, n) = freeze(&mid, 0.5 * (s + s_pred))?;
            let op = StabilizedOperator::new(kappa * g, eps2, grid).map_err(|e| e.to_string())?;
            let next = dense_ei(&op, tau, u.values(), &n)?;
            let du: Vec<f64> = next.iter().zip(u.values()).map(|(a, b)| a - b).collect();
            let dp: Vec<f64> = next.iter().zip(&pred).map(|(a, b)| a - b).collect();
            let s_next = s - g * dot(&f, &du) + 0.5 * kappa * g * dot(&dp, &du);
            Ok((next, s_next))
        }
    }
}

/// One step of each scheme on random `M = 8` states against [`dense_step`].
pub fn step_oracles(seed: u64) -> Result<String, String> {
    let mut d = Draw::new(seed ^ 0x99);
    let mut worst = [0.0f64; 3];
    let schemes = [Scheme::Ei1, Scheme::Ei2, Scheme::Stab1];
    let limits = [1e-9, 1e-9, 1e-10];
    for trial in 0..12 {
        let p = potentials()[trial % 2];
        let b = if trial % 3 == 0 { Boundary::Neumann } else { Boundary::Periodic };
        let grid = GridSpec::new(1.0, 8, b).map_err(|e| e.to_string())?;
        let cfg = SchemeConfig::new(d.uniform(0.01, 0.1), p.lipschitz(), p, Sigma::Exp(d.uniform(0.5, 10.0)), Scheme::Ei1)
            .map_err(|e| e.to_string())?;
        let u = d.field(grid, -0.8 * p.beta(), 0.8 * p.beta());
        let s = bulk_energy(&p, &u).map_err(|e| e.to_string())? + d.uniform(-0.05, 0.05);
        let tau = d.uniform(0.01, 1.0);
        let state = SolverState { u: u.clone(), s, t: 0.0, step: 0 };
        let mut stepper = Stepper::with_backend(cfg, grid, &RustFft);
        for (k, scheme) in schemes.into_iter().enumerate() {
            let (eu, es) = dense_step(&cfg, scheme, &u, s, tau)?;
            let got = stepper.advance_with(scheme, &state, tau).map_err(|e| e.to_string())?.state;
            let err = rel_l2(got.u.values(), &eu).max((got.s - es).abs() / es.abs().max(1.0));
            worst[k] = worst[k].max(err);
        }
    }
    let msg = format!(
        "worst relative error: ei1 {:.3e}, ei2 {:.3e}, stab1 {:.3e}",
        worst[0], worst[1], worst[2]
    );
    if worst.iter().zip(limits).all(|(w, l)| *w <= l) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

pub fn determinism(seed: u64) -> Result<String, String> {
    let mut d = Draw::new(seed ^ 0xaa);
    for b in [Boundary::Periodic, Boundary::Neumann] {
        let g = GridSpec::new(1.0, 48, b).map_err(|e| e.to_string())?;
        let v = d.field(g, -1.0, 1.0);
        let a = Spectral::with_backend(g, &RustFft).to_spectral(&v);
        let c = Spectral::with_backend(g, &RustFft).to_spectral(&v);
        if a != c {
            return Err(format!("{b:?}: transforms differ between engines"));
        }
        let p = Potential::double_well();
        let cfg = SchemeConfig::new(0.01, 2.0, p, Sigma::Exp(1.0), Scheme::Ei2).map_err(|e| e.to_string())?;
        let st = SolverState::new(v.scale(0.9), &p).map_err(|e| e.to_string())?;
        let x = Stepper::with_backend(cfg, g, &RustFft).step(&st, 0.1).map_err(|e| e.to_string())?;
        let y = Stepper::with_backend(cfg, g, &RustFft).step(&st, 0.1).map_err(|e| e.to_string())?;
        if x != y {
            return Err(format!("{b:?}: steps differ between steppers"));
        }
    }
    Ok("bitwise identical".into())
}

// ---------------------------------------------------------------- invariants

/// Per-step extremes of one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryStats {
    pub steps: u64,
    pub t_final: f64,
    pub beta: f64,
    pub max_sup_norm: f64,
    /// Largest single-step increase of the modified energy.
    pub max_energy_rise: f64,
    /// Largest `sⁿ - E_h(u⁰)` over all steps, predictors included.
    pub max_s_excess: f64,
    pub min_g: f64,
    pub max_g: f64,
    pub min_tau: f64,
    pub max_tau: f64,
    /// Set when a step failed; the statistics cover the steps before it.
    pub error: Option<String>,
}

impl TrajectoryStats {
    /// Human-readable list of broken invariants (bound, energy, auxiliary bound,
    /// positivity of `g`, failed steps).
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(e) = &self.error {
            out.push(format!("step failed: {e}"));
        }
        if self.max_sup_norm > self.beta + BOUND_TOL {
            out.push(format!("sup norm {} exceeds beta {}", self.max_sup_norm, self.beta));
        }
        if self.max_energy_rise > ENERGY_TOL {
            out.push(format!("modified energy rose by {:.3e}", self.max_energy_rise));
        }
        if self.max_s_excess > ENERGY_TOL {
            out.push(format!("auxiliary variable exceeded the initial energy by {:.3e}", self.max_s_excess));
        }
        if self.steps > 0 && !(self.min_g > 0.0 && self.max_g.is_finite()) {
            out.push(format!("g left (0, inf): [{}, {}]", self.min_g, self.max_g));
        }
        out
    }

    pub fn summary(&self) -> String {
        format!(
            "{} steps to t = {}, max sup {:.15} (beta {:.15}), max energy rise {:.2e}, max s - E0 {:.2e}, g in [{:.4e}, {:.4e}]",
            self.steps, self.t_final, self.max_sup_norm, self.beta, self.max_energy_rise, self.max_s_excess, self.min_g, self.max_g
        )
    }
}

/// Steps `u0` to `t_end` recording the extremes the invariants talk about.
/// Adaptive stepping observes the original energy `E_h`.
pub fn trajectory(cfg: &SchemeConfig, u0: GridFunction, stepping: StepMode, t_end: f64) -> TrajectoryStats {
    let p = *cfg.potential();
    let eps = cfg.eps();
    let grid = *u0.grid();
    let mut stats = TrajectoryStats {
        steps: 0,
        t_final: 0.0,
        beta: p.beta(),
        max_sup_norm: u0.norm_inf(),
        max_energy_rise: f64::NEG_INFINITY,
        max_s_excess: f64::NEG_INFINITY,
        min_g: f64::INFINITY,
        max_g: f64::NEG_INFINITY,
        min_tau: f64::INFINITY,
        max_tau: f64::NEG_INFINITY,
        error: None,
    };
    let setup = || -> Result<(SolverState, f64, StepController), String> {
        let state = SolverState::new(u0.clone(), &p).map_err(|e| e.to_string())?;
        let e0 = total_energy(&p, eps, &state.u).map_err(|e| e.to_string())?;
        let ctrl = match stepping {
            StepMode::Uniform { tau } => StepController::uniform(tau),
            StepMode::Adaptive { tau_min, tau_max, alpha } => StepController::adaptive(tau_min, tau_max, alpha),
        }
        .map_err(|e| e.to_string())?;
        Ok((state, e0, ctrl))
    };
    let (mut state, e0, mut ctrl) = match setup() {
        Ok(x) => x,
        Err(e) => {
            stats.error = Some(e);
            return stats;
        }
    };
    let adaptive = ctrl.is_adaptive();
    ctrl.observe(e0, None);
    let mut stepper = Stepper::with_backend(*cfg, grid, &RustFft);
    let mut modified = state.modified_energy(eps);
    while state.t < t_end {
        let tau = ctrl.step_size(state.t, t_end);
        let last = tau >= t_end - state.t;
        let out = match stepper.advance(&state, tau) {
            Ok(o) => o,
            Err(e) => {
                stats.error = Some(format!("step {}: {e}", state.step + 1));
                break;
            }
        };
        let mut next = out.state;
        if last {
            next.t = t_end;
        }
        let m_next = next.modified_energy(eps);
        stats.steps += 1;
        stats.t_final = next.t;
        stats.max_sup_norm = stats.max_sup_norm.max(next.u.norm_inf());
        stats.max_energy_rise = stats.max_energy_rise.max(m_next - modified);
        stats.max_s_excess = stats.max_s_excess.max(next.s - e0);
        if let Some(sp) = out.predicted_s {
            stats.max_s_excess = stats.max_s_excess.max(sp - e0);
        }
        stats.min_g = stats.min_g.min(out.g);
        stats.max_g = stats.max_g.max(out.g);
        stats.min_tau = stats.min_tau.min(tau);
        stats.max_tau = stats.max_tau.max(tau);
        if adaptive {
            match total_energy(&p, eps, &next.u) {
                Ok(e) => ctrl.observe(e, Some(tau)),
                Err(e) => {
                    stats.error = Some(format!("step {}: {e}", next.step));
                    break;
                }
            }
        }
        modified = m_next;
        state = next;
    }
    stats
}

pub fn invariant_checks(opts: &VerifyOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    let grid = match GridSpec::new(1.0, opts.grid_m, Boundary::Periodic) {
        Ok(g) => g,
        Err(e) => {
            checks.push(Check::new(Profile::Invariants, "setup", Err(e.to_string())));
            return checks;
        }
    };
    for p in potentials() {
        let name = potential_name(&p);
        let kappa = opts.kappa_factor * p.lipschitz();
        let hypothesis = if kappa >= p.lipschitz() {
            Ok(format!("kappa = {kappa} >= {}", p.lipschitz()))
        } else {
            Err(format!(
                "kappa = {kappa} is below the Lipschitz bound {}; the bound beta is not guaranteed",
                p.lipschitz()
            ))
        };
        checks.push(Check::new(Profile::Invariants, format!("kappa_hypothesis/{name}"), hypothesis));
        let u0 = Draw::new(opts.seed).field(grid, -0.8 * p.beta(), 0.8 * p.beta());
        for scheme in [Scheme::Ei1, Scheme::Ei2, Scheme::Stab1] {
            for &tau in &opts.taus {
                let label = format!("trajectory/{name}/{}/tau={tau}", scheme.name());
                let outcome = SchemeConfig::new(opts.eps, kappa, p, Sigma::Exp(1.0), scheme)
                    .map_err(|e| e.to_string())
                    .and_then(|cfg| {
                        let stats = trajectory(&cfg, u0.clone(), StepMode::Uniform { tau }, opts.t_end);
                        let v = stats.violations();
                        if v.is_empty() {
                            Ok(stats.summary())
                        } else {
                            Err(v.join("; "))
                        }
                    });
                checks.push(Check::new(Profile::Invariants, label, outcome));
            }
        }
    }
    checks.push(Check::new(Profile::Invariants, "pure_state_fixed_points", fixed_points()));
    checks.push(Check::new(Profile::Invariants, "constant_sigma_degeneracy", constant_sigma(opts)));
    checks.push(Check::new(Profile::Invariants, "adaptive_step_bounds", adaptive_bounds(opts)));
    checks
}

/// `u⁰ ≡ 1` under the double well stays put for every scheme and `τ ∈ {0.01, 1}`.
pub fn fixed_points() -> Result<String, String> {
    let p = Potential::double_well();
    let mut worst: f64 = 0.0;
    for b in [Boundary::Periodic, Boundary::Neumann] {
        let g = GridSpec::new(1.0, 32, b).map_err(|e| e.to_string())?;
        for scheme in [Scheme::Ei1, Scheme::Ei2, Scheme::Stab1] {
            let cfg = SchemeConfig::new(0.01, 2.0, p, Sigma::Exp(1.0), scheme).map_err(|e| e.to_string())?;
            let mut stepper = Stepper::with_backend(cfg, g, &RustFft);
            for tau in [0.01, 1.0] {
                let mut st = SolverState::new(GridFunction::constant(g, 1.0), &p).map_err(|e| e.to_string())?;
                for _ in 0..10 {
                    st = stepper.step(&st, tau).map_err(|e| e.to_string())?;
                    let dev = st.u.values().iter().map(|x| (x - 1.0).abs()).fold(st.s.abs(), f64::max);
                    worst = worst.max(dev);
                }
            }
        }
    }
    within(worst, 4.0 * f64::EPSILON, "max deviation from u = 1, s = 0")
}

/// With `σ` constant every frozen coefficient is exactly 1.
pub fn constant_sigma(opts: &VerifyOptions) -> Result<String, String> {
    let p = Potential::flory_huggins(0.8, 1.6).map_err(|e| e.to_string())?;
    let g = GridSpec::new(1.0, opts.grid_m, Boundary::Periodic).map_err(|e| e.to_string())?;
    let u0 = Draw::new(opts.seed).field(g, -0.8, 0.8);
    for scheme in [Scheme::Ei1, Scheme::Ei2, Scheme::Stab1] {
        let cfg = SchemeConfig::new(opts.eps, p.lipschitz(), p, Sigma::Constant(1.0), scheme).map_err(|e| e.to_string())?;
        let stats = trajectory(&cfg, u0.clone(), StepMode::Uniform { tau: 0.1 }, 1.0);
        if stats.error.is_some() || stats.min_g != 1.0 || stats.max_g != 1.0 {
            return Err(format!("{}: g in [{}, {}], {:?}", scheme.name(), stats.min_g, stats.max_g, stats.error));
        }
    }
    Ok("g == 1.0 bitwise for ei1, ei2, stab1".into())
}

/// A short adaptive run keeps `τ ∈ [τ_min, τ_max]` and the invariants.
pub fn adaptive_bounds(opts: &VerifyOptions) -> Result<String, String> {
    let p = Potential::flory_huggins(0.8, 1.6).map_err(|e| e.to_string())?;
    let g = GridSpec::new(1.0, opts.grid_m, Boundary::Neumann).map_err(|e| e.to_string())?;
    let cfg = SchemeConfig::new(opts.eps, p.lipschitz(), p, Sigma::Exp(1.0), Scheme::Ei2).map_err(|e| e.to_string())?;
    let u0 = Draw::new(opts.seed).field(g, -0.8, 0.8);
    let (tau_min, tau_max) = (1e-4, 0.1);
    let stats = trajectory(
        &cfg,
        u0,
        StepMode::Adaptive {
            tau_min,
            tau_max,
            alpha: 1e5,
        },
        opts.t_end,
    );
    let mut v = stats.violations();
    if stats.min_tau < tau_min || stats.max_tau > tau_max {
        v.push(format!("tau left [{tau_min}, {tau_max}]: [{}, {}]", stats.min_tau, stats.max_tau));
    }
    if v.is_empty() {
        Ok(format!("{}, tau in [{:.3e}, {:.3e}]", stats.summary(), stats.min_tau, stats.max_tau))
    } else {
        Err(v.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_profile_list_passes_trivially() {
        let r = verify(&[], &VerifyOptions::default());
        assert!(r.passed());
        assert!(r.checks.is_empty());
        assert_eq!(serde_json::from_str::<serde_json::Value>(&r.to_json()).unwrap()["checks"], serde_json::json!([]));
    }

    #[test]
    fn lemma_profile_passes() {
        let r = verify(&[Profile::Lemmas, Profile::Lemmas], &VerifyOptions::default());
        assert_eq!(r.checks.len(), 7);
        assert!(r.passed(), "{}", r.to_json());
    }

    #[test]
    fn oracle_profile_passes() {
        let r = verify(&[Profile::Oracles], &VerifyOptions::default());
        assert!(r.passed(), "{}", r.to_json());
    }

    #[test]
    fn draws_are_in_range() {
        let mut d = Draw::new(3);
        for _ in 0..1000 {
            let x = d.uniform(-2.0, 3.0);
            assert!((-2.0..3.0).contains(&x));
        }
    }
}
