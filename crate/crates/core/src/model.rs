//! Reaction terms, potentials, the shaping function `σ` and the discrete
//! energies.
//!
//! The reaction `f` and the potential `F` are tied by `F' = -f`; the bound `β`
//! satisfies `f(β) ≤ 0 ≤ f(-β)`, which is what makes `[-β, β]` invariant.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use crate::math;
use crate::mesh::{pairwise_sum, GridFunction};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialKind {
    /// `F(u) = (u² - 1)²/4`, `f(u) = u - u³`.
    DoubleWell,
    /// `F(u) = θ/2 [(1+u)ln(1+u) + (1-u)ln(1-u)] - θc/2 u²`,
    /// `f(u) = θ/2 ln((1-u)/(1+u)) + θc u`.
    FloryHuggins { theta: f64, theta_c: f64 },
}

/// A reaction/potential pair together with its bound `β` and the Lipschitz
/// constant `‖f'‖` on `[-β, β]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potential {
    kind: PotentialKind,
    beta: f64,
    lipschitz: f64,
}

impl Potential {
    pub fn double_well() -> Self {
        Self {
            kind: PotentialKind::DoubleWell,
            beta: 1.0,
            lipschitz: 2.0,
        }
    }

    /// Requires `θc > θ > 0`; `β` is the positive root of `f`.
    pub fn flory_huggins(theta: f64, theta_c: f64) -> Result<Self> {
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::InvalidParameter {
                name: "theta",
                reason: "must be positive",
            });
        }
        if !(theta_c.is_finite() && theta_c > theta) {
            return Err(Error::InvalidParameter {
                name: "theta_c",
                reason: "must exceed theta",
            });
        }
        let kind = PotentialKind::FloryHuggins { theta, theta_c };
        let beta = compute_beta(kind)?;
        let lipschitz = lipschitz_bound(kind, beta);
        Ok(Self {
            kind,
            beta,
            lipschitz,
        })
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// Reaction `f(u)`.
    pub fn f(&self, u: f64) -> Result<f64> {
        match self.kind {
            PotentialKind::DoubleWell => Ok(u - u * u * u),
            PotentialKind::FloryHuggins { theta, theta_c } => {
                check_log_domain(u)?;
                Ok(0.5 * theta * (math::ln_1p(-u) - math::ln_1p(u)) + theta_c * u)
            }
        }
    }

    /// Potential `F(u)`.
    #[allow(non_snake_case)]
    pub fn F(&self, u: f64) -> Result<f64> {
        match self.kind {
            PotentialKind::DoubleWell => {
                let w = u * u - 1.0;
                Ok(0.25 * w * w)
            }
            PotentialKind::FloryHuggins { theta, theta_c } => {
                check_log_domain(u)?;
                Ok(fh_potential(theta, theta_c, u, math::ln_1p(u), math::ln_1p(-u)))
            }
        }
    }

    /// Derivative `f'(u)`; unchecked, NaN outside the log domain.
    pub fn df(&self, u: f64) -> f64 {
        match self.kind {
            PotentialKind::DoubleWell => 1.0 - 3.0 * u * u,
            PotentialKind::FloryHuggins { theta, theta_c } => theta_c - theta / (1.0 - u * u),
        }
    }

    pub fn f_eval(&self, v: &GridFunction) -> Result<GridFunction> {
        let mut out = vec![0.0; v.values().len()];
        for (o, &u) in out.iter_mut().zip(v.values()) {
            *o = self.f(u)?;
        }
        Ok(GridFunction::from_raw(*v.grid(), out))
    }

    #[allow(non_snake_case)]
    pub fn F_eval(&self, v: &GridFunction) -> Result<GridFunction> {
        let mut out = vec![0.0; v.values().len()];
        for (o, &u) in out.iter_mut().zip(v.values()) {
            *o = self.F(u)?;
        }
        Ok(GridFunction::from_raw(*v.grid(), out))
    }

    /// Fills `f_out` with `f(u)` and `pot_out` with `F(u)` in one sweep.
    pub(crate) fn eval_into(&self, u: &[f64], f_out: &mut [f64], pot_out: &mut [f64]) -> Result<()> {
        match self.kind {
            PotentialKind::DoubleWell => {
                for ((fo, po), &x) in f_out.iter_mut().zip(pot_out.iter_mut()).zip(u) {
                    let x2 = x * x;
                    *fo = x - x2 * x;
                    let w = x2 - 1.0;
                    *po = 0.25 * w * w;
                }
            }
            PotentialKind::FloryHuggins { theta, theta_c } => {
                let mut worst = 0.0_f64;
                for ((fo, po), &x) in f_out.iter_mut().zip(pot_out.iter_mut()).zip(u) {
                    worst = worst.max(x.abs());
                    let lp = math::ln_1p(x);
                    let lm = math::ln_1p(-x);
                    *fo = 0.5 * theta * (lm - lp) + theta_c * x;
                    *po = fh_potential(theta, theta_c, x, lp, lm);
                }
                // NaN fails the comparison too.
                if !(worst < 1.0) {
                    let bad = u
                        .iter()
                        .copied()
                        .find(|x| !(x.abs() < 1.0))
                        .unwrap_or(f64::NAN);
                    return Err(Error::Domain { value: bad });
                }
            }
        }
        Ok(())
    }
}

fn check_log_domain(u: f64) -> Result<()> {
    if u.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain { value: u })
    }
}

#[inline]
fn fh_potential(theta: f64, theta_c: f64, u: f64, ln_plus: f64, ln_minus: f64) -> f64 {
    0.5 * theta * ((1.0 + u) * ln_plus + (1.0 - u) * ln_minus) - 0.5 * theta_c * u * u
}

/// The bound `β`: exactly 1 for the double well, the positive root of `f` for
/// Flory–Huggins (bisected down to adjacent floats, returning the side with
/// `f(β) ≤ 0`).
pub fn compute_beta(kind: PotentialKind) -> Result<f64> {
    match kind {
        PotentialKind::DoubleWell => Ok(1.0),
        PotentialKind::FloryHuggins { theta, theta_c } => {
            let f = |u: f64| 0.5 * theta * (math::ln_1p(-u) - math::ln_1p(u)) + theta_c * u;
            let mut lo = 1e-8;
            let mut hi = 1.0 - f64::EPSILON;
            if !(f(lo) > 0.0 && f(hi) <= 0.0) {
                return Err(Error::NoSignChange);
            }
            for _ in 0..200 {
                let mid = lo + 0.5 * (hi - lo);
                if mid <= lo || mid >= hi {
                    break;
                }
                if f(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(hi)
        }
    }
}

/// `sup |f'|` over `[-β, β]`.
///
/// The double well gives 2 in closed form. For Flory–Huggins `f'` is even, so a
/// dense sample of `[0, β]` plus the endpoint locates the maximum, which a
/// golden-section search then refines to `1e-10` in `u`.
pub fn lipschitz_bound(kind: PotentialKind, beta: f64) -> f64 {
    match kind {
        PotentialKind::DoubleWell => {
            // |1 - 3u²| on [0, β] peaks at 0 or at β
            (1.0 - 3.0 * beta * beta).abs().max(1.0)
        }
        PotentialKind::FloryHuggins { theta, theta_c } => {
            let g = |u: f64| (theta_c - theta / (1.0 - u * u)).abs();
            const SAMPLES: usize = 2000;
            let step = beta / SAMPLES as f64;
            let (mut best_i, mut best) = (0, g(0.0));
            for i in 1..=SAMPLES {
                let v = g(i as f64 * step);
                if v > best {
                    best = v;
                    best_i = i;
                }
            }
            let end = g(beta);
            let mut a = (best_i.saturating_sub(1)) as f64 * step;
            let mut b = ((best_i + 1) as f64 * step).min(beta);
            let inv_phi = 0.618_033_988_749_894_9;
            let mut c = b - inv_phi * (b - a);
            let mut d = a + inv_phi * (b - a);
            while b - a > 1e-10 {
                if g(c) > g(d) {
                    b = d;
                } else {
                    a = c;
                }
                c = b - inv_phi * (b - a);
                d = a + inv_phi * (b - a);
            }
            best.max(end).max(g(0.5 * (a + b)))
        }
    }
}

/// Bulk energy `E₁ₕ(v) = ⟨F(v), 1⟩`.
pub fn bulk_energy(p: &Potential, v: &GridFunction) -> Result<f64> {
    let mut f = vec![0.0; v.values().len()];
    let mut pot = vec![0.0; v.values().len()];
    p.eval_into(v.values(), &mut f, &mut pot)?;
    Ok(integrate(v, &pot))
}

pub(crate) fn integrate(v: &GridFunction, values: &[f64]) -> f64 {
    let h = v.grid().h();
    h * h * pairwise_sum(values.len(), |i| values[i])
}

/// Discrete energy `E_h(v) = ε²/2 ‖∇_h v‖² + E₁ₕ(v)`.
pub fn total_energy(p: &Potential, eps: f64, v: &GridFunction) -> Result<f64> {
    Ok(0.5 * eps * eps * v.grad_norm_sq() + bulk_energy(p, v)?)
}

/// Modified energy `ℰ_h(v, r) = ε²/2 ‖∇_h v‖² + r`.
pub fn modified_energy(eps: f64, v: &GridFunction, r: f64) -> f64 {
    0.5 * eps * eps * v.grad_norm_sq() + r
}

/// Shaping function of the auxiliary variable. Every kind is positive with a
/// non-negative derivative on the whole real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sigma {
    /// `σ ≡ c`; makes `g ≡ 1`.
    Constant(f64),
    /// `σ(x) = e^{ax}`, `a > 0`.
    Exp(f64),
    /// `σ(x) = π/2 + arctan(x)`.
    ArctanShift,
    /// `σ(x) = 1 + tanh(x)`.
    TanhShift,
}

impl Sigma {
    pub fn constant(c: f64) -> Result<Self> {
        if c.is_finite() && c > 0.0 {
            Ok(Sigma::Constant(c))
        } else {
            Err(Error::InvalidParameter {
                name: "sigma constant",
                reason: "must be positive and finite",
            })
        }
    }

    pub fn exp(a: f64) -> Result<Self> {
        if a.is_finite() && a > 0.0 {
            Ok(Sigma::Exp(a))
        } else {
            Err(Error::InvalidParameter {
                name: "sigma a",
                reason: "must be positive and finite",
            })
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Sigma::Constant(c) => c,
            Sigma::Exp(a) => math::exp(a * x),
            Sigma::ArctanShift => shifted_arctan(x),
            Sigma::TanhShift => 2.0 / (1.0 + math::exp(-2.0 * x)),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            Sigma::Constant(_) => 0.0,
            Sigma::Exp(a) => a * math::exp(a * x),
            Sigma::ArctanShift => 1.0 / (1.0 + x * x),
            Sigma::TanhShift => {
                let t = 2.0 / (math::exp(x) + math::exp(-x));
                t * t
            }
        }
    }

    /// `g = σ(r) / σ(e1)` where `e1` is the bulk energy of the current field.
    pub fn g_ratio(&self, r: f64, e1: f64) -> Result<f64> {
        let g = match *self {
            Sigma::Constant(_) => 1.0,
            // single exponential of the difference: no overflow of the factors
            Sigma::Exp(a) => math::exp(a * (r - e1)),
            Sigma::ArctanShift => shifted_arctan(r) / shifted_arctan(e1),
            Sigma::TanhShift => (1.0 + math::exp(-2.0 * e1)) / (1.0 + math::exp(-2.0 * r)),
        };
        if g.is_finite() && g > 0.0 {
            Ok(g)
        } else {
            Err(Error::NumericRange {
                what: "the ratio sigma(s)/sigma(E1)",
            })
        }
    }
}

/// `π/2 + arctan(x)`, without cancellation for large negative `x`.
fn shifted_arctan(x: f64) -> f64 {
    if x >= 0.0 {
        FRAC_PI_2 + math::atan(x)
    } else {
        math::atan(-1.0 / x)
    }
}

/// Dense sample points of `[-β, β]`, shared by tests and verification.
pub fn sample_interval(beta: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|i| -beta + 2.0 * beta * i as f64 / (n - 1) as f64)
        .collect()
}
