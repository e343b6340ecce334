mod common;

use common::{random_field, rng};
use gsav_core::model::{bulk_energy, modified_energy, sample_interval, total_energy};
use gsav_core::{Boundary, Error, GridFunction, GridSpec, Potential, Sigma};
use proptest::prelude::*;

fn potentials() -> [Potential; 2] {
    [Potential::double_well(), Potential::flory_huggins(0.8, 1.6).unwrap()]
}

fn sigmas() -> [Sigma; 5] {
    [
        Sigma::Constant(3.0),
        Sigma::Exp(1.0),
        Sigma::Exp(100.0),
        Sigma::ArctanShift,
        Sigma::TanhShift,
    ]
}

#[test]
fn minus_potential_derivative_is_the_reaction() {
    for p in potentials() {
        let beta = p.beta();
        let h = 1e-5;
        for k in 0..200 {
            let u = -beta + (k as f64 + 0.5) * 2.0 * beta / 200.0;
            let fd = -(p.F(u + h).unwrap() - p.F(u - h).unwrap()) / (2.0 * h);
            assert!((fd - p.f(u).unwrap()).abs() <= 1e-8, "{p:?} u={u}");
        }
    }
}

#[test]
fn reaction_derivative_matches_finite_differences() {
    for p in potentials() {
        for u in sample_interval(0.95 * p.beta(), 101) {
            let h = 1e-6;
            let fd = (p.f(u + h).unwrap() - p.f(u - h).unwrap()) / (2.0 * h);
            assert!((fd - p.df(u)).abs() <= 1e-6 * p.lipschitz());
        }
    }
}

#[test]
fn stabilization_bound_on_dense_sample() {
    for p in potentials() {
        let kappa = p.lipschitz();
        for xi in sample_interval(p.beta(), 10_000) {
            let v = (p.f(xi).unwrap() + kappa * xi).abs();
            assert!(v <= kappa * p.beta() + 1e-12, "{p:?} xi={xi}");
        }
    }
}

#[test]
fn bound_condition_holds_at_beta() {
    for p in potentials() {
        assert!(p.f(p.beta()).unwrap() <= 0.0);
        assert!(p.f(-p.beta()).unwrap() >= 0.0);
    }
}

#[test]
fn bulk_energy_matches_direct_summation() {
    let mut r = rng(21);
    for p in potentials() {
        for b in [Boundary::Periodic, Boundary::Neumann] {
            let g = GridSpec::new(1.0, 24, b).unwrap();
            let v = random_field(g, -0.9 * p.beta(), 0.9 * p.beta(), &mut r);
            let naive: f64 = v.values().iter().map(|&u| p.F(u).unwrap()).sum::<f64>() * g.h() * g.h();
            let e1 = bulk_energy(&p, &v).unwrap();
            assert!((e1 - naive).abs() <= 1e-13 * naive.abs().max(1.0));

            let eps = 0.01;
            let (gx, gy) = v.gradient();
            let grad: f64 = gx.values().iter().chain(gy.values()).map(|d| d * d).sum::<f64>() * g.h() * g.h();
            let e = total_energy(&p, eps, &v).unwrap();
            assert!((e - (0.5 * eps * eps * grad + naive)).abs() <= 1e-12 * e.abs().max(1.0));
            assert_eq!(modified_energy(eps, &v, e1), e);
        }
    }
}

#[test]
fn fields_outside_the_log_domain_are_rejected() {
    let p = Potential::flory_huggins(0.8, 1.6).unwrap();
    let g = GridSpec::new(1.0, 4, Boundary::Periodic).unwrap();
    let mut v = GridFunction::constant(g, 0.5);
    v.set(2, 3, -1.0);
    assert!(matches!(p.f_eval(&v), Err(Error::Domain { .. })));
    assert!(matches!(bulk_energy(&p, &v), Err(Error::Domain { .. })));
    // the double well has no such restriction
    assert!(bulk_energy(&Potential::double_well(), &v).is_ok());
}

#[test]
fn exp_ratio_survives_extreme_arguments() {
    // separate factors e^{100·800} would overflow
    let g = Sigma::Exp(100.0).g_ratio(800.0, 800.0 + 2f64.ln() / 100.0).unwrap();
    assert!((g - 0.5).abs() < 1e-12);
    assert!(matches!(
        Sigma::Exp(100.0).g_ratio(10.0, 0.0),
        Err(Error::NumericRange { .. })
    ));
}

proptest! {
    #[test]
    fn g_is_positive_or_reports_overflow(r in -50.0f64..50.0, e1 in -50.0f64..50.0) {
        for s in sigmas() {
            match s.g_ratio(r, e1) {
                Ok(g) => prop_assert!(g > 0.0 && g.is_finite()),
                Err(Error::NumericRange { .. }) => {
                    // only e^{a(r - e1)} can leave the float range
                    let Sigma::Exp(a) = s else { panic!("{s:?} failed") };
                    prop_assert!((a * (r - e1)).abs() > 700.0);
                }
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn g_is_monotone_in_r(r1 in -5.0f64..5.0, dr in 0.0f64..5.0, e1 in -5.0f64..5.0) {
        let r2 = r1 + dr;
        for s in sigmas() {
            if let (Ok(a), Ok(b)) = (s.g_ratio(r1, e1), s.g_ratio(r2, e1)) {
                prop_assert!(a <= b, "{:?}", s);
            }
        }
        // a = 1 never overflows on this range
        prop_assert!(Sigma::Exp(1.0).g_ratio(r1, e1).unwrap() <= Sigma::Exp(1.0).g_ratio(r2, e1).unwrap());
    }

    #[test]
    fn g_is_one_on_the_diagonal(r in -100.0f64..100.0) {
        for s in sigmas() {
            prop_assert!((s.g_ratio(r, r).unwrap() - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn sigma_conditions(x in -1e3f64..1e3) {
        for s in sigmas() {
            prop_assert!(s.eval(x) >= 0.0);
            prop_assert!(s.derivative(x) >= 0.0);
        }
        prop_assert!(Sigma::ArctanShift.eval(x) > 0.0);
        prop_assert!(Sigma::Exp(1.0).eval(x.clamp(-700.0, 700.0)) > 0.0);
    }

    #[test]
    fn reactions_are_odd(t in -1.0f64..1.0) {
        for p in potentials() {
            let u = t * p.beta();
            prop_assert_eq!(p.f(-u).unwrap(), -p.f(u).unwrap());
            prop_assert_eq!(p.F(-u).unwrap(), p.F(u).unwrap());
        }
    }
}
