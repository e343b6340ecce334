//! Linear, structure-preserving time integrators for Allen–Cahn type gradient
//! flows on uniform square grids.
//!
//! The crate provides the generalized scalar-auxiliary-variable exponential
//! integrators of first order ([`Scheme::Ei1`]) and second order
//! ([`Scheme::Ei2`], prediction–correction), plus the stabilized semi-implicit
//! variant ([`Scheme::Stab1`]). With a stabilizing constant `κ` at least the
//! Lipschitz bound of the reaction on `[-β, β]`, every scheme keeps the
//! discrete solution inside `[-β, β]` and never increases the modified energy,
//! for any time step.
//!
//! Everything here is pure computation over `alloc`; the crate builds without
//! `std` (disable default features and enable `libm`). File formats, the CLI and
//! the rustfft-backed transform live in the companion `gsav` crate.
//!
//! ```
//! use gsav_core::{Boundary, GridSpec, GridFunction, Potential, Scheme, SchemeConfig, Sigma, SolverState, Stepper};
//!
//! let grid = GridSpec::new(1.0, 16, Boundary::Periodic).unwrap();
//! let u0 = GridFunction::from_fn(grid, |x, y| 0.1 * (6.0 * x).sin() * (6.0 * y).cos());
//! let potential = Potential::double_well();
//! let cfg = SchemeConfig::new(0.01, potential.lipschitz(), potential, Sigma::exp(1.0).unwrap(), Scheme::Ei2).unwrap();
//! let mut stepper = Stepper::new(cfg, grid);
//! let state = SolverState::new(u0, &potential).unwrap();
//! let next = stepper.step(&state, 0.1).unwrap();
//! assert!(next.u.norm_inf() <= potential.beta());
//! ```
#![cfg_attr(not(feature = "std"), no_std)]
// `!(x < y)` is used on purpose so NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

#[cfg(not(any(feature = "std", feature = "libm")))]
compile_error!("gsav-core needs either the `std` or the `libm` feature for float intrinsics");

extern crate alloc;

mod error;
pub mod expkernel;
pub mod fft;
pub mod math;
pub mod mesh;
pub mod model;
pub mod schemes;
pub mod spectral;
pub mod timestep;

pub use error::{Error, Result};
pub use expkernel::{phi1, StabilizedOperator};
pub use fft::{BuiltinFft, FftBackend, LineFft};
pub use mesh::{Boundary, GridFunction, GridSpec};
pub use model::{Potential, PotentialKind, Sigma};
pub use schemes::{Scheme, SchemeConfig, SolverState, StepOutcome, Stepper};
pub use spectral::{Spectral, SpectralCoeffs};
pub use timestep::{StepController, StepMode};
