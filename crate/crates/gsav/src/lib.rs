//! Runner, convergence studies and invariant checks for the `gsav-core`
//! Allen-Cahn solvers, with CSV output and a rustfft-backed transform.

// `!(x < y)` is used on purpose so NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod backend;
pub mod config;
pub mod converge;
pub mod error;
pub mod init;
pub mod output;
pub mod run;
pub mod verify;

pub use backend::RustFft;
pub use config::{Init, RunConfig};
pub use error::{HarnessError, Result};
pub use run::{run, RunOutput};
pub use verify::{verify, Profile, Report, VerifyOptions};
