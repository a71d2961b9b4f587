//! Krylov exponentials and Magnus time stepping.

mod lanczos;
mod magnus;
mod tridiag;

pub use lanczos::{lanczos, lanczos_exp_apply, lanczos_exp_apply_slice, LanczosFactorization, BREAKDOWN_TOL};
pub use magnus::{magnus_step, step_count, Gl2Generator, MagnusScheme, Propagation, Propagator};
pub use tridiag::{expm_tridiag_column, tridiag_eigen, TridiagEigen, DEFLATION_TOL};
