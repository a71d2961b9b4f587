//! Matrix-free spectral Galerkin propagation for the time-dependent
//! Schrödinger equation in Hermite tensor bases on hyperbolically reduced
//! index sets.

pub mod cli;
pub mod coeff;
pub mod error;
pub mod error_lab;
pub mod fast_apply;
pub mod galerkin_oracle;
pub mod hermite_basis;
pub mod index_set;
pub mod krylov;
pub mod operator;
pub mod potential_approx;

pub use coeff::CoeffVector;
pub use error::{Error, Result};
pub use index_set::{IndexSet, MultiIndex, SetKind};
pub use potential_approx::{ChebApprox, PotentialKind, PotentialSpec};
