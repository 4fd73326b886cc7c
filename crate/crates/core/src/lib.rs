//! Rational-filter eigensolvers for large sparse non-Hermitian pencils.
//!
//! Given a pencil `(A, M)` and a disk in the complex plane, the solvers in
//! [`drivers`] compute every eigenvalue inside the disk together with its
//! right eigenvector, without any estimate of how many eigenvalues the disk
//! contains. The projection subspace is the range of a rational filter
//! `rho(M^-1 A)` captured by an incremental randomized range finder and the
//! eigenpairs are extracted by a harmonic Rayleigh-Ritz projection.
//!
//! Two partitioned variants work on the interface Schur complement of a
//! graph-partitioned reordering of the pencil; a rational subspace
//! iteration baseline is provided for comparison. Every shifted linear solve
//! is tallied in a [`resolvent::SolveLedger`].

pub mod deflation;
pub mod dense;
pub mod drivers;
mod error;
pub mod filter;
pub mod hrr;
pub mod lu;
pub mod partition;
pub mod range;
pub mod resolvent;
pub mod sparse;
pub mod synth;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// binary64 machine epsilon.
pub const MACHINE_EPSILON: f64 = 2.220446049250313e-16;
