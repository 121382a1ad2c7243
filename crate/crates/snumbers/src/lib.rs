//! Certified two-sided bounds on strict s-numbers of matrices acting from
//! weighted l1-type spaces into linf-type spaces.
//!
//! The crate computes approximation, Gelfand, Kolmogorov, Bernstein, Mityagin
//! and isomorphism numbers of partial-sum and discretized-integration
//! operators as intervals whose two sides are backed by machine-checkable
//! witnesses: factorization pairs, rank-bounded approximants, subspace
//! sections solved exactly by LP, and quantitative pigeonhole certificates.
//! All core arithmetic runs either over exact rationals or over doubles,
//! never mixed.
//!
//! Entry points:
//! - [`operators`]: build the partial-sum matrix `summation_matrix` and the
//!   grid-discretized integration operator `volterra_matrix`.
//! - [`engines::report`]: certified intervals for all six s-numbers.
//! - [`witnesses`]: executable forms of the constructive bounds.
//! - [`cli`]: the `compute` / `convergence` / `verify` / `axioms` commands
//!   used by the thin binary.
//!
//! The `examples/` directory carries one runnable example per capability.

pub mod cli;
pub mod engines;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod operators;
pub mod polytope;
pub mod scalar;
pub mod spaces;
pub mod witnesses;

pub use error::{Error, Result};
pub use scalar::{Scalar, ScalarMode};
