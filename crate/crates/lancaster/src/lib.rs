//! Maximal correlation of bivariate distributions whose conditional
//! moments are polynomial.
//!
//! For a pair (X, Y) where both regressions E(X^n | Y) and E(Y^n | X) are
//! degree-n polynomials, the maximal correlation
//! sup corr(g(X), h(Y)) over square-integrable transforms is attained by
//! a pair of orthonormal polynomials and equals the largest canonical
//! correlation sqrt(A_n B_n) of the diagonal expansion. This crate
//!
//! * builds orthonormal polynomial systems from raw moments
//!   ([`orthopoly`]),
//! * evaluates the closed-form correlation sequences and maximal
//!   correlations of six families ([`families`], [`maxcorr`]),
//! * cross-checks them with independent numerical oracles: exact SVD on
//!   finite joints and an alternating conditional expectations iteration
//!   on discretized continuous joints ([`oracle`]),
//! * estimates the same correlations by Monte Carlo ([`simulate`]), and
//! * verifies the covariance expansion identities the diagonal structure
//!   implies ([`identities`]).
//!
//! The `examples/` directory has one runnable example per capability; the
//! thin `lancaster` binary exposes the same entry points as subcommands.

// Negated comparisons like !(x >= 0.0) stay true for NaN, which the
// domain checks must reject.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]
#![allow(clippy::too_many_arguments)]

pub mod cli;
pub mod dd;
pub mod error;
pub mod families;
pub mod identities;
pub mod maxcorr;
pub mod numeric;
pub mod oracle;
pub mod orthopoly;
pub mod quadrature;
pub mod simulate;
pub mod suite;

pub use error::{Error, Result};
