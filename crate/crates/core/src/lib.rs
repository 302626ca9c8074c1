//! Numerical lab for pointwise lower bounds on diagonal heat kernels of
//! H = (−Δ)^m + V with polynomially bounded potential.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod config;
pub mod error;
pub mod lab;
pub mod problem;
pub mod quadrature;
pub mod report;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use problem::{bracket, classify_regime, rho, Hypothesis, Potential, ProblemSpec, Regime};
