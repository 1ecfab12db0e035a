//! Random function iterations for consistent stochastic feasibility.
//!
//! The iteration draws a random member of an operator family at every step
//! and applies it: `X_{k+1} = T_{xi_k} X_k`. For families of projectors
//! (and more generally averaged or paracontractive maps) sharing a common
//! fixed-point set `C`, the chain converges to `C`, and a regularity
//! constant `kappa` with `dist^2(x, C) <= kappa R(x)` for the merit
//! function `R(x) = E ||x - T_xi x||^2` turns that into a geometric rate
//! in expectation.
//!
//! The crate provides:
//!
//! * closed-form operator families and their class metadata ([`operators`]),
//! * seeded, stream-split sampling for reproducible parallel ensembles
//!   ([`sampling`]),
//! * the chain runner and ensemble aggregates ([`chain`]),
//! * the merit calculus: closed forms, Monte Carlo estimators, regularity
//!   constants, the gradient-domination check and rate bounds ([`merit`]),
//! * ensemble diagnostics: empirical rates, feasibility probabilities,
//!   hitting-time classification, 1-D Wasserstein distances
//!   ([`diagnostics`]),
//! * first-kind integral equations discretized and solved by random row
//!   projections ([`integral_eq`]).

pub mod chain;
pub mod diagnostics;
pub mod error;
pub mod integral_eq;
pub mod merit;
pub mod operators;
pub mod point;
pub mod sampling;
pub mod sets;

pub use error::{Error, Result};
pub use point::Point;

/// Absolute Euclidean tolerance deciding set membership in floating point:
/// below the roundoff accumulated over long trajectories, far above machine
/// epsilon.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
