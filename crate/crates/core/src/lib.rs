//! Independent log-barrier regularized gradient ascent for continuous games
//! with shared playerwise-concave coupling constraints.
//!
//! Every player ascends its own barrier function
//! `B_i(x) = u_i(x) + eta * sum_j log(c_j(x) - alpha_j)` with a projected
//! gradient step, all players moving simultaneously from the same profile.

// NaN must fail these checks, so `!(x > 0.0)` is intended.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barrier;
pub mod error;
pub mod games;
pub mod metrics;
pub mod model;
pub mod region;

pub use error::{Error, Result};
pub use model::{Constraint, DifferentiableFn, GameSpec, SharedFn, StrategyProfile, StrategySet};
