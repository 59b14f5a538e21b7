//! Games, strategy spaces and differentiable functions.

pub mod diagnostics;
pub mod function;
pub mod game;
pub mod strategy;

pub use diagnostics::{
    check_gradient, check_playerwise_concavity, estimate_regularity, sample_mfcq, sample_mfcq_near,
    MfcqDiagnostic, RegularityEstimate,
};
pub use function::{ClosureFn, ConstantFn, DifferentiableFn, LinearFn, Negated, Polynomial, SharedFn};
pub use game::{BoundSense, Constraint, GameSpec, GameSpecBuilder, Margins};
pub use strategy::{StrategyProfile, StrategySet};
