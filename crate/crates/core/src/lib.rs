//! Bigraphical reactive systems.
//!
//! Bigraphs are built from a small algebra ([`bigraph`]), matched and rewritten
//! by reaction rules ([`matcher`], [`rewriting`]), and executed under one of
//! four semantics ([`engine`]). Models are written in a textual language
//! ([`frontend`]) and results are exported for model checkers ([`export`]).

pub mod bigraph;
pub mod engine;
pub mod export;
pub mod frontend;
pub mod iso;
pub mod matcher;
pub mod rewriting;
pub mod scalar;
#[cfg(feature = "testing")]
pub mod testing;

pub use bigraph::{Bigraph, BigraphError, Control, Interface, Param, ParamSort, Signature};
pub use engine::{explore, simulate, BrsSpec, EngineError, EngineOptions, Label, Semantics};
pub use frontend::{parse_bigraph, parse_model, FrontendError};
pub use iso::{canonical_key, iso_equal};
pub use matcher::{count_occurrences, find_occurrences, matches_predicate, Occurrence};
pub use rewriting::{apply_at, validate_rule, ReactionRule, RuleError};
pub use scalar::Scalar;

pub use num_rational::BigRational;

/// Transition system with floating-point labels.
pub type TransitionSystem = engine::TransitionSystem<f64>;
/// Transition system with exact rational labels.
pub type ExactTransitionSystem = engine::TransitionSystem<BigRational>;
/// Transition system with single-precision labels.
pub type TransitionSystemF32 = engine::TransitionSystem<f32>;
