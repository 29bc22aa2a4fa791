//! The modelling language: lexer, parser, elaborator and printer.

pub mod ast;
mod elaborate;
mod lexer;
mod parser;
pub mod printer;

use thiserror::Error;

use crate::bigraph::{Bigraph, BigraphError, Signature};
use crate::engine::BrsSpec;
use crate::rewriting::RuleError;

pub use elaborate::elaborate;
pub use parser::{parse, parse_expr};
pub use printer::{print_bigraph, print_rule, print_spec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrontendError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown identifier `{name}` at line {line}, column {col}")]
    UnknownIdentifier { name: String, line: usize, col: usize },
    #[error("duplicate definition of `{name}` at line {line}")]
    DuplicateDefinition { name: String, line: usize },
    #[error("Init bigraph is not ground")]
    InitNotGround,
    #[error("in {context}: {source}")]
    Bigraph {
        context: String,
        #[source]
        source: BigraphError,
    },
    #[error("reaction `{name}`: {source}")]
    Rule {
        name: String,
        #[source]
        source: RuleError,
    },
    #[error("unknown reaction rule `{name}` at line {line}")]
    UnknownRuleInBlock { name: String, line: usize },
    #[error("{0}")]
    MixedLabelKinds(String),
    #[error("{0}")]
    ActionPartition(String),
    #[error("predicate `{0}` is not solid")]
    PredicateNotSolid(String),
    #[error("{0}")]
    Eval(String),
}

/// Parses and elaborates a complete model.
pub fn parse_model(src: &str) -> Result<BrsSpec, FrontendError> {
    elaborate(&parse(src)?)
}

/// Parses a single bigraph expression over a fixed signature.
pub fn parse_bigraph(src: &str, signature: &Signature) -> Result<Bigraph, FrontendError> {
    let expr = parse_expr(src)?;
    elaborate::eval_closed(&expr, signature)
}
