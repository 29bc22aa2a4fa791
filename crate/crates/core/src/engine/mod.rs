//! Execution of reactive systems: priorities, instantaneous rules, the four
//! transition semantics, simulation and state-space exploration.

mod explore;
mod simulate;
mod step;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::bigraph::{Bigraph, Signature};
use crate::matcher::MatchError;
use crate::rewriting::ReactionRule;
use crate::scalar::Scalar;

pub use explore::explore;
pub use simulate::{simulate, SimStep, SimTrace};
pub use step::{enabled_class, reduce_instantaneous, step_distribution, EnabledClass, Successor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Semantics {
    /// Non-deterministic.
    Brs,
    /// Probabilistic: weights normalised per state.
    Pbrs,
    /// Stochastic: rates.
    Sbrs,
    /// Action-based: weights normalised per state and action.
    Abrs,
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Brs => "brs",
            Semantics::Pbrs => "pbrs",
            Semantics::Sbrs => "sbrs",
            Semantics::Abrs => "abrs",
        })
    }
}

#[derive(Debug, Clone)]
pub struct PriorityClass {
    pub rules: Vec<ReactionRule>,
    pub instantaneous: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub name: String,
    /// Names of the rule instances owned by this action.
    pub rules: Vec<String>,
}

/// An elaborated model.
#[derive(Debug, Clone)]
pub struct BrsSpec {
    pub semantics: Semantics,
    pub signature: Signature,
    pub init_name: String,
    pub init: Bigraph,
    /// Highest priority first.
    pub classes: Vec<PriorityClass>,
    pub preds: Vec<(String, Bigraph)>,
    pub actions: Vec<Action>,
}

impl BrsSpec {
    pub fn rules(&self) -> impl Iterator<Item = &ReactionRule> {
        self.classes.iter().flat_map(|c| c.rules.iter())
    }

    pub fn rule_count(&self) -> usize {
        self.classes.iter().map(|c| c.rules.len()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineOptions {
    /// Maximum number of instantaneous reductions when settling one state.
    pub instantaneous_bound: usize,
    /// Try every reduction order of small instantaneous steps and fail if they
    /// disagree.
    pub check_confluence: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            instantaneous_bound: 1_000_000,
            check_confluence: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("Init bigraph is not ground")]
    InitNotGround,
    #[error("instantaneous rules did not settle within {0} reductions")]
    DivergentInstantaneous(usize),
    #[error("instantaneous rules are not confluent: reduction orders of state {0} disagree")]
    NonConfluence(String),
    #[error(transparent)]
    Match(#[from] MatchError),
}

/// Annotation of a transition.
#[derive(Debug, Clone, PartialEq)]
pub enum Label<S> {
    None,
    Probability(S),
    Rate(S),
    Action { action: String, probability: S },
}

impl<S: Scalar> Label<S> {
    pub fn value(&self) -> Option<&S> {
        match self {
            Label::None => None,
            Label::Probability(p) | Label::Rate(p) => Some(p),
            Label::Action { probability, .. } => Some(probability),
        }
    }

    pub fn action(&self) -> Option<&str> {
        match self {
            Label::Action { action, .. } => Some(action),
            _ => None,
        }
    }

    /// Short text for traces and diagrams.
    pub fn render(&self) -> String {
        match self {
            Label::None => "-".into(),
            Label::Probability(p) | Label::Rate(p) => p.render(),
            Label::Action { action, probability } => format!("{action}:{}", probability.render()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition<S> {
    pub src: usize,
    pub dst: usize,
    pub label: Label<S>,
    /// Rules whose application produced this transition.
    pub rules: BTreeSet<String>,
}

/// A labelled transition system. State 0 is the initial state.
#[derive(Debug, Clone)]
pub struct TransitionSystem<S> {
    pub semantics: Semantics,
    pub states: Vec<Bigraph>,
    pub transitions: Vec<Transition<S>>,
    /// For every predicate, the states it holds in.
    pub labelling: Vec<(String, BTreeSet<usize>)>,
    /// Set when exploration stopped at the state bound.
    pub partial: bool,
    pub actions: Vec<String>,
}

impl<S> TransitionSystem<S> {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn outgoing(&self, s: usize) -> impl Iterator<Item = &Transition<S>> {
        self.transitions.iter().filter(move |t| t.src == s)
    }

    /// States without outgoing transitions.
    pub fn deadlocks(&self) -> Vec<usize> {
        let mut has = vec![false; self.states.len()];
        for t in &self.transitions {
            has[t.src] = true;
        }
        (0..self.states.len()).filter(|&s| !has[s]).collect()
    }

    pub fn label_states(&self, pred: &str) -> Option<&BTreeSet<usize>> {
        self.labelling.iter().find(|(n, _)| n == pred).map(|(_, s)| s)
    }

    /// Predicates holding in state `s`, in declaration order.
    pub fn labels_of(&self, s: usize) -> Vec<&str> {
        self.labelling
            .iter()
            .filter(|(_, set)| set.contains(&s))
            .map(|(n, _)| n.as_str())
            .collect()
    }
}
