use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use super::{reduce_instantaneous, step_distribution, BrsSpec, EngineError, EngineOptions, Transition, TransitionSystem};
use crate::bigraph::Bigraph;
use crate::iso::{canonical_key, iso_equal};
use crate::matcher::matches_predicate;
use crate::scalar::Scalar;

struct Store {
    states: Vec<Bigraph>,
    index: HashMap<Vec<u8>, Vec<usize>>,
}

impl Store {
    fn find(&self, key: &[u8], b: &Bigraph) -> Option<usize> {
        self.index
            .get(key)?
            .iter()
            .copied()
            .find(|&i| iso_equal(&self.states[i], b))
    }

    fn insert(&mut self, key: Vec<u8>, b: Bigraph) -> usize {
        let i = self.states.len();
        self.states.push(b);
        self.index.entry(key).or_default().push(i);
        i
    }
}

/// Breadth-first construction of the transition system reachable from the
/// initial state, storing at most `max_states` states.
///
/// Successors of a whole frontier layer are computed in parallel and merged
/// in a fixed order, so state numbering does not depend on scheduling.
pub fn explore<S: Scalar>(
    spec: &BrsSpec,
    max_states: usize,
    opts: &EngineOptions,
) -> Result<TransitionSystem<S>, EngineError> {
    if !spec.init.is_ground() {
        return Err(EngineError::InitNotGround);
    }
    let init = reduce_instantaneous(&spec.init, spec, opts)?;
    let mut store = Store {
        states: Vec::new(),
        index: HashMap::new(),
    };
    let key = canonical_key(&init).map_err(|_| EngineError::InitNotGround)?;
    store.insert(key, init);
    let mut transitions = Vec::new();
    let mut partial = false;
    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let layer: Vec<_> = frontier
            .par_iter()
            .map(|&i| step_distribution::<S>(&store.states[i], spec, opts))
            .collect::<Result<_, _>>()?;
        let mut next = Vec::new();
        for (&src, succs) in frontier.iter().zip(layer) {
            for s in succs {
                let dst = match store.find(&s.key, &s.state) {
                    Some(d) => d,
                    None if store.states.len() >= max_states.max(1) => {
                        partial = true;
                        continue;
                    }
                    None => {
                        let d = store.insert(s.key, s.state);
                        next.push(d);
                        d
                    }
                };
                transitions.push(Transition {
                    src,
                    dst,
                    label: s.label,
                    rules: s.rules,
                });
            }
        }
        frontier = next;
    }

    let states = store.states;
    let labelling = spec
        .preds
        .iter()
        .map(|(name, pattern)| {
            let holds: Vec<bool> = states
                .par_iter()
                .map(|st| matches_predicate(st, pattern))
                .collect::<Result<_, _>>()?;
            let set: BTreeSet<usize> = holds
                .iter()
                .enumerate()
                .filter(|(_, &h)| h)
                .map(|(i, _)| i)
                .collect();
            Ok((name.clone(), set))
        })
        .collect::<Result<Vec<_>, EngineError>>()?;
    Ok(TransitionSystem {
        semantics: spec.semantics,
        states,
        transitions,
        labelling,
        partial,
        actions: spec.actions.iter().map(|a| a.name.clone()).collect(),
    })
}
