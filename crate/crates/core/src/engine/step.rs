use std::collections::{BTreeSet, HashMap};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{BrsSpec, EngineError, EngineOptions, Label, Semantics};
use crate::bigraph::Bigraph;
use crate::iso::{canonical_key, iso_equal};
use crate::matcher::Occurrence;
use crate::rewriting::{apply_at, enabled_occurrences, ReactionRule};
use crate::scalar::Scalar;

/// The highest-priority class with an enabled occurrence, and all of its
/// enabled occurrences in rule order.
#[derive(Debug, Clone)]
pub struct EnabledClass<'a> {
    pub index: usize,
    pub matches: Vec<(&'a ReactionRule, Occurrence)>,
}

pub fn enabled_class<'a>(state: &Bigraph, spec: &'a BrsSpec) -> Result<Option<EnabledClass<'a>>, EngineError> {
    for (index, class) in spec.classes.iter().enumerate() {
        let mut matches = Vec::new();
        for rule in &class.rules {
            for occ in enabled_occurrences(state, rule)? {
                matches.push((rule, occ));
            }
        }
        if !matches.is_empty() {
            return Ok(Some(EnabledClass { index, matches }));
        }
    }
    Ok(None)
}

fn apply(state: &Bigraph, rule: &ReactionRule, occ: &Occurrence) -> Bigraph {
    apply_at(state, rule, occ).expect("occurrence satisfies the rule's conditions")
}

fn instantaneous_step<'a>(state: &Bigraph, spec: &'a BrsSpec) -> Result<Option<EnabledClass<'a>>, EngineError> {
    Ok(enabled_class(state, spec)?.filter(|ec| spec.classes[ec.index].instantaneous))
}

/// Applies instantaneous rules until the highest-priority enabled class is no
/// longer instantaneous. Always takes the first enabled occurrence.
pub fn reduce_instantaneous(state: &Bigraph, spec: &BrsSpec, opts: &EngineOptions) -> Result<Bigraph, EngineError> {
    if !spec.classes.iter().any(|c| c.instantaneous) {
        return Ok(state.clone());
    }
    if opts.check_confluence {
        let mut memo = Memo::default();
        let mut budget = opts.instantaneous_bound;
        return normal_form(state, spec, &mut memo, &mut budget, opts.instantaneous_bound);
    }
    let mut cur = state.clone();
    let mut steps = 0usize;
    while let Some(ec) = instantaneous_step(&cur, spec)? {
        steps += 1;
        if steps > opts.instantaneous_bound {
            return Err(EngineError::DivergentInstantaneous(opts.instantaneous_bound));
        }
        let (rule, occ) = &ec.matches[0];
        cur = apply(&cur, rule, occ);
    }
    Ok(cur)
}

/// Settled forms already computed, keyed by the state they came from.
#[derive(Default)]
struct Memo {
    table: HashMap<Vec<u8>, Vec<(Bigraph, Bigraph)>>,
}

impl Memo {
    fn get(&self, key: &[u8], b: &Bigraph) -> Option<Bigraph> {
        self.table
            .get(key)?
            .iter()
            .find(|(from, _)| iso_equal(from, b))
            .map(|(_, to)| to.clone())
    }
}

const CONFLUENCE_WIDTH: usize = 6;

fn normal_form(
    state: &Bigraph,
    spec: &BrsSpec,
    memo: &mut Memo,
    budget: &mut usize,
    bound: usize,
) -> Result<Bigraph, EngineError> {
    let key = canonical_key(state).map_err(|_| EngineError::InitNotGround)?;
    if let Some(done) = memo.get(&key, state) {
        return Ok(done);
    }
    let Some(ec) = instantaneous_step(state, spec)? else {
        return Ok(state.clone());
    };
    let choices = if ec.matches.len() <= CONFLUENCE_WIDTH {
        ec.matches.len()
    } else {
        1
    };
    let mut result: Option<Bigraph> = None;
    for (rule, occ) in &ec.matches[..choices] {
        if *budget == 0 {
            return Err(EngineError::DivergentInstantaneous(bound));
        }
        *budget -= 1;
        let next = apply(state, rule, occ);
        let nf = normal_form(&next, spec, memo, budget, bound)?;
        match &result {
            None => result = Some(nf),
            Some(first) if iso_equal(first, &nf) => {}
            Some(_) => return Err(EngineError::NonConfluence(state.to_string())),
        }
    }
    let nf = result.expect("at least one instantaneous match");
    memo.table.entry(key).or_default().push((state.clone(), nf.clone()));
    Ok(nf)
}

/// One outgoing transition of a settled state.
#[derive(Debug, Clone)]
pub struct Successor<S> {
    pub state: Bigraph,
    pub key: Vec<u8>,
    pub label: Label<S>,
    pub rules: BTreeSet<String>,
}

struct Group {
    action: Option<usize>,
    state: Bigraph,
    key: Vec<u8>,
    mass: BigRational,
    rules: BTreeSet<String>,
}

/// Successors of `state` under the highest-priority enabled class, with
/// isomorphic results merged and their masses summed.
pub fn step_distribution<S: Scalar>(
    state: &Bigraph,
    spec: &BrsSpec,
    opts: &EngineOptions,
) -> Result<Vec<Successor<S>>, EngineError> {
    let Some(ec) = enabled_class(state, spec)? else {
        return Ok(Vec::new());
    };
    if spec.classes[ec.index].instantaneous {
        let settled = reduce_instantaneous(state, spec, opts)?;
        return step_distribution(&settled, spec, opts);
    }
    let action_of = |rule: &str| spec.actions.iter().position(|a| a.rules.iter().any(|r| r == rule));
    let mut groups: Vec<Group> = Vec::new();
    let mut index: HashMap<(Option<usize>, Vec<u8>), Vec<usize>> = HashMap::new();
    for (rule, occ) in &ec.matches {
        let next = reduce_instantaneous(&apply(state, rule, occ), spec, opts)?;
        let key = canonical_key(&next).map_err(|_| EngineError::InitNotGround)?;
        let action = if spec.semantics == Semantics::Abrs {
            action_of(&rule.name)
        } else {
            None
        };
        let mass = rule.label.value().cloned().unwrap_or_else(BigRational::one);
        let slot = index.entry((action, key.clone())).or_default();
        match slot.iter().copied().find(|&g| iso_equal(&groups[g].state, &next)) {
            Some(g) => {
                groups[g].mass += mass;
                groups[g].rules.insert(rule.name.clone());
            }
            None => {
                slot.push(groups.len());
                groups.push(Group {
                    action,
                    state: next,
                    key,
                    mass,
                    rules: BTreeSet::from([rule.name.clone()]),
                });
            }
        }
    }

    let total = |action: Option<usize>| -> BigRational {
        groups
            .iter()
            .filter(|g| g.action == action)
            .fold(BigRational::zero(), |acc, g| acc + &g.mass)
    };
    let mut order: Vec<usize> = (0..groups.len()).collect();
    if spec.semantics == Semantics::Abrs {
        order.sort_by_key(|&g| groups[g].action);
    }
    let totals: HashMap<Option<usize>, BigRational> = groups.iter().map(|g| (g.action, total(g.action))).collect();
    let mut out = Vec::with_capacity(groups.len());
    let mut groups: Vec<Option<Group>> = groups.into_iter().map(Some).collect();
    for g in order {
        let g = groups[g].take().expect("each group emitted once");
        let label = match spec.semantics {
            Semantics::Brs => Label::None,
            Semantics::Pbrs => Label::Probability(S::from_ratio(&(&g.mass / &totals[&g.action]))),
            Semantics::Sbrs => Label::Rate(S::from_ratio(&g.mass)),
            Semantics::Abrs => Label::Action {
                action: g
                    .action
                    .map(|a| spec.actions[a].name.clone())
                    .unwrap_or_default(),
                probability: S::from_ratio(&(&g.mass / &totals[&g.action])),
            },
        };
        out.push(Successor {
            state: g.state,
            key: g.key,
            label,
            rules: g.rules,
        });
    }
    Ok(out)
}
