//! Reaction rules and their application.

use std::fmt;

use num_rational::BigRational;
use num_traits::Signed;
use thiserror::Error;

use crate::bigraph::{Bigraph, Interface, Place};
use crate::matcher::{check_constraints, find_occurrences, MatchConstraint, MatchError, Occurrence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("Invalid Reaction: Inner interfaces {lhs} and {rhs} do not match")]
    InnerInterfaceMismatch { lhs: Interface, rhs: Interface },
    #[error("Invalid Reaction: Outer interfaces {lhs} and {rhs} do not match")]
    OuterInterfaceMismatch { lhs: Interface, rhs: Interface },
    #[error("Invalid Reaction: Instantiation map is not valid")]
    InvalidInstMap,
    #[error("Invalid Reaction: left-hand side is not solid")]
    LhsNotSolid,
    #[error("Invalid Reaction: condition pattern is not solid")]
    ConditionNotSolid,
    #[error("Invalid Reaction: inner names are not supported in rules")]
    InnerNames,
    #[error("Invalid Reaction: weights and rates must be positive")]
    NonPositiveLabel,
    #[error("rule conditions do not hold at this occurrence")]
    ConstraintViolated,
}

/// For each right-hand site, the left-hand site whose parameter fills it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstMap(pub Vec<usize>);

impl InstMap {
    pub fn identity(n: usize) -> Self {
        InstMap((0..n).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }
}

impl fmt::Display for InstMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "@[{}]", parts.join(","))
    }
}

/// Quantitative annotation of a rule. Weights and rates are exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleLabel {
    Plain,
    Weight(BigRational),
    Rate(BigRational),
}

impl RuleLabel {
    pub fn value(&self) -> Option<&BigRational> {
        match self {
            RuleLabel::Plain => None,
            RuleLabel::Weight(w) | RuleLabel::Rate(w) => Some(w),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReactionRule {
    pub name: String,
    pub lhs: Bigraph,
    pub rhs: Bigraph,
    pub inst: InstMap,
    pub conditions: Vec<MatchConstraint>,
    pub label: RuleLabel,
}

impl ReactionRule {
    /// Builds and validates a plain rule. Without an explicit map the identity
    /// is used, which requires equal site counts.
    pub fn new(
        name: impl Into<String>,
        lhs: Bigraph,
        rhs: Bigraph,
        inst: Option<Vec<usize>>,
    ) -> Result<Self, RuleError> {
        let inst = match inst {
            Some(map) => InstMap(map),
            None if lhs.sites() == rhs.sites() => InstMap::identity(rhs.sites()),
            None => {
                return Err(RuleError::InnerInterfaceMismatch {
                    lhs: lhs.inner_interface(),
                    rhs: rhs.inner_interface(),
                })
            }
        };
        let rule = ReactionRule {
            name: name.into(),
            lhs,
            rhs,
            inst,
            conditions: Vec::new(),
            label: RuleLabel::Plain,
        };
        rule.validate()?;
        Ok(rule)
    }

    pub fn with_conditions(mut self, conditions: Vec<MatchConstraint>) -> Result<Self, RuleError> {
        self.conditions = conditions;
        self.validate()?;
        Ok(self)
    }

    pub fn with_label(mut self, label: RuleLabel) -> Result<Self, RuleError> {
        self.label = label;
        self.validate()?;
        Ok(self)
    }

    /// Interface equality, solidity of the left-hand side and of condition
    /// patterns, and well-formedness of the instantiation map.
    pub fn validate(&self) -> Result<(), RuleError> {
        validate_rule(self)
    }
}

pub fn validate_rule(rule: &ReactionRule) -> Result<(), RuleError> {
    let (l, r) = (&rule.lhs, &rule.rhs);
    if l.outer_interface() != r.outer_interface() {
        return Err(RuleError::OuterInterfaceMismatch {
            lhs: l.outer_interface(),
            rhs: r.outer_interface(),
        });
    }
    if !l.inner_links().is_empty() || !r.inner_links().is_empty() {
        return Err(RuleError::InnerNames);
    }
    if rule.inst.0.len() != r.sites() || rule.inst.0.iter().any(|&j| j >= l.sites()) {
        return Err(RuleError::InvalidInstMap);
    }
    if !l.is_solid() {
        return Err(RuleError::LhsNotSolid);
    }
    for c in &rule.conditions {
        if !c.pattern.is_solid() || !c.pattern.inner_links().is_empty() {
            return Err(RuleError::ConditionNotSolid);
        }
    }
    if let Some(v) = rule.label.value() {
        if !v.is_positive() {
            return Err(RuleError::NonPositiveLabel);
        }
    }
    Ok(())
}

/// Every occurrence of the rule's left-hand side whose conditions hold,
/// paired with the resulting state.
pub fn all_applications(
    state: &Bigraph,
    rule: &ReactionRule,
) -> Result<Vec<(Occurrence, Bigraph)>, MatchError> {
    Ok(enabled_occurrences(state, rule)?
        .into_iter()
        .map(|occ| {
            let next = rewrite(state, rule, &occ);
            (occ, next)
        })
        .collect())
}

/// Occurrences of the left-hand side that satisfy the rule's conditions.
pub fn enabled_occurrences(state: &Bigraph, rule: &ReactionRule) -> Result<Vec<Occurrence>, MatchError> {
    let occs = find_occurrences(state, &rule.lhs)?;
    Ok(occs
        .into_iter()
        .filter(|o| check_constraints(state, o, &rule.conditions))
        .collect())
}

/// Replaces the occurrence of the left-hand side by the right-hand side.
pub fn apply_at(state: &Bigraph, rule: &ReactionRule, occ: &Occurrence) -> Result<Bigraph, RuleError> {
    if !check_constraints(state, occ, &rule.conditions) {
        return Err(RuleError::ConstraintViolated);
    }
    Ok(rewrite(state, rule, occ))
}

fn rewrite(state: &Bigraph, rule: &ReactionRule, occ: &Occurrence) -> Bigraph {
    let (lhs, rhs) = (&rule.lhs, &rule.rhs);
    let n = state.node_count();
    let mut image = vec![false; n];
    for &t in &occ.node_map {
        image[t] = true;
    }
    let mut param_of = vec![None; n];
    for (s, nodes) in occ.param_nodes.iter().enumerate() {
        for &t in nodes {
            param_of[t] = Some(s);
        }
    }
    // The first right-hand site using a left-hand site keeps the original
    // parameter nodes; later uses receive copies.
    let mut first_use = vec![None; lhs.sites()];
    for (k, &j) in rule.inst.0.iter().enumerate() {
        if first_use[j].is_none() {
            first_use[j] = Some(k);
        }
    }

    let mut out = Bigraph {
        regions: state.regions,
        links: state.links.clone(),
        ..Bigraph::default()
    };
    let mut index = vec![usize::MAX; n];
    for t in 0..n {
        let keep = match param_of[t] {
            Some(s) => first_use[s].is_some(),
            None => !image[t],
        };
        if keep {
            index[t] = out.nodes.len();
            out.nodes.push(state.nodes[t].clone());
            out.node_parents.push(Vec::new());
        }
    }

    // Right-hand side nodes and their links.
    let rhs_base = out.nodes.len();
    let mut rhs_links = Vec::with_capacity(rhs.link_count());
    for l in 0..rhs.link_count() {
        rhs_links.push(match rhs.link_name(l) {
            Some(name) => {
                let pl = lhs.outer_link(name).expect("equal outer interfaces");
                occ.link_map[pl]
            }
            None => {
                out.links.push(None);
                out.links.len() - 1
            }
        });
    }
    let lift_rhs = |q: &Place| -> Vec<Place> {
        match *q {
            Place::Node(u) => vec![Place::Node(rhs_base + u)],
            Place::Region(r) => occ.region_places[r]
                .iter()
                .map(|p| match *p {
                    Place::Node(t) => Place::Node(index[t]),
                    region => region,
                })
                .collect(),
        }
    };
    for (u, node) in rhs.nodes.iter().enumerate() {
        let mut node = node.clone();
        for p in &mut node.ports {
            *p = rhs_links[*p];
        }
        out.nodes.push(node);
        out.node_parents
            .push(rhs.node_parents[u].iter().flat_map(&lift_rhs).collect());
    }

    // Kept context and parameter nodes.
    let roots: Vec<Option<usize>> = {
        let mut r = vec![None; n];
        for (s, rs) in occ.site_roots.iter().enumerate() {
            for &t in rs {
                r[t] = Some(s);
            }
        }
        r
    };
    let site_holes: Vec<Vec<Place>> = rhs
        .site_parents
        .iter()
        .map(|ps| ps.iter().flat_map(&lift_rhs).collect())
        .collect();
    for t in 0..n {
        if index[t] == usize::MAX {
            continue;
        }
        let parents = match roots[t] {
            Some(s) => site_holes[first_use[s].expect("kept")].clone(),
            None => state.node_parents[t]
                .iter()
                .map(|p| match *p {
                    Place::Node(q) => Place::Node(index[q]),
                    region => region,
                })
                .collect(),
        };
        out.node_parents[index[t]] = parents;
    }

    // Further copies of parameters.
    let mut link_nodes = vec![Vec::new(); state.link_count()];
    for (t, node) in state.nodes.iter().enumerate() {
        for &l in &node.ports {
            link_nodes[l].push(t);
        }
    }
    for (k, &j) in rule.inst.0.iter().enumerate() {
        if first_use[j] == Some(k) {
            continue;
        }
        let nodes = &occ.param_nodes[j];
        let mut copy = vec![usize::MAX; n];
        for &t in nodes {
            copy[t] = out.nodes.len();
            out.nodes.push(state.nodes[t].clone());
            out.node_parents.push(Vec::new());
        }
        let mut cloned_edge = std::collections::BTreeMap::new();
        for &t in nodes {
            let ports: Vec<usize> = state.nodes[t]
                .ports
                .iter()
                .map(|&l| {
                    let local = state.link_name(l).is_none()
                        && link_nodes[l].iter().all(|&u| param_of[u] == Some(j));
                    if local {
                        *cloned_edge.entry(l).or_insert_with(|| {
                            out.links.push(None);
                            out.links.len() - 1
                        })
                    } else {
                        l
                    }
                })
                .collect();
            out.nodes[copy[t]].ports = ports;
            out.node_parents[copy[t]] = if roots[t] == Some(j) {
                site_holes[k].clone()
            } else {
                state.node_parents[t]
                    .iter()
                    .map(|p| match *p {
                        Place::Node(q) => Place::Node(copy[q]),
                        region => region,
                    })
                    .collect()
            };
        }
    }
    out.normalise();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigraph::{Control, Signature};
    use crate::frontend::parse_bigraph;
    use crate::iso_equal;

    fn sig() -> Signature {
        [
            Control::new("Room", 0),
            Control::new("Server", 1),
            Control::new("Database", 1),
            Control::atomic("Adult", 1),
            Control::atomic("A", 1),
            Control::atomic("Data", 0),
            Control::atomic("Person", 1),
        ]
        .into_iter()
        .collect()
    }

    fn big(s: &str) -> Bigraph {
        parse_bigraph(s, &sig()).unwrap()
    }

    #[test]
    fn interface_errors() {
        let err = ReactionRule::new("r", big("A{x}"), big("Room.1"), None).unwrap_err();
        assert_eq!(
            err.to_string(),
            "Invalid Reaction: Outer interfaces <1, {x}> and <1, {}> do not match"
        );
        assert!(ReactionRule::new("r", big("A{x}"), big("{x} | Room.1"), None).is_ok());
        let err = ReactionRule::new("r", big("Room.id"), big("Room.(id | id)"), None).unwrap_err();
        assert_eq!(
            err.to_string(),
            "Invalid Reaction: Inner interfaces <1, {}> and <2, {}> do not match"
        );
        let err = ReactionRule::new("r", big("Room.id"), big("Room.id"), Some(vec![5])).unwrap_err();
        assert_eq!(err, RuleError::InvalidInstMap);
    }

    #[test]
    fn identity_rule_reproduces_state() {
        let state = big("/z Room.(Person{z} | Room.(Person{z} | Data)) | Room.Data");
        let lhs = big("Room.(Person{x} | id)");
        let rule = ReactionRule::new("id", lhs.clone(), lhs, None).unwrap();
        let apps = all_applications(&state, &rule).unwrap();
        assert_eq!(apps.len(), 2);
        for (_, next) in apps {
            assert!(iso_equal(&next, &state));
        }
    }

    #[test]
    fn copy_shares_open_links() {
        let rule = ReactionRule::new(
            "dup",
            big("Room.id"),
            big("Room.(id | id)"),
            Some(vec![0, 0]),
        )
        .unwrap();
        let state = big("Room.A{x}");
        let (_, next) = all_applications(&state, &rule).unwrap().remove(0);
        assert_eq!(next.node_count(), 3);
        let l = next.outer_link("x").unwrap();
        assert_eq!(next.link_ports(l).len(), 2);
    }

    #[test]
    fn copy_clones_local_edges() {
        let rule = ReactionRule::new(
            "dup",
            big("Room.id"),
            big("Room.(id | id)"),
            Some(vec![0, 0]),
        )
        .unwrap();
        let state = big("Room./x (A{x} | A{x})");
        let (_, next) = all_applications(&state, &rule).unwrap().remove(0);
        assert_eq!(next.edge_count(), 2);
        assert!(iso_equal(&next, &big("Room.(/x (A{x} | A{x}) | /y (A{y} | A{y}))")));
    }

    #[test]
    fn discard_parameter() {
        let rule = ReactionRule::new("clear", big("Room.id"), big("Room.1"), Some(vec![])).unwrap();
        let state = big("Room.(Data | Data)");
        let (_, next) = all_applications(&state, &rule).unwrap().remove(0);
        assert!(iso_equal(&next, &big("Room.1")));
    }
}
