//! Rendering of bigraphs, rules and whole systems in the input language.
//!
//! Output re-parses to an isomorphic value. Closed edges receive fresh bound
//! identifiers and place graphs with sharing are written with nested `share`
//! expressions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_rational::BigRational;

use crate::bigraph::{Bigraph, Child, Param, Place};
use crate::engine::{BrsSpec, Semantics};
use crate::matcher::ConditionPlace;
use crate::rewriting::ReactionRule;
use crate::scalar::Scalar;

fn param_text(p: &Param) -> String {
    match p {
        Param::Int(i) => i.to_string(),
        Param::Float(x) => format!("{x:?}"),
        Param::Str(s) => format!("{s:?}"),
    }
}

/// Identifier used for every link: its outer name, or a fresh bound name.
struct LinkNames {
    names: Vec<String>,
    bound: Vec<String>,
}

impl LinkNames {
    fn new(b: &Bigraph) -> Self {
        let mut taken: BTreeSet<String> = b.outer_names();
        taken.extend(b.inner_names());
        let mut by_link: BTreeMap<usize, Vec<&String>> = BTreeMap::new();
        for (x, &l) in &b.inner {
            by_link.entry(l).or_default().push(x);
        }
        let mut fresh = 0usize;
        let mut names = Vec::with_capacity(b.links.len());
        let mut bound = Vec::new();
        for (l, name) in b.links.iter().enumerate() {
            let n = match name {
                Some(x) => x.clone(),
                None => {
                    let from_inner = by_link.get(&l).and_then(|v| (v.len() == 1).then(|| v[0].clone()));
                    let n = from_inner.unwrap_or_else(|| loop {
                        let cand = format!("e{fresh}");
                        fresh += 1;
                        if !taken.contains(&cand) {
                            break cand;
                        }
                    });
                    taken.insert(n.clone());
                    bound.push(n.clone());
                    n
                }
            };
            names.push(n);
        }
        LinkNames { names, bound }
    }
}

/// Writes the whole bigraph as an expression.
pub fn print_bigraph(b: &Bigraph) -> String {
    let names = LinkNames::new(b);
    let mut parts = Vec::new();
    if b.regions > 0 {
        parts.push(places(b, &names));
    }
    let deg = b.link_degrees();
    let idle: Vec<&str> = b
        .links
        .iter()
        .enumerate()
        .filter_map(|(l, n)| n.as_deref().filter(|_| deg[l] == 0))
        .collect();
    if !idle.is_empty() {
        parts.push(format!("{{{}}}", idle.join(", ")));
    }
    for x in b.inner.keys() {
        parts.push(format!("id{{{x}}}"));
    }
    if parts.is_empty() {
        parts.push("( )".into());
    }
    let body = parts.join(" || ");
    if names.bound.is_empty() {
        body
    } else {
        let mut out = String::new();
        for n in &names.bound {
            let _ = write!(out, "/{n} ");
        }
        let _ = write!(out, "({body})");
        out
    }
}

fn node_text(b: &Bigraph, i: usize, names: &LinkNames) -> String {
    let node = &b.nodes[i];
    let mut s = node.control.name.clone();
    if !node.params.is_empty() {
        let ps: Vec<String> = node.params.iter().map(param_text).collect();
        let _ = write!(s, "({})", ps.join(", "));
    }
    if !node.ports.is_empty() {
        let ps: Vec<&str> = node.ports.iter().map(|&l| names.names[l].as_str()).collect();
        let _ = write!(s, "{{{}}}", ps.join(", "));
    }
    s
}

/// The place structure of `b` (all regions joined by `||`), with sites written
/// in index order.
fn places(b: &Bigraph, names: &LinkNames) -> String {
    if b.is_forest() {
        forest(b, names)
    } else {
        shared(b, names)
    }
}

fn forest(b: &Bigraph, names: &LinkNames) -> String {
    let table = b.children_table();
    // Smallest site index below each place, used to order siblings.
    let n = b.nodes.len();
    let mut min_site = vec![usize::MAX; n];
    let mut order: Vec<usize> = Vec::new();
    let mut seen = vec![false; n];
    fn post(i: usize, b: &Bigraph, table: &[Vec<Child>], seen: &mut [bool], order: &mut Vec<usize>) {
        if seen[i] {
            return;
        }
        seen[i] = true;
        for c in &table[b.regions + i] {
            if let Child::Node(j) = c {
                post(*j, b, table, seen, order);
            }
        }
        order.push(i);
    }
    for i in 0..n {
        post(i, b, &table, &mut seen, &mut order);
    }
    for &i in &order {
        let m = table[b.regions + i]
            .iter()
            .map(|c| match *c {
                Child::Site(s) => s,
                Child::Node(j) => min_site[j],
            })
            .min()
            .unwrap_or(usize::MAX);
        min_site[i] = m;
    }
    let key = |c: &Child| match *c {
        Child::Site(s) => (s, 0, 0),
        Child::Node(j) => (min_site[j], 1, j),
    };
    let mut printed_sites = Vec::new();
    fn children_text(
        kids: &[Child],
        b: &Bigraph,
        table: &[Vec<Child>],
        names: &LinkNames,
        key: &dyn Fn(&Child) -> (usize, usize, usize),
        printed: &mut Vec<usize>,
    ) -> Vec<String> {
        let mut kids = kids.to_vec();
        kids.sort_by_key(|c| key(c));
        kids.iter()
            .map(|c| match *c {
                Child::Site(s) => {
                    printed.push(s);
                    "id".to_string()
                }
                Child::Node(i) => {
                    let mut s = node_text(b, i, names);
                    let inner = children_text(&table[b.regions + i], b, table, names, key, printed);
                    match inner.len() {
                        0 if b.nodes[i].control.atomic => {}
                        0 => s.push_str(".1"),
                        1 => {
                            s.push('.');
                            s.push_str(&inner[0]);
                        }
                        _ => {
                            let _ = write!(s, ".({})", inner.join(" | "));
                        }
                    }
                    s
                }
            })
            .collect()
    }
    let mut regions = Vec::with_capacity(b.regions);
    for r in 0..b.regions {
        let kids = children_text(&table[r], b, &table, names, &key, &mut printed_sites);
        regions.push(if kids.is_empty() {
            "1".to_string()
        } else {
            kids.join(" | ")
        });
    }
    let text = regions.join(" || ");
    if printed_sites.iter().enumerate().all(|(k, &s)| k == s) {
        return text;
    }
    // Sites come out in a different order than their indices: route each site
    // to its printed position through a share.
    let m = printed_sites.len();
    let mut position = vec![0; m];
    for (k, &s) in printed_sites.iter().enumerate() {
        position[s] = k;
    }
    let ids = vec!["id"; m].join(" || ");
    let placement: Vec<String> = position.iter().map(|p| format!("{{{p}}}")).collect();
    format!("share ({ids}) by ([{}], {m}) in ({text})", placement.join(", "))
}

fn shared(b: &Bigraph, names: &LinkNames) -> String {
    let n = b.nodes.len();
    // Upper part: nodes reachable from a region through single-parent links only.
    let mut upper = vec![false; n];
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n {
            if upper[i] {
                continue;
            }
            if let [p] = b.node_parents[i][..] {
                let ok = match p {
                    Place::Region(_) => true,
                    Place::Node(j) => upper[j],
                };
                if ok {
                    upper[i] = true;
                    changed = true;
                }
            }
        }
    }
    let upper_idx: Vec<usize> = (0..n).filter(|&i| upper[i]).collect();
    let lower_idx: Vec<usize> = (0..n).filter(|&i| !upper[i]).collect();
    let mut new_upper = vec![usize::MAX; n];
    for (k, &i) in upper_idx.iter().enumerate() {
        new_upper[i] = k;
    }
    let mut new_lower = vec![usize::MAX; n];
    for (k, &i) in lower_idx.iter().enumerate() {
        new_lower[i] = k;
    }
    let in_upper = |p: &Place| match *p {
        Place::Region(_) => true,
        Place::Node(j) => upper[j],
    };

    // Parent sets of the lower part that lie in the upper part.
    let lower_parents: Vec<&Vec<Place>> = lower_idx
        .iter()
        .map(|&i| &b.node_parents[i])
        .chain(b.site_parents.iter())
        .collect();
    let mut groups: BTreeSet<Vec<Place>> = BTreeSet::new();
    let mut holes: BTreeSet<Place> = BTreeSet::new();
    for ps in &lower_parents {
        let up: Vec<Place> = ps.iter().copied().filter(in_upper).collect();
        if !up.is_empty() {
            holes.extend(up.iter().copied());
            groups.insert(up);
        }
    }
    let holes: Vec<Place> = holes.into_iter().collect();
    let hole_index = |p: &Place| holes.iter().position(|h| h == p).unwrap();
    let groups: Vec<Vec<Place>> = groups.into_iter().collect();
    let group_index = |g: &Vec<Place>| groups.iter().position(|x| x == g).unwrap();

    let host = Bigraph {
        nodes: upper_idx.iter().map(|&i| b.nodes[i].clone()).collect(),
        node_parents: upper_idx
            .iter()
            .map(|&i| match b.node_parents[i][0] {
                Place::Node(j) => vec![Place::Node(new_upper[j])],
                r => vec![r],
            })
            .collect(),
        site_parents: holes
            .iter()
            .map(|p| match *p {
                Place::Node(j) => vec![Place::Node(new_upper[j])],
                r => vec![r],
            })
            .collect(),
        regions: b.regions,
        links: b.links.clone(),
        inner: Default::default(),
    };
    let lift = |ps: &Vec<Place>| -> Vec<Place> {
        let up: Vec<Place> = ps.iter().copied().filter(in_upper).collect();
        let mut out: Vec<Place> = ps
            .iter()
            .filter_map(|p| match *p {
                Place::Node(j) if !upper[j] => Some(Place::Node(new_lower[j])),
                _ => None,
            })
            .collect();
        if !up.is_empty() {
            out.push(Place::Region(group_index(&up)));
        }
        out.sort();
        out
    };
    let contents = Bigraph {
        nodes: lower_idx.iter().map(|&i| b.nodes[i].clone()).collect(),
        node_parents: lower_idx.iter().map(|&i| lift(&b.node_parents[i])).collect(),
        site_parents: b.site_parents.iter().map(lift).collect(),
        regions: groups.len(),
        links: b.links.clone(),
        inner: Default::default(),
    };
    let placement: Vec<String> = groups
        .iter()
        .map(|g| {
            let hs: Vec<String> = g.iter().map(|p| hole_index(p).to_string()).collect();
            format!("{{{}}}", hs.join(", "))
        })
        .collect();
    format!(
        "share ({}) by ([{}], {}) in ({})",
        places(&contents, names),
        placement.join(", "),
        holes.len(),
        places(&host, names)
    )
}

/// Turns an instance name such as `spawn(0)` into an identifier.
pub fn sanitise(name: &str) -> String {
    let mut out = String::new();
    for c in name.chars() {
        match c {
            c if c.is_ascii_alphanumeric() || c == '_' => out.push(c),
            '-' => out.push('m'),
            '(' | ',' | '.' => out.push('_'),
            _ => {}
        }
    }
    while out.ends_with('_') {
        out.pop();
    }
    if !out.starts_with(|c: char| c.is_ascii_alphabetic()) {
        out.insert(0, 'r');
    }
    out
}

fn label_text(v: &BigRational) -> String {
    let s = v.render();
    match crate::scalar::parse_decimal(&s) {
        Some(back) if &back == v => s,
        _ => format!("{}.0/{}", v.numer(), v.denom()),
    }
}

fn rule_body(rule: &ReactionRule, name: &str) -> String {
    let mut s = format!("react {name} =\n    {}", print_bigraph(&rule.lhs));
    match rule.label.value() {
        None => s.push_str("\n    --> "),
        Some(v) => {
            let _ = write!(s, "\n    -[{}]-> ", label_text(v));
        }
    }
    s.push_str(&print_bigraph(&rule.rhs));
    if !rule.inst.is_identity() || rule.inst.0.len() != rule.lhs.sites() {
        let _ = write!(s, " {}", rule.inst);
    }
    if !rule.conditions.is_empty() {
        let cs: Vec<String> = rule
            .conditions
            .iter()
            .map(|c| {
                format!(
                    "{}{} in {}",
                    if c.present { "" } else { "!" },
                    print_bigraph(&c.pattern),
                    match c.place {
                        ConditionPlace::Param => "param",
                        ConditionPlace::Ctx => "ctx",
                    }
                )
            })
            .collect();
        let _ = write!(s, "\n    if {}", cs.join(", "));
    }
    s.push(';');
    s
}

/// Writes a `react` declaration.
pub fn print_rule(rule: &ReactionRule) -> String {
    rule_body(rule, &sanitise(&rule.name))
}

/// Writes a complete model that elaborates to an equivalent system.
pub fn print_spec(spec: &BrsSpec) -> String {
    let mut out = String::new();
    let mut used: BTreeSet<String> = BTreeSet::new();
    for c in spec.signature.iter() {
        used.insert(c.name.clone());
        let atomic = if c.atomic { "atomic " } else { "" };
        if c.param_sorts.is_empty() {
            let _ = writeln!(out, "{atomic}ctrl {} = {};", c.name, c.arity);
        } else {
            let ps: Vec<String> = (0..c.param_sorts.len()).map(|i| format!("p{i}")).collect();
            let _ = writeln!(out, "{atomic}fun ctrl {}({}) = {};", c.name, ps.join(", "), c.arity);
        }
    }
    let mut fresh = |base: String| {
        let mut n = base;
        while used.contains(&n) {
            n.push('_');
        }
        used.insert(n.clone());
        n
    };
    out.push('\n');
    let init = fresh(sanitise(&spec.init_name));
    let _ = writeln!(out, "big {init} = {};", print_bigraph(&spec.init));
    let mut pred_names = Vec::new();
    for (name, p) in &spec.preds {
        let n = fresh(sanitise(name));
        let _ = writeln!(out, "big {n} = {};", print_bigraph(p));
        pred_names.push(n);
    }
    out.push('\n');
    let mut rule_names: BTreeMap<String, String> = BTreeMap::new();
    for class in &spec.classes {
        for rule in &class.rules {
            if rule_names.contains_key(&rule.name) {
                continue;
            }
            let n = fresh(sanitise(&rule.name));
            let _ = writeln!(out, "{}\n", rule_body(rule, &n));
            rule_names.insert(rule.name.clone(), n);
        }
    }
    let kind = match spec.semantics {
        Semantics::Brs => "brs",
        Semantics::Pbrs => "pbrs",
        Semantics::Sbrs => "sbrs",
        Semantics::Abrs => "abrs",
    };
    let _ = writeln!(out, "begin {kind}\n  init {init};");
    let classes: Vec<String> = spec
        .classes
        .iter()
        .map(|c| {
            let rs: Vec<&str> = c.rules.iter().map(|r| rule_names[&r.name].as_str()).collect();
            if c.instantaneous {
                format!("({})", rs.join(", "))
            } else {
                format!("{{{}}}", rs.join(", "))
            }
        })
        .collect();
    let _ = writeln!(out, "  rules = [ {} ];", classes.join(", "));
    if !pred_names.is_empty() {
        let _ = writeln!(out, "  preds = {{ {} }};", pred_names.join(", "));
    }
    if !spec.actions.is_empty() {
        let acts: Vec<String> = spec
            .actions
            .iter()
            .map(|a| {
                let rs: Vec<&str> = a.rules.iter().map(|r| rule_names[r].as_str()).collect();
                format!("{} = {{{}}}", sanitise(&a.name), rs.join(", "))
            })
            .collect();
        let _ = writeln!(out, "  actions = [ {} ];", acts.join(", "));
    }
    out.push_str("end\n");
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
            Control::new("Camera", 0),
            Control::atomic("Adult", 0),
            Control::atomic("Child", 0),
            Control::atomic("Device", 1),
            Control::new("L", 1),
            Control::atomic("T", 0).with_params(vec![crate::bigraph::ParamSort::Float]),
        ]
        .into_iter()
        .collect()
    }

    fn round_trip(src: &str) {
        let b = parse_bigraph(src, &sig()).unwrap();
        let text = print_bigraph(&b);
        let back = parse_bigraph(&text, &sig()).unwrap_or_else(|e| panic!("{text}: {e}"));
        assert!(iso_equal(&b, &back), "{src} printed as {text}");
    }

    #[test]
    fn round_trips() {
        for src in [
            "Room.(Adult | Child)",
            "Room.1 || 1 || Adult",
            "/x (Device{x} | Device{x}) | Device{y}",
            "Room.(id | Camera.id) || id",
            "Room.id || Room.id",
            "share (Adult || Child) by ([{0, 1}, {1}], 2) in Room.(Camera.id | Camera.id)",
            "share (Adult | id) by ([{0, 1}], 2) in (Room.id || Room.id)",
            "{x} || id{y}",
            "T(2.5) | T(-0.001)",
            "L{x}.(id) || L{x}.id",
            "( )",
        ] {
            round_trip(src);
        }
    }

    #[test]
    fn out_of_order_sites() {
        let host = parse_bigraph("Room.(id || id)", &sig());
        assert!(host.is_err());
        round_trip("share (id || id) by ([{1}, {0}], 2) in (Room.id || Camera.id)");
    }

    #[test]
    fn closed_edges_get_fresh_names() {
        let b = parse_bigraph("/e0 (Device{e0}) | Device{e0}", &sig()).unwrap();
        let text = print_bigraph(&b);
        assert!(text.starts_with("/e1 "), "{text}");
        assert!(iso_equal(&b, &parse_bigraph(&text, &sig()).unwrap()));
    }

    #[test]
    fn instance_names() {
        assert_eq!(sanitise("spawnProc(0)"), "spawnProc_0");
        assert_eq!(sanitise("f(-1,0.5)"), "f_m1_0_5");
    }
}
