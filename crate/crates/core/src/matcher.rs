//! Occurrences of a solid pattern inside a ground target.
//!
//! An occurrence decomposes the target into a context, the image of the
//! pattern and one parameter per pattern site. The search maps pattern nodes
//! one at a time (rarest control first, then along place and link adjacency),
//! assigns ports as a small multiset matching and checks the place
//! decomposition once every node has an image.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::bigraph::{Bigraph, Child, Place};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchError {
    #[error("pattern is not solid")]
    PatternNotSolid,
    #[error("target is not ground")]
    TargetNotGround,
    #[error("patterns with inner names are not supported")]
    PatternHasInnerNames,
}

/// One way of finding a pattern inside a target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    /// Image of each pattern node.
    pub node_map: Vec<usize>,
    /// Image of each pattern link.
    pub link_map: Vec<usize>,
    /// Context places holding each pattern region (sorted).
    pub region_places: Vec<Vec<Place>>,
    /// Target nodes at the top of each site's parameter (sorted).
    pub site_roots: Vec<Vec<usize>>,
    /// Every node of each site's parameter (sorted).
    pub param_nodes: Vec<Vec<usize>>,
}

type OccKey = (Vec<usize>, Vec<Vec<Place>>, Vec<usize>, Vec<Vec<usize>>);

impl Occurrence {
    fn key(&self, pattern: &Bigraph) -> OccKey {
        let mut image = self.node_map.clone();
        image.sort_unstable();
        let open: Vec<usize> = (0..pattern.link_count())
            .filter(|&l| pattern.link_name(l).is_some())
            .map(|l| self.link_map[l])
            .collect();
        (
            image,
            self.region_places.clone(),
            open,
            self.site_roots.clone(),
        )
    }

    fn membership(&self, target: &Bigraph) -> Vec<Membership> {
        let mut m = vec![Membership::Context; target.node_count()];
        for &t in &self.node_map {
            m[t] = Membership::Image;
        }
        for (s, nodes) in self.param_nodes.iter().enumerate() {
            for &t in nodes {
                m[t] = Membership::Param(s);
            }
        }
        m
    }

    /// Parameter of site `s` as a ground bigraph with one region.
    pub fn parameter(&self, target: &Bigraph, site: usize) -> Bigraph {
        let mut keep = vec![false; target.node_count()];
        for &t in &self.param_nodes[site] {
            keep[t] = true;
        }
        restrict(target, &keep, true)
    }

    /// The merge of every parameter, as used by `in param` conditions.
    pub fn merged_parameter(&self, target: &Bigraph) -> Bigraph {
        let mut keep = vec![false; target.node_count()];
        for &t in self.param_nodes.iter().flatten() {
            keep[t] = true;
        }
        restrict(target, &keep, true)
    }

    /// Everything outside the image and the parameters, with its holes
    /// removed, as used by `in ctx` conditions.
    pub fn context(&self, target: &Bigraph) -> Bigraph {
        let keep: Vec<bool> = self
            .membership(target)
            .into_iter()
            .map(|m| m == Membership::Context)
            .collect();
        restrict(target, &keep, false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Membership {
    Context,
    Image,
    Param(usize),
}

/// The sub-bigraph on the kept nodes. Parents outside the kept set become
/// region 0 when `collapse` is set; links that leave the kept set stay open
/// under a name that cannot clash with user identifiers.
fn restrict(target: &Bigraph, keep: &[bool], collapse: bool) -> Bigraph {
    let mut index = vec![usize::MAX; target.node_count()];
    let mut count = 0;
    for (i, &k) in keep.iter().enumerate() {
        if k {
            index[i] = count;
            count += 1;
        }
    }
    let mut ports_inside = vec![0usize; target.link_count()];
    let mut ports_total = vec![0usize; target.link_count()];
    for (i, node) in target.nodes.iter().enumerate() {
        for &p in &node.ports {
            ports_total[p] += 1;
            if keep[i] {
                ports_inside[p] += 1;
            }
        }
    }
    let mut link_index = vec![usize::MAX; target.link_count()];
    let mut out = Bigraph {
        regions: if collapse { 1 } else { target.regions },
        ..Bigraph::default()
    };
    for (i, node) in target.nodes.iter().enumerate() {
        if !keep[i] {
            continue;
        }
        let mut node = node.clone();
        for p in &mut node.ports {
            if link_index[*p] == usize::MAX {
                link_index[*p] = out.links.len();
                let name = match target.link_name(*p) {
                    Some(n) => Some(n.to_string()),
                    None if ports_inside[*p] == ports_total[*p] => None,
                    None => Some(format!("_l{}", *p)),
                };
                out.links.push(name);
            }
            *p = link_index[*p];
        }
        let parents = target.node_parents[i]
            .iter()
            .map(|p| match *p {
                Place::Node(j) if keep[j] => Place::Node(index[j]),
                Place::Region(r) if !collapse => Place::Region(r),
                _ => Place::Region(0),
            })
            .collect();
        out.nodes.push(node);
        out.node_parents.push(parents);
    }
    out.normalise();
    out
}

/// All occurrences of `pattern` in `target`, deduplicated by image and sorted.
pub fn find_occurrences(target: &Bigraph, pattern: &Bigraph) -> Result<Vec<Occurrence>, MatchError> {
    run(target, pattern, None)
}

pub fn count_occurrences(target: &Bigraph, pattern: &Bigraph) -> Result<usize, MatchError> {
    Ok(find_occurrences(target, pattern)?.len())
}

/// True when `pattern` occurs somewhere in `state`.
pub fn matches_predicate(state: &Bigraph, pattern: &Bigraph) -> Result<bool, MatchError> {
    Ok(!run(state, pattern, Some(1))?.is_empty())
}

fn run(target: &Bigraph, pattern: &Bigraph, limit: Option<usize>) -> Result<Vec<Occurrence>, MatchError> {
    if !target.is_ground() {
        return Err(MatchError::TargetNotGround);
    }
    if !pattern.inner.is_empty() {
        return Err(MatchError::PatternHasInnerNames);
    }
    if !pattern.is_solid() {
        return Err(MatchError::PatternNotSolid);
    }
    let mut search = Search::new(target, pattern, limit);
    search.descend(0);
    Ok(search.found.into_values().collect())
}

/// Where a match condition looks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConditionPlace {
    Param,
    Ctx,
}

/// A side condition on a rule: a (solid) pattern that must occur, or must not
/// occur, in the parameter or the context of an occurrence.
#[derive(Debug, Clone)]
pub struct MatchConstraint {
    pub present: bool,
    pub place: ConditionPlace,
    pub pattern: Bigraph,
}

impl PartialEq for MatchConstraint {
    fn eq(&self, other: &Self) -> bool {
        self.present == other.present
            && self.place == other.place
            && crate::iso::iso_equal(&self.pattern, &other.pattern)
    }
}

/// True when every constraint holds for `occ` in `target`.
pub fn check_constraints(target: &Bigraph, occ: &Occurrence, constraints: &[MatchConstraint]) -> bool {
    let mut param = None;
    let mut ctx = None;
    constraints.iter().all(|c| {
        let derived = match c.place {
            ConditionPlace::Param => param.get_or_insert_with(|| occ.merged_parameter(target)),
            ConditionPlace::Ctx => ctx.get_or_insert_with(|| occ.context(target)),
        };
        let found = matches_predicate(derived, &c.pattern).unwrap_or(false);
        found == c.present
    })
}

struct Search<'a> {
    t: &'a Bigraph,
    p: &'a Bigraph,
    limit: Option<usize>,
    t_children: Vec<Vec<Child>>,
    p_children: Vec<Vec<Child>>,
    t_by_kind: Vec<Vec<usize>>,
    t_link_nodes: Vec<Vec<usize>>,
    p_link_nodes: Vec<Vec<usize>>,
    order: Vec<usize>,
    f: Vec<Option<usize>>,
    finv: Vec<Option<usize>>,
    g: Vec<Option<usize>>,
    /// Pattern links mapped onto each target link.
    link_users: Vec<usize>,
    /// Target links claimed by a closed pattern edge.
    closed_claim: Vec<bool>,
    found: BTreeMap<OccKey, Occurrence>,
}

impl<'a> Search<'a> {
    fn new(t: &'a Bigraph, p: &'a Bigraph, limit: Option<usize>) -> Self {
        let t_by_kind: Vec<Vec<usize>> = p
            .nodes
            .iter()
            .map(|pn| {
                (0..t.node_count())
                    .filter(|&i| t.nodes[i].same_kind(pn))
                    .collect()
            })
            .collect();
        let link_nodes = |b: &Bigraph| {
            let mut out = vec![Vec::new(); b.link_count()];
            for (i, n) in b.nodes.iter().enumerate() {
                for &l in &n.ports {
                    out[l].push(i);
                }
            }
            out
        };
        let mut s = Search {
            t,
            p,
            limit,
            t_children: t.children_table(),
            p_children: p.children_table(),
            t_link_nodes: link_nodes(t),
            p_link_nodes: link_nodes(p),
            t_by_kind,
            order: Vec::new(),
            f: vec![None; p.node_count()],
            finv: vec![None; t.node_count()],
            g: vec![None; p.link_count()],
            link_users: vec![0; t.link_count()],
            closed_claim: vec![false; t.link_count()],
            found: BTreeMap::new(),
        };
        s.order = s.plan();
        s
    }

    /// Static visiting order: rarest first, then grow along adjacency.
    fn plan(&self) -> Vec<usize> {
        let n = self.p.node_count();
        let mut placed = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let neighbours = |v: usize| -> Vec<usize> {
            let mut out = Vec::new();
            for par in &self.p.node_parents[v] {
                if let Place::Node(u) = *par {
                    out.push(u);
                }
            }
            for c in &self.p_children[self.p.regions + v] {
                if let Child::Node(w) = *c {
                    out.push(w);
                }
            }
            for &l in &self.p.nodes[v].ports {
                out.extend(self.p_link_nodes[l].iter().copied());
            }
            out
        };
        while order.len() < n {
            let mut frontier: Vec<usize> = order
                .iter()
                .flat_map(|&v| neighbours(v))
                .filter(|&u| !placed[u])
                .collect();
            if frontier.is_empty() {
                frontier = (0..n).filter(|&u| !placed[u]).collect();
            }
            let next = *frontier
                .iter()
                .min_by_key(|&&u| (self.t_by_kind[u].len(), u))
                .expect("non-empty frontier");
            placed[next] = true;
            order.push(next);
        }
        order
    }

    fn done(&self) -> bool {
        self.limit.is_some_and(|l| self.found.len() >= l)
    }

    fn candidates(&self, v: usize) -> Vec<usize> {
        for par in &self.p.node_parents[v] {
            if let Place::Node(u) = *par {
                if let Some(tu) = self.f[u] {
                    return self.t_children[self.t.regions + tu]
                        .iter()
                        .filter_map(|c| match *c {
                            Child::Node(i) => Some(i),
                            Child::Site(_) => None,
                        })
                        .collect();
                }
            }
        }
        for c in &self.p_children[self.p.regions + v] {
            if let Child::Node(w) = *c {
                if let Some(tw) = self.f[w] {
                    return self.t.node_parents[tw]
                        .iter()
                        .filter_map(|q| match *q {
                            Place::Node(i) => Some(i),
                            Place::Region(_) => None,
                        })
                        .collect();
                }
            }
        }
        for &l in &self.p.nodes[v].ports {
            if let Some(tl) = self.g[l] {
                let mut nodes = self.t_link_nodes[tl].clone();
                nodes.dedup();
                return nodes;
            }
        }
        self.t_by_kind[v].clone()
    }

    fn compatible(&self, v: usize, t: usize) -> bool {
        if self.finv[t].is_some() || !self.t.nodes[t].same_kind(&self.p.nodes[v]) {
            return false;
        }
        let p_parents = &self.p.node_parents[v];
        let t_parents = &self.t.node_parents[t];
        let only_nodes = p_parents.iter().all(|q| matches!(q, Place::Node(_)));
        if only_nodes && p_parents.len() != t_parents.len() {
            return false;
        }
        for q in p_parents {
            if let Place::Node(u) = *q {
                if let Some(tu) = self.f[u] {
                    if !t_parents.contains(&Place::Node(tu)) {
                        return false;
                    }
                }
            }
        }
        // Mapped target parents must come from pattern parents.
        for q in t_parents {
            if let Place::Node(tu) = *q {
                if let Some(u) = self.finv[tu] {
                    if !p_parents.contains(&Place::Node(u)) {
                        return false;
                    }
                }
            }
        }
        let p_kids = &self.p_children[self.p.regions + v];
        let t_kids = &self.t_children[self.t.regions + t];
        let has_site = p_kids.iter().any(|c| matches!(c, Child::Site(_)));
        let node_kids = p_kids.iter().filter(|c| matches!(c, Child::Node(_))).count();
        if has_site {
            if t_kids.len() < node_kids {
                return false;
            }
        } else if t_kids.len() != node_kids {
            return false;
        }
        for c in t_kids {
            if let Child::Node(tw) = *c {
                if let Some(w) = self.finv[tw] {
                    if !self.p.node_parents[w].contains(&Place::Node(v)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn descend(&mut self, depth: usize) {
        if self.done() {
            return;
        }
        if depth == self.order.len() {
            if let Some(occ) = self.complete() {
                let key = occ.key(self.p);
                self.found.entry(key).or_insert(occ);
            }
            return;
        }
        let v = self.order[depth];
        for t in self.candidates(v) {
            if !self.compatible(v, t) {
                continue;
            }
            self.f[v] = Some(t);
            self.finv[t] = Some(v);
            self.assign_ports(v, t, depth);
            self.f[v] = None;
            self.finv[t] = None;
            if self.done() {
                return;
            }
        }
    }

    /// Enumerates link assignments making the port multiset of pattern node
    /// `v` equal to that of target node `t`, then continues the search.
    fn assign_ports(&mut self, v: usize, t: usize, depth: usize) {
        let mut remaining: BTreeMap<usize, usize> = BTreeMap::new();
        for &tl in &self.t.nodes[t].ports {
            *remaining.entry(tl).or_default() += 1;
        }
        let mut pending: BTreeMap<usize, usize> = BTreeMap::new();
        for &l in &self.p.nodes[v].ports {
            *pending.entry(l).or_default() += 1;
        }
        let mut free = Vec::new();
        for (&l, &m) in &pending {
            match self.g[l] {
                Some(tl) => match remaining.get_mut(&tl) {
                    Some(c) if *c >= m => *c -= m,
                    _ => return,
                },
                None => free.push((l, m)),
            }
        }
        self.assign_free(&free, 0, &mut remaining, depth);
    }

    fn assign_free(
        &mut self,
        free: &[(usize, usize)],
        i: usize,
        remaining: &mut BTreeMap<usize, usize>,
        depth: usize,
    ) {
        if i == free.len() {
            self.descend(depth + 1);
            return;
        }
        let (l, m) = free[i];
        let closed = self.p.link_name(l).is_none();
        let options: Vec<usize> = remaining
            .iter()
            .filter(|&(_, &c)| c >= m)
            .map(|(&tl, _)| tl)
            .collect();
        for tl in options {
            if self.closed_claim[tl] {
                continue;
            }
            if closed && (self.t.link_name(tl).is_some() || self.link_users[tl] > 0) {
                continue;
            }
            *remaining.get_mut(&tl).unwrap() -= m;
            self.g[l] = Some(tl);
            self.link_users[tl] += 1;
            self.closed_claim[tl] = closed;
            self.assign_free(free, i + 1, remaining, depth);
            self.closed_claim[tl] = false;
            self.link_users[tl] -= 1;
            self.g[l] = None;
            *remaining.get_mut(&tl).unwrap() += m;
            if self.done() {
                return;
            }
        }
    }

    /// Checks the place and link decomposition for a complete node map.
    fn complete(&self) -> Option<Occurrence> {
        let (t, p) = (self.t, self.p);
        let f: Vec<usize> = self.f.iter().map(|x| x.expect("complete map")).collect();
        let image = |i: usize| self.finv[i].is_some();

        // Closed edges map exactly.
        for l in 0..p.link_count() {
            if p.link_name(l).is_some() {
                continue;
            }
            let tl = self.g[l]?;
            let mut want: Vec<usize> = self.p_link_nodes[l].iter().map(|&v| f[v]).collect();
            want.sort_unstable();
            let mut have = self.t_link_nodes[tl].clone();
            have.sort_unstable();
            if want != have {
                return None;
            }
        }

        // Context places of each region.
        let mut region_places: Vec<Option<Vec<Place>>> = vec![None; p.regions];
        for (v, ps) in p.node_parents.iter().enumerate() {
            if let [Place::Region(r)] = ps.as_slice() {
                let tp = t.node_parents[f[v]].clone();
                match &region_places[*r] {
                    Some(known) if *known != tp => return None,
                    Some(_) => {}
                    None => region_places[*r] = Some(tp),
                }
            }
        }
        let region_places: Vec<Vec<Place>> = region_places.into_iter().collect::<Option<_>>()?;
        for places in &region_places {
            if places
                .iter()
                .any(|q| matches!(*q, Place::Node(i) if image(i)))
            {
                return None;
            }
        }
        for (v, ps) in p.node_parents.iter().enumerate() {
            let mut want: Vec<Place> = Vec::new();
            for q in ps {
                match *q {
                    Place::Node(u) => want.push(Place::Node(f[u])),
                    Place::Region(r) => want.extend(region_places[r].iter().copied()),
                }
            }
            want.sort();
            want.dedup();
            if want != t.node_parents[f[v]] {
                return None;
            }
        }

        // Parameter roots: non-image children of image nodes.
        let mut root_site: BTreeMap<usize, usize> = BTreeMap::new();
        for (v, &tv) in f.iter().enumerate() {
            let site = self.p_children[p.regions + v].iter().find_map(|c| match *c {
                Child::Site(s) => Some(s),
                Child::Node(_) => None,
            });
            for c in &self.t_children[t.regions + tv] {
                let Child::Node(y) = *c else { return None };
                if image(y) {
                    continue;
                }
                let s = site?;
                if *root_site.entry(y).or_insert(s) != s {
                    return None;
                }
            }
        }
        let mut site_roots = vec![Vec::new(); p.sites()];
        for (&y, &s) in &root_site {
            let mut pre: Vec<Place> = Vec::new();
            for q in &t.node_parents[y] {
                match *q {
                    Place::Node(i) => pre.push(Place::Node(self.finv[i]?)),
                    Place::Region(_) => return None,
                }
            }
            pre.sort();
            if pre != p.site_parents[s] {
                return None;
            }
            site_roots[s].push(y);
        }

        // Parameters are downward closed, disjoint and free of image nodes.
        let mut owner: Vec<Option<usize>> = vec![None; t.node_count()];
        let mut param_nodes = vec![Vec::new(); p.sites()];
        for (s, roots) in site_roots.iter().enumerate() {
            let mut stack = roots.clone();
            while let Some(y) = stack.pop() {
                if image(y) {
                    return None;
                }
                match owner[y] {
                    Some(o) if o == s => continue,
                    Some(_) => return None,
                    None => {}
                }
                owner[y] = Some(s);
                param_nodes[s].push(y);
                for c in &self.t_children[t.regions + y] {
                    if let Child::Node(z) = *c {
                        stack.push(z);
                    }
                }
            }
            param_nodes[s].sort_unstable();
        }
        for (s, nodes) in param_nodes.iter().enumerate() {
            for &y in nodes {
                if root_site.contains_key(&y) {
                    continue;
                }
                let inside = t.node_parents[y]
                    .iter()
                    .all(|q| matches!(*q, Place::Node(i) if owner[i] == Some(s)));
                if !inside {
                    return None;
                }
            }
        }
        for places in &region_places {
            if places
                .iter()
                .any(|q| matches!(*q, Place::Node(i) if owner[i].is_some()))
            {
                return None;
            }
        }

        Some(Occurrence {
            node_map: f,
            link_map: self.g.iter().map(|x| x.expect("every link has a port")).collect(),
            region_places,
            site_roots,
            param_nodes,
        })
    }
}
