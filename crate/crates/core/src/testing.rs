//! Random bigraphs and brute-force reference implementations for tests.
//!
//! The oracles here enumerate every node bijection or injection explicitly.
//! They are exponential and only meant for bigraphs with a handful of nodes.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::bigraph::{Bigraph, Child, Control, Name, Node, Place, Signature};
use crate::matcher::Occurrence;

/// Shape of the bigraphs produced by [`random_bigraph`].
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub controls: Vec<Arc<Control>>,
    pub max_nodes: usize,
    pub max_regions: usize,
    pub max_sites: usize,
    /// Outer names links may be attached to.
    pub names: Vec<Name>,
    /// Inner names that may be added, each joined to a random link.
    pub inner_names: Vec<Name>,
    /// Number of closed edges in the link pool.
    pub edges: usize,
    /// Chance that a node or site gets a second parent.
    pub sharing: f64,
}

/// Four controls of arity at most two: `A` (0), `B` (1), `C` (2) and the
/// atomic `D` (1).
pub fn small_controls() -> Vec<Arc<Control>> {
    vec![
        Arc::new(Control::new("A", 0)),
        Arc::new(Control::new("B", 1)),
        Arc::new(Control::new("C", 2)),
        Arc::new(Control::atomic("D", 1)),
    ]
}

pub fn signature_of(controls: &[Arc<Control>]) -> Signature {
    controls.iter().map(|c| (**c).clone()).collect()
}

impl GenConfig {
    /// Ground bigraphs with at most `max_nodes` nodes over [`small_controls`].
    pub fn ground(max_nodes: usize) -> Self {
        GenConfig {
            controls: small_controls(),
            max_nodes,
            max_regions: 2,
            max_sites: 0,
            names: vec!["x".into(), "y".into(), "z".into()],
            inner_names: Vec::new(),
            edges: 3,
            sharing: 0.0,
        }
    }

    /// Bigraphs with sites and inner names as well.
    pub fn open(max_nodes: usize) -> Self {
        GenConfig {
            max_sites: 2,
            inner_names: vec!["u".into(), "v".into()],
            ..Self::ground(max_nodes)
        }
    }

    pub fn signature(&self) -> Signature {
        signature_of(&self.controls)
    }
}

/// Any bigraph shaped by `cfg`: random place graph (optionally shared), random
/// links drawn from the named and closed pools.
pub fn random_bigraph<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Bigraph {
    let regions = rng.random_range(1..=cfg.max_regions.max(1));
    let n = rng.random_range(0..=cfg.max_nodes);
    let mut b = Bigraph {
        regions,
        ..Bigraph::default()
    };
    let pick_parent = |rng: &mut R, b: &Bigraph| -> Place {
        let hosts: Vec<usize> = (0..b.nodes.len()).filter(|&i| !b.nodes[i].control.atomic).collect();
        if hosts.is_empty() || rng.random_bool(0.35) {
            Place::Region(rng.random_range(0..regions))
        } else {
            Place::Node(*hosts.choose(rng).expect("non-empty"))
        }
    };
    let mut pool: Vec<Option<Name>> = cfg.names.iter().cloned().map(Some).collect();
    pool.extend(std::iter::repeat_n(None, cfg.edges));
    b.links = pool.clone();
    for _ in 0..n {
        let control = cfg.controls.choose(rng).expect("controls").clone();
        let ports = (0..control.arity)
            .map(|_| rng.random_range(0..pool.len().max(1)))
            .collect();
        let mut parents = vec![pick_parent(rng, &b)];
        if rng.random_bool(cfg.sharing) {
            parents.push(pick_parent(rng, &b));
        }
        b.nodes.push(Node {
            control,
            params: Vec::new(),
            ports,
        });
        b.node_parents.push(parents);
    }
    let sites = if cfg.max_sites == 0 { 0 } else { rng.random_range(0..=cfg.max_sites) };
    for _ in 0..sites {
        let mut parents = vec![pick_parent(rng, &b)];
        if rng.random_bool(cfg.sharing) {
            parents.push(pick_parent(rng, &b));
        }
        b.site_parents.push(parents);
    }
    // Inner names are either the identity on their own name or closed, with
    // no two inner names on one link.
    let mut taken = BTreeSet::new();
    for name in &cfg.inner_names {
        if !rng.random_bool(0.3) {
            continue;
        }
        let free_edges: Vec<usize> = (cfg.names.len()..pool.len()).filter(|l| !taken.contains(l)).collect();
        let link = if rng.random_bool(0.5) || free_edges.is_empty() {
            b.links.push(Some(name.clone()));
            let l = b.links.len() - 1;
            let ports: Vec<(usize, usize)> = (0..b.nodes.len())
                .flat_map(|i| (0..b.nodes[i].ports.len()).map(move |k| (i, k)))
                .collect();
            if let Some(&(i, k)) = ports.choose(rng) {
                if rng.random_bool(0.5) {
                    b.nodes[i].ports[k] = l;
                }
            }
            l
        } else {
            *free_edges.choose(rng).expect("non-empty")
        };
        taken.insert(link);
        b.inner.insert(name.clone(), link);
    }
    // Drop outer names nobody uses half of the time, so that idle names are
    // exercised without dominating.
    let deg = b.link_degrees();
    for (l, name) in b.links.iter_mut().enumerate() {
        if name.is_some() && deg[l] == 0 && rng.random_bool(0.5) {
            *name = None;
        }
    }
    b.normalise();
    debug_assert!(b.check().is_ok());
    b
}

/// A random ground bigraph.
pub fn random_ground<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Bigraph {
    let cfg = GenConfig {
        max_sites: 0,
        inner_names: Vec::new(),
        ..cfg.clone()
    };
    random_bigraph(rng, &cfg)
}

/// A random solid forest pattern with at most `max_nodes` nodes and no inner
/// names.
pub fn random_pattern<R: Rng>(rng: &mut R, controls: &[Arc<Control>], max_nodes: usize) -> Bigraph {
    loop {
        let n = rng.random_range(1..=max_nodes.max(1));
        let regions = rng.random_range(1..=n.min(2));
        let mut b = Bigraph {
            regions,
            ..Bigraph::default()
        };
        let names = ["x", "y", "z"];
        let mut links: Vec<Option<Name>> = names.iter().map(|s| Some(s.to_string())).collect();
        links.extend([None, None]);
        b.links = links.clone();
        for i in 0..n {
            let control = controls.choose(rng).expect("controls").clone();
            let hosts: Vec<usize> = (0..i).filter(|&j| !b.nodes[j].control.atomic).collect();
            let parent = if i < regions {
                Place::Region(i)
            } else if hosts.is_empty() || rng.random_bool(0.4) {
                Place::Region(rng.random_range(0..regions))
            } else {
                Place::Node(*hosts.choose(rng).expect("non-empty"))
            };
            let ports = (0..control.arity)
                .map(|_| rng.random_range(0..links.len()))
                .collect();
            b.nodes.push(Node {
                control,
                params: Vec::new(),
                ports,
            });
            b.node_parents.push(vec![parent]);
        }
        for i in 0..n {
            if !b.nodes[i].control.atomic && rng.random_bool(0.5) {
                b.site_parents.push(vec![Place::Node(i)]);
            }
        }
        let deg = b.link_degrees();
        b.links = b
            .links
            .iter()
            .enumerate()
            .map(|(l, name)| if deg[l] == 0 { None } else { name.clone() })
            .collect();
        b.normalise();
        if b.is_solid() {
            return b;
        }
    }
}

/// A solid pattern cut out of `target`: a random subset of its nodes, with
/// sites wherever the target has more below, and links opened or closed at
/// random where that is consistent.
pub fn carve_pattern<R: Rng>(rng: &mut R, target: &Bigraph, max_nodes: usize) -> Option<Bigraph> {
    if target.node_count() == 0 {
        return None;
    }
    let k = rng.random_range(1..=max_nodes.min(target.node_count()));
    let mut all: Vec<usize> = (0..target.node_count()).collect();
    let mut chosen = Vec::new();
    for _ in 0..k {
        let i = rng.random_range(0..all.len());
        chosen.push(all.swap_remove(i));
    }
    chosen.sort_unstable();
    let index: BTreeMap<usize, usize> = chosen.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let mut b = Bigraph::default();
    let mut region_of: BTreeMap<Vec<Place>, usize> = BTreeMap::new();
    for &t in &chosen {
        let tp = target.node_parents(t);
        let inside: Vec<Place> = tp
            .iter()
            .filter_map(|p| match *p {
                Place::Node(j) => index.get(&j).map(|&i| Place::Node(i)),
                Place::Region(_) => None,
            })
            .collect();
        let parent = match inside.first() {
            Some(&p) => p,
            None => {
                let fresh = region_of.len();
                let r = if rng.random_bool(0.8) {
                    *region_of.entry(tp.to_vec()).or_insert(fresh)
                } else {
                    region_of.insert(vec![Place::Node(usize::MAX - fresh)], fresh);
                    fresh
                };
                Place::Region(r)
            }
        };
        b.node_parents.push(vec![parent]);
    }
    b.regions = region_of.len();
    let deg = target.link_degrees();
    let mut link_map: BTreeMap<usize, usize> = BTreeMap::new();
    let mut nodes = Vec::new();
    for &t in &chosen {
        let node = target.node(t);
        let mut ports = Vec::new();
        for &l in &node.ports {
            let pl = *link_map.entry(l).or_insert_with(|| {
                let inner_ports = chosen
                    .iter()
                    .map(|&c| target.node(c).ports.iter().filter(|&&p| p == l).count())
                    .sum::<usize>();
                let closable = target.link_name(l).is_none() && inner_ports == deg[l];
                let name = if closable && rng.random_bool(0.7) {
                    None
                } else {
                    Some(format!("n{l}"))
                };
                b.links.push(name);
                b.links.len() - 1
            });
            ports.push(pl);
        }
        nodes.push(Node {
            control: node.control.clone(),
            params: node.params.clone(),
            ports,
        });
    }
    b.nodes = nodes;
    let children = target.children_table();
    for (i, &t) in chosen.iter().enumerate() {
        if b.nodes[i].control.atomic {
            continue;
        }
        let extra = children[target.regions() + t]
            .iter()
            .any(|c| matches!(c, Child::Node(y) if !index.contains_key(y)));
        if extra || rng.random_bool(0.3) {
            b.site_parents.push(vec![Place::Node(i)]);
        }
    }
    b.normalise();
    b.check().ok()?;
    b.is_solid().then_some(b)
}

/// Everything about an occurrence that is independent of how it was found:
/// sorted image, context places of each region, target link of each outer
/// name, parameter roots of each site.
pub type ImageKey = (Vec<usize>, Vec<Vec<Place>>, BTreeMap<Name, usize>, Vec<Vec<usize>>);

pub fn occurrence_key(pattern: &Bigraph, occ: &Occurrence) -> ImageKey {
    let mut image = occ.node_map.clone();
    image.sort_unstable();
    let names = (0..pattern.link_count())
        .filter_map(|l| pattern.link_name(l).map(|n| (n.to_string(), occ.link_map[l])))
        .collect();
    (image, occ.region_places.clone(), names, occ.site_roots.clone())
}

/// Every occurrence of a solid forest pattern without inner names in a ground
/// target, found by trying every injective node map and every link map.
pub fn brute_force_occurrences(target: &Bigraph, pattern: &Bigraph) -> BTreeSet<ImageKey> {
    assert!(target.is_ground() && pattern.inner_names().is_empty() && pattern.is_forest());
    let mut out = BTreeSet::new();
    let mut f = vec![usize::MAX; pattern.node_count()];
    let mut used = vec![false; target.node_count()];
    injections(target, pattern, 0, &mut f, &mut used, &mut out);
    out
}

fn injections(
    t: &Bigraph,
    p: &Bigraph,
    v: usize,
    f: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut BTreeSet<ImageKey>,
) {
    if v == p.node_count() {
        if let Some((regions, roots)) = place_decomposition(t, p, f) {
            for names in link_maps(t, p, f) {
                let mut image = f.clone();
                image.sort_unstable();
                out.insert((image, regions.clone(), names, roots.clone()));
            }
        }
        return;
    }
    for x in 0..t.node_count() {
        if used[x] || !t.node(x).same_kind(p.node(v)) {
            continue;
        }
        used[x] = true;
        f[v] = x;
        injections(t, p, v + 1, f, used, out);
        used[x] = false;
    }
}

/// Parent places of each pattern region and the target nodes under each site.
type Decomposition = (Vec<Vec<Place>>, Vec<Vec<usize>>);

fn place_decomposition(t: &Bigraph, p: &Bigraph, f: &[usize]) -> Option<Decomposition> {
    let inv: BTreeMap<usize, usize> = f.iter().enumerate().map(|(v, &x)| (x, v)).collect();
    let tn = t.node_count();
    let t_parents_of = |x: usize| -> BTreeSet<Place> { t.node_parents(x).iter().copied().collect() };
    let site_of = |v: usize| -> Option<usize> {
        (0..p.sites()).find(|&s| p.site_parents(s) == [Place::Node(v)])
    };

    let mut regions: Vec<Option<BTreeSet<Place>>> = vec![None; p.regions()];
    for v in 0..p.node_count() {
        let tp = t_parents_of(f[v]);
        match p.node_parents(v)[0] {
            Place::Node(u) => {
                if tp != BTreeSet::from([Place::Node(f[u])]) {
                    return None;
                }
            }
            Place::Region(r) => {
                if tp.iter().any(|q| matches!(q, Place::Node(y) if inv.contains_key(y))) {
                    return None;
                }
                match &regions[r] {
                    Some(known) if *known != tp => return None,
                    _ => regions[r] = Some(tp),
                }
            }
        }
    }

    let mut owner: Vec<Option<usize>> = vec![None; tn];
    let mut roots = vec![Vec::new(); p.sites()];
    for y in 0..tn {
        if inv.contains_key(&y) {
            let v = inv[&y];
            // Image children of image nodes must be pattern children.
            for q in t.node_parents(y) {
                if let Place::Node(x) = *q {
                    if let Some(&u) = inv.get(&x) {
                        if p.node_parents(v) != [Place::Node(u)] {
                            return None;
                        }
                    }
                }
            }
            continue;
        }
        let image_parents: Vec<usize> = t
            .node_parents(y)
            .iter()
            .filter_map(|q| match *q {
                Place::Node(x) if inv.contains_key(&x) => Some(inv[&x]),
                _ => None,
            })
            .collect();
        if image_parents.is_empty() {
            continue;
        }
        if image_parents.len() != t.node_parents(y).len() || image_parents.len() != 1 {
            return None;
        }
        let s = site_of(image_parents[0])?;
        owner[y] = Some(s);
        roots[s].push(y);
    }
    // Parameters: everything below a root, owned by exactly one site.
    let children = t.children_table();
    let mut stack: Vec<usize> = roots.iter().flatten().copied().collect();
    while let Some(x) = stack.pop() {
        for c in &children[t.regions() + x] {
            let Child::Node(y) = *c else { continue };
            if inv.contains_key(&y) {
                return None;
            }
            match owner[y] {
                Some(o) if Some(o) == owner[x] => {}
                Some(_) => return None,
                None => {
                    owner[y] = owner[x];
                    stack.push(y);
                }
            }
        }
    }
    for y in 0..tn {
        if inv.contains_key(&y) {
            // No image node below a parameter.
            if t.node_parents(y)
                .iter()
                .any(|q| matches!(q, Place::Node(x) if owner[*x].is_some()))
            {
                return None;
            }
            continue;
        }
        if let Some(s) = owner[y] {
            if roots[s].contains(&y) {
                continue;
            }
            let all_inside = t
                .node_parents(y)
                .iter()
                .all(|q| matches!(q, Place::Node(x) if owner[*x] == Some(s)));
            if !all_inside {
                return None;
            }
        }
    }
    let regions: Vec<Vec<Place>> = regions
        .into_iter()
        .map(|r| r.map(|s| s.into_iter().collect::<Vec<_>>()))
        .collect::<Option<_>>()?;
    for places in &regions {
        if places
            .iter()
            .any(|q| matches!(q, Place::Node(x) if owner[*x].is_some()))
        {
            return None;
        }
    }
    for r in &mut roots {
        r.sort_unstable();
    }
    Some((regions, roots))
}

/// Every assignment of pattern links to target links that makes the port
/// multisets agree and maps closed edges onto whole closed edges.
fn link_maps(t: &Bigraph, p: &Bigraph, f: &[usize]) -> Vec<BTreeMap<Name, usize>> {
    let mut candidates: BTreeSet<usize> = BTreeSet::new();
    for &x in f {
        candidates.extend(t.node(x).ports.iter().copied());
    }
    let candidates: Vec<usize> = candidates.into_iter().collect();
    let mut g = vec![usize::MAX; p.link_count()];
    let mut out = Vec::new();
    assign_links(t, p, f, &candidates, 0, &mut g, &mut out);
    out
}

fn assign_links(
    t: &Bigraph,
    p: &Bigraph,
    f: &[usize],
    candidates: &[usize],
    l: usize,
    g: &mut Vec<usize>,
    out: &mut Vec<BTreeMap<Name, usize>>,
) {
    if l == p.link_count() {
        for (v, &fv) in f.iter().enumerate().take(p.node_count()) {
            let mut want: Vec<usize> = p.node(v).ports.iter().map(|&pl| g[pl]).collect();
            let mut have = t.node(fv).ports.clone();
            want.sort_unstable();
            have.sort_unstable();
            if want != have {
                return;
            }
        }
        for (pl, &tl) in g.iter().enumerate().take(p.link_count()) {
            if p.link_name(pl).is_some() {
                continue;
            }
            if t.link_name(tl).is_some() {
                return;
            }
            let mut want: Vec<usize> = (0..p.node_count())
                .flat_map(|v| std::iter::repeat_n(f[v], p.node(v).ports.iter().filter(|&&x| x == pl).count()))
                .collect();
            let mut have: Vec<usize> = (0..t.node_count())
                .flat_map(|x| std::iter::repeat_n(x, t.node(x).ports.iter().filter(|&&y| y == tl).count()))
                .collect();
            want.sort_unstable();
            have.sort_unstable();
            if want != have {
                return;
            }
        }
        let names = (0..p.link_count())
            .filter_map(|pl| p.link_name(pl).map(|n| (n.to_string(), g[pl])))
            .collect();
        out.push(names);
        return;
    }
    for &tl in candidates {
        g[l] = tl;
        assign_links(t, p, f, candidates, l + 1, g, out);
    }
    g[l] = usize::MAX;
}

/// Isomorphism by trying every node bijection. Regions and sites are fixed by
/// index, outer and inner names by name; closed edges and nodes are anonymous.
pub fn brute_force_iso(a: &Bigraph, b: &Bigraph) -> bool {
    if a.regions() != b.regions()
        || a.sites() != b.sites()
        || a.node_count() != b.node_count()
        || a.outer_names() != b.outer_names()
        || a.inner_names() != b.inner_names()
    {
        return false;
    }
    let mut pi = vec![usize::MAX; a.node_count()];
    let mut used = vec![false; b.node_count()];
    bijections(a, b, 0, &mut pi, &mut used)
}

fn bijections(a: &Bigraph, b: &Bigraph, i: usize, pi: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
    if i == a.node_count() {
        return same_under(a, b, pi);
    }
    for j in 0..b.node_count() {
        if used[j] || !a.node(i).same_kind(b.node(j)) {
            continue;
        }
        used[j] = true;
        pi[i] = j;
        let ok = bijections(a, b, i + 1, pi, used);
        used[j] = false;
        if ok {
            return true;
        }
    }
    false
}

fn same_under(a: &Bigraph, b: &Bigraph, pi: &[usize]) -> bool {
    let map = |ps: &[Place]| -> Vec<Place> {
        let mut out: Vec<Place> = ps
            .iter()
            .map(|q| match *q {
                Place::Node(i) => Place::Node(pi[i]),
                r => r,
            })
            .collect();
        out.sort();
        out.dedup();
        out
    };
    let sorted = |ps: &[Place]| -> Vec<Place> {
        let mut v = ps.to_vec();
        v.sort();
        v.dedup();
        v
    };
    for (i, &bi) in pi.iter().enumerate().take(a.node_count()) {
        if map(a.node_parents(i)) != sorted(b.node_parents(bi)) {
            return false;
        }
    }
    for s in 0..a.sites() {
        if map(a.site_parents(s)) != sorted(b.site_parents(s)) {
            return false;
        }
    }
    let links = |x: &Bigraph, perm: &dyn Fn(usize) -> usize| {
        let mut sigs: Vec<(Option<String>, Vec<usize>, Vec<String>)> = (0..x.link_count())
            .map(|l| {
                let mut ports: Vec<usize> = (0..x.node_count())
                    .flat_map(|n| {
                        std::iter::repeat_n(perm(n), x.node(n).ports.iter().filter(|&&p| p == l).count())
                    })
                    .collect();
                ports.sort_unstable();
                let inner: Vec<String> = x
                    .inner_links()
                    .iter()
                    .filter(|(_, &k)| k == l)
                    .map(|(n, _)| n.clone())
                    .collect();
                (x.link_name(l).map(str::to_string), ports, inner)
            })
            .collect();
        sigs.sort();
        sigs
    };
    links(a, &|n| pi[n]) == links(b, &|n| n)
}

/// `b` with outer name `from` renamed to `to` (which must be fresh).
pub fn rename_outer(b: &Bigraph, from: &str, to: &str) -> Bigraph {
    let mut out = b.clone();
    for name in out.links.iter_mut().flatten() {
        if name == from {
            *name = to.to_string();
        }
    }
    out
}

/// `b` with its nodes and links stored in a different (random) order.
pub fn shuffle_representation<R: Rng>(rng: &mut R, b: &Bigraph) -> Bigraph {
    use rand::seq::SliceRandom;
    let mut perm: Vec<usize> = (0..b.node_count()).collect();
    perm.shuffle(rng);
    let mut lperm: Vec<usize> = (0..b.link_count()).collect();
    lperm.shuffle(rng);
    let place = |q: &Place| match *q {
        Place::Node(i) => Place::Node(perm[i]),
        r => r,
    };
    let mut out = Bigraph {
        regions: b.regions,
        nodes: b.nodes.clone(),
        node_parents: vec![Vec::new(); b.node_count()],
        site_parents: b.site_parents.iter().map(|ps| ps.iter().map(place).collect()).collect(),
        links: vec![None; b.link_count()],
        inner: b.inner.iter().map(|(n, &l)| (n.clone(), lperm[l])).collect(),
    };
    for (l, name) in b.links.iter().enumerate() {
        out.links[lperm[l]] = name.clone();
    }
    for (i, node) in b.nodes.iter().enumerate() {
        let mut node = node.clone();
        for p in &mut node.ports {
            *p = lperm[*p];
        }
        node.ports.reverse();
        out.nodes[perm[i]] = node;
        out.node_parents[perm[i]] = b.node_parents[i].iter().map(place).collect();
    }
    out.normalise();
    out
}
