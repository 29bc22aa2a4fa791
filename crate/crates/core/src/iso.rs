//! Abstract equality of bigraphs.
//!
//! A bigraph is encoded as a vertex-coloured directed multigraph (regions,
//! sites, nodes, links and inner names are vertices) and colours are refined
//! until stable. The sorted colour multiset is the canonical key; exact
//! isomorphism is decided by individualisation and refinement with a final
//! structural check of the induced bijection.

use std::collections::HashMap;

use crate::bigraph::{Bigraph, BigraphError, Place};

const SEED_REGION: u64 = 0x5265_6769_6f6e_0001;
const SEED_SITE: u64 = 0x5369_7465_0000_0002;
const SEED_NODE: u64 = 0x4e6f_6465_0000_0003;
const SEED_OPEN: u64 = 0x4f70_656e_0000_0004;
const SEED_EDGE: u64 = 0x4564_6765_0000_0005;
const SEED_INNER: u64 = 0x496e_6e65_7200_0006;
const MARK: u64 = 0x9e37_79b9_7f4a_7c15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn combine(h: u64, v: u64) -> u64 {
    mix(h ^ v.wrapping_add(MARK).wrapping_add(h << 6).wrapping_add(h >> 2))
}

fn hash_bytes(seed: u64, bytes: &[u8]) -> u64 {
    // FNV-1a, finalised by `mix`; stable across platforms and runs.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    mix(h)
}

/// Edge labels of the coloured graph.
const PARENT: u8 = 0;
const PORT: u8 = 1;
const INNER: u8 = 2;

struct Coloured {
    /// Outgoing `(label, target)` per vertex.
    out: Vec<Vec<(u8, usize)>>,
    /// Incoming `(label, source)` per vertex.
    inc: Vec<Vec<(u8, usize)>>,
    initial: Vec<u64>,
    // Vertex layout: regions, sites, nodes, links, inner names.
    node_base: usize,
    link_base: usize,
}

impl Coloured {
    fn new(b: &Bigraph) -> Self {
        let r = b.regions();
        let s = b.sites();
        let n = b.node_count();
        let l = b.link_count();
        let node_base = r + s;
        let link_base = node_base + n;
        let inner_base = link_base + l;
        let total = inner_base + b.inner_links().len();
        let mut initial = Vec::with_capacity(total);
        for i in 0..r {
            initial.push(combine(SEED_REGION, i as u64));
        }
        for i in 0..s {
            initial.push(combine(SEED_SITE, i as u64));
        }
        for node in b.nodes() {
            let mut h = hash_bytes(SEED_NODE, node.control.name.as_bytes());
            for p in &node.params {
                h = combine(h, hash_bytes(SEED_NODE, p.to_string().as_bytes()));
            }
            initial.push(h);
        }
        for li in 0..l {
            initial.push(match b.link_name(li) {
                Some(name) => hash_bytes(SEED_OPEN, name.as_bytes()),
                None => SEED_EDGE,
            });
        }
        for name in b.inner_links().keys() {
            initial.push(hash_bytes(SEED_INNER, name.as_bytes()));
        }
        let mut out = vec![Vec::new(); total];
        let mut inc = vec![Vec::new(); total];
        let mut add = |from: usize, label: u8, to: usize| {
            out[from].push((label, to));
            inc[to].push((label, from));
        };
        let place = |p: &Place| match *p {
            Place::Region(i) => i,
            Place::Node(i) => node_base + i,
        };
        for i in 0..n {
            for p in b.node_parents(i) {
                add(node_base + i, PARENT, place(p));
            }
            for &port in &b.node(i).ports {
                add(node_base + i, PORT, link_base + port);
            }
        }
        for i in 0..s {
            for p in b.site_parents(i) {
                add(r + i, PARENT, place(p));
            }
        }
        for (k, &li) in b.inner_links().values().enumerate() {
            add(inner_base + k, INNER, link_base + li);
        }
        Coloured {
            out,
            inc,
            initial,
            node_base,
            link_base,
        }
    }

    fn len(&self) -> usize {
        self.initial.len()
    }

    fn round(&self, colours: &[u64]) -> Vec<u64> {
        let mut scratch: Vec<u64> = Vec::new();
        (0..self.len())
            .map(|v| {
                scratch.clear();
                scratch.extend(
                    self.out[v]
                        .iter()
                        .map(|&(lab, u)| combine(u64::from(lab) + 1, colours[u])),
                );
                scratch.extend(
                    self.inc[v]
                        .iter()
                        .map(|&(lab, u)| combine(u64::from(lab) + 17, colours[u])),
                );
                scratch.sort_unstable();
                scratch
                    .iter()
                    .fold(combine(colours[v], scratch.len() as u64), |h, &x| combine(h, x))
            })
            .collect()
    }

    /// Refines until the number of colour classes stops growing.
    fn refine(&self, mut colours: Vec<u64>) -> Vec<u64> {
        let mut classes = distinct(&colours);
        loop {
            let next = self.round(&colours);
            let next_classes = distinct(&next);
            colours = next;
            if next_classes == classes {
                return colours;
            }
            classes = next_classes;
        }
    }
}

fn distinct(colours: &[u64]) -> usize {
    let mut c = colours.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn sorted(colours: &[u64]) -> Vec<u64> {
    let mut c = colours.to_vec();
    c.sort_unstable();
    c
}

/// Isomorphism-invariant key of a ground bigraph. Isomorphic bigraphs have
/// equal keys; equal keys must be confirmed with [`iso_equal`].
pub fn canonical_key(b: &Bigraph) -> Result<Vec<u8>, BigraphError> {
    if !b.is_ground() {
        return Err(BigraphError::NotGround);
    }
    Ok(invariant_key(b))
}

/// Same as [`canonical_key`] without the groundness requirement.
pub fn invariant_key(b: &Bigraph) -> Vec<u8> {
    let g = Coloured::new(b);
    let colours = g.refine(g.initial.clone());
    let mut key = Vec::with_capacity(8 * (colours.len() + 4));
    for header in [b.regions(), b.sites(), b.node_count(), b.link_count()] {
        key.extend_from_slice(&(header as u64).to_le_bytes());
    }
    for c in sorted(&colours) {
        key.extend_from_slice(&c.to_le_bytes());
    }
    key
}

/// Abstract equality: a bijection of nodes and closed edges preserving
/// controls, parameters, parents, ports, region and site indices and names.
pub fn iso_equal(a: &Bigraph, b: &Bigraph) -> bool {
    iso_witness(a, b).is_some()
}

/// Node and link bijections witnessing `a ≅ b`: `nodes[i]` is the image of node
/// `i` of `a`, `links[l]` the image of link `l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoWitness {
    pub nodes: Vec<usize>,
    pub links: Vec<usize>,
}

pub fn iso_witness(a: &Bigraph, b: &Bigraph) -> Option<IsoWitness> {
    if a.regions() != b.regions()
        || a.sites() != b.sites()
        || a.node_count() != b.node_count()
        || a.link_count() != b.link_count()
        || a.inner_names() != b.inner_names()
        || a.outer_names() != b.outer_names()
    {
        return None;
    }
    let ga = Coloured::new(a);
    let gb = Coloured::new(b);
    let ca = ga.refine(ga.initial.clone());
    let cb = gb.refine(gb.initial.clone());
    search(a, b, &ga, &gb, ca, cb)
}

fn search(
    a: &Bigraph,
    b: &Bigraph,
    ga: &Coloured,
    gb: &Coloured,
    ca: Vec<u64>,
    cb: Vec<u64>,
) -> Option<IsoWitness> {
    if sorted(&ca) != sorted(&cb) {
        return None;
    }
    let mut count: HashMap<u64, usize> = HashMap::new();
    for &c in &ca {
        *count.entry(c).or_default() += 1;
    }
    // Smallest non-trivial class, ties broken by colour value.
    let pick = count
        .iter()
        .filter(|(_, &n)| n > 1)
        .min_by_key(|(&c, &n)| (n, c))
        .map(|(&c, _)| c);
    let Some(colour) = pick else {
        let pos: HashMap<u64, usize> = cb.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let map: Vec<usize> = ca.iter().map(|c| pos[c]).collect();
        return verify(a, b, ga, gb, &map);
    };
    let v = ca.iter().position(|&c| c == colour)?;
    let mut ca2 = ca.clone();
    ca2[v] = combine(colour, MARK);
    let ca2 = ga.refine(ca2);
    for w in (0..cb.len()).filter(|&w| cb[w] == colour) {
        let mut cb2 = cb.clone();
        cb2[w] = combine(colour, MARK);
        let cb2 = gb.refine(cb2);
        if let Some(found) = search(a, b, ga, gb, ca2.clone(), cb2) {
            return Some(found);
        }
    }
    None
}

fn verify(
    a: &Bigraph,
    b: &Bigraph,
    ga: &Coloured,
    gb: &Coloured,
    map: &[usize],
) -> Option<IsoWitness> {
    let n = a.node_count();
    let nodes: Vec<usize> = (0..n)
        .map(|i| map[ga.node_base + i].checked_sub(gb.node_base))
        .collect::<Option<_>>()?;
    let links: Vec<usize> = (0..a.link_count())
        .map(|l| map[ga.link_base + l].checked_sub(gb.link_base))
        .collect::<Option<_>>()?;
    if nodes.iter().any(|&j| j >= n) || links.iter().any(|&j| j >= b.link_count()) {
        return None;
    }
    let place = |p: &Place| match *p {
        Place::Region(r) => Place::Region(r),
        Place::Node(i) => Place::Node(nodes[i]),
    };
    for (l, &bl) in links.iter().enumerate().take(a.link_count()) {
        if a.link_name(l) != b.link_name(bl) {
            return None;
        }
    }
    for (i, &bi) in nodes.iter().enumerate().take(n) {
        let (x, y) = (a.node(i), b.node(bi));
        if !x.same_kind(y) {
            return None;
        }
        let mut px: Vec<Place> = a.node_parents(i).iter().map(place).collect();
        px.sort();
        if px != b.node_parents(bi) {
            return None;
        }
        let mut lx: Vec<usize> = x.ports.iter().map(|&p| links[p]).collect();
        let mut ly = y.ports.clone();
        lx.sort_unstable();
        ly.sort_unstable();
        if lx != ly {
            return None;
        }
    }
    for s in 0..a.sites() {
        let mut px: Vec<Place> = a.site_parents(s).iter().map(place).collect();
        px.sort();
        if px != b.site_parents(s) {
            return None;
        }
    }
    for (name, &l) in a.inner_links() {
        if b.inner_links().get(name) != Some(&links[l]) {
            return None;
        }
    }
    Some(IsoWitness { nodes, links })
}
