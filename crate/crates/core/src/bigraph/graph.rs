use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::control::{Control, Param};
use super::BigraphError;

/// Identifier used for outer and inner names.
pub type Name = String;

/// A parent in the place graph: either a region (root) or a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Region(usize),
    Node(usize),
}

/// A child in the place graph: either a node or a site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Child {
    Node(usize),
    Site(usize),
}

/// An entity instance. `ports[i]` is the index of the link port `i` belongs to;
/// ports are unordered, so only the multiset of links is significant.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub control: Arc<Control>,
    pub params: Vec<Param>,
    pub ports: Vec<usize>,
}

impl Node {
    /// Control name and parameters: the part of a node that matching and
    /// isomorphism must preserve.
    pub fn same_kind(&self, other: &Node) -> bool {
        self.control.name == other.control.name && self.params == other.params
    }

    pub fn label(&self) -> String {
        if self.params.is_empty() {
            self.control.name.clone()
        } else {
            let ps: Vec<String> = self.params.iter().map(|p| p.to_string()).collect();
            format!("{}({})", self.control.name, ps.join(","))
        }
    }
}

/// Width and name set of one side of a bigraph, rendered as `<w, {a, b}>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interface {
    pub width: usize,
    pub names: BTreeSet<Name>,
}

impl fmt::Display for Interface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.names.iter().map(String::as_str).collect();
        write!(f, "<{}, {{{}}}>", self.width, names.join(", "))
    }
}

/// A concrete representation of an abstract bigraph.
///
/// The place graph is stored as parent sets so that forests and DAGs (sharing)
/// share one representation. Links are indexed; a link is open when it carries
/// an outer name and closed (an edge) otherwise. Node and link indices are
/// internal and never observable through [`iso_equal`](crate::iso_equal).
#[derive(Debug, Clone, Default)]
pub struct Bigraph {
    pub(crate) nodes: Vec<Node>,
    pub(crate) node_parents: Vec<Vec<Place>>,
    pub(crate) site_parents: Vec<Vec<Place>>,
    pub(crate) regions: usize,
    pub(crate) links: Vec<Option<Name>>,
    pub(crate) inner: BTreeMap<Name, usize>,
}

impl Bigraph {
    /// The bigraph with no regions, sites, nodes or names.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn regions(&self) -> usize {
        self.regions
    }

    pub fn sites(&self) -> usize {
        self.site_parents.len()
    }

    pub fn node_parents(&self, i: usize) -> &[Place] {
        &self.node_parents[i]
    }

    pub fn site_parents(&self, s: usize) -> &[Place] {
        &self.site_parents[s]
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    /// Outer name of link `l`, or `None` for a closed edge.
    pub fn link_name(&self, l: usize) -> Option<&str> {
        self.links[l].as_deref()
    }

    pub fn outer_names(&self) -> BTreeSet<Name> {
        self.links.iter().flatten().cloned().collect()
    }

    pub fn inner_names(&self) -> BTreeSet<Name> {
        self.inner.keys().cloned().collect()
    }

    pub fn inner_links(&self) -> &BTreeMap<Name, usize> {
        &self.inner
    }

    pub fn outer_link(&self, name: &str) -> Option<usize> {
        self.links.iter().position(|n| n.as_deref() == Some(name))
    }

    pub fn outer_interface(&self) -> Interface {
        Interface {
            width: self.regions,
            names: self.outer_names(),
        }
    }

    pub fn inner_interface(&self) -> Interface {
        Interface {
            width: self.sites(),
            names: self.inner_names(),
        }
    }

    /// Nodes attached to link `l`, one entry per port.
    pub fn link_ports(&self, l: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            for &p in &n.ports {
                if p == l {
                    out.push(i);
                }
            }
        }
        out
    }

    /// Port count per link, plus inner names attached to each link.
    pub fn link_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.links.len()];
        for n in &self.nodes {
            for &p in &n.ports {
                deg[p] += 1;
            }
        }
        for &l in self.inner.values() {
            deg[l] += 1;
        }
        deg
    }

    /// Children of every place: `children[regions + node]` for nodes,
    /// `children[r]` for region `r`.
    pub fn children_table(&self) -> Vec<Vec<Child>> {
        let mut table = vec![Vec::new(); self.regions + self.nodes.len()];
        let slot = |p: &Place| match *p {
            Place::Region(r) => r,
            Place::Node(n) => self.regions + n,
        };
        for (i, ps) in self.node_parents.iter().enumerate() {
            for p in ps {
                table[slot(p)].push(Child::Node(i));
            }
        }
        for (s, ps) in self.site_parents.iter().enumerate() {
            for p in ps {
                table[slot(p)].push(Child::Site(s));
            }
        }
        table
    }

    pub fn children(&self, place: Place) -> Vec<Child> {
        let mut out = Vec::new();
        for (i, ps) in self.node_parents.iter().enumerate() {
            if ps.contains(&place) {
                out.push(Child::Node(i));
            }
        }
        for (s, ps) in self.site_parents.iter().enumerate() {
            if ps.contains(&place) {
                out.push(Child::Site(s));
            }
        }
        out
    }

    /// True when every node and site has exactly one parent.
    pub fn is_forest(&self) -> bool {
        self.node_parents.iter().all(|p| p.len() == 1)
            && self.site_parents.iter().all(|p| p.len() == 1)
    }

    /// Number of closed edges.
    pub fn edge_count(&self) -> usize {
        self.links.iter().filter(|l| l.is_none()).count()
    }

    /// Drops empty closed edges, renumbers links and sorts parent sets.
    pub(crate) fn normalise(&mut self) {
        let deg = self.link_degrees();
        let mut remap = vec![usize::MAX; self.links.len()];
        let mut links = Vec::with_capacity(self.links.len());
        for (l, name) in self.links.iter().enumerate() {
            if name.is_some() || deg[l] > 0 {
                remap[l] = links.len();
                links.push(name.clone());
            }
        }
        self.links = links;
        for n in &mut self.nodes {
            for p in &mut n.ports {
                *p = remap[*p];
            }
        }
        for l in self.inner.values_mut() {
            *l = remap[*l];
        }
        for ps in self.node_parents.iter_mut().chain(self.site_parents.iter_mut()) {
            ps.sort();
            ps.dedup();
        }
    }

    /// Checks the structural invariants: acyclicity, parent sets non-empty and
    /// in range, no children under atomic nodes, port counts equal arities,
    /// outer names unique.
    pub fn check(&self) -> Result<(), BigraphError> {
        let n = self.nodes.len();
        if self.node_parents.len() != n {
            return Err(BigraphError::Malformed("parent table size".into()));
        }
        let in_range = |p: &Place| match *p {
            Place::Region(r) => r < self.regions,
            Place::Node(i) => i < n,
        };
        for ps in self.node_parents.iter().chain(self.site_parents.iter()) {
            if ps.is_empty() {
                return Err(BigraphError::Malformed("parentless node or site".into()));
            }
            if !ps.iter().all(in_range) {
                return Err(BigraphError::Malformed("parent out of range".into()));
            }
            for p in ps {
                if let Place::Node(i) = *p {
                    if self.nodes[i].control.atomic {
                        return Err(BigraphError::AtomicViolation(
                            self.nodes[i].control.name.clone(),
                        ));
                    }
                }
            }
        }
        for node in &self.nodes {
            if node.ports.len() != node.control.arity {
                return Err(BigraphError::ArityMismatch {
                    control: node.control.name.clone(),
                    arity: node.control.arity,
                    given: node.ports.len(),
                });
            }
            if node.ports.iter().any(|&p| p >= self.links.len()) {
                return Err(BigraphError::Malformed("port out of range".into()));
            }
        }
        let mut seen = BTreeSet::new();
        for name in self.links.iter().flatten() {
            if !seen.insert(name) {
                return Err(BigraphError::Malformed(format!("duplicate outer name {name}")));
            }
        }
        // Acyclicity: Kahn over node-to-node parent edges.
        let mut pending: Vec<usize> = self
            .node_parents
            .iter()
            .map(|ps| ps.iter().filter(|p| matches!(p, Place::Node(_))).count())
            .collect();
        let mut kids: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, ps) in self.node_parents.iter().enumerate() {
            for p in ps {
                if let Place::Node(j) = *p {
                    kids[j].push(i);
                }
            }
        }
        let mut stack: Vec<usize> = (0..n).filter(|&i| pending[i] == 0).collect();
        let mut visited = 0;
        while let Some(i) = stack.pop() {
            visited += 1;
            for &k in &kids[i] {
                pending[k] -= 1;
                if pending[k] == 0 {
                    stack.push(k);
                }
            }
        }
        if visited != n {
            return Err(BigraphError::Malformed("place graph has a cycle".into()));
        }
        Ok(())
    }

    /// Appends `other` to `self`: nodes, sites and closed edges are disjoint,
    /// links with the same outer name are fused. Regions of `other` are shifted by
    /// `region_shift` and sites are appended after `self`'s sites.
    ///
    /// Returns the node offset applied to `other`'s nodes.
    pub(crate) fn absorb(
        &mut self,
        other: &Bigraph,
        region_shift: usize,
    ) -> Result<usize, BigraphError> {
        for node in &other.nodes {
            if let Some(mine) = self.nodes.iter().find(|n| n.control.name == node.control.name) {
                if mine.control != node.control {
                    return Err(BigraphError::SignatureMismatch(node.control.name.clone()));
                }
            }
        }
        let node_offset = self.nodes.len();
        let mut link_map = Vec::with_capacity(other.links.len());
        for name in &other.links {
            let target = match name {
                Some(x) => match self.outer_link(x) {
                    Some(l) => l,
                    None => {
                        self.links.push(Some(x.clone()));
                        self.links.len() - 1
                    }
                },
                None => {
                    self.links.push(None);
                    self.links.len() - 1
                }
            };
            link_map.push(target);
        }
        for (name, &l) in &other.inner {
            if self.inner.contains_key(name) {
                return Err(BigraphError::InnerNameClash(name.clone()));
            }
            self.inner.insert(name.clone(), link_map[l]);
        }
        let shift = |p: &Place| match *p {
            Place::Region(r) => Place::Region(r + region_shift),
            Place::Node(i) => Place::Node(i + node_offset),
        };
        for (node, ps) in other.nodes.iter().zip(&other.node_parents) {
            let mut node = node.clone();
            for p in &mut node.ports {
                *p = link_map[*p];
            }
            self.nodes.push(node);
            self.node_parents.push(ps.iter().map(shift).collect());
        }
        for ps in &other.site_parents {
            self.site_parents.push(ps.iter().map(shift).collect());
        }
        Ok(node_offset)
    }

    /// Replaces every occurrence of `Region(r)` in parent sets using `f`, which
    /// may expand one region into several parents.
    pub(crate) fn rewrite_region_parents<F>(&mut self, mut f: F)
    where
        F: FnMut(usize) -> Vec<Place>,
    {
        for ps in self.node_parents.iter_mut().chain(self.site_parents.iter_mut()) {
            let mut out = Vec::with_capacity(ps.len());
            for p in ps.iter() {
                match *p {
                    Place::Region(r) => out.extend(f(r)),
                    other => out.push(other),
                }
            }
            out.sort();
            out.dedup();
            *ps = out;
        }
    }
}

impl PartialEq for Bigraph {
    /// Abstract (isomorphism) equality.
    fn eq(&self, other: &Self) -> bool {
        crate::iso::iso_equal(self, other)
    }
}

impl Eq for Bigraph {}

impl fmt::Display for Bigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::frontend::printer::print_bigraph(self))
    }
}
