use std::collections::BTreeMap;
use std::sync::Arc;

use super::control::{Control, Param};
use super::graph::{Bigraph, Name, Node, Place};
use super::BigraphError;

impl Bigraph {
    /// `1`: a single empty region.
    pub fn unit() -> Self {
        Bigraph {
            regions: 1,
            ..Bigraph::default()
        }
    }

    /// `id`: one region containing one site.
    pub fn id() -> Self {
        Bigraph {
            regions: 1,
            site_parents: vec![vec![Place::Region(0)]],
            ..Bigraph::default()
        }
    }

    /// `{x, ...}`: idle outer names and nothing else (width 0).
    pub fn idle<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<Name>,
    {
        let mut b = Bigraph::default();
        for n in names {
            let n = n.into();
            if b.outer_link(&n).is_none() {
                b.links.push(Some(n));
            }
        }
        b
    }

    /// `id{x, ...}`: the identity link graph, each inner name wired to the outer
    /// name of the same identifier.
    pub fn id_link<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<Name>,
    {
        let mut b = Bigraph::default();
        for n in names {
            let n = n.into();
            if b.outer_link(&n).is_none() {
                b.links.push(Some(n.clone()));
                b.inner.insert(n, b.links.len() - 1);
            }
        }
        b
    }
}

/// A single node of `control` under one region. Ports are joined to the given
/// outer names in order; repeated names share a link. Non-atomic controls get
/// one site under the node (the implicit `.id`).
pub fn make_atom(
    control: Arc<Control>,
    params: Vec<Param>,
    names: &[Name],
) -> Result<Bigraph, BigraphError> {
    if names.len() != control.arity {
        return Err(BigraphError::ArityMismatch {
            control: control.name.clone(),
            arity: control.arity,
            given: names.len(),
        });
    }
    let sorts_match = params.len() == control.param_sorts.len()
        && params
            .iter()
            .zip(&control.param_sorts)
            .all(|(p, s)| p.sort() == *s);
    if !sorts_match {
        let expected: Vec<String> = control.param_sorts.iter().map(|s| s.to_string()).collect();
        let found: Vec<String> = params.iter().map(|p| p.sort().to_string()).collect();
        return Err(BigraphError::SortMismatch {
            control: control.name.clone(),
            expected: expected.join(", "),
            found: found.join(", "),
        });
    }
    let mut b = Bigraph::unit();
    let mut ports = Vec::with_capacity(names.len());
    for n in names {
        let l = match b.outer_link(n) {
            Some(l) => l,
            None => {
                b.links.push(Some(n.clone()));
                b.links.len() - 1
            }
        };
        ports.push(l);
    }
    let atomic = control.atomic;
    b.nodes.push(Node {
        control,
        params,
        ports,
    });
    b.node_parents.push(vec![Place::Region(0)]);
    if !atomic {
        b.site_parents.push(vec![Place::Node(0)]);
    }
    Ok(b)
}

fn is_plain_unit(b: &Bigraph) -> bool {
    b.regions == 1 && b.nodes.is_empty() && b.sites() == 0 && b.links.is_empty()
}

fn first_atomic(b: &Bigraph) -> Option<String> {
    b.nodes
        .iter()
        .find(|n| n.control.atomic)
        .map(|n| n.control.name.clone())
}

/// Grafts `inner` into the holes of `host`. The regions of `inner` (numbered
/// from `host.regions`) are replaced by the parents of the host sites given by
/// `placement`.
fn graft(
    host: &Bigraph,
    inner: &Bigraph,
    placement: impl Fn(usize) -> Vec<usize>,
) -> Result<Bigraph, BigraphError> {
    let mut out = host.clone();
    let holes = std::mem::take(&mut out.site_parents);
    let base = out.regions;
    out.absorb(inner, base)?;
    out.rewrite_region_parents(|r| {
        if r < base {
            vec![Place::Region(r)]
        } else {
            placement(r - base)
                .into_iter()
                .flat_map(|s| holes[s].iter().copied())
                .collect()
        }
    });
    if let Some(a) = out
        .node_parents
        .iter()
        .chain(out.site_parents.iter())
        .flatten()
        .find_map(|p| match *p {
            Place::Node(i) if out.nodes[i].control.atomic => Some(out.nodes[i].control.name.clone()),
            _ => None,
        })
    {
        return Err(BigraphError::AtomicViolation(a));
    }
    out.normalise();
    Ok(out)
}

/// Nesting `outer.inner`: the regions of `inner` fill the sites of `outer`
/// positionally and names are shared.
pub fn nest(outer: &Bigraph, inner: &Bigraph) -> Result<Bigraph, BigraphError> {
    if outer.sites() == 0 && outer.regions == 1 && is_plain_unit(inner) {
        // `A.1` for an atomic `A` is just `A`.
        return Ok(outer.clone());
    }
    if outer.sites() != inner.regions {
        if outer.sites() == 0 {
            if let Some(a) = first_atomic(outer) {
                return Err(BigraphError::AtomicViolation(a));
            }
        }
        return Err(BigraphError::WidthMismatch {
            expected: outer.sites(),
            found: inner.regions,
        });
    }
    graft(outer, inner, |k| vec![k])
}

/// Merge product `a | b`: both operands side by side in a single region.
pub fn merge(a: &Bigraph, b: &Bigraph) -> Result<Bigraph, BigraphError> {
    let mut out = a.clone();
    out.absorb(b, a.regions)?;
    out.rewrite_region_parents(|_| vec![Place::Region(0)]);
    out.regions = (a.regions + b.regions).min(1);
    out.normalise();
    Ok(out)
}

/// Parallel product `a || b`: regions are juxtaposed, names are shared.
pub fn parallel(a: &Bigraph, b: &Bigraph) -> Result<Bigraph, BigraphError> {
    let mut out = a.clone();
    out.absorb(b, a.regions)?;
    out.regions = a.regions + b.regions;
    out.normalise();
    Ok(out)
}

/// Closure `/x b`: the link of outer name `x` becomes a closed edge.
pub fn close(name: &str, b: &Bigraph) -> Result<Bigraph, BigraphError> {
    let l = b
        .outer_link(name)
        .ok_or_else(|| BigraphError::UnknownName(name.to_string()))?;
    if b.link_degrees()[l] == 0 {
        return Err(BigraphError::EmptyClosure(name.to_string()));
    }
    let mut out = b.clone();
    out.links[l] = None;
    Ok(out)
}

/// `share contents by (placement, site_count) in host`: region `k` of
/// `contents` is placed under every host site in `placement[k]`, which gives its
/// roots several parents when the set has more than one element.
pub fn share(
    contents: &Bigraph,
    placement: &[Vec<usize>],
    site_count: usize,
    host: &Bigraph,
) -> Result<Bigraph, BigraphError> {
    if host.sites() != site_count {
        return Err(BigraphError::WidthMismatch {
            expected: site_count,
            found: host.sites(),
        });
    }
    if placement.len() != contents.regions {
        return Err(BigraphError::WidthMismatch {
            expected: contents.regions,
            found: placement.len(),
        });
    }
    if let Some(&index) = placement.iter().flatten().find(|&&s| s >= site_count) {
        return Err(BigraphError::IndexOutOfRange {
            index,
            bound: site_count,
        });
    }
    let occupied = contents.children_table();
    for (k, sites) in placement.iter().enumerate() {
        if sites.is_empty() && !occupied[k].is_empty() {
            return Err(BigraphError::OrphanRegion(k));
        }
    }
    graft(host, contents, |k| placement[k].clone())
}

/// Categorical composition `outer ∘ inner`: requires the inner interface of
/// `outer` to equal the outer interface of `inner`. Outer names of `inner` are
/// joined to the links of the equally named inner names of `outer`.
pub fn compose(outer: &Bigraph, inner: &Bigraph) -> Result<Bigraph, BigraphError> {
    if outer.sites() != inner.regions || outer.inner_names() != inner.outer_names() {
        return Err(BigraphError::InterfaceMismatch {
            outer: outer.inner_interface(),
            inner: inner.outer_interface(),
        });
    }
    let mut out = Bigraph {
        nodes: outer.nodes.clone(),
        node_parents: outer.node_parents.clone(),
        site_parents: Vec::new(),
        regions: outer.regions,
        links: outer.links.clone(),
        inner: BTreeMap::new(),
    };
    let link_map: Vec<usize> = inner
        .links
        .iter()
        .map(|name| match name {
            Some(x) => outer.inner[x],
            None => {
                out.links.push(None);
                out.links.len() - 1
            }
        })
        .collect();
    let offset = out.nodes.len();
    let holes = &outer.site_parents;
    let lift = |ps: &Vec<Place>| -> Vec<Place> {
        ps.iter()
            .flat_map(|p| match *p {
                Place::Region(r) => holes[r].clone(),
                Place::Node(i) => vec![Place::Node(i + offset)],
            })
            .collect()
    };
    for (node, ps) in inner.nodes.iter().zip(&inner.node_parents) {
        let mut node = node.clone();
        for p in &mut node.ports {
            *p = link_map[*p];
        }
        out.nodes.push(node);
        out.node_parents.push(lift(ps));
    }
    out.site_parents = inner.site_parents.iter().map(lift).collect();
    out.inner = inner
        .inner
        .iter()
        .map(|(n, &l)| (n.clone(), link_map[l]))
        .collect();
    out.normalise();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigraph::ParamSort;
    use crate::iso_equal;

    fn ctrl(name: &str, arity: usize, atomic: bool) -> Arc<Control> {
        Arc::new(if atomic {
            Control::atomic(name, arity)
        } else {
            Control::new(name, arity)
        })
    }

    fn atom(c: &Arc<Control>, names: &[&str]) -> Bigraph {
        let names: Vec<Name> = names.iter().map(|s| s.to_string()).collect();
        make_atom(c.clone(), vec![], &names).unwrap()
    }

    #[test]
    fn make_atom_device() {
        let device = ctrl("Device", 1, true);
        let b = atom(&device, &["x"]);
        assert_eq!(b.outer_interface().to_string(), "<1, {x}>");
        assert_eq!(b.node_count(), 1);
        assert!(b.is_ground());
    }

    #[test]
    fn make_atom_errors() {
        let device = ctrl("Device", 1, true);
        let err = make_atom(device, vec![], &["x".into(), "y".into()]).unwrap_err();
        assert!(matches!(err, BigraphError::ArityMismatch { .. }));
        let nat = Arc::new(Control::atomic("Nat", 0).with_params(vec![ParamSort::Int]));
        let err = make_atom(nat.clone(), vec![Param::Float(1.0)], &[]).unwrap_err();
        assert!(matches!(err, BigraphError::SortMismatch { .. }));
        assert!(make_atom(nat, vec![Param::Int(3)], &[]).is_ok());
    }

    #[test]
    fn non_atomic_atom_has_site() {
        let room = ctrl("Room", 0, false);
        let b = atom(&room, &[]);
        assert_eq!(b.sites(), 1);
        assert!(!b.is_ground());
        let closed = nest(&b, &Bigraph::unit()).unwrap();
        assert!(closed.is_ground());
        assert_eq!(closed.node_count(), 1);
    }

    #[test]
    fn nest_under_atomic_fails() {
        let adult = ctrl("Adult", 0, true);
        let child = ctrl("Child", 0, true);
        let err = nest(&atom(&adult, &[]), &atom(&child, &[])).unwrap_err();
        assert_eq!(err, BigraphError::AtomicViolation("Adult".into()));
        // `.1` under an atomic control is tolerated.
        assert!(nest(&atom(&adult, &[]), &Bigraph::unit()).is_ok());
    }

    #[test]
    fn merge_and_unit() {
        let adult = ctrl("Adult", 0, true);
        let child = ctrl("Child", 0, true);
        let a = atom(&adult, &[]);
        let c = atom(&child, &[]);
        let ac = merge(&a, &c).unwrap();
        let ca = merge(&c, &a).unwrap();
        assert!(iso_equal(&ac, &ca));
        assert!(iso_equal(&merge(&a, &Bigraph::unit()).unwrap(), &a));
        assert_eq!(ac.regions(), 1);
    }

    #[test]
    fn merge_shares_names() {
        let l = ctrl("L", 1, true);
        let b = merge(&atom(&l, &["x"]), &atom(&l, &["x"])).unwrap();
        assert_eq!(b.node_count(), 2);
        assert_eq!(b.link_count(), 1);
        assert_eq!(b.link_ports(0).len(), 2);
    }

    #[test]
    fn parallel_widths() {
        let c = ctrl("C", 1, false);
        let d = ctrl("D", 1, false);
        let b = parallel(&atom(&c, &["x"]), &atom(&d, &["x"])).unwrap();
        assert_eq!(b.regions(), 2);
        assert_eq!(b.sites(), 2);
        assert_eq!(b.link_count(), 1);
        let w = parallel(&b, &Bigraph::unit()).unwrap();
        assert_eq!(w.regions(), 3);
    }

    #[test]
    fn closure() {
        let device = ctrl("Device", 1, true);
        let d = atom(&device, &["x"]);
        let closed = close("x", &d).unwrap();
        assert!(closed.outer_names().is_empty());
        assert_eq!(closed.edge_count(), 1);
        assert_eq!(
            close("z", &d).unwrap_err(),
            BigraphError::UnknownName("z".into())
        );
        let idle = Bigraph::idle(["y"]);
        assert_eq!(
            close("y", &idle).unwrap_err(),
            BigraphError::EmptyClosure("y".into())
        );
    }

    #[test]
    fn share_places_under_several_sites() {
        let adult = ctrl("Adult", 0, true);
        let child = ctrl("Child", 0, true);
        let room = ctrl("Room", 0, false);
        let camera = ctrl("Camera", 0, false);
        let cams = merge(&atom(&camera, &[]), &atom(&camera, &[])).unwrap();
        let host = nest(&atom(&room, &[]), &cams).unwrap();
        let contents = parallel(&atom(&adult, &[]), &atom(&child, &[])).unwrap();
        let b = share(&contents, &[vec![0, 1], vec![1]], 2, &host).unwrap();
        assert!(b.is_ground());
        assert!(!b.is_forest());
        let adult_idx = b.nodes().iter().position(|n| n.control.name == "Adult").unwrap();
        assert_eq!(b.node_parents(adult_idx).len(), 2);
        b.check().unwrap();

        let err = share(&atom(&adult, &[]), &[vec![0, 2]], 2, &host).unwrap_err();
        assert_eq!(err, BigraphError::IndexOutOfRange { index: 2, bound: 2 });
    }

    #[test]
    fn singleton_share_is_nesting() {
        let room = ctrl("Room", 0, false);
        let adult = ctrl("Adult", 0, true);
        let host = atom(&room, &[]);
        let a = atom(&adult, &[]);
        let shared = share(&a, &[vec![0]], 1, &host).unwrap();
        assert!(shared.is_forest());
        assert!(iso_equal(&shared, &nest(&host, &a).unwrap()));
    }

    #[test]
    fn compose_joins_names() {
        let a = ctrl("A", 1, false);
        let b = ctrl("B", 1, true);
        let outer = parallel(&atom(&a, &["y"]), &Bigraph::id_link(["x"])).unwrap();
        // outer: A{y}.id with inner name x linked to outer x
        let inner = atom(&b, &["x"]);
        let composed = compose(&outer, &inner).unwrap();
        assert!(composed.is_ground());
        assert_eq!(composed.outer_names().len(), 2);
        let err = compose(&atom(&a, &["y"]), &atom(&b, &["x"])).unwrap_err();
        assert!(matches!(err, BigraphError::InterfaceMismatch { .. }));
    }

    #[test]
    fn solidity() {
        let a = ctrl("A", 1, true);
        let room = ctrl("Room", 0, false);
        assert!(atom(&a, &["x"]).is_solid());
        assert!(!Bigraph::unit().is_solid());
        assert!(!Bigraph::id().is_solid());
        let with_idle = merge(&atom(&a, &["x"]), &Bigraph::idle(["y"])).unwrap();
        assert!(!with_idle.is_solid());
        let two_sites = nest(&atom(&room, &[]), &merge(&Bigraph::id(), &Bigraph::id()).unwrap())
            .unwrap();
        assert!(!two_sites.is_solid());
        let site_at_root = merge(&atom(&a, &["x"]), &Bigraph::id()).unwrap();
        assert!(!site_at_root.is_solid());
    }
}
