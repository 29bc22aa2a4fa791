//! Abstract bigraphs: controls, place and link graphs, and the algebra used to
//! build them.

mod control;
mod graph;
mod ops;

pub use control::{Control, Param, ParamSort, Signature};
pub use graph::{Bigraph, Child, Interface, Name, Node, Place};
pub use ops::{close, compose, make_atom, merge, nest, parallel, share};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BigraphError {
    #[error("control {control} has arity {arity} but {given} names were given")]
    ArityMismatch {
        control: String,
        arity: usize,
        given: usize,
    },
    #[error("control {control} expects parameters ({expected}) but got ({found})")]
    SortMismatch {
        control: String,
        expected: String,
        found: String,
    },
    #[error("width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("atomic control {0} cannot contain children")]
    AtomicViolation(String),
    #[error("unknown name {0}")]
    UnknownName(String),
    #[error("cannot close idle name {0}")]
    EmptyClosure(String),
    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("control {0} is used with two different definitions")]
    SignatureMismatch(String),
    #[error("inner name {0} appears on both operands")]
    InnerNameClash(String),
    #[error("interfaces {outer} and {inner} cannot be composed")]
    InterfaceMismatch { outer: Interface, inner: Interface },
    #[error("region {0} of a shared bigraph is placed nowhere")]
    OrphanRegion(usize),
    #[error("bigraph is not ground")]
    NotGround,
    #[error("malformed bigraph: {0}")]
    Malformed(String),
}

impl Bigraph {
    /// A bigraph is ground when it has no sites and no inner names.
    pub fn is_ground(&self) -> bool {
        self.sites() == 0 && self.inner.is_empty()
    }

    /// Solidity, the condition every rule left-hand side must satisfy:
    ///
    /// * every region contains at least one node and no outer name is idle;
    /// * no two sites or inner names are siblings;
    /// * no site has a region as a parent;
    /// * no outer name is linked to an inner name.
    pub fn is_solid(&self) -> bool {
        let children = self.children_table();
        let regions_inhabited = (0..self.regions)
            .all(|r| children[r].iter().any(|c| matches!(c, Child::Node(_))));
        if !regions_inhabited {
            return false;
        }
        let deg = self.link_degrees();
        if self
            .links
            .iter()
            .enumerate()
            .any(|(l, name)| name.is_some() && deg[l] == 0)
        {
            return false;
        }
        let sibling_sites = children
            .iter()
            .any(|cs| cs.iter().filter(|c| matches!(c, Child::Site(_))).count() > 1);
        if sibling_sites {
            return false;
        }
        let mut inner_per_link = vec![0usize; self.links.len()];
        for &l in self.inner.values() {
            inner_per_link[l] += 1;
        }
        if inner_per_link.iter().any(|&c| c > 1) {
            return false;
        }
        if self
            .site_parents
            .iter()
            .any(|ps| ps.iter().any(|p| matches!(p, Place::Region(_))))
        {
            return false;
        }
        !self.inner.values().any(|&l| self.links[l].is_some())
    }
}
