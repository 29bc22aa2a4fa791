use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// Sort of a control parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParamSort {
    Int,
    Float,
    Str,
}

impl fmt::Display for ParamSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamSort::Int => f.write_str("int"),
            ParamSort::Float => f.write_str("float"),
            ParamSort::Str => f.write_str("string"),
        }
    }
}

/// A parameter value carried by a node of a parameterised control.
///
/// Floats compare bit-exactly, so `Param` is `Eq + Hash + Ord`.
#[derive(Debug, Clone)]
pub enum Param {
    Int(i64),
    Float(f64),
    Str(String),
}

impl Param {
    pub fn sort(&self) -> ParamSort {
        match self {
            Param::Int(_) => ParamSort::Int,
            Param::Float(_) => ParamSort::Float,
            Param::Str(_) => ParamSort::Str,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Param::Int(_) => 0,
            Param::Float(_) => 1,
            Param::Str(_) => 2,
        }
    }
}

impl PartialEq for Param {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Param::Int(a), Param::Int(b)) => a == b,
            (Param::Float(a), Param::Float(b)) => a.to_bits() == b.to_bits(),
            (Param::Str(a), Param::Str(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Param {}

impl Hash for Param {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Param::Int(v) => v.hash(state),
            Param::Float(v) => v.to_bits().hash(state),
            Param::Str(v) => v.hash(state),
        }
    }
}

impl PartialOrd for Param {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Param {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Param::Int(a), Param::Int(b)) => a.cmp(b),
            (Param::Float(a), Param::Float(b)) => a.total_cmp(b),
            (Param::Str(a), Param::Str(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Int(v) => write!(f, "{v}"),
            // `{:?}` is the shortest representation that parses back to the same bits.
            Param::Float(v) => write!(f, "{v:?}"),
            Param::Str(v) => write!(f, "{v:?}"),
        }
    }
}

/// A declared entity type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Control {
    pub name: String,
    pub arity: usize,
    pub atomic: bool,
    pub param_sorts: Vec<ParamSort>,
}

impl Control {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Control {
            name: name.into(),
            arity,
            atomic: false,
            param_sorts: Vec::new(),
        }
    }

    pub fn atomic(name: impl Into<String>, arity: usize) -> Self {
        Control {
            atomic: true,
            ..Control::new(name, arity)
        }
    }

    pub fn with_params(mut self, sorts: Vec<ParamSort>) -> Self {
        self.param_sorts = sorts;
        self
    }

    pub fn is_parameterised(&self) -> bool {
        !self.param_sorts.is_empty()
    }
}

impl fmt::Display for Control {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// The set of controls available to a model, keyed by name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    controls: BTreeMap<String, Arc<Control>>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a control; returns `false` (and leaves the signature unchanged) if the
    /// name is already taken.
    pub fn insert(&mut self, control: Control) -> bool {
        if self.controls.contains_key(&control.name) {
            return false;
        }
        self.controls.insert(control.name.clone(), Arc::new(control));
        true
    }

    /// Replaces the control of the same name.
    pub fn replace(&mut self, control: Control) {
        self.controls.insert(control.name.clone(), Arc::new(control));
    }

    pub fn get(&self, name: &str) -> Option<&Arc<Control>> {
        self.controls.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.controls.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.controls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.controls.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<Control>> {
        self.controls.values()
    }
}

impl FromIterator<Control> for Signature {
    fn from_iter<I: IntoIterator<Item = Control>>(iter: I) -> Self {
        let mut sig = Signature::new();
        for c in iter {
            sig.replace(c);
        }
        sig
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_params_compare_bitwise() {
        assert_eq!(Param::Float(0.1), Param::Float(0.1));
        assert_ne!(Param::Float(0.0), Param::Float(-0.0));
        assert_ne!(Param::Int(1), Param::Float(1.0));
    }

    #[test]
    fn float_display_round_trips() {
        let v = 0.1 + 0.2;
        let shown = Param::Float(v).to_string();
        assert_eq!(shown.parse::<f64>().unwrap().to_bits(), v.to_bits());
        assert_eq!(Param::Float(2.0).to_string(), "2.0");
    }

    #[test]
    fn signature_rejects_duplicates() {
        let mut sig = Signature::new();
        assert!(sig.insert(Control::new("Room", 0)));
        assert!(!sig.insert(Control::atomic("Room", 1)));
        assert_eq!(sig.get("Room").unwrap().arity, 0);
    }
}
