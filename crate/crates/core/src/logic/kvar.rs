use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::hash::{Hash, Hasher};

use super::Sort;
use crate::name::Name;

/// A refinement variable: an unknown relation over its ordered parameters.
///
/// Identity is the name; two `KVar`s with the same name are the same
/// variable. The last parameter is conventionally the value variable.
#[derive(Clone)]
pub struct KVar(Arc<KVarData>);

#[derive(Debug)]
struct KVarData {
    name: Name,
    params: Vec<(Name, Sort)>,
}

impl KVar {
    /// Panics if parameter names repeat.
    pub fn new(name: Name, params: Vec<(Name, Sort)>) -> Self {
        for (i, (a, _)) in params.iter().enumerate() {
            assert!(params[i + 1..].iter().all(|(b, _)| a != b), "duplicate parameter {a} in kvar {name}");
        }
        KVar(Arc::new(KVarData { name, params }))
    }

    pub fn name(&self) -> &Name {
        &self.0.name
    }

    pub fn params(&self) -> &[(Name, Sort)] {
        &self.0.params
    }

    pub fn arity(&self) -> usize {
        self.0.params.len()
    }
}

impl PartialEq for KVar {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.name == other.0.name
    }
}

impl Eq for KVar {}

impl PartialOrd for KVar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for KVar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.name.cmp(&other.0.name)
    }
}

impl Hash for KVar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.name.hash(state)
    }
}

impl fmt::Debug for KVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "${}", self.0.name)
    }
}

impl fmt::Display for KVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "${}", self.0.name)
    }
}
