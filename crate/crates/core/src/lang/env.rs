use alloc::vec::Vec;

use super::syntax::RType;
use crate::logic::Sort;
use crate::name::Name;

/// Ordered term bindings and in-scope type variables. Lookup finds the most
/// recent binding.
#[derive(Clone, Debug, Default)]
pub struct TypeEnv {
    binds: Vec<(Name, RType)>,
    tyvars: Vec<Name>,
}

impl TypeEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: Name, t: RType) {
        self.binds.push((x, t));
    }

    pub fn pop(&mut self) -> Option<(Name, RType)> {
        self.binds.pop()
    }

    pub fn len(&self) -> usize {
        self.binds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.binds.is_empty()
    }

    pub fn truncate(&mut self, len: usize) {
        self.binds.truncate(len);
    }

    pub fn lookup(&self, x: &Name) -> Option<&RType> {
        self.binds.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t)
    }

    pub fn contains(&self, x: &Name) -> bool {
        self.lookup(x).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Name, RType)> {
        self.binds.iter()
    }

    pub fn push_tyvar(&mut self, a: Name) {
        self.tyvars.push(a);
    }

    pub fn pop_tyvar(&mut self) {
        self.tyvars.pop();
    }

    pub fn has_tyvar(&self, a: &Name) -> bool {
        self.tyvars.contains(a)
    }

    /// Base-typed binders in order, each with its sort. Shadowed bindings
    /// are skipped.
    pub fn base_binders(&self) -> Vec<(Name, Sort)> {
        let mut out: Vec<(Name, Sort)> = Vec::new();
        for (i, (x, t)) in self.binds.iter().enumerate() {
            if self.binds[i + 1..].iter().any(|(y, _)| y == x) {
                continue;
            }
            if let Some(s) = t.base_sort() {
                out.push((x.clone(), s));
            }
        }
        out
    }
}
