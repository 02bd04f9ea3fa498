use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use super::{Bind, FlatClause};
use crate::logic::{KVar, Pred, Renaming};
use crate::name::Name;

/// Finite map from κ-variables to predicates over their parameters.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    map: BTreeMap<Name, (KVar, Pred)>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(k: KVar, body: Pred) -> Self {
        let mut s = Self::new();
        s.insert(k, body);
        s
    }

    pub fn insert(&mut self, k: KVar, body: Pred) {
        self.map.insert(k.name().clone(), (k, body));
    }

    pub fn get(&self, k: &KVar) -> Option<&Pred> {
        self.map.get(k.name()).map(|(_, p)| p)
    }

    pub fn contains(&self, k: &KVar) -> bool {
        self.map.contains_key(k.name())
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&KVar, &Pred)> {
        self.map.values().map(|(k, p)| (k, p))
    }

    /// A solution: no stored predicate mentions a κ-variable.
    pub fn is_concrete(&self) -> bool {
        self.map.values().all(|(_, p)| !p.has_kvars())
    }

    /// `κ(ȳ)` becomes `σ(κ)[params := ȳ]` for every assigned κ.
    pub fn apply_pred(&self, p: &Pred) -> Pred {
        self.apply_memo(p, &mut BTreeMap::new())
    }

    /// As [`Assignment::apply_pred`], reusing results for nodes already
    /// rewritten with the same memo table.
    pub fn apply_memo(&self, p: &Pred, memo: &mut BTreeMap<usize, Pred>) -> Pred {
        if self.is_empty() {
            return p.clone();
        }
        if let Some(r) = memo.get(&p.addr()) {
            return r.clone();
        }
        let r = p.map_kapps(&mut |k, args| {
            let (kv, body) = self.map.get(k.name())?;
            assert_eq!(kv.arity(), args.len(), "arity mismatch applying {k}");
            let ren: Renaming = kv
                .params()
                .iter()
                .zip(args)
                .filter(|((z, _), y)| z != *y)
                .map(|((z, _), y)| (z.clone(), y.clone()))
                .collect();
            Some(body.subst(&ren))
        });
        memo.insert(p.addr(), r.clone());
        r
    }

    /// `σ₂ ∘ σ₁`: apply `self` to every body of `first`, then add the
    /// bindings of `self` not overridden by `first`.
    pub fn compose(&self, first: &Assignment) -> Assignment {
        let mut out = self.clone();
        for (k, body) in first.iter() {
            out.insert(k.clone(), self.apply_pred(body));
        }
        out
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, body) in self.iter() {
            write!(f, "{k}(")?;
            for (i, (z, s)) in k.params().iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{z}:{s}")?;
            }
            writeln!(f, ") := {body}")?;
        }
        Ok(())
    }
}

/// An assignment together with the hypotheses in scope at some point of a
/// constraint, outermost first.
#[derive(Clone, Debug, Default)]
pub struct SatContext {
    pub sigma: Assignment,
    pub hyps: Vec<Bind>,
}

impl SatContext {
    pub fn new(sigma: Assignment) -> Self {
        SatContext { sigma, hyps: Vec::new() }
    }

    /// Enter a binder; its hypothesis is stored with the assignment applied.
    pub fn extend(&mut self, b: &Bind) {
        let pred = self.sigma.apply_pred(&b.pred);
        self.hyps.push(Bind::new(b.name.clone(), b.sort.clone(), pred));
    }

    pub fn pop(&mut self) {
        self.hyps.pop();
    }

    /// The validity obligation for `goal` in this context.
    pub fn obligation(&self, goal: &Pred) -> FlatClause {
        FlatClause { binders: self.hyps.clone(), goal: self.sigma.apply_pred(goal), tag: None }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{RelOp, Sort};
    use alloc::vec;

    #[test]
    fn compose_applies_outer_to_inner() {
        let k1 = KVar::new("k1".into(), vec![("a".into(), Sort::Int)]);
        let k2 = KVar::new("k2".into(), vec![("b".into(), Sort::Int)]);
        let outer = Assignment::singleton(k2.clone(), Pred::rel(RelOp::Le, Pred::int(0), Pred::var("b")));
        let inner = Assignment::singleton(k1.clone(), Pred::kapp(k2.clone(), vec!["a".into()]));
        assert!(!inner.is_concrete());
        let both = outer.compose(&inner);
        assert!(both.is_concrete());
        assert_eq!(*both.get(&k1).unwrap(), Pred::rel(RelOp::Le, Pred::int(0), Pred::var("a")));
    }

    #[test]
    fn context_applies_assignment_to_hypotheses() {
        let k = KVar::new("k".into(), vec![("z".into(), Sort::Int)]);
        let sigma = Assignment::singleton(k.clone(), Pred::eq(Pred::var("z"), Pred::int(3)));
        let mut ctx = SatContext::new(sigma);
        ctx.extend(&Bind::new("x", Sort::Int, Pred::kapp(k, vec!["x".into()])));
        let ob = ctx.obligation(&Pred::var("g"));
        assert_eq!(ob.bodies(), vec![Pred::eq(Pred::var("x"), Pred::int(3))]);
    }
}
