//! NNF Horn constraints.
//!
//! A constraint is a tree of conjunctions and guarded universal binders with
//! predicate goals at the leaves. Each root-to-leaf path is a flat Horn
//! clause. Subtrees are shared; every builder folds trivially true parts away.

mod assignment;
mod deps;

pub use assignment::{Assignment, SatContext};
pub use deps::{cut_vars, cut_vars_with, DependencyGraph};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::logic::{KVar, Pred, PredKind, Sort, SortEnv};
use crate::name::Name;
use crate::span::Span;

/// A binder `x:b` with hypothesis `p`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bind {
    pub name: Name,
    pub sort: Sort,
    pub pred: Pred,
}

impl Bind {
    pub fn new(name: impl Into<Name>, sort: Sort, pred: Pred) -> Self {
        Bind { name: name.into(), sort, pred }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    /// A goal; never a conjunction, never `true`.
    Goal(Pred, Option<Span>),
    /// Conjunction; the empty conjunction is `true`.
    And(Vec<Constraint>),
    Forall(Bind, Constraint),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Constraint(Arc<Node>);

impl fmt::Debug for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Constraint {
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn addr(&self) -> usize {
        Arc::as_ptr(&self.0) as *const () as usize
    }

    pub fn ptr_eq(&self, other: &Constraint) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn tt() -> Self {
        Constraint(Arc::new(Node::And(Vec::new())))
    }

    pub fn is_true(&self) -> bool {
        matches!(self.node(), Node::And(cs) if cs.is_empty())
    }

    /// A goal, split into one leaf per conjunct.
    pub fn goal(p: Pred, tag: Option<Span>) -> Self {
        let leaves: Vec<Constraint> =
            p.conjuncts().into_iter().map(|q| Constraint(Arc::new(Node::Goal(q, tag)))).collect();
        Constraint::and(leaves)
    }

    /// Conjunction, flattening nested conjunctions and dropping `true`.
    pub fn and(cs: impl IntoIterator<Item = Constraint>) -> Self {
        let mut out = Vec::new();
        for c in cs {
            match c.node() {
                Node::And(inner) => out.extend(inner.iter().cloned()),
                _ => out.push(c),
            }
        }
        if out.len() == 1 {
            out.pop().expect("one element")
        } else {
            Constraint(Arc::new(Node::And(out)))
        }
    }

    pub fn and2(a: Constraint, b: Constraint) -> Self {
        Constraint::and([a, b])
    }

    /// `∀x:b. p ⇒ c`; `true` when `c` is true, `p` is false, or `c` is a goal
    /// already among the conjuncts of `p`.
    pub fn forall(bind: Bind, body: Constraint) -> Self {
        if body.is_true() || bind.pred.is_false() {
            return Constraint::tt();
        }
        if let Node::Goal(g, _) = body.node() {
            if bind.pred.conjuncts().iter().any(|h| h == g) {
                return Constraint::tt();
            }
        }
        Constraint(Arc::new(Node::Forall(bind, body)))
    }

    /// All κ-variables, in hypotheses and goals.
    pub fn kvars(&self) -> BTreeSet<KVar> {
        let mut out = BTreeSet::new();
        self.visit(&mut |n| match n {
            Node::Goal(p, _) => out.extend(p.kvars()),
            Node::Forall(b, _) => out.extend(b.pred.kvars()),
            Node::And(_) => {}
        });
        out
    }

    pub fn mentions_kvar(&self, k: &KVar) -> bool {
        let mut memo = BTreeMap::new();
        self.mentions_memo(k, &mut memo)
    }

    fn mentions_memo(&self, k: &KVar, memo: &mut BTreeMap<usize, bool>) -> bool {
        if let Some(b) = memo.get(&self.addr()) {
            return *b;
        }
        let r = match self.node() {
            Node::Goal(p, _) => p.mentions_kvar(k),
            Node::And(cs) => cs.iter().any(|c| c.mentions_memo(k, memo)),
            Node::Forall(b, body) => b.pred.mentions_kvar(k) || body.mentions_memo(k, memo),
        };
        memo.insert(self.addr(), r);
        r
    }

    /// Visit each distinct node once.
    fn visit(&self, f: &mut dyn FnMut(&Node)) {
        let mut seen = BTreeSet::new();
        let mut stack = alloc::vec![self.clone()];
        while let Some(c) = stack.pop() {
            if !seen.insert(c.addr()) {
                continue;
            }
            f(c.node());
            match c.node() {
                Node::Goal(..) => {}
                Node::And(cs) => stack.extend(cs.iter().cloned()),
                Node::Forall(_, body) => stack.push(body.clone()),
            }
        }
    }

    /// Atomic formulas, hypotheses and goals, counted as a tree.
    pub fn atoms(&self) -> u64 {
        fn go(c: &Constraint, memo: &mut BTreeMap<usize, u64>) -> u64 {
            if let Some(n) = memo.get(&c.addr()) {
                return *n;
            }
            let n = match c.node() {
                Node::Goal(p, _) => p.atoms(),
                Node::And(cs) => cs.iter().fold(0u64, |acc, c| acc.saturating_add(go(c, memo))),
                Node::Forall(b, body) => b.pred.atoms().saturating_add(go(body, memo)),
            };
            memo.insert(c.addr(), n);
            n
        }
        go(self, &mut BTreeMap::new())
    }

    /// One clause per root-to-leaf path; `Flat(true)` is empty.
    pub fn flatten(&self) -> Vec<FlatClause> {
        fn go(c: &Constraint, binders: &mut Vec<Bind>, out: &mut Vec<FlatClause>) {
            match c.node() {
                Node::Goal(p, tag) => out.push(FlatClause { binders: binders.clone(), goal: p.clone(), tag: *tag }),
                Node::And(cs) => cs.iter().for_each(|c| go(c, binders, out)),
                Node::Forall(b, body) => {
                    binders.push(b.clone());
                    go(body, binders, out);
                    binders.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Number of flat clauses, without materializing them.
    pub fn clause_count(&self) -> u64 {
        fn go(c: &Constraint, memo: &mut BTreeMap<usize, u64>) -> u64 {
            if let Some(n) = memo.get(&c.addr()) {
                return *n;
            }
            let n = match c.node() {
                Node::Goal(..) => 1,
                Node::And(cs) => cs.iter().fold(0u64, |a, c| a.saturating_add(go(c, memo))),
                Node::Forall(_, body) => go(body, memo),
            };
            memo.insert(c.addr(), n);
            n
        }
        go(self, &mut BTreeMap::new())
    }

    /// Rewrite every hypothesis and goal, sharing results for shared
    /// subtrees. Builders re-fold the output.
    pub fn map_preds(&self, f: &mut dyn FnMut(Position, &Pred) -> Pred) -> Constraint {
        fn go(
            c: &Constraint,
            f: &mut dyn FnMut(Position, &Pred) -> Pred,
            memo: &mut BTreeMap<usize, Constraint>,
        ) -> Constraint {
            if let Some(r) = memo.get(&c.addr()) {
                return r.clone();
            }
            let r = match c.node() {
                Node::Goal(p, tag) => {
                    let q = f(Position::Goal, p);
                    if q.ptr_eq(p) {
                        c.clone()
                    } else {
                        Constraint::goal(q, *tag)
                    }
                }
                Node::And(cs) => {
                    let new: Vec<Constraint> = cs.iter().map(|x| go(x, f, memo)).collect();
                    if new.iter().zip(cs).all(|(a, b)| a.ptr_eq(b)) {
                        c.clone()
                    } else {
                        Constraint::and(new)
                    }
                }
                Node::Forall(b, body) => {
                    let p = f(Position::Hyp, &b.pred);
                    let body2 = go(body, f, memo);
                    if p.ptr_eq(&b.pred) && body2.ptr_eq(body) {
                        c.clone()
                    } else {
                        Constraint::forall(Bind::new(b.name.clone(), b.sort.clone(), p), body2)
                    }
                }
            };
            memo.insert(c.addr(), r.clone());
            r
        }
        go(self, f, &mut BTreeMap::new())
    }

    /// Substitute assigned κ-variables everywhere.
    pub fn apply(&self, sigma: &Assignment) -> Constraint {
        if sigma.is_empty() {
            return self.clone();
        }
        let mut memo = BTreeMap::new();
        self.map_preds(&mut |_, p| sigma.apply_memo(p, &mut memo))
    }

    /// Well-formedness: every hypothesis and goal sort-checks in its scope,
    /// and no κ-application occurs. Reports the first offending spot.
    pub fn wf(&self, env: &SortEnv) -> Result<(), WfError> {
        fn go(c: &Constraint, env: &mut SortEnv, path: &mut Vec<Name>) -> Result<(), WfError> {
            match c.node() {
                Node::Goal(p, tag) => env.check(p).map_err(|e| WfError {
                    message: format!("goal `{p}`: {e}"),
                    span: *tag,
                    path: path.clone(),
                }),
                Node::And(cs) => cs.iter().try_for_each(|c| go(c, env, path)),
                Node::Forall(b, body) => {
                    let mut inner = env.clone();
                    inner.bind(b.name.clone(), b.sort.clone());
                    inner.check(&b.pred).map_err(|e| WfError {
                        message: format!("hypothesis of `{}`: {e}", b.name),
                        span: None,
                        path: path.clone(),
                    })?;
                    path.push(b.name.clone());
                    let r = go(body, &mut inner, path);
                    path.pop();
                    r
                }
            }
        }
        go(self, &mut env.clone(), &mut Vec::new())
    }

    /// Well-formedness after replacing every κ-application by `true`.
    pub fn wf_modulo_kvars(&self, env: &SortEnv) -> Result<(), WfError> {
        self.map_preds(&mut |_, p| p.map_kapps(&mut |_, _| Some(Pred::tt()))).wf(env)
    }
}

/// Where a predicate sits in a constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Position {
    Hyp,
    Goal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WfError {
    pub message: String,
    pub span: Option<Span>,
    /// Binders enclosing the offending node, outermost first.
    pub path: Vec<Name>,
}

impl fmt::Display for WfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// `∀x₁:b₁. p₁ ⇒ … ⇒ ∀xₙ:bₙ. pₙ ⇒ goal`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlatClause {
    /// Outermost first.
    pub binders: Vec<Bind>,
    pub goal: Pred,
    pub tag: Option<Span>,
}

impl FlatClause {
    pub fn head(&self) -> &Pred {
        &self.goal
    }

    pub fn bodies(&self) -> Vec<Pred> {
        self.binders.iter().map(|b| b.pred.clone()).collect()
    }

    /// κ-variable applied in the head, if any.
    pub fn head_kvar(&self) -> Option<&KVar> {
        match self.goal.kind() {
            PredKind::KApp(k, _) => Some(k),
            _ => None,
        }
    }

    pub fn body_kvars(&self) -> BTreeSet<KVar> {
        let mut out = BTreeSet::new();
        for b in &self.binders {
            out.extend(b.pred.kvars());
        }
        out
    }

    pub fn kvars(&self) -> BTreeSet<KVar> {
        let mut out = self.body_kvars();
        out.extend(self.goal.kvars());
        out
    }

    pub fn to_constraint(&self) -> Constraint {
        self.binders
            .iter()
            .rev()
            .fold(Constraint::goal(self.goal.clone(), self.tag), |acc, b| Constraint::forall(b.clone(), acc))
    }

    /// The clause as a closed formula (given its free globals).
    pub fn to_pred(&self) -> Pred {
        self.binders.iter().rev().fold(self.goal.clone(), |acc, b| {
            Pred::forall(b.name.clone(), b.sort.clone(), Pred::imp(b.pred.clone(), acc))
        })
    }

    pub fn apply(&self, sigma: &Assignment) -> FlatClause {
        let mut memo = BTreeMap::new();
        FlatClause {
            binders: self
                .binders
                .iter()
                .map(|b| Bind::new(b.name.clone(), b.sort.clone(), sigma.apply_memo(&b.pred, &mut memo)))
                .collect(),
            goal: sigma.apply_memo(&self.goal, &mut memo),
            tag: self.tag,
        }
    }

    /// Replace the goal.
    pub fn with_goal(&self, goal: Pred) -> FlatClause {
        FlatClause { binders: self.binders.clone(), goal, tag: self.tag }
    }
}

impl fmt::Display for FlatClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.binders {
            write!(f, "forall {}:{}. ", b.name, b.sort)?;
            if b.pred.is_true() {
                continue;
            }
            write_hyp(f, &b.pred)?;
            f.write_str(" => ")?;
        }
        write!(f, "{}", self.goal)
    }
}

fn write_hyp(f: &mut fmt::Formatter<'_>, p: &Pred) -> fmt::Result {
    match p.kind() {
        PredKind::Imp(..) | PredKind::Iff(..) | PredKind::Exists(..) | PredKind::Forall(..) => {
            write!(f, "({p})")
        }
        _ => write!(f, "{p}"),
    }
}

/// Clauses whose head applies `k`.
pub fn defns(cs: &[FlatClause], k: &KVar) -> Vec<FlatClause> {
    cs.iter().filter(|c| c.goal.mentions_kvar(k)).cloned().collect()
}

/// Clauses whose head does not apply `k`.
pub fn uses(cs: &[FlatClause], k: &KVar) -> Vec<FlatClause> {
    cs.iter().filter(|c| !c.goal.mentions_kvar(k)).cloned().collect()
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(c: &Constraint, f: &mut fmt::Formatter<'_>, indent: usize) -> fmt::Result {
            match c.node() {
                Node::Goal(p, _) => write!(f, "{:indent$}{p}", ""),
                Node::And(cs) if cs.is_empty() => write!(f, "{:indent$}true", ""),
                Node::And(cs) => {
                    for (i, c) in cs.iter().enumerate() {
                        if i > 0 {
                            f.write_str("\n")?;
                        }
                        go(c, f, indent)?;
                    }
                    Ok(())
                }
                Node::Forall(b, body) => {
                    write!(f, "{:indent$}forall {}:{}. ", "", b.name, b.sort)?;
                    write_hyp(f, &b.pred)?;
                    f.write_str(" =>\n")?;
                    go(body, f, indent + 2)
                }
            }
        }
        go(self, f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::RelOp;
    use alloc::vec;

    fn var(x: &str) -> Pred {
        Pred::var(x)
    }

    fn le(a: Pred, b: Pred) -> Pred {
        Pred::rel(RelOp::Le, a, b)
    }

    fn kv(name: &str) -> KVar {
        KVar::new(name.into(), vec![(Name::new(&alloc::format!("{name}.z")), Sort::Int)])
    }

    fn kapp(k: &KVar, x: &str) -> Pred {
        Pred::kapp(k.clone(), vec![x.into()])
    }

    #[test]
    fn flatten_splits_conjunctive_goals() {
        let g1 = le(Pred::int(0), var("x"));
        let g2 = le(var("x"), Pred::int(9));
        let c = Constraint::forall(
            Bind::new("x", Sort::Int, Pred::app("p", vec![var("x")])),
            Constraint::goal(Pred::and(g1.clone(), g2.clone()), None),
        );
        let fl = c.flatten();
        assert_eq!(fl.len(), 2);
        assert_eq!(fl[0].goal, g1);
        assert_eq!(fl[1].goal, g2);
        assert_eq!(fl[0].binders, fl[1].binders);
    }

    #[test]
    fn flatten_leaf_and_true() {
        let g = le(Pred::int(0), Pred::int(1));
        let fl = Constraint::goal(g.clone(), None).flatten();
        assert_eq!(fl.len(), 1);
        assert!(fl[0].binders.is_empty());
        assert!(Constraint::tt().flatten().is_empty());
    }

    #[test]
    fn head_and_bodies() {
        let p = var("p");
        let q = var("q");
        let cl = FlatClause {
            binders: vec![Bind::new("x", Sort::Int, p.clone()), Bind::new("y", Sort::Int, q.clone())],
            goal: var("g"),
            tag: None,
        };
        assert_eq!(*cl.head(), var("g"));
        assert_eq!(cl.bodies(), vec![p, q]);
        let empty = FlatClause { binders: vec![], goal: var("g"), tag: None };
        assert!(empty.bodies().is_empty());
    }

    #[test]
    fn wf_examples() {
        let env = SortEnv::new();
        let ok = Constraint::forall(
            Bind::new("x", Sort::Int, le(Pred::int(0), var("x"))),
            Constraint::goal(le(Pred::int(0), Pred::add(var("x"), Pred::int(1))), None),
        );
        assert!(ok.wf(&env).is_ok());
        let k = kv("k");
        let bad = Constraint::forall(Bind::new("x", Sort::Int, Pred::tt()), Constraint::goal(kapp(&k, "x"), None));
        assert!(bad.wf(&env).is_err());
        assert!(bad.wf_modulo_kvars(&env).is_ok());
        let unbound = Constraint::goal(Pred::rel(RelOp::Lt, var("x"), var("y")), None);
        assert!(unbound.wf(&env).is_err());
    }

    #[test]
    fn apply_examples() {
        let k = kv("k");
        let mut sigma = Assignment::new();
        sigma.insert(k.clone(), le(Pred::int(0), var("k.z")));
        assert_eq!(sigma.apply_pred(&kapp(&k, "v")), le(Pred::int(0), var("v")));

        let c = Constraint::forall(Bind::new("x", Sort::Int, kapp(&k, "x")), Constraint::goal(var("g"), None));
        assert!(c.apply(&Assignment::new()).ptr_eq(&c));

        let mut sigma = Assignment::new();
        sigma.insert(k.clone(), Pred::eq(var("k.z"), Pred::int(1)));
        let expected = Constraint::forall(
            Bind::new("x", Sort::Int, Pred::eq(var("x"), Pred::int(1))),
            Constraint::goal(var("g"), None),
        );
        assert_eq!(c.apply(&sigma), expected);
    }

    #[test]
    fn defns_and_uses_partition() {
        let k = kv("k");
        let c = Constraint::and2(
            Constraint::forall(Bind::new("v", Sort::Int, var("p")), Constraint::goal(kapp(&k, "v"), None)),
            Constraint::forall(Bind::new("y", Sort::Int, kapp(&k, "y")), Constraint::goal(var("g"), None)),
        );
        let fl = c.flatten();
        assert_eq!(defns(&fl, &k), vec![fl[0].clone()]);
        assert_eq!(uses(&fl, &k), vec![fl[1].clone()]);
        let other = kv("other");
        assert!(defns(&fl, &other).is_empty());
        assert_eq!(uses(&fl, &other), fl);
    }

    #[test]
    fn builders_fold_trivial_parts() {
        let p = le(Pred::int(0), var("x"));
        let c = Constraint::forall(Bind::new("x", Sort::Int, p.clone()), Constraint::goal(p.clone(), None));
        assert!(c.is_true());
        let c = Constraint::forall(Bind::new("x", Sort::Int, Pred::ff()), Constraint::goal(var("g"), None));
        assert!(c.is_true());
        assert!(Constraint::goal(Pred::tt(), None).is_true());
        assert!(Constraint::and([Constraint::tt(), Constraint::tt()]).is_true());
    }
}
