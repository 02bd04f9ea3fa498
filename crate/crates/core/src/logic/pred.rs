//! Refinement predicates.
//!
//! A single expression type covers terms and formulas; sort checking
//! (see [`super::sortck`]) separates them. Nodes are reference counted and
//! immutable, so substitution and elimination share unchanged subtrees.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::hash::{Hash, Hasher};

use super::{KVar, Sort};
use crate::name::{Name, RESERVED};

/// Variable renaming `x := y`, applied simultaneously.
pub type Renaming = BTreeMap<Name, Name>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
        }
    }
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Eq => "=",
            RelOp::Ne => "!=",
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PredKind {
    Bool(bool),
    Int(i64),
    Unit,
    Var(Name),
    Neg(Pred),
    Arith(ArithOp, Pred, Pred),
    Rel(RelOp, Pred, Pred),
    /// Uninterpreted function application.
    App(Name, Vec<Pred>),
    Not(Pred),
    And(Pred, Pred),
    Or(Pred, Pred),
    Imp(Pred, Pred),
    Iff(Pred, Pred),
    Exists(Name, Sort, Pred),
    Forall(Name, Sort, Pred),
    /// Refinement-variable application; arguments are variables.
    KApp(KVar, Vec<Name>),
}

#[derive(Clone)]
pub struct Pred(Arc<PredKind>);

impl PartialEq for Pred {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for Pred {}

impl PartialOrd for Pred {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pred {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            Ordering::Equal
        } else {
            self.0.cmp(&other.0)
        }
    }
}

impl Hash for Pred {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl fmt::Debug for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// Constructors are named after the connectives they build.
#[allow(clippy::should_implement_trait)]
impl Pred {
    pub fn new(kind: PredKind) -> Self {
        Pred(Arc::new(kind))
    }

    pub fn kind(&self) -> &PredKind {
        &self.0
    }

    /// Address of the shared node; stable while the node is alive.
    pub fn addr(&self) -> usize {
        Arc::as_ptr(&self.0) as *const () as usize
    }

    pub fn ptr_eq(&self, other: &Pred) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn tt() -> Self {
        Pred::new(PredKind::Bool(true))
    }

    pub fn ff() -> Self {
        Pred::new(PredKind::Bool(false))
    }

    pub fn boolean(b: bool) -> Self {
        Pred::new(PredKind::Bool(b))
    }

    pub fn int(n: i64) -> Self {
        Pred::new(PredKind::Int(n))
    }

    pub fn unit() -> Self {
        Pred::new(PredKind::Unit)
    }

    pub fn var(x: impl Into<Name>) -> Self {
        Pred::new(PredKind::Var(x.into()))
    }

    pub fn is_true(&self) -> bool {
        matches!(*self.0, PredKind::Bool(true))
    }

    pub fn is_false(&self) -> bool {
        matches!(*self.0, PredKind::Bool(false))
    }

    pub fn neg(a: Pred) -> Self {
        match a.kind() {
            PredKind::Int(n) if *n != i64::MIN => Pred::int(-n),
            _ => Pred::new(PredKind::Neg(a)),
        }
    }

    pub fn arith(op: ArithOp, a: Pred, b: Pred) -> Self {
        Pred::new(PredKind::Arith(op, a, b))
    }

    pub fn add(a: Pred, b: Pred) -> Self {
        Pred::arith(ArithOp::Add, a, b)
    }

    pub fn sub(a: Pred, b: Pred) -> Self {
        Pred::arith(ArithOp::Sub, a, b)
    }

    pub fn rel(op: RelOp, a: Pred, b: Pred) -> Self {
        Pred::new(PredKind::Rel(op, a, b))
    }

    pub fn eq(a: Pred, b: Pred) -> Self {
        Pred::rel(RelOp::Eq, a, b)
    }

    pub fn app(f: impl Into<Name>, args: Vec<Pred>) -> Self {
        Pred::new(PredKind::App(f.into(), args))
    }

    pub fn kapp(k: KVar, args: Vec<Name>) -> Self {
        assert_eq!(k.arity(), args.len(), "arity mismatch applying {k}");
        Pred::new(PredKind::KApp(k, args))
    }

    pub fn not(a: Pred) -> Self {
        match a.kind() {
            PredKind::Bool(b) => Pred::boolean(!b),
            _ => Pred::new(PredKind::Not(a)),
        }
    }

    pub fn and(a: Pred, b: Pred) -> Self {
        if a.is_false() || b.is_true() {
            a
        } else if b.is_false() || a.is_true() {
            b
        } else {
            Pred::new(PredKind::And(a, b))
        }
    }

    pub fn or(a: Pred, b: Pred) -> Self {
        if a.is_true() || b.is_false() {
            a
        } else if b.is_true() || a.is_false() {
            b
        } else {
            Pred::new(PredKind::Or(a, b))
        }
    }

    pub fn imp(a: Pred, b: Pred) -> Self {
        if a.is_false() || b.is_true() {
            Pred::tt()
        } else if a.is_true() {
            b
        } else {
            Pred::new(PredKind::Imp(a, b))
        }
    }

    pub fn iff(a: Pred, b: Pred) -> Self {
        match (a.kind(), b.kind()) {
            (PredKind::Bool(x), PredKind::Bool(y)) => Pred::boolean(x == y),
            _ => Pred::new(PredKind::Iff(a, b)),
        }
    }

    pub fn exists(x: Name, s: Sort, body: Pred) -> Self {
        if matches!(body.kind(), PredKind::Bool(_)) {
            body
        } else {
            Pred::new(PredKind::Exists(x, s, body))
        }
    }

    pub fn forall(x: Name, s: Sort, body: Pred) -> Self {
        if matches!(body.kind(), PredKind::Bool(_)) {
            body
        } else {
            Pred::new(PredKind::Forall(x, s, body))
        }
    }

    /// Right-nested conjunction; `true` when empty.
    pub fn conj(ps: impl IntoIterator<Item = Pred>) -> Self {
        let v: Vec<Pred> = ps.into_iter().collect();
        v.into_iter()
            .rev()
            .fold(None, |acc: Option<Pred>, p| {
                Some(match acc {
                    None => p,
                    Some(rest) => Pred::and(p, rest),
                })
            })
            .unwrap_or_else(Pred::tt)
    }

    /// Right-nested disjunction; `false` when empty.
    pub fn disj(ps: impl IntoIterator<Item = Pred>) -> Self {
        let v: Vec<Pred> = ps.into_iter().collect();
        v.into_iter()
            .rev()
            .fold(None, |acc: Option<Pred>, p| {
                Some(match acc {
                    None => p,
                    Some(rest) => Pred::or(p, rest),
                })
            })
            .unwrap_or_else(Pred::ff)
    }

    /// Top-level conjuncts, flattening nested `And`s. `true` has none.
    pub fn conjuncts(&self) -> Vec<Pred> {
        let mut out = Vec::new();
        let mut stack = alloc::vec![self.clone()];
        while let Some(p) = stack.pop() {
            match p.kind() {
                PredKind::And(a, b) => {
                    stack.push(b.clone());
                    stack.push(a.clone());
                }
                PredKind::Bool(true) => {}
                _ => out.push(p),
            }
        }
        out
    }

    fn children(&self) -> Vec<&Pred> {
        use PredKind::*;
        match self.kind() {
            Bool(_) | Int(_) | Unit | Var(_) | KApp(..) => Vec::new(),
            Neg(a) | Not(a) | Exists(_, _, a) | Forall(_, _, a) => alloc::vec![a],
            Arith(_, a, b) | Rel(_, a, b) | And(a, b) | Or(a, b) | Imp(a, b) | Iff(a, b) => {
                alloc::vec![a, b]
            }
            App(_, args) => args.iter().collect(),
        }
    }

    /// Rebuild this node with new children (same arity and order as
    /// [`Pred::children`]); returns `self` when every child is unchanged.
    fn with_children(&self, new: Vec<Pred>) -> Pred {
        let old = self.children();
        if old.len() == new.len() && old.iter().zip(&new).all(|(a, b)| a.ptr_eq(b)) {
            return self.clone();
        }
        use PredKind::*;
        let mut it = new.into_iter();
        let mut next = || it.next().expect("child count");
        match self.kind() {
            Neg(_) => Pred::neg(next()),
            Not(_) => Pred::not(next()),
            Exists(x, s, _) => Pred::exists(x.clone(), s.clone(), next()),
            Forall(x, s, _) => Pred::forall(x.clone(), s.clone(), next()),
            Arith(op, _, _) => {
                let a = next();
                Pred::arith(*op, a, next())
            }
            Rel(op, _, _) => {
                let a = next();
                Pred::rel(*op, a, next())
            }
            And(..) => {
                let a = next();
                Pred::and(a, next())
            }
            Or(..) => {
                let a = next();
                Pred::or(a, next())
            }
            Imp(..) => {
                let a = next();
                Pred::imp(a, next())
            }
            Iff(..) => {
                let a = next();
                Pred::iff(a, next())
            }
            App(f, args) => Pred::app(f.clone(), (0..args.len()).map(|_| next()).collect()),
            Bool(_) | Int(_) | Unit | Var(_) | KApp(..) => self.clone(),
        }
    }

    /// Free variables, including κ-application arguments.
    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        free_vars_rec(self, &mut BTreeSet::new(), &mut out, &mut BTreeSet::new());
        out
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        let mut seen = BTreeSet::new();
        let mut stack = alloc::vec![self.clone()];
        while let Some(p) = stack.pop() {
            if !seen.insert(p.addr()) {
                continue;
            }
            match p.kind() {
                PredKind::Var(x) => {
                    out.insert(x.clone());
                }
                PredKind::KApp(_, args) => out.extend(args.iter().cloned()),
                PredKind::Exists(x, _, _) | PredKind::Forall(x, _, _) => {
                    out.insert(x.clone());
                }
                _ => {}
            }
            stack.extend(p.children().into_iter().cloned());
        }
        out
    }

    /// Capture-avoiding simultaneous renaming.
    pub fn subst(&self, m: &Renaming) -> Pred {
        if m.is_empty() {
            return self.clone();
        }
        subst_rec(self, m, &mut BTreeMap::new())
    }

    pub fn subst1(&self, from: &Name, to: &Name) -> Pred {
        if from == to {
            return self.clone();
        }
        let mut m = Renaming::new();
        m.insert(from.clone(), to.clone());
        self.subst(&m)
    }

    /// Bottom-up rewrite of every κ-application; shared nodes are
    /// rewritten once.
    pub fn map_kapps(&self, f: &mut dyn FnMut(&KVar, &[Name]) -> Option<Pred>) -> Pred {
        fn go(p: &Pred, f: &mut dyn FnMut(&KVar, &[Name]) -> Option<Pred>, memo: &mut BTreeMap<usize, Pred>) -> Pred {
            if let Some(r) = memo.get(&p.addr()) {
                return r.clone();
            }
            let r = match p.kind() {
                PredKind::KApp(k, args) => f(k, args).unwrap_or_else(|| p.clone()),
                _ => {
                    let kids: Vec<Pred> = p.children().into_iter().map(|c| go(c, f, memo)).collect();
                    p.with_children(kids)
                }
            };
            memo.insert(p.addr(), r.clone());
            r
        }
        go(self, f, &mut BTreeMap::new())
    }

    /// κ-variables occurring in this predicate.
    pub fn kvars(&self) -> BTreeSet<KVar> {
        let mut out = BTreeSet::new();
        let mut seen = BTreeSet::new();
        let mut stack = alloc::vec![self.clone()];
        while let Some(p) = stack.pop() {
            if !seen.insert(p.addr()) {
                continue;
            }
            if let PredKind::KApp(k, _) = p.kind() {
                out.insert(k.clone());
            }
            stack.extend(p.children().into_iter().cloned());
        }
        out
    }

    pub fn mentions_kvar(&self, k: &KVar) -> bool {
        let mut seen = BTreeSet::new();
        let mut stack = alloc::vec![self.clone()];
        while let Some(p) = stack.pop() {
            if !seen.insert(p.addr()) {
                continue;
            }
            if let PredKind::KApp(k2, _) = p.kind() {
                if k2 == k {
                    return true;
                }
            }
            stack.extend(p.children().into_iter().cloned());
        }
        false
    }

    pub fn has_kvars(&self) -> bool {
        !self.kvars().is_empty()
    }

    /// Atomic formulas counted as a tree: a shared node contributes once per
    /// occurrence. Saturates at `u64::MAX`.
    pub fn atoms(&self) -> u64 {
        fn go(p: &Pred, memo: &mut BTreeMap<usize, u64>) -> u64 {
            if let Some(n) = memo.get(&p.addr()) {
                return *n;
            }
            let n = match p.kind() {
                PredKind::And(a, b) | PredKind::Or(a, b) | PredKind::Imp(a, b) | PredKind::Iff(a, b) => {
                    go(a, memo).saturating_add(go(b, memo))
                }
                PredKind::Not(a) | PredKind::Exists(_, _, a) | PredKind::Forall(_, _, a) => go(a, memo),
                PredKind::Bool(_) => 0,
                _ => 1,
            };
            memo.insert(p.addr(), n);
            n
        }
        go(self, &mut BTreeMap::new())
    }

    /// Number of distinct shared nodes.
    pub fn dag_size(&self) -> usize {
        let mut seen = BTreeSet::new();
        let mut stack = alloc::vec![self.clone()];
        while let Some(p) = stack.pop() {
            if seen.insert(p.addr()) {
                stack.extend(p.children().into_iter().cloned());
            }
        }
        seen.len()
    }

    pub fn has_quantifier(&self) -> bool {
        let mut seen = BTreeSet::new();
        let mut stack = alloc::vec![self.clone()];
        while let Some(p) = stack.pop() {
            if !seen.insert(p.addr()) {
                continue;
            }
            if matches!(p.kind(), PredKind::Exists(..) | PredKind::Forall(..)) {
                return true;
            }
            stack.extend(p.children().into_iter().cloned());
        }
        false
    }
}

fn free_vars_rec(p: &Pred, bound: &mut BTreeSet<Name>, out: &mut BTreeSet<Name>, closed: &mut BTreeSet<usize>) {
    match p.kind() {
        PredKind::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        PredKind::KApp(_, args) => {
            for a in args {
                if !bound.contains(a) {
                    out.insert(a.clone());
                }
            }
        }
        PredKind::Exists(x, _, body) | PredKind::Forall(x, _, body) => {
            let fresh = bound.insert(x.clone());
            free_vars_rec(body, bound, out, closed);
            if fresh {
                bound.remove(x);
            }
        }
        _ => {
            // With nothing bound, a shared node's free variables are the same
            // at every occurrence.
            if bound.is_empty() && !closed.insert(p.addr()) {
                return;
            }
            for c in p.children() {
                free_vars_rec(c, bound, out, closed);
            }
        }
    }
}

fn variant(x: &Name, avoid: &BTreeSet<Name>) -> Name {
    (0u64..)
        .map(|i| Name::from(format!("{}{RESERVED}r{i}", x.stem())))
        .find(|n| !avoid.contains(n))
        .expect("unbounded supply")
}

fn subst_rec(p: &Pred, m: &Renaming, memo: &mut BTreeMap<usize, Pred>) -> Pred {
    if let Some(r) = memo.get(&p.addr()) {
        return r.clone();
    }
    let r = match p.kind() {
        PredKind::Var(x) => match m.get(x) {
            Some(y) => Pred::var(y.clone()),
            None => p.clone(),
        },
        PredKind::KApp(k, args) => {
            if args.iter().any(|a| m.contains_key(a)) {
                let args = args.iter().map(|a| m.get(a).unwrap_or(a).clone()).collect();
                Pred::kapp(k.clone(), args)
            } else {
                p.clone()
            }
        }
        PredKind::Exists(x, s, body) | PredKind::Forall(x, s, body) => {
            let is_exists = matches!(p.kind(), PredKind::Exists(..));
            let mut inner = m.clone();
            inner.remove(x);
            let (x2, body2) = if inner.values().any(|y| y == x) {
                let mut avoid = body.all_names();
                avoid.extend(inner.keys().cloned());
                avoid.extend(inner.values().cloned());
                let x2 = variant(x, &avoid);
                inner.insert(x.clone(), x2.clone());
                (x2, subst_rec(body, &inner, &mut BTreeMap::new()))
            } else if inner.len() == m.len() {
                (x.clone(), subst_rec(body, m, memo))
            } else if inner.is_empty() {
                (x.clone(), body.clone())
            } else {
                (x.clone(), subst_rec(body, &inner, &mut BTreeMap::new()))
            };
            if x2 == *x && body2.ptr_eq(body) {
                p.clone()
            } else if is_exists {
                Pred::exists(x2, s.clone(), body2)
            } else {
                Pred::forall(x2, s.clone(), body2)
            }
        }
        _ => {
            let kids: Vec<Pred> = p.children().into_iter().map(|c| subst_rec(c, m, memo)).collect();
            p.with_children(kids)
        }
    };
    memo.insert(p.addr(), r.clone());
    r
}

// Printing. Precedence levels, loosest first: quantifiers, <=>, =>, ||, &&,
// not, relations, + -, *, unary minus, atoms.
fn prec(p: &Pred) -> u8 {
    match p.kind() {
        PredKind::Exists(..) | PredKind::Forall(..) => 0,
        PredKind::Iff(..) => 1,
        PredKind::Imp(..) => 2,
        PredKind::Or(..) => 3,
        PredKind::And(..) => 4,
        PredKind::Not(_) => 5,
        PredKind::Rel(..) => 6,
        PredKind::Arith(ArithOp::Add | ArithOp::Sub, ..) => 7,
        PredKind::Arith(ArithOp::Mul, ..) => 8,
        PredKind::Neg(_) => 9,
        PredKind::Int(n) if *n < 0 => 9,
        _ => 10,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, p: &Pred, min: u8) -> fmt::Result {
    if prec(p) < min {
        f.write_str("(")?;
        write_pred(f, p)?;
        f.write_str(")")
    } else {
        write_pred(f, p)
    }
}

fn write_pred(f: &mut fmt::Formatter<'_>, p: &Pred) -> fmt::Result {
    match p.kind() {
        PredKind::Bool(b) => write!(f, "{b}"),
        PredKind::Int(n) => write!(f, "{n}"),
        PredKind::Unit => f.write_str("()"),
        PredKind::Var(x) => write!(f, "{x}"),
        PredKind::Neg(a) => {
            f.write_str("-")?;
            write_at(f, a, 10)
        }
        PredKind::Arith(op, a, b) => {
            let l = prec(p);
            write_at(f, a, l)?;
            write!(f, " {} ", op.symbol())?;
            write_at(f, b, l + 1)
        }
        PredKind::Rel(op, a, b) => {
            write_at(f, a, 7)?;
            write!(f, " {} ", op.symbol())?;
            write_at(f, b, 7)
        }
        PredKind::App(g, args) => {
            write!(f, "{g}(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write_pred(f, a)?;
            }
            f.write_str(")")
        }
        PredKind::KApp(k, args) => {
            write!(f, "{k}(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")
        }
        PredKind::Not(a) => {
            f.write_str("not ")?;
            write_at(f, a, 5)
        }
        PredKind::And(a, b) => {
            write_at(f, a, 5)?;
            f.write_str(" && ")?;
            write_at(f, b, 4)
        }
        PredKind::Or(a, b) => {
            write_at(f, a, 4)?;
            f.write_str(" || ")?;
            write_at(f, b, 3)
        }
        PredKind::Imp(a, b) => {
            write_at(f, a, 3)?;
            f.write_str(" => ")?;
            write_at(f, b, 2)
        }
        PredKind::Iff(a, b) => {
            write_at(f, a, 2)?;
            f.write_str(" <=> ")?;
            write_at(f, b, 2)
        }
        PredKind::Exists(x, s, body) => write!(f, "exists {x}:{s}. {body}"),
        PredKind::Forall(x, s, body) => write!(f, "forall {x}:{s}. {body}"),
    }
}

impl fmt::Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_pred(f, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn v(x: &str) -> Pred {
        Pred::var(x)
    }

    fn ren(pairs: &[(&str, &str)]) -> Renaming {
        pairs.iter().map(|(a, b)| (Name::new(a), Name::new(b))).collect()
    }

    #[test]
    fn subst_renames_free_occurrences() {
        let p = Pred::eq(v("v"), Pred::add(v("x"), Pred::int(1)));
        let q = p.subst(&ren(&[("x", "y")]));
        assert_eq!(q.to_string(), "v = y + 1");
    }

    #[test]
    fn subst_renames_kapp_arguments() {
        let k = KVar::new("k".into(), vec![("z0".into(), Sort::Int), ("z1".into(), Sort::Int)]);
        let p = Pred::kapp(k, vec!["a".into(), "v".into()]);
        let q = p.subst(&ren(&[("a", "b")]));
        assert_eq!(q.to_string(), "$k(b, v)");
    }

    #[test]
    fn subst_avoids_capture() {
        // (exists x. x = y)[y := x]
        let p = Pred::exists("x".into(), Sort::Int, Pred::eq(v("x"), v("y")));
        let q = p.subst(&ren(&[("y", "x")]));
        match q.kind() {
            PredKind::Exists(b, _, body) => {
                assert_ne!(b.as_str(), "x");
                assert_eq!(*body, Pred::eq(Pred::var(b.clone()), v("x")));
            }
            _ => panic!("expected exists, got {q}"),
        }
        assert_eq!(q.free_vars().into_iter().collect::<Vec<_>>(), vec![Name::new("x")]);
    }

    #[test]
    fn subst_leaves_bound_variable_alone() {
        let p = Pred::exists("x".into(), Sort::Int, Pred::eq(v("x"), v("y")));
        let q = p.subst(&ren(&[("x", "w")]));
        assert!(q.ptr_eq(&p));
    }

    #[test]
    fn free_vars_examples() {
        let p = Pred::eq(v("v"), v("x"));
        assert_eq!(p.free_vars().len(), 2);
        let e = Pred::exists("x".into(), Sort::Int, Pred::eq(v("x"), v("y")));
        assert_eq!(e.free_vars().into_iter().collect::<Vec<_>>(), vec![Name::new("y")]);
    }

    #[test]
    fn constant_folding() {
        assert!(Pred::and(Pred::ff(), v("p")).is_false());
        assert!(Pred::or(Pred::tt(), v("p")).is_true());
        assert!(Pred::imp(Pred::ff(), v("p")).is_true());
        assert_eq!(Pred::and(Pred::tt(), v("p")), v("p"));
        assert!(Pred::exists("x".into(), Sort::Int, Pred::ff()).is_false());
        assert!(Pred::disj(vec![]).is_false());
        assert!(Pred::conj(vec![]).is_true());
    }

    #[test]
    fn printing_respects_precedence() {
        let p = Pred::and(
            Pred::or(v("a"), v("b")),
            Pred::rel(RelOp::Le, Pred::int(0), Pred::sub(v("x"), Pred::sub(v("y"), Pred::int(1)))),
        );
        assert_eq!(p.to_string(), "(a || b) && 0 <= x - (y - 1)");
    }

    #[test]
    fn atoms_count_shared_nodes_per_occurrence() {
        let a = Pred::rel(RelOp::Le, Pred::int(0), v("x"));
        let mut p = a.clone();
        for _ in 0..40 {
            p = Pred::new(PredKind::And(p.clone(), p));
        }
        assert_eq!(p.atoms(), 1u64 << 40);
        assert_eq!(p.dag_size(), 40 + 3);
    }
}
