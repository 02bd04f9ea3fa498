//! Abstract syntax: expressions, unrefined and refined types, programs.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::logic::{KVar, Pred, Renaming, Sort};
use crate::name::{Name, NameGen};
use crate::span::Span;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BaseTy {
    Int,
    Bool,
    Unit,
}

impl BaseTy {
    pub fn sort(self) -> Sort {
        match self {
            BaseTy::Int => Sort::Int,
            BaseTy::Bool => Sort::Bool,
            BaseTy::Unit => Sort::Unit,
        }
    }
}

impl fmt::Display for BaseTy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaseTy::Int => "Int",
            BaseTy::Bool => "Bool",
            BaseTy::Unit => "Unit",
        })
    }
}

/// Types with refinements erased. Function binders are kept so that a
/// refined type and its shape have the same binder names.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum UType {
    Var(Name),
    Base(BaseTy),
    /// A declared covariant type constructor applied to its arguments.
    Con(Name, Vec<UType>),
    Fun(Name, Box<UType>, Box<UType>),
    Forall(Name, Box<UType>),
}

impl UType {
    pub fn fun(x: impl Into<Name>, a: UType, b: UType) -> UType {
        UType::Fun(x.into(), Box::new(a), Box::new(b))
    }

    /// `self[α := t]`. Replacement types are closed, so no capture check.
    pub fn subst_tyvar(&self, a: &Name, t: &UType) -> UType {
        match self {
            UType::Var(b) if b == a => t.clone(),
            UType::Var(_) | UType::Base(_) => self.clone(),
            UType::Con(c, args) => UType::Con(c.clone(), args.iter().map(|u| u.subst_tyvar(a, t)).collect()),
            UType::Fun(x, i, o) => UType::fun(x.clone(), i.subst_tyvar(a, t), o.subst_tyvar(a, t)),
            UType::Forall(b, _) if b == a => self.clone(),
            UType::Forall(b, body) => UType::Forall(b.clone(), Box::new(body.subst_tyvar(a, t))),
        }
    }

    pub fn free_tyvars(&self) -> BTreeSet<Name> {
        fn go(t: &UType, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
            match t {
                UType::Var(a) if !bound.contains(a) => {
                    out.insert(a.clone());
                }
                UType::Var(_) | UType::Base(_) => {}
                UType::Con(_, args) => args.iter().for_each(|u| go(u, bound, out)),
                UType::Fun(_, i, o) => {
                    go(i, bound, out);
                    go(o, bound, out);
                }
                UType::Forall(a, body) => {
                    bound.push(a.clone());
                    go(body, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Structural equality ignoring function binder names.
    pub fn same_shape(&self, other: &UType) -> bool {
        match (self, other) {
            (UType::Var(a), UType::Var(b)) => a == b,
            (UType::Base(a), UType::Base(b)) => a == b,
            (UType::Con(c, xs), UType::Con(d, ys)) => {
                c == d && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| x.same_shape(y))
            }
            (UType::Fun(_, a, b), UType::Fun(_, c, d)) => a.same_shape(c) && b.same_shape(d),
            (UType::Forall(a, s), UType::Forall(b, t)) => {
                if a == b {
                    s.same_shape(t)
                } else {
                    s.same_shape(&t.subst_tyvar(b, &UType::Var(a.clone())))
                }
            }
            _ => false,
        }
    }
}

fn write_utype(f: &mut fmt::Formatter<'_>, t: &UType, prec: u8) -> fmt::Result {
    // 0: anywhere; 1: function domain; 2: constructor argument.
    match t {
        UType::Var(a) => write!(f, "{a}"),
        UType::Base(b) => write!(f, "{b}"),
        UType::Con(c, args) if args.is_empty() => write!(f, "{c}"),
        UType::Con(c, args) => {
            if prec >= 2 {
                f.write_str("(")?;
            }
            write!(f, "{c}")?;
            for a in args {
                f.write_str(" ")?;
                write_utype(f, a, 2)?;
            }
            if prec >= 2 {
                f.write_str(")")?;
            }
            Ok(())
        }
        UType::Fun(x, a, b) => {
            if prec >= 1 {
                f.write_str("(")?;
            }
            write!(f, "{x}:")?;
            write_utype(f, a, 1)?;
            f.write_str(" -> ")?;
            write_utype(f, b, 0)?;
            if prec >= 1 {
                f.write_str(")")?;
            }
            Ok(())
        }
        UType::Forall(a, body) => {
            if prec >= 1 {
                f.write_str("(")?;
            }
            write!(f, "forall {a}. ")?;
            write_utype(f, body, 0)?;
            if prec >= 1 {
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for UType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_utype(f, self, 0)
    }
}

/// Refined types. `v` in a refined base is bound only in its own predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RType {
    Var(Name),
    Base {
        v: Name,
        base: BaseTy,
        pred: Pred,
    },
    /// `{v:b | _}` in a signature: to be replaced by a fresh template.
    Hole {
        v: Name,
        base: BaseTy,
    },
    Fun(Name, Box<RType>, Box<RType>),
    Forall(Name, Box<RType>),
    Con(Name, Vec<RType>),
}

impl RType {
    pub fn base(v: impl Into<Name>, base: BaseTy, pred: Pred) -> RType {
        RType::Base { v: v.into(), base, pred }
    }

    /// `{v:b | true}`.
    pub fn trivial(base: BaseTy) -> RType {
        RType::base("v", base, Pred::tt())
    }

    pub fn fun(x: impl Into<Name>, a: RType, b: RType) -> RType {
        RType::Fun(x.into(), Box::new(a), Box::new(b))
    }

    /// Erase refinements.
    pub fn shape(&self) -> UType {
        match self {
            RType::Var(a) => UType::Var(a.clone()),
            RType::Base { base, .. } | RType::Hole { base, .. } => UType::Base(*base),
            RType::Fun(x, a, b) => UType::fun(x.clone(), a.shape(), b.shape()),
            RType::Forall(a, t) => UType::Forall(a.clone(), Box::new(t.shape())),
            RType::Con(c, args) => UType::Con(c.clone(), args.iter().map(RType::shape).collect()),
        }
    }

    /// The sort of a refined base, `None` for every other type.
    pub fn base_sort(&self) -> Option<Sort> {
        match self {
            RType::Base { base, .. } | RType::Hole { base, .. } => Some(base.sort()),
            _ => None,
        }
    }

    /// Free term variables of the refinements.
    pub fn free_vars(&self) -> BTreeSet<Name> {
        match self {
            RType::Var(_) | RType::Hole { .. } => BTreeSet::new(),
            RType::Base { v, pred, .. } => {
                let mut s = pred.free_vars();
                s.remove(v);
                s
            }
            RType::Fun(x, a, b) => {
                let mut s = b.free_vars();
                s.remove(x);
                s.extend(a.free_vars());
                s
            }
            RType::Forall(_, t) => t.free_vars(),
            RType::Con(_, args) => args.iter().flat_map(RType::free_vars).collect(),
        }
    }

    pub fn kvars(&self) -> BTreeSet<KVar> {
        match self {
            RType::Var(_) | RType::Hole { .. } => BTreeSet::new(),
            RType::Base { pred, .. } => pred.kvars(),
            RType::Fun(_, a, b) => {
                let mut s = a.kvars();
                s.extend(b.kvars());
                s
            }
            RType::Forall(_, t) => t.kvars(),
            RType::Con(_, args) => args.iter().flat_map(RType::kvars).collect(),
        }
    }

    pub fn has_holes(&self) -> bool {
        match self {
            RType::Hole { .. } => true,
            RType::Var(_) | RType::Base { .. } => false,
            RType::Fun(_, a, b) => a.has_holes() || b.has_holes(),
            RType::Forall(_, t) => t.has_holes(),
            RType::Con(_, args) => args.iter().any(RType::has_holes),
        }
    }

    /// Capture-avoiding renaming of free term variables. Binders that would
    /// capture a name in the range of `ren` are renamed apart.
    pub fn subst(&self, ren: &Renaming, gen: &mut NameGen) -> RType {
        if ren.is_empty() {
            return self.clone();
        }
        let range: BTreeSet<&Name> = ren.values().collect();
        match self {
            RType::Var(_) | RType::Hole { .. } => self.clone(),
            RType::Base { v, base, pred } => {
                let mut inner = ren.clone();
                inner.remove(v);
                if range.contains(v) {
                    let v2 = gen.fresh(v.stem());
                    inner.insert(v.clone(), v2.clone());
                    RType::Base { v: v2, base: *base, pred: pred.subst(&inner) }
                } else {
                    RType::Base { v: v.clone(), base: *base, pred: pred.subst(&inner) }
                }
            }
            RType::Fun(x, a, b) => {
                let a2 = a.subst(ren, gen);
                let mut inner = ren.clone();
                inner.remove(x);
                if range.contains(x) {
                    let x2 = gen.fresh(x.stem());
                    inner.insert(x.clone(), x2.clone());
                    RType::fun(x2, a2, b.subst(&inner, gen))
                } else {
                    RType::fun(x.clone(), a2, b.subst(&inner, gen))
                }
            }
            RType::Forall(a, t) => RType::Forall(a.clone(), Box::new(t.subst(ren, gen))),
            RType::Con(c, args) => RType::Con(c.clone(), args.iter().map(|t| t.subst(ren, gen)).collect()),
        }
    }

    pub fn subst1(&self, from: &Name, to: &Name, gen: &mut NameGen) -> RType {
        if from == to {
            return self.clone();
        }
        let mut ren = Renaming::new();
        ren.insert(from.clone(), to.clone());
        self.subst(&ren, gen)
    }

    /// `self[α := t]`. The caller guarantees `t` has no free term variables
    /// that binders of `self` could capture.
    pub fn subst_tyvar(&self, a: &Name, t: &RType) -> RType {
        match self {
            RType::Var(b) if b == a => t.clone(),
            RType::Var(_) | RType::Base { .. } | RType::Hole { .. } => self.clone(),
            RType::Fun(x, i, o) => RType::fun(x.clone(), i.subst_tyvar(a, t), o.subst_tyvar(a, t)),
            RType::Forall(b, _) if b == a => self.clone(),
            RType::Forall(b, body) => RType::Forall(b.clone(), Box::new(body.subst_tyvar(a, t))),
            RType::Con(c, args) => RType::Con(c.clone(), args.iter().map(|u| u.subst_tyvar(a, t)).collect()),
        }
    }

    /// Bottom-up rewrite of every refined base.
    pub fn map_bases(&self, f: &mut dyn FnMut(&RType) -> RType) -> RType {
        match self {
            RType::Base { .. } | RType::Hole { .. } => f(self),
            RType::Var(_) => self.clone(),
            RType::Fun(x, a, b) => RType::fun(x.clone(), a.map_bases(f), b.map_bases(f)),
            RType::Forall(a, t) => RType::Forall(a.clone(), Box::new(t.map_bases(f))),
            RType::Con(c, args) => RType::Con(c.clone(), args.iter().map(|t| t.map_bases(f)).collect()),
        }
    }
}

fn write_rtype(f: &mut fmt::Formatter<'_>, t: &RType, prec: u8) -> fmt::Result {
    match t {
        RType::Var(a) => write!(f, "{a}"),
        RType::Base { v, base, pred } => write!(f, "{{{v}:{base} | {pred}}}"),
        RType::Hole { v, base } => write!(f, "{{{v}:{base} | _}}"),
        RType::Con(c, args) if args.is_empty() => write!(f, "{c}"),
        RType::Con(c, args) => {
            if prec >= 2 {
                f.write_str("(")?;
            }
            write!(f, "{c}")?;
            for a in args {
                f.write_str(" ")?;
                write_rtype(f, a, 2)?;
            }
            if prec >= 2 {
                f.write_str(")")?;
            }
            Ok(())
        }
        RType::Fun(x, a, b) => {
            if prec >= 1 {
                f.write_str("(")?;
            }
            write!(f, "{x}:")?;
            write_rtype(f, a, 1)?;
            f.write_str(" -> ")?;
            write_rtype(f, b, 0)?;
            if prec >= 1 {
                f.write_str(")")?;
            }
            Ok(())
        }
        RType::Forall(a, body) => {
            if prec >= 1 {
                f.write_str("(")?;
            }
            write!(f, "forall {a}. ")?;
            write_rtype(f, body, 0)?;
            if prec >= 1 {
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for RType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_rtype(f, self, 0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Const {
    Int(i64),
    Bool(bool),
    Unit,
}

impl fmt::Display for Const {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Const::Int(n) => write!(f, "{n}"),
            Const::Bool(true) => f.write_str("True"),
            Const::Bool(false) => f.write_str("False"),
            Const::Unit => f.write_str("()"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Const(Const),
    Var(Name),
    /// The annotation is `None` only before elaboration.
    Lam(Name, Option<UType>, Box<Expr>),
    Let(Name, Box<Expr>, Box<Expr>),
    /// After normalization the argument is a variable.
    App(Box<Expr>, Box<Expr>),
    TyAbs(Name, Box<Expr>),
    TyApp(Box<Expr>, UType),
    /// After normalization the condition is a variable.
    If(Box<Expr>, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Expr {
        Expr { kind, span }
    }

    pub fn var(x: impl Into<Name>, span: Span) -> Expr {
        Expr::new(ExprKind::Var(x.into()), span)
    }

    pub fn app(f: Expr, a: Expr) -> Expr {
        let span = f.span.join(a.span);
        Expr::new(ExprKind::App(Box::new(f), Box::new(a)), span)
    }

    pub fn let_(x: Name, e1: Expr, e2: Expr, span: Span) -> Expr {
        Expr::new(ExprKind::Let(x, Box::new(e1), Box::new(e2)), span)
    }

    pub fn as_var(&self) -> Option<&Name> {
        match &self.kind {
            ExprKind::Var(x) => Some(x),
            _ => None,
        }
    }

    /// Copy with every span reset, for comparisons that ignore positions.
    pub fn erase_spans(&self) -> Expr {
        let kind = match &self.kind {
            ExprKind::Const(_) | ExprKind::Var(_) => self.kind.clone(),
            ExprKind::Lam(x, t, b) => ExprKind::Lam(x.clone(), t.clone(), Box::new(b.erase_spans())),
            ExprKind::Let(x, a, b) => ExprKind::Let(x.clone(), Box::new(a.erase_spans()), Box::new(b.erase_spans())),
            ExprKind::App(a, b) => ExprKind::App(Box::new(a.erase_spans()), Box::new(b.erase_spans())),
            ExprKind::TyAbs(a, b) => ExprKind::TyAbs(a.clone(), Box::new(b.erase_spans())),
            ExprKind::TyApp(e, t) => ExprKind::TyApp(Box::new(e.erase_spans()), t.clone()),
            ExprKind::If(c, a, b) => {
                ExprKind::If(Box::new(c.erase_spans()), Box::new(a.erase_spans()), Box::new(b.erase_spans()))
            }
        };
        Expr::new(kind, Span::default())
    }

    /// Free term variables.
    pub fn free_vars(&self) -> BTreeSet<Name> {
        fn go(e: &Expr, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
            match &e.kind {
                ExprKind::Const(_) => {}
                ExprKind::Var(x) => {
                    if !bound.contains(x) {
                        out.insert(x.clone());
                    }
                }
                ExprKind::Lam(x, _, b) => {
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                ExprKind::Let(x, a, b) => {
                    go(a, bound, out);
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                ExprKind::App(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                ExprKind::TyAbs(_, b) | ExprKind::TyApp(b, _) => go(b, bound, out),
                ExprKind::If(c, a, b) => {
                    go(c, bound, out);
                    go(a, bound, out);
                    go(b, bound, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }
}

/// Whether `x` prints as an operator section `(op)`.
pub fn is_operator(x: &str) -> bool {
    !x.is_empty() && !x.starts_with(|c: char| c.is_alphanumeric() || c == '_' || c == crate::name::RESERVED)
}

fn write_name(f: &mut fmt::Formatter<'_>, x: &Name) -> fmt::Result {
    if is_operator(x.as_str()) {
        write!(f, "({x})")
    } else {
        write!(f, "{x}")
    }
}

// Printing levels: 0 anywhere, 1 application head, 2 application argument.
fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr, prec: u8) -> fmt::Result {
    let open = |f: &mut fmt::Formatter<'_>, p: bool| if p { f.write_str("(") } else { Ok(()) };
    let close = |f: &mut fmt::Formatter<'_>, p: bool| if p { f.write_str(")") } else { Ok(()) };
    match &e.kind {
        ExprKind::Const(Const::Int(n)) if *n < 0 => write!(f, "({n})"),
        ExprKind::Const(c) => write!(f, "{c}"),
        ExprKind::Var(x) => write_name(f, x),
        ExprKind::Lam(x, t, b) => {
            open(f, prec > 0)?;
            match t {
                Some(t) => {
                    f.write_str("\\(")?;
                    write_name(f, x)?;
                    write!(f, ":{t}) -> ")?;
                }
                None => {
                    f.write_str("\\")?;
                    write_name(f, x)?;
                    f.write_str(" -> ")?;
                }
            }
            write_expr(f, b, 0)?;
            close(f, prec > 0)
        }
        ExprKind::Let(x, a, b) => {
            open(f, prec > 0)?;
            f.write_str("let ")?;
            write_name(f, x)?;
            f.write_str(" = ")?;
            write_expr(f, a, 0)?;
            f.write_str(" in ")?;
            write_expr(f, b, 0)?;
            close(f, prec > 0)
        }
        ExprKind::If(c, a, b) => {
            open(f, prec > 0)?;
            f.write_str("if ")?;
            write_expr(f, c, 0)?;
            f.write_str(" then ")?;
            write_expr(f, a, 0)?;
            f.write_str(" else ")?;
            write_expr(f, b, 0)?;
            close(f, prec > 0)
        }
        ExprKind::App(g, a) => {
            open(f, prec > 1)?;
            write_expr(f, g, 1)?;
            f.write_str(" ")?;
            write_expr(f, a, 2)?;
            close(f, prec > 1)
        }
        ExprKind::TyApp(g, t) => {
            open(f, prec > 1)?;
            write_expr(f, g, 1)?;
            f.write_str(" @")?;
            write_utype(f, t, 2)?;
            close(f, prec > 1)
        }
        ExprKind::TyAbs(a, b) => {
            open(f, prec > 0)?;
            write!(f, "/\\{a} -> ")?;
            write_expr(f, b, 0)?;
            close(f, prec > 0)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self, 0)
    }
}

/// A logical sort as written in `uninterpreted` declarations.
#[derive(Clone, Debug, PartialEq)]
pub struct UfDecl {
    pub name: Name,
    pub args: Vec<Sort>,
    pub ret: Sort,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Item {
    /// `data List a`: an opaque covariant constructor.
    Data {
        name: Name,
        params: Vec<Name>,
        span: Span,
    },
    /// `type Nat = {v:Int | 0 <= v}`
    Alias {
        name: Name,
        params: Vec<Name>,
        body: RType,
        span: Span,
    },
    /// `uninterpreted f :: Int -> Int`
    Uninterpreted(UfDecl),
    /// `primitive f :: T`: trusted, no body.
    Primitive {
        name: Name,
        sig: RType,
        span: Span,
    },
    Signature {
        name: Name,
        sig: RType,
        span: Span,
    },
    /// `f x y = e`, stored as `f = \x -> \y -> e`.
    Define {
        name: Name,
        body: Expr,
        span: Span,
    },
}

impl Item {
    pub fn span(&self) -> Span {
        match self {
            Item::Data { span, .. }
            | Item::Alias { span, .. }
            | Item::Primitive { span, .. }
            | Item::Signature { span, .. }
            | Item::Define { span, .. } => *span,
            Item::Uninterpreted(d) => d.span,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Program {
    pub items: Vec<Item>,
}

fn write_params(f: &mut fmt::Formatter<'_>, ps: &[Name]) -> fmt::Result {
    for p in ps {
        write!(f, " {p}")?;
    }
    Ok(())
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::Data { name, params, .. } => {
                write!(f, "data {name}")?;
                write_params(f, params)
            }
            Item::Alias { name, params, body, .. } => {
                write!(f, "type {name}")?;
                write_params(f, params)?;
                write!(f, " = {body}")
            }
            Item::Uninterpreted(d) => {
                write!(f, "uninterpreted {} :: ", d.name)?;
                for s in &d.args {
                    write!(f, "{s} -> ")?;
                }
                write!(f, "{}", d.ret)
            }
            Item::Primitive { name, sig, .. } => {
                f.write_str("primitive ")?;
                write_name(f, name)?;
                write!(f, " :: {sig}")
            }
            Item::Signature { name, sig, .. } => {
                write_name(f, name)?;
                write!(f, " :: {sig}")
            }
            Item::Define { name, body, .. } => {
                write_name(f, name)?;
                write!(f, " = {body}")
            }
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            writeln!(f, "{item}")?;
        }
        Ok(())
    }
}

/// Render a program in the surface syntax.
pub fn pretty(p: &Program) -> String {
    alloc::format!("{p}")
}
