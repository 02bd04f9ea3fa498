//! From parsed items to checked definitions: aliases are expanded, signature
//! refinements are sort checked, local binders get unique names, and missing
//! lambda annotations and type instantiations are recovered by first-order
//! unification on shapes.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::anf::anf_normalize;
use super::env::TypeEnv;
use super::syntax::{BaseTy, Const, Expr, ExprKind, Item, Program, RType, UType, UfDecl};
use super::LangError;
use crate::logic::{Sort, SortEnv};
use crate::name::{Name, NameGen};
use crate::span::Span;

/// A definition checked against its signature.
#[derive(Clone, Debug)]
pub struct Def {
    pub name: Name,
    pub sig: RType,
    /// Elaborated and in administrative normal form.
    pub body: Expr,
    pub span: Span,
}

#[derive(Clone, Debug, Default)]
pub struct Elaborated {
    /// Declared type constructors and their arities.
    pub datas: BTreeMap<Name, usize>,
    pub ufs: Vec<UfDecl>,
    /// Primitive and user signatures, in declaration order.
    pub globals: Vec<(Name, RType)>,
    pub prims: BTreeSet<Name>,
    pub defs: Vec<Def>,
}

impl Elaborated {
    /// Every global with its signature.
    pub fn type_env(&self) -> TypeEnv {
        let mut env = TypeEnv::new();
        for (x, t) in &self.globals {
            env.push(x.clone(), t.clone());
        }
        env
    }

    /// Uninterpreted functions, with globals in scope as function-typed.
    pub fn sort_env(&self) -> SortEnv {
        let mut env = SortEnv::new();
        for d in &self.ufs {
            env.declare_fun(d.name.clone(), d.args.clone(), d.ret.clone());
        }
        for (x, t) in &self.globals {
            match t.base_sort() {
                Some(s) => env.bind(x.clone(), s),
                None => env.bind_function(x.clone()),
            }
        }
        env
    }

    pub fn def(&self, name: &str) -> Option<&Def> {
        self.defs.iter().find(|d| d.name == name)
    }
}

fn err<T>(span: Span, msg: impl Into<String>) -> Result<T, LangError> {
    Err(LangError::new(span, msg.into()))
}

#[derive(Default)]
struct Decls {
    datas: BTreeMap<Name, usize>,
    aliases: BTreeMap<Name, (Vec<Name>, RType)>,
    sort_env: SortEnv,
}

impl Decls {
    /// Expand aliases, check constructor arities, name anonymous binders.
    fn resolve(&self, t: &RType, span: Span, gen: &mut NameGen) -> Result<RType, LangError> {
        Ok(match t {
            RType::Var(_) | RType::Base { .. } | RType::Hole { .. } => t.clone(),
            RType::Fun(x, a, b) => {
                let x = if x == "_" { gen.fresh("arg") } else { x.clone() };
                RType::fun(x, self.resolve(a, span, gen)?, self.resolve(b, span, gen)?)
            }
            RType::Forall(a, body) => RType::Forall(a.clone(), Box::new(self.resolve(body, span, gen)?)),
            RType::Con(c, args) => {
                let args = args.iter().map(|a| self.resolve(a, span, gen)).collect::<Result<Vec<_>, _>>()?;
                if let Some(&n) = self.datas.get(c) {
                    if n != args.len() {
                        return err(span, format!("`{c}` expects {n} type argument(s), got {}", args.len()));
                    }
                    RType::Con(c.clone(), args)
                } else if let Some((params, body)) = self.aliases.get(c) {
                    if params.len() != args.len() {
                        return err(
                            span,
                            format!("alias `{c}` expects {} type argument(s), got {}", params.len(), args.len()),
                        );
                    }
                    params.iter().zip(&args).fold(body.clone(), |acc, (p, a)| acc.subst_tyvar(p, a))
                } else {
                    return err(span, format!("unknown type `{c}`"));
                }
            }
        })
    }

    fn resolve_utype(&self, t: &UType, rigid: &[Name], span: Span) -> Result<UType, LangError> {
        Ok(match t {
            UType::Var(a) => {
                if !rigid.contains(a) {
                    return err(span, format!("unknown type variable `{a}` in annotation"));
                }
                t.clone()
            }
            UType::Base(_) => t.clone(),
            UType::Fun(x, a, b) => {
                UType::fun(x.clone(), self.resolve_utype(a, rigid, span)?, self.resolve_utype(b, rigid, span)?)
            }
            UType::Forall(a, body) => {
                let mut inner = rigid.to_vec();
                inner.push(a.clone());
                UType::Forall(a.clone(), Box::new(self.resolve_utype(body, &inner, span)?))
            }
            UType::Con(c, args) => {
                let args = args.iter().map(|a| self.resolve_utype(a, rigid, span)).collect::<Result<Vec<_>, _>>()?;
                if let Some(&n) = self.datas.get(c) {
                    if n != args.len() {
                        return err(span, format!("`{c}` expects {n} type argument(s), got {}", args.len()));
                    }
                    UType::Con(c.clone(), args)
                } else if let Some((params, body)) = self.aliases.get(c) {
                    if params.len() != args.len() {
                        return err(span, format!("alias `{c}` expects {} type argument(s)", params.len()));
                    }
                    params.iter().zip(&args).fold(body.shape(), |acc, (p, a)| acc.subst_tyvar(p, a))
                } else {
                    return err(span, format!("unknown type `{c}`"));
                }
            }
        })
    }

    /// Sort check every refinement of a signature.
    fn check_refinements(&self, t: &RType, env: &SortEnv, span: Span) -> Result<(), LangError> {
        match t {
            RType::Var(_) | RType::Hole { .. } => Ok(()),
            RType::Base { v, base, pred } => {
                let mut scope = env.clone();
                scope.bind(v.clone(), base.sort());
                scope.check(pred).or_else(|e| err(span, format!("ill-sorted refinement `{pred}`: {e}")))
            }
            RType::Fun(x, a, b) => {
                self.check_refinements(a, env, span)?;
                let mut scope = env.clone();
                match a.base_sort() {
                    Some(s) => scope.bind(x.clone(), s),
                    None => scope.bind_function(x.clone()),
                }
                self.check_refinements(b, &scope, span)
            }
            RType::Forall(_, body) => self.check_refinements(body, env, span),
            RType::Con(_, args) => args.iter().try_for_each(|a| self.check_refinements(a, env, span)),
        }
    }
}

/// Free type variables in order of first occurrence.
fn tyvars_in_order(t: &RType) -> Vec<Name> {
    fn go(t: &RType, bound: &mut Vec<Name>, out: &mut Vec<Name>) {
        match t {
            RType::Var(a) => {
                if !bound.contains(a) && !out.contains(a) {
                    out.push(a.clone());
                }
            }
            RType::Base { .. } | RType::Hole { .. } => {}
            RType::Fun(_, a, b) => {
                go(a, bound, out);
                go(b, bound, out);
            }
            RType::Forall(a, body) => {
                bound.push(a.clone());
                go(body, bound, out);
                bound.pop();
            }
            RType::Con(_, args) => args.iter().for_each(|a| go(a, bound, out)),
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

/// Quantify free type variables at the outside.
fn generalize(t: RType) -> RType {
    tyvars_in_order(&t).into_iter().rev().fold(t, |acc, a| RType::Forall(a, Box::new(acc)))
}

pub fn elaborate(prog: &Program, gen: &mut NameGen) -> Result<Elaborated, LangError> {
    let mut decls = Decls::default();
    let mut out = Elaborated::default();

    for item in &prog.items {
        match item {
            Item::Data { name, params, span } => {
                if decls.datas.contains_key(name) || decls.aliases.contains_key(name) {
                    return err(*span, format!("type `{name}` is declared twice"));
                }
                decls.datas.insert(name.clone(), params.len());
            }
            Item::Alias { name, params, body, span } => {
                if decls.datas.contains_key(name) || decls.aliases.contains_key(name) {
                    return err(*span, format!("type `{name}` is declared twice"));
                }
                let body = decls.resolve(body, *span, gen)?;
                if let Some(a) = tyvars_in_order(&body).into_iter().find(|a| !params.contains(a)) {
                    return err(*span, format!("type variable `{a}` is not a parameter of `{name}`"));
                }
                decls.aliases.insert(name.clone(), (params.clone(), body));
            }
            Item::Uninterpreted(d) => {
                if decls.sort_env.fun(&d.name).is_some() {
                    return err(d.span, format!("uninterpreted function `{}` is declared twice", d.name));
                }
                for s in d.args.iter().chain([&d.ret]) {
                    if let Sort::Uninterp(c) = s {
                        if !decls.datas.contains_key(c) {
                            return err(d.span, format!("unknown sort `{c}`"));
                        }
                    }
                }
                decls.sort_env.declare_fun(d.name.clone(), d.args.clone(), d.ret.clone());
                out.ufs.push(d.clone());
            }
            _ => {}
        }
    }

    let mut sigs: BTreeMap<Name, (RType, Span)> = BTreeMap::new();
    let mut bodies: Vec<(Name, &Expr, Span)> = Vec::new();
    for item in &prog.items {
        match item {
            Item::Primitive { name, sig, span } | Item::Signature { name, sig, span } => {
                if sigs.contains_key(name) {
                    return err(*span, format!("`{name}` has more than one signature"));
                }
                let sig = generalize(decls.resolve(sig, *span, gen)?);
                decls.check_refinements(&sig, &decls.sort_env, *span)?;
                if matches!(item, Item::Primitive { .. }) {
                    if sig.has_holes() {
                        return err(*span, format!("primitive `{name}` cannot have holes in its signature"));
                    }
                    out.prims.insert(name.clone());
                }
                sigs.insert(name.clone(), (sig.clone(), *span));
                out.globals.push((name.clone(), sig));
            }
            Item::Define { name, body, span } => {
                if bodies.iter().any(|(n, _, _)| n == name) {
                    return err(*span, format!("`{name}` is defined twice"));
                }
                bodies.push((name.clone(), body, *span));
            }
            _ => {}
        }
    }
    out.datas = decls.datas.clone();

    let global_shapes: BTreeMap<Name, UType> = out.globals.iter().map(|(x, t)| (x.clone(), t.shape())).collect();
    for (name, body, span) in bodies {
        let Some((sig, _)) = sigs.get(&name) else {
            return err(span, format!("`{name}` has no type signature"));
        };
        if out.prims.contains(&name) {
            return err(span, format!("primitive `{name}` cannot have a definition"));
        }
        let mut inf = Infer {
            decls: &decls,
            gen: &mut *gen,
            globals: &global_shapes,
            locals: Vec::new(),
            taken: global_shapes.keys().cloned().collect(),
            rigid: Vec::new(),
            metas: BTreeMap::new(),
        };
        let body = inf.check_def(body, sig)?;
        let body = anf_normalize(&body, gen);
        out.defs.push(Def { name, sig: sig.clone(), body, span });
    }
    for (name, (_, span)) in &sigs {
        if !out.prims.contains(name) && !out.defs.iter().any(|d| &d.name == name) {
            return err(*span, format!("signature for `{name}` lacks a definition"));
        }
    }
    Ok(out)
}

struct Infer<'a> {
    decls: &'a Decls,
    gen: &'a mut NameGen,
    globals: &'a BTreeMap<Name, UType>,
    /// (source name, unique name, type), innermost last.
    locals: Vec<(Name, Name, UType)>,
    /// Every name a local binder may not reuse.
    taken: BTreeSet<Name>,
    rigid: Vec<Name>,
    metas: BTreeMap<Name, Option<UType>>,
}

impl Infer<'_> {
    fn check_def(&mut self, body: &Expr, sig: &RType) -> Result<Expr, LangError> {
        let mut t = sig.shape();
        let mut tyvars = Vec::new();
        while let UType::Forall(a, inner) = t {
            tyvars.push(a.clone());
            self.rigid.push(a);
            t = *inner;
        }
        let e = self.check(body, &t)?;
        let e = self.zonk(&e)?;
        Ok(tyvars.into_iter().rev().fold(e, |acc, a| {
            let span = acc.span;
            Expr::new(ExprKind::TyAbs(a, Box::new(acc)), span)
        }))
    }

    /// Infer against an expected type, pushing it into lambdas, lets and
    /// branches so that parameter types are known before their uses.
    fn check(&mut self, e: &Expr, want: &UType) -> Result<Expr, LangError> {
        let span = e.span;
        match (&e.kind, self.resolve(want)) {
            (ExprKind::Lam(x, ann, body), UType::Fun(_, dom, cod)) => {
                let tx = match ann {
                    Some(t) => {
                        let t = self.decls.resolve_utype(t, &self.rigid, span)?;
                        self.unify(&dom, &t, span)?;
                        t
                    }
                    None => *dom,
                };
                let unique = self.bind_local(x, tx.clone());
                let r = self.check(body, &cod);
                self.locals.pop();
                Ok(Expr::new(ExprKind::Lam(unique, Some(tx), Box::new(r?)), span))
            }
            (ExprKind::Let(x, a, b), want) => {
                let (a, ta) = self.infer(a)?;
                let unique = self.bind_local(x, ta);
                let r = self.check(b, &want);
                self.locals.pop();
                Ok(Expr::new(ExprKind::Let(unique, Box::new(a), Box::new(r?)), span))
            }
            (ExprKind::If(c, a, b), want) => {
                let (c2, tc) = self.infer(c)?;
                self.unify(&UType::Base(BaseTy::Bool), &tc, c.span)?;
                let a2 = self.check(a, &want)?;
                let b2 = self.check(b, &want)?;
                Ok(Expr::new(ExprKind::If(Box::new(c2), Box::new(a2), Box::new(b2)), span))
            }
            (_, want) => {
                let (e2, got) = self.infer(e)?;
                self.unify(&want, &got, span)?;
                Ok(e2)
            }
        }
    }

    fn fresh_meta(&mut self) -> UType {
        let m = self.gen.fresh("t");
        self.metas.insert(m.clone(), None);
        UType::Var(m)
    }

    fn bind_local(&mut self, x: &Name, t: UType) -> Name {
        let unique = if self.taken.contains(x) { self.gen.fresh(x.as_str()) } else { x.clone() };
        self.taken.insert(unique.clone());
        self.locals.push((x.clone(), unique.clone(), t));
        unique
    }

    fn infer(&mut self, e: &Expr) -> Result<(Expr, UType), LangError> {
        let (mut e, mut t) = self.infer_head(e)?;
        while let UType::Forall(a, body) = t {
            let m = self.fresh_meta();
            t = body.subst_tyvar(&a, &m);
            let span = e.span;
            e = Expr::new(ExprKind::TyApp(Box::new(e), m), span);
        }
        Ok((e, t))
    }

    /// Like `infer`, but a polymorphic result is left uninstantiated.
    fn infer_head(&mut self, e: &Expr) -> Result<(Expr, UType), LangError> {
        let span = e.span;
        match &e.kind {
            ExprKind::Var(x) => {
                if let Some((_, unique, t)) = self.locals.iter().rev().find(|(src, _, _)| src == x) {
                    return Ok((Expr::var(unique.clone(), span), t.clone()));
                }
                match self.globals.get(x) {
                    Some(t) => Ok((e.clone(), t.clone())),
                    None => err(span, format!("unbound variable `{x}`")),
                }
            }
            ExprKind::TyApp(f, t) => {
                let (f, ft) = self.infer_head(f)?;
                let t = self.decls.resolve_utype(t, &self.rigid, span)?;
                match self.resolve(&ft) {
                    UType::Forall(a, body) => {
                        let inst = body.subst_tyvar(&a, &t);
                        Ok((Expr::new(ExprKind::TyApp(Box::new(f), t), span), inst))
                    }
                    other => err(span, format!("type application to a non-polymorphic expression of type `{other}`")),
                }
            }
            ExprKind::TyAbs(a, body) => {
                self.rigid.push(a.clone());
                let r = self.infer(body);
                self.rigid.pop();
                let (body, t) = r?;
                Ok((Expr::new(ExprKind::TyAbs(a.clone(), Box::new(body)), span), UType::Forall(a.clone(), Box::new(t))))
            }
            _ => self.infer_inner(e),
        }
    }

    fn infer_inner(&mut self, e: &Expr) -> Result<(Expr, UType), LangError> {
        let span = e.span;
        match &e.kind {
            ExprKind::Const(c) => {
                let b = match c {
                    Const::Int(_) => BaseTy::Int,
                    Const::Bool(_) => BaseTy::Bool,
                    Const::Unit => BaseTy::Unit,
                };
                Ok((e.clone(), UType::Base(b)))
            }
            ExprKind::Lam(x, ann, body) => {
                let tx = match ann {
                    Some(t) => self.decls.resolve_utype(t, &self.rigid, span)?,
                    None => self.fresh_meta(),
                };
                let unique = self.bind_local(x, tx.clone());
                let r = self.infer(body);
                self.locals.pop();
                let (body, tb) = r?;
                Ok((
                    Expr::new(ExprKind::Lam(unique.clone(), Some(tx.clone()), Box::new(body)), span),
                    UType::fun(unique, tx, tb),
                ))
            }
            ExprKind::Let(x, a, b) => {
                let (a, ta) = self.infer(a)?;
                let unique = self.bind_local(x, ta);
                let r = self.infer(b);
                self.locals.pop();
                let (b, tb) = r?;
                Ok((Expr::new(ExprKind::Let(unique, Box::new(a), Box::new(b)), span), tb))
            }
            ExprKind::App(f, a) => {
                let (f2, tf) = self.infer(f)?;
                let (a2, ta) = self.infer(a)?;
                let result = match self.resolve(&tf) {
                    UType::Fun(_, dom, cod) => {
                        self.unify(&dom, &ta, a.span)?;
                        *cod
                    }
                    UType::Var(m) if self.metas.contains_key(&m) => {
                        let r = self.fresh_meta();
                        let x = self.gen.fresh("arg");
                        self.unify(&UType::Var(m), &UType::fun(x, ta, r.clone()), span)?;
                        r
                    }
                    other => {
                        return err(f.span, format!("`{f}` has type `{other}` and cannot be applied"));
                    }
                };
                Ok((Expr::app(f2, a2), result))
            }
            ExprKind::If(c, a, b) => {
                let (c2, tc) = self.infer(c)?;
                self.unify(&UType::Base(BaseTy::Bool), &tc, c.span)?;
                let (a2, ta) = self.infer(a)?;
                let (b2, tb) = self.infer(b)?;
                self.unify(&ta, &tb, b.span)?;
                Ok((Expr::new(ExprKind::If(Box::new(c2), Box::new(a2), Box::new(b2)), span), ta))
            }
            ExprKind::Var(_) | ExprKind::TyApp(..) | ExprKind::TyAbs(..) => self.infer(e),
        }
    }

    /// Follow solved metas at the root.
    fn resolve(&self, t: &UType) -> UType {
        let mut t = t.clone();
        while let UType::Var(m) = &t {
            match self.metas.get(m) {
                Some(Some(u)) => t = u.clone(),
                _ => break,
            }
        }
        t
    }

    fn zonk_type(&self, t: &UType) -> UType {
        match self.resolve(t) {
            UType::Var(a) => UType::Var(a),
            UType::Base(b) => UType::Base(b),
            UType::Con(c, args) => UType::Con(c, args.iter().map(|a| self.zonk_type(a)).collect()),
            UType::Fun(x, a, b) => UType::fun(x, self.zonk_type(&a), self.zonk_type(&b)),
            UType::Forall(a, b) => UType::Forall(a, Box::new(self.zonk_type(&b))),
        }
    }

    fn occurs(&self, m: &Name, t: &UType) -> bool {
        match self.resolve(t) {
            UType::Var(a) => &a == m,
            UType::Base(_) => false,
            UType::Con(_, args) => args.iter().any(|a| self.occurs(m, a)),
            UType::Fun(_, a, b) => self.occurs(m, &a) || self.occurs(m, &b),
            UType::Forall(_, b) => self.occurs(m, &b),
        }
    }

    fn unify(&mut self, want: &UType, got: &UType, span: Span) -> Result<(), LangError> {
        let (a, b) = (self.resolve(want), self.resolve(got));
        match (&a, &b) {
            (UType::Var(m), UType::Var(n)) if m == n => Ok(()),
            (UType::Var(m), t) | (t, UType::Var(m)) if self.metas.contains_key(m) => {
                if self.occurs(m, t) {
                    return err(span, format!("infinite type: `{}` occurs in `{}`", m, self.zonk_type(t)));
                }
                self.metas.insert(m.clone(), Some(t.clone()));
                Ok(())
            }
            (UType::Base(x), UType::Base(y)) if x == y => Ok(()),
            (UType::Con(c, xs), UType::Con(d, ys)) if c == d && xs.len() == ys.len() => {
                for (x, y) in xs.iter().zip(ys) {
                    self.unify(x, y, span)?;
                }
                Ok(())
            }
            (UType::Fun(_, a1, b1), UType::Fun(_, a2, b2)) => {
                self.unify(a1, a2, span)?;
                self.unify(b1, b2, span)
            }
            (UType::Forall(..), UType::Forall(..)) if self.zonk_type(&a).same_shape(&self.zonk_type(&b)) => Ok(()),
            _ => err(span, format!("type mismatch: expected `{}`, found `{}`", self.zonk_type(&a), self.zonk_type(&b))),
        }
    }

    fn is_closed(&self, t: &UType) -> bool {
        t.free_tyvars().iter().all(|a| !self.metas.contains_key(a))
    }

    /// Replace solved metas in annotations; unsolved ones are errors.
    fn zonk(&self, e: &Expr) -> Result<Expr, LangError> {
        let span = e.span;
        let kind = match &e.kind {
            ExprKind::Const(_) | ExprKind::Var(_) => e.kind.clone(),
            ExprKind::Lam(x, t, b) => {
                let t = self.zonk_type(t.as_ref().expect("annotated during inference"));
                if !self.is_closed(&t) {
                    return err(span, format!("cannot infer the type of parameter `{x}`; add an annotation"));
                }
                ExprKind::Lam(x.clone(), Some(t), Box::new(self.zonk(b)?))
            }
            ExprKind::Let(x, a, b) => ExprKind::Let(x.clone(), Box::new(self.zonk(a)?), Box::new(self.zonk(b)?)),
            ExprKind::App(f, a) => ExprKind::App(Box::new(self.zonk(f)?), Box::new(self.zonk(a)?)),
            ExprKind::TyAbs(a, b) => ExprKind::TyAbs(a.clone(), Box::new(self.zonk(b)?)),
            ExprKind::TyApp(f, t) => {
                let t = self.zonk_type(t);
                if !self.is_closed(&t) {
                    let head = head_name(f).map(|n| format!(" of `{n}`")).unwrap_or_default();
                    return err(
                        span,
                        format!("unannotated polymorphic instantiation{head}: the type argument is undetermined; write `@T`"),
                    );
                }
                ExprKind::TyApp(Box::new(self.zonk(f)?), t)
            }
            ExprKind::If(c, a, b) => {
                ExprKind::If(Box::new(self.zonk(c)?), Box::new(self.zonk(a)?), Box::new(self.zonk(b)?))
            }
        };
        Ok(Expr::new(kind, span))
    }
}

fn head_name(e: &Expr) -> Option<String> {
    match &e.kind {
        ExprKind::Var(x) => Some(x.as_str().to_owned()),
        ExprKind::TyApp(f, _) => head_name(f),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::super::{elaborate_source, parse_program};
    use super::*;
    use alloc::string::ToString;

    fn elab(src: &str) -> Result<Elaborated, LangError> {
        elaborate_source(src, &mut NameGen::new())
    }

    #[test]
    fn instantiations_are_inserted() {
        let out = elab("f :: Int -> Int\nf x = last (x : [])").unwrap();
        let body = out.def("f").unwrap().body.to_string();
        assert!(body.contains("last @Int"), "{body}");
        assert!(body.contains("cons @Int"), "{body}");
        assert!(body.contains("nil @Int"), "{body}");
    }

    #[test]
    fn lambda_annotations_come_from_the_signature() {
        let out = elab("ex1 :: Nat -> Nat\nex1 x = inc x").unwrap();
        let body = out.def("ex1").unwrap().body.to_string();
        assert_eq!(body, "\\(x:Int) -> inc x");
    }

    #[test]
    fn undetermined_instantiation_is_reported() {
        let e = elab("f :: Int -> Int\nf x = let z = [] in x").unwrap_err();
        assert!(e.message.contains("unannotated polymorphic instantiation"), "{}", e.message);
        assert_eq!((e.span.line, e.span.col), (2, 15));
        assert!(elab("f :: Int -> Int\nf x = let z = [] @Int in x").is_ok());
    }

    #[test]
    fn shadowing_binders_are_renamed_apart() {
        let out = elab("f :: Int -> Int\nf x = let x = inc x in let inc = x in inc").unwrap();
        let body = out.def("f").unwrap().body.to_string();
        let generic: String = body.chars().filter(|c| !c.is_ascii_digit()).collect();
        assert_eq!(generic, "\\(x:Int) -> let x# = inc x in let inc# = x# in inc#");
    }

    #[test]
    fn signature_errors() {
        assert!(elab("f :: {v:Int | w = 1}\nf = 1").unwrap_err().message.contains("ill-sorted"));
        assert!(elab("f :: Foo\nf = 1").unwrap_err().message.contains("unknown type"));
        assert!(elab("f = 1").unwrap_err().message.contains("no type signature"));
        assert!(elab("f :: Int\ng :: Int\nf = 1").unwrap_err().message.contains("lacks a definition"));
        assert!(elab("f :: Int -> Int\nf x = x 1").unwrap_err().message.contains("cannot be applied"));
        assert!(elab("f :: Int -> Bool\nf x = x").unwrap_err().message.contains("type mismatch"));
    }

    #[test]
    fn aliases_expand() {
        let out = elab("f :: Nat -> Nat\nf x = x").unwrap();
        let sig = out.def("f").unwrap().sig.to_string();
        assert!(sig.starts_with("arg#"), "{sig}");
        assert!(sig.ends_with(":{v:Int | 0 <= v} -> {v:Int | 0 <= v}"), "{sig}");
    }

    #[test]
    fn polymorphic_signature_is_generalized() {
        let out = elab("twice :: (a -> a) -> a -> a\ntwice f x = f (f x)").unwrap();
        let d = out.def("twice").unwrap();
        assert!(matches!(d.sig, RType::Forall(..)));
        assert!(d.body.to_string().starts_with("/\\a -> "), "{}", d.body);
    }

    #[test]
    fn program_round_trips_through_the_printer() {
        let p = parse_program("f :: Int -> Int\nf x = let y = inc x in y").unwrap();
        let q = parse_program(&p.to_string()).unwrap();
        assert_eq!(p.to_string(), q.to_string());
    }
}
