//! Constraint generation: refinement templates, subtyping, selfification and
//! the syntax-directed traversal from elaborated programs to one NNF Horn
//! constraint.
//!
//! Bodies are checked against their signatures; subterms without a
//! signature are synthesized, with a fresh template wherever a synthesized
//! type would mention a binder going out of scope.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::constraint::{Bind, Constraint};
use crate::lang::{const_type, BaseTy, Elaborated, Expr, ExprKind, LangError, RType, TypeEnv, UType};
use crate::logic::{KVar, Pred, Sort, SortEnv};
use crate::name::{Name, NameGen};
use crate::span::Span;

/// The constraint for a whole program.
#[derive(Clone, Debug)]
pub struct Generated {
    pub constraint: Constraint,
    /// Uninterpreted functions and global constants.
    pub sort_env: SortEnv,
    /// Every refinement variable created, in creation order.
    pub kvars: Vec<KVar>,
    /// Variables standing for `_` holes in signatures.
    pub toplevel: BTreeSet<KVar>,
    /// Global signatures with holes replaced by templates.
    pub signatures: Vec<(Name, RType)>,
}

/// Generate the constraint whose satisfiability means every definition of
/// `prog` meets its signature.
pub fn generate(prog: &Elaborated, gen: &mut NameGen) -> Result<Generated, LangError> {
    let mut cg = Congen::new(gen);
    let mut toplevel = BTreeSet::new();
    let mut signatures = Vec::new();
    for (x, t) in &prog.globals {
        let t = if t.has_holes() {
            let before = cg.kvars.len();
            let filled = cg.fill_holes(t, &mut Vec::new());
            toplevel.extend(cg.kvars[before..].iter().cloned());
            filled
        } else {
            t.clone()
        };
        signatures.push((x.clone(), t));
    }
    let mut env = TypeEnv::new();
    for (x, t) in &signatures {
        env.push(x.clone(), t.clone());
    }
    let mut parts = Vec::new();
    for def in &prog.defs {
        let sig = env.lookup(&def.name).cloned().expect("definitions have signatures");
        parts.push(cg.check(&mut env, &def.body, &sig)?);
    }
    let body = Constraint::and(parts);
    let constraint = signatures.iter().rev().fold(body, |c, (x, t)| guard(x, t, c));
    Ok(Generated { constraint, sort_env: prog.sort_env(), kvars: cg.kvars, toplevel, signatures })
}

/// `Fresh(Γ)(t)`: a template of shape `t` whose variables range over the
/// base binders of `env` and the binders of `t` itself.
pub fn fresh(env: &TypeEnv, t: &UType, gen: &mut NameGen) -> RType {
    Congen::new(gen).fresh(env, t)
}

/// The subtyping constraint `t1 <: t2`.
pub fn sub(t1: &RType, t2: &RType, gen: &mut NameGen) -> Result<Constraint, LangError> {
    Congen::new(gen).sub(t1, t2, Span::default())
}

/// `⟨x:t⟩ ⇒ c`: binds `x` with its refinement when `t` is a refined base,
/// and is `c` itself for every other type.
pub fn guard(x: &Name, t: &RType, c: Constraint) -> Constraint {
    match t {
        RType::Base { v, base, pred } => Constraint::forall(Bind::new(x.clone(), base.sort(), pred.subst1(v, x)), c),
        _ => c,
    }
}

/// The selfified type of `x`: its refinement strengthened with `v = x`.
pub fn singty(env: &TypeEnv, x: &Name, gen: &mut NameGen) -> Result<RType, LangError> {
    match env.lookup(x) {
        Some(RType::Base { v, base, pred }) => {
            let (v, pred) = if v == x {
                let v2 = gen.fresh(v.stem());
                let p = pred.subst1(v, &v2);
                (v2, p)
            } else {
                (v.clone(), pred.clone())
            };
            let eq = Pred::eq(Pred::var(v.clone()), Pred::var(x.clone()));
            Ok(RType::base(v, *base, Pred::and(pred, eq)))
        }
        Some(t) => Ok(t.clone()),
        None => Err(LangError::new(Span::default(), format!("unbound variable `{x}`"))),
    }
}

/// One step into a type: function input, function output, or a
/// constructor argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    Arg,
    Res,
    Con(usize),
}

/// An occurrence of a quantified type variable in an instantiated scheme.
struct Occurrence {
    positive: bool,
    /// Supplied argument index and path inside its parameter type.
    site: Option<(usize, Vec<Step>)>,
}

/// Generation state: the name supply and the variables created so far.
pub struct Congen<'g> {
    gen: &'g mut NameGen,
    pub kvars: Vec<KVar>,
}

impl<'g> Congen<'g> {
    pub fn new(gen: &'g mut NameGen) -> Self {
        Congen { gen, kvars: Vec::new() }
    }

    pub fn fresh(&mut self, env: &TypeEnv, t: &UType) -> RType {
        let mut scope = env.base_binders();
        self.fresh_in(&mut scope, t)
    }

    fn fresh_in(&mut self, scope: &mut Vec<(Name, Sort)>, t: &UType) -> RType {
        match t {
            UType::Var(a) => RType::Var(a.clone()),
            UType::Base(b) => self.template(scope, *b, None),
            UType::Fun(x, a, b) => {
                let x = if x == "_" { self.gen.fresh("arg") } else { x.clone() };
                let ta = self.fresh_in(scope, a);
                let sort = ta.base_sort();
                if let Some(s) = &sort {
                    scope.push((x.clone(), s.clone()));
                }
                let tb = self.fresh_in(scope, b);
                if sort.is_some() {
                    scope.pop();
                }
                RType::fun(x, ta, tb)
            }
            UType::Forall(a, body) => RType::Forall(a.clone(), Box::new(self.fresh_in(scope, body))),
            UType::Con(c, args) => RType::Con(c.clone(), args.iter().map(|a| self.fresh_in(scope, a)).collect()),
        }
    }

    /// `{v:b | κ(y₁,…,yₖ,v)}` for a new κ over the unshadowed `scope`.
    fn template(&mut self, scope: &[(Name, Sort)], base: BaseTy, v: Option<&Name>) -> RType {
        let mut binders: Vec<(Name, Sort)> = Vec::new();
        for (i, (x, s)) in scope.iter().enumerate() {
            if scope[i + 1..].iter().all(|(y, _)| y != x) {
                binders.push((x.clone(), s.clone()));
            }
        }
        let wanted = v.cloned().unwrap_or_else(|| Name::new("v"));
        let v = if binders.iter().any(|(x, _)| *x == wanted) { self.gen.fresh(wanted.stem()) } else { wanted };
        let mut params: Vec<(Name, Sort)> = binders.iter().map(|(_, s)| (self.gen.fresh("z"), s.clone())).collect();
        params.push((self.gen.fresh("z"), base.sort()));
        let k = KVar::new(self.gen.fresh("k"), params);
        self.kvars.push(k.clone());
        let mut args: Vec<Name> = binders.into_iter().map(|(x, _)| x).collect();
        args.push(v.clone());
        RType::base(v, base, Pred::kapp(k, args))
    }

    /// Replace each `_` hole by a template over the signature binders in
    /// scope.
    fn fill_holes(&mut self, t: &RType, scope: &mut Vec<(Name, Sort)>) -> RType {
        match t {
            RType::Hole { v, base } => self.template(scope, *base, Some(v)),
            RType::Var(_) | RType::Base { .. } => t.clone(),
            RType::Fun(x, a, b) => {
                let a2 = self.fill_holes(a, scope);
                let sort = a2.base_sort();
                if let Some(s) = &sort {
                    scope.push((x.clone(), s.clone()));
                }
                let b2 = self.fill_holes(b, scope);
                if sort.is_some() {
                    scope.pop();
                }
                RType::fun(x.clone(), a2, b2)
            }
            RType::Forall(a, body) => RType::Forall(a.clone(), Box::new(self.fill_holes(body, scope))),
            RType::Con(c, args) => RType::Con(c.clone(), args.iter().map(|a| self.fill_holes(a, scope)).collect()),
        }
    }

    /// `t1 <: t2`, with goals tagged by `span`. Binders are renamed apart.
    pub fn sub(&mut self, t1: &RType, t2: &RType, span: Span) -> Result<Constraint, LangError> {
        match (t1, t2) {
            (RType::Base { v: v1, base: b1, pred: p }, RType::Base { v: v2, base: b2, pred: q }) if b1 == b2 => {
                if q.is_true() {
                    return Ok(Constraint::tt());
                }
                let z = self.gen.fresh("v");
                let hyp = Bind::new(z.clone(), b1.sort(), p.subst1(v1, &z));
                Ok(Constraint::forall(hyp, Constraint::goal(q.subst1(v2, &z), Some(span))))
            }
            (RType::Var(a), RType::Var(b)) if a == b => Ok(Constraint::tt()),
            (RType::Fun(x, s2, out2), RType::Fun(y, s, out)) => {
                let inputs = self.sub(s, s2, span)?;
                let z = self.gen.fresh(y.stem());
                let left = out2.subst1(x, &z, self.gen);
                let right = out.subst1(y, &z, self.gen);
                let outputs = self.sub(&left, &right, span)?;
                Ok(Constraint::and2(inputs, guard(&z, s, outputs)))
            }
            (RType::Forall(a, t), RType::Forall(b, s)) => {
                let s = if a == b { (**s).clone() } else { s.subst_tyvar(b, &RType::Var(a.clone())) };
                self.sub(t, &s, span)
            }
            (RType::Con(c, xs), RType::Con(d, ys)) if c == d && xs.len() == ys.len() => {
                let parts = xs.iter().zip(ys).map(|(x, y)| self.sub(x, y, span)).collect::<Result<Vec<_>, _>>()?;
                Ok(Constraint::and(parts))
            }
            _ => Err(LangError::new(span, format!("internal error: subtyping between `{t1}` and `{t2}`"))),
        }
    }

    /// The type of a variable occurrence: `{v:b | v = x}` for base types,
    /// whose refinement is already a hypothesis wherever `x` is in scope,
    /// and the declared type otherwise.
    fn var_type(&mut self, env: &TypeEnv, x: &Name, span: Span) -> Result<RType, LangError> {
        match env.lookup(x) {
            Some(RType::Base { v, base, .. }) => {
                let v = if v == x { self.gen.fresh(v.stem()) } else { v.clone() };
                let eq = Pred::eq(Pred::var(v.clone()), Pred::var(x.clone()));
                Ok(RType::base(v, *base, eq))
            }
            Some(t) => Ok(t.clone()),
            None => Err(LangError::new(span, format!("unbound variable `{x}`"))),
        }
    }

    /// Synthesize a type for `e` and the constraint making it sound.
    pub fn cons(&mut self, env: &mut TypeEnv, e: &Expr) -> Result<(Constraint, RType), LangError> {
        let span = e.span;
        match &e.kind {
            ExprKind::Const(c) => Ok((Constraint::tt(), const_type(c))),
            ExprKind::Var(x) => Ok((Constraint::tt(), self.var_type(env, x, span)?)),
            ExprKind::Lam(x, ann, body) => {
                let ann =
                    ann.as_ref().ok_or_else(|| LangError::new(span, "internal error: unannotated lambda".into()))?;
                let tx = self.fresh(&TypeEnv::new(), ann);
                env.push(x.clone(), tx.clone());
                let r = self.cons(env, body);
                env.pop();
                let (c, tb) = r?;
                Ok((guard(x, &tx, c), RType::fun(x.clone(), tx, tb)))
            }
            ExprKind::Let(x, a, b) => {
                let (c1, t1) = self.cons(env, a)?;
                env.push(x.clone(), t1.clone());
                let r = self.cons(env, b);
                env.pop();
                let (c2, t2) = r?;
                if t2.free_vars().contains(x) {
                    let hat = self.fresh(&TypeEnv::new(), &t2.shape());
                    let escape = self.sub(&t2, &hat, b.span)?;
                    Ok((Constraint::and2(c1, guard(x, &t1, Constraint::and2(c2, escape))), hat))
                } else {
                    Ok((Constraint::and2(c1, guard(x, &t1, c2)), t2))
                }
            }
            ExprKind::App(..) | ExprKind::TyApp(..) => self.spine(env, e),
            ExprKind::TyAbs(a, body) => {
                env.push_tyvar(a.clone());
                let r = self.cons(env, body);
                env.pop_tyvar();
                let (c, t) = r?;
                Ok((c, RType::Forall(a.clone(), Box::new(t))))
            }
            ExprKind::If(cond, a, b) => {
                let y = self.condition(cond)?;
                let (ca, ta) = self.cons(env, a)?;
                let (cb, tb) = self.cons(env, b)?;
                let hat = self.fresh(&TypeEnv::new(), &ta.shape());
                let then_ = Constraint::and2(ca, self.sub(&ta, &hat, a.span)?);
                let else_ = Constraint::and2(cb, self.sub(&tb, &hat, b.span)?);
                Ok((self.branches(&y, then_, else_), hat))
            }
        }
    }

    /// The constraint that `e` has type `want`. Lambdas, lets, conditionals
    /// and type abstractions push `want` inward; every other term is
    /// synthesized and compared.
    pub fn check(&mut self, env: &mut TypeEnv, e: &Expr, want: &RType) -> Result<Constraint, LangError> {
        match (&e.kind, want) {
            (ExprKind::TyAbs(a, body), RType::Forall(b, s)) => {
                let s = if a == b { (**s).clone() } else { s.subst_tyvar(b, &RType::Var(a.clone())) };
                env.push_tyvar(a.clone());
                let r = self.check(env, body, &s);
                env.pop_tyvar();
                r
            }
            (ExprKind::Lam(x, _, body), RType::Fun(y, s, out)) => {
                let out = out.subst1(y, x, self.gen);
                env.push((*x).clone(), (**s).clone());
                let r = self.check(env, body, &out);
                env.pop();
                Ok(guard(x, s, r?))
            }
            (ExprKind::Let(x, a, b), _) => {
                let (c1, t1) = self.cons(env, a)?;
                env.push(x.clone(), t1.clone());
                let r = self.check(env, b, want);
                env.pop();
                Ok(Constraint::and2(c1, guard(x, &t1, r?)))
            }
            (ExprKind::If(cond, a, b), _) => {
                let y = self.condition(cond)?;
                let then_ = self.check(env, a, want)?;
                let else_ = self.check(env, b, want)?;
                Ok(self.branches(&y, then_, else_))
            }
            _ => {
                let (c, t) = self.cons(env, e)?;
                Ok(Constraint::and2(c, self.sub(&t, want, e.span)?))
            }
        }
    }

    fn condition(&self, cond: &Expr) -> Result<Name, LangError> {
        cond.as_var()
            .cloned()
            .ok_or_else(|| LangError::new(cond.span, "internal error: condition not in normal form".into()))
    }

    /// `(∀g:Bool. y ⇒ then_) ∧ (∀g:Bool. ¬y ⇒ else_)`.
    fn branches(&mut self, y: &Name, then_: Constraint, else_: Constraint) -> Constraint {
        let g1 = self.gen.fresh("g");
        let g2 = self.gen.fresh("g");
        let yes = Pred::var(y.clone());
        Constraint::and2(
            Constraint::forall(Bind::new(g1, Sort::Bool, yes.clone()), then_),
            Constraint::forall(Bind::new(g2, Sort::Bool, Pred::not(yes)), else_),
        )
    }

    /// An application spine `h @t₁ … @tₘ y₁ … yₙ`.
    fn spine(&mut self, env: &mut TypeEnv, e: &Expr) -> Result<(Constraint, RType), LangError> {
        let span = e.span;
        let mut args = Vec::new();
        let mut cur = e;
        while let ExprKind::App(f, a) = &cur.kind {
            let y = a
                .as_var()
                .ok_or_else(|| LangError::new(a.span, "internal error: argument not in normal form".into()))?;
            args.push(y.clone());
            cur = f;
        }
        args.reverse();
        let mut tyargs = Vec::new();
        while let ExprKind::TyApp(f, t) = &cur.kind {
            tyargs.push(t);
            cur = f;
        }
        tyargs.reverse();
        let (mut c, mut t) = self.cons(env, cur)?;

        if !tyargs.is_empty() {
            let mut alphas = Vec::new();
            for _ in &tyargs {
                match t {
                    RType::Forall(a, body) => {
                        alphas.push(a);
                        t = *body;
                    }
                    other => {
                        return Err(LangError::new(span, format!("type application to `{other}`")));
                    }
                }
            }
            let insts: Vec<RType> =
                alphas.iter().zip(&tyargs).map(|(a, u)| self.instance(env, &t, a, u, &args)).collect();
            // Rename first so that instances mentioning a caller type
            // variable of the same name are not substituted again.
            let renamed: Vec<Name> = alphas.iter().map(|a| self.gen.fresh(a.stem())).collect();
            for (a, r) in alphas.iter().zip(&renamed) {
                t = t.subst_tyvar(a, &RType::Var(r.clone()));
            }
            for (r, inst) in renamed.iter().zip(&insts) {
                t = t.subst_tyvar(r, inst);
            }
        }

        for y in &args {
            match t {
                RType::Fun(x, s, out) => {
                    let ty = self.var_type(env, y, span)?;
                    c = Constraint::and2(c, self.sub(&ty, &s, span)?);
                    t = out.subst1(&x, y, self.gen);
                }
                other => {
                    return Err(LangError::new(span, format!("internal error: applying a value of type `{other}`")));
                }
            }
        }
        Ok((c, t))
    }

    /// The instance chosen for `a` in scheme body `t` applied to `args`.
    ///
    /// A variable occurring only positively is instantiated to the
    /// bottom refinement. A variable whose one negative occurrence lies
    /// under a type constructor inside a supplied argument takes that
    /// argument's component when it is closed: a fresh variable would be
    /// solved to exactly that component. Every other case gets a template.
    fn instance(&mut self, env: &TypeEnv, t: &RType, a: &Name, u: &UType, args: &[Name]) -> RType {
        let occs = occurrences(t, a, args.len());
        let negative: Vec<&Occurrence> = occs.iter().filter(|o| !o.positive).collect();
        if negative.is_empty() && !has_function(u) {
            return bottom(u);
        }
        if let [Occurrence { site: Some((j, path)), .. }] = negative.as_slice() {
            if path.iter().any(|s| matches!(s, Step::Con(_))) {
                let component = env.lookup(&args[*j]).and_then(|at| component(at, path));
                if let Some(comp) = component {
                    if comp.free_vars().is_empty() && comp.shape().same_shape(u) {
                        return comp.clone();
                    }
                }
            }
        }
        self.fresh(&TypeEnv::new(), u)
    }
}

fn occurrences(t: &RType, a: &Name, nargs: usize) -> Vec<Occurrence> {
    fn collect(
        t: &RType,
        a: &Name,
        positive: bool,
        path: &mut Vec<Step>,
        site: Option<usize>,
        out: &mut Vec<Occurrence>,
    ) {
        match t {
            RType::Var(b) if b == a => out.push(Occurrence { positive, site: site.map(|j| (j, path.clone())) }),
            RType::Var(_) | RType::Base { .. } | RType::Hole { .. } => {}
            RType::Fun(_, x, y) => {
                path.push(Step::Arg);
                collect(x, a, !positive, path, site, out);
                path.pop();
                path.push(Step::Res);
                collect(y, a, positive, path, site, out);
                path.pop();
            }
            RType::Forall(b, _) if b == a => {}
            RType::Forall(_, body) => collect(body, a, positive, path, site, out),
            RType::Con(_, xs) => {
                for (i, x) in xs.iter().enumerate() {
                    path.push(Step::Con(i));
                    collect(x, a, positive, path, site, out);
                    path.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    let mut t = t;
    for j in 0..nargs {
        match t {
            RType::Fun(_, p, r) => {
                collect(p, a, false, &mut Vec::new(), Some(j), &mut out);
                t = r;
            }
            _ => break,
        }
    }
    collect(t, a, true, &mut Vec::new(), None, &mut out);
    out
}

fn component<'t>(t: &'t RType, path: &[Step]) -> Option<&'t RType> {
    let Some((step, rest)) = path.split_first() else {
        return Some(t);
    };
    match (step, t) {
        (Step::Arg, RType::Fun(_, x, _)) => component(x, rest),
        (Step::Res, RType::Fun(_, _, y)) => component(y, rest),
        (Step::Con(i), RType::Con(_, xs)) => xs.get(*i).and_then(|x| component(x, rest)),
        _ => None,
    }
}

fn has_function(u: &UType) -> bool {
    match u {
        UType::Fun(..) => true,
        UType::Var(_) | UType::Base(_) => false,
        UType::Forall(_, t) => has_function(t),
        UType::Con(_, xs) => xs.iter().any(has_function),
    }
}

/// The shape `u` with every base refined by `false`.
fn bottom(u: &UType) -> RType {
    match u {
        UType::Var(a) => RType::Var(a.clone()),
        UType::Base(b) => RType::base("v", *b, Pred::ff()),
        UType::Forall(a, t) => RType::Forall(a.clone(), Box::new(bottom(t))),
        UType::Con(c, xs) => RType::Con(c.clone(), xs.iter().map(bottom).collect()),
        UType::Fun(..) => unreachable!("function shapes get templates"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::FlatClause;
    use crate::lang::{elaborate_source, parse_expr, parse_type};
    use alloc::string::{String, ToString};
    use alloc::vec;

    fn program(src: &str) -> Generated {
        let mut gen = NameGen::new();
        let elab = elaborate_source(src, &mut gen).unwrap();
        generate(&elab, &mut gen).unwrap()
    }

    fn utype(src: &str) -> UType {
        parse_type(src).unwrap().shape()
    }

    fn rtype(src: &str) -> RType {
        parse_type(src).unwrap()
    }

    fn kapp_args(t: &RType) -> Vec<String> {
        match t {
            RType::Base { pred, .. } => match pred.kind() {
                crate::logic::PredKind::KApp(_, args) => args.iter().map(|a| a.to_string()).collect(),
                _ => panic!("not a template: {t}"),
            },
            _ => panic!("not a base: {t}"),
        }
    }

    #[test]
    fn fresh_base_ranges_over_scope() {
        let mut env = TypeEnv::new();
        env.push("y1".into(), RType::trivial(BaseTy::Int));
        let mut gen = NameGen::new();
        let mut cg = Congen::new(&mut gen);
        let t = cg.fresh(&env, &UType::Base(BaseTy::Int));
        assert_eq!(kapp_args(&t), ["y1", "v"]);
        assert_eq!(cg.kvars.len(), 1);
        assert_eq!(cg.kvars[0].params().len(), 2);
        assert!(cg.kvars[0].params().iter().all(|(_, s)| *s == Sort::Int));
    }

    #[test]
    fn fresh_function_extends_scope_with_input() {
        let mut gen = NameGen::new();
        let t = fresh(&TypeEnv::new(), &utype("x:Int -> Int"), &mut gen);
        let RType::Fun(x, a, b) = &t else { panic!("{t}") };
        assert_eq!(x.as_str(), "x");
        assert_eq!(kapp_args(a), ["v"]);
        assert_eq!(kapp_args(b), ["x", "v"]);
        assert_eq!(t.shape(), utype("x:Int -> Int"));
    }

    #[test]
    fn fresh_leaves_type_variables() {
        let mut gen = NameGen::new();
        assert_eq!(fresh(&TypeEnv::new(), &UType::Var("a".into()), &mut gen), RType::Var("a".into()));
        let list = fresh(&TypeEnv::new(), &utype("List Int"), &mut gen);
        assert_eq!(list.shape(), utype("List Int"));
    }

    #[test]
    fn fresh_skips_shadowed_and_function_binders() {
        let mut env = TypeEnv::new();
        env.push("x".into(), RType::trivial(BaseTy::Int));
        env.push("f".into(), rtype("Int -> Int"));
        env.push("x".into(), RType::trivial(BaseTy::Bool));
        let mut gen = NameGen::new();
        let mut cg = Congen::new(&mut gen);
        let t = cg.fresh(&env, &UType::Base(BaseTy::Int));
        assert_eq!(kapp_args(&t), ["x", "v"]);
        assert_eq!(cg.kvars[0].params()[0].1, Sort::Bool);
    }

    #[test]
    fn sub_base_is_an_implication() {
        let mut gen = NameGen::new();
        let c = sub(&rtype("{x:Int | 0 <= x}"), &rtype("{y:Int | 0 <= y + 1}"), &mut gen).unwrap();
        let flat = c.flatten();
        assert_eq!(flat.len(), 1);
        let z = &flat[0].binders[0].name;
        assert_eq!(flat[0].binders[0].pred.to_string(), format!("0 <= {z}"));
        assert_eq!(flat[0].goal.to_string(), format!("0 <= {z} + 1"));
    }

    #[test]
    fn sub_type_variable_is_trivial() {
        let mut gen = NameGen::new();
        assert!(sub(&RType::Var("a".into()), &RType::Var("a".into()), &mut gen).unwrap().is_true());
        assert!(sub(&RType::Var("a".into()), &RType::Var("b".into()), &mut gen).is_err());
    }

    #[test]
    fn sub_function_is_contravariant_and_guarded() {
        let mut gen = NameGen::new();
        let t1 = rtype("x:{v:Int | 0 <= v} -> {v:Int | v = x + 1}");
        let t2 = rtype("y:{v:Int | 1 <= v} -> {v:Int | 1 <= v}");
        let flat = sub(&t1, &t2, &mut gen).unwrap().flatten();
        assert_eq!(flat.len(), 2);
        // Inputs: 1 <= v  ==>  0 <= v.
        assert_eq!(flat[0].binders.len(), 1);
        assert!(flat[0].goal.to_string().starts_with("0 <= "));
        // Outputs, under the shared input binder.
        let z = &flat[1].binders[0].name;
        assert_eq!(flat[1].binders[0].pred.to_string(), format!("1 <= {z}"));
        let w = &flat[1].binders[1].name;
        assert_eq!(flat[1].binders[1].pred.to_string(), format!("{w} = {z} + 1"));
        assert_eq!(flat[1].goal.to_string(), format!("1 <= {w}"));
    }

    #[test]
    fn sub_constructors_are_covariant() {
        let mut gen = NameGen::new();
        let flat = sub(&rtype("List {v:Int | 1 <= v}"), &rtype("List {v:Int | 0 <= v}"), &mut gen).unwrap().flatten();
        assert_eq!(flat.len(), 1);
        assert!(flat[0].binders[0].pred.to_string().starts_with("1 <= "));
    }

    #[test]
    fn guard_binds_only_refined_bases() {
        let goal = Constraint::goal(Pred::var("p"), None);
        let c = guard(&"x".into(), &rtype("{y:Int | 0 <= y}"), goal.clone());
        let flat = c.flatten();
        assert_eq!(flat[0].binders, vec![Bind::new("x", Sort::Int, parse_pred_("0 <= x"))]);
        assert_eq!(guard(&"f".into(), &rtype("Int -> Int"), goal.clone()), goal);
        assert_eq!(guard(&"x".into(), &RType::Var("a".into()), goal.clone()), goal);
    }

    fn parse_pred_(s: &str) -> Pred {
        crate::lang::parse_pred(s).unwrap()
    }

    #[test]
    fn singty_strengthens_bases() {
        let mut env = TypeEnv::new();
        env.push("x".into(), rtype("{v:Int | 0 <= v}"));
        env.push("f".into(), rtype("Int -> Int"));
        env.push("y".into(), RType::Var("a".into()));
        let mut gen = NameGen::new();
        assert_eq!(singty(&env, &"x".into(), &mut gen).unwrap().to_string(), "{v:Int | 0 <= v && v = x}");
        assert_eq!(singty(&env, &"f".into(), &mut gen).unwrap(), rtype("Int -> Int"));
        assert_eq!(singty(&env, &"y".into(), &mut gen).unwrap(), RType::Var("a".into()));
        assert!(singty(&env, &"z".into(), &mut gen).is_err());
    }

    #[test]
    fn constant_synthesizes_its_singleton() {
        let mut gen = NameGen::new();
        let mut cg = Congen::new(&mut gen);
        let (c, t) = cg.cons(&mut TypeEnv::new(), &parse_expr("7").unwrap()).unwrap();
        assert!(c.is_true());
        assert_eq!(t.to_string(), "{v:Int | v = 7}");
    }

    const EX1: &str = "ex1 :: Nat -> Nat\nex1 x =\n  let y =\n    let t = x\n    in\n      dec t\n  in\n    inc y\n";

    const EX2: &str = "ex2 :: Nat -> Nat\nex2 x =\n  let ys = let n  = dec x\n               p  = inc x\n               xs = n : []\n           in p : xs\n      y  = last ys\n  in\n    inc y\n";

    fn goals(flat: &[FlatClause]) -> Vec<String> {
        flat.iter().map(|c| c.goal.to_string()).collect()
    }

    #[test]
    fn ex1_has_two_clauses_sharing_the_input_binder() {
        let g = program(EX1);
        let flat = g.constraint.flatten();
        assert_eq!(flat.len(), 2, "{}", g.constraint);
        assert_eq!(g.kvars.len(), 1);
        for c in &flat {
            assert_eq!(c.binders[0].name.as_str(), "x");
            assert_eq!(c.binders[0].pred.to_string(), "0 <= x");
        }
        assert_eq!(flat[0].head_kvar(), Some(&g.kvars[0]));
        assert!(flat[1].body_kvars().contains(&g.kvars[0]));
        let gl = goals(&flat);
        assert!(gl[1].starts_with("0 <= "), "{gl:?}");
        // One binder object, not two copies: the tree shares the x node.
        let crate::constraint::Node::Forall(b, _) = g.constraint.node() else { panic!("{}", g.constraint) };
        assert_eq!(b.name.as_str(), "x");
    }

    #[test]
    fn ex2_has_four_clauses() {
        let g = program(EX2);
        let flat = g.constraint.flatten();
        assert_eq!(flat.len(), 4, "{}", g.constraint);
        assert_eq!(g.constraint.kvars().len(), 2);
        assert!(flat.iter().all(|c| c.binders[0].name == "x"));
    }

    #[test]
    fn let_chain_nests_one_template_per_binding() {
        let src = "exp :: Nat -> Nat\nexp x0 = let x1 = id x0\n             x2 = id x1\n         in x2\n";
        let g = program(src);
        assert_eq!(g.constraint.kvars().len(), 2);
        let flat = g.constraint.flatten();
        assert_eq!(flat.len(), 3, "{}", g.constraint);
        let depth: Vec<usize> = flat.iter().map(|c| c.binders.len()).collect();
        assert_eq!(depth, [2, 3, 4]);
        assert_eq!(flat[1].binders[1].name.as_str(), "x1");
        assert_eq!(flat[2].binders[2].name.as_str(), "x2");
    }

    #[test]
    fn holes_become_top_level_templates() {
        let g = program("f :: n:Int -> {v:Int | _}\nf n = n\n");
        assert_eq!(g.toplevel.len(), 1);
        let (_, sig) = g.signatures.iter().find(|(x, _)| *x == "f").unwrap();
        let RType::Fun(_, _, out) = sig else { panic!() };
        assert_eq!(kapp_args(out), ["n", "v"]);
    }

    #[test]
    fn constraints_are_well_sorted() {
        for src in [EX1, EX2, "f :: n:Int -> {v:Int | _}\nf n = if n <= 0 then 0 else f (n - 1)\n"] {
            let g = program(src);
            g.constraint.wf_modulo_kvars(&g.sort_env).unwrap();
        }
    }

    #[test]
    fn positive_only_instances_are_bottom() {
        let g = program("f :: List Int\nf = []\n");
        let flat = g.constraint.flatten();
        assert!(flat.is_empty(), "{}", g.constraint);
        assert!(g.kvars.is_empty());
    }
}
