//! Administrative normal form: application arguments and `if` conditions
//! become variables. Temporaries are let-bound just outside the nearest
//! enclosing binder, lambda or branch, so a let-bound right-hand side never
//! begins with a temporary.

use alloc::boxed::Box;
use alloc::vec::Vec;

use super::syntax::{Expr, ExprKind};
use crate::name::{Name, NameGen};

const TEMP: &str = "anf";

/// Whether `x` was introduced by normalization.
pub fn is_temp(x: &Name) -> bool {
    x.is_generated() && x.stem() == TEMP
}

pub fn anf_normalize(e: &Expr, gen: &mut NameGen) -> Expr {
    let (binds, core) = norm(e, gen);
    wrap(binds, core)
}

type Binds = Vec<(Name, Expr)>;

fn wrap(binds: Binds, core: Expr) -> Expr {
    binds.into_iter().rev().fold(core, |acc, (t, rhs)| {
        let span = rhs.span;
        Expr::let_(t, rhs, acc, span)
    })
}

/// Split off hoistable temporaries; the core is in normal form.
fn norm(e: &Expr, gen: &mut NameGen) -> (Binds, Expr) {
    let span = e.span;
    match &e.kind {
        ExprKind::Const(_) | ExprKind::Var(_) => (Vec::new(), e.clone()),
        ExprKind::Lam(x, t, b) => {
            let b = anf_normalize(b, gen);
            (Vec::new(), Expr::new(ExprKind::Lam(x.clone(), t.clone(), Box::new(b)), span))
        }
        ExprKind::TyAbs(a, b) => {
            let b = anf_normalize(b, gen);
            (Vec::new(), Expr::new(ExprKind::TyAbs(a.clone(), Box::new(b)), span))
        }
        ExprKind::TyApp(f, t) => {
            let (binds, f) = norm(f, gen);
            (binds, Expr::new(ExprKind::TyApp(Box::new(f), t.clone()), span))
        }
        ExprKind::Let(x, a, b) if is_temp(x) => {
            let (mut binds, a) = norm(a, gen);
            binds.push((x.clone(), a));
            let (more, b) = norm(b, gen);
            binds.extend(more);
            (binds, b)
        }
        ExprKind::Let(x, a, b) => {
            let (binds, a) = norm(a, gen);
            let b = anf_normalize(b, gen);
            (binds, Expr::let_(x.clone(), a, b, span))
        }
        ExprKind::App(f, a) => {
            let (mut binds, f) = norm(f, gen);
            let (more, a) = norm(a, gen);
            binds.extend(more);
            let arg = atomize(a, &mut binds, gen);
            (binds, Expr::new(ExprKind::App(Box::new(f), Box::new(arg)), span))
        }
        ExprKind::If(c, a, b) => {
            let (mut binds, c) = norm(c, gen);
            let c = atomize(c, &mut binds, gen);
            let a = anf_normalize(a, gen);
            let b = anf_normalize(b, gen);
            (binds, Expr::new(ExprKind::If(Box::new(c), Box::new(a), Box::new(b)), span))
        }
    }
}

fn atomize(e: Expr, binds: &mut Binds, gen: &mut NameGen) -> Expr {
    if e.as_var().is_some() {
        return e;
    }
    let t = gen.fresh(TEMP);
    let span = e.span;
    binds.push((t.clone(), e));
    Expr::var(t, span)
}

/// Every application argument and `if` condition is a variable.
pub fn is_anf(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Const(_) | ExprKind::Var(_) => true,
        ExprKind::Lam(_, _, b) | ExprKind::TyAbs(_, b) | ExprKind::TyApp(b, _) => is_anf(b),
        ExprKind::Let(_, a, b) => is_anf(a) && is_anf(b),
        ExprKind::App(f, a) => a.as_var().is_some() && is_anf(f),
        ExprKind::If(c, a, b) => c.as_var().is_some() && is_anf(a) && is_anf(b),
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_expr;
    use super::*;
    use alloc::string::ToString;

    fn anf(src: &str) -> alloc::string::String {
        anf_normalize(&parse_expr(src).unwrap(), &mut NameGen::new()).to_string()
    }

    #[test]
    fn compound_argument_is_let_bound() {
        assert_eq!(anf("f (g x)"), "let anf#0 = g x in f anf#0");
        assert_eq!(anf("inc (dec x)"), "let anf#0 = dec x in inc anf#0");
    }

    #[test]
    fn normal_form_is_unchanged() {
        assert_eq!(anf("f x"), "f x");
        assert_eq!(anf("f x y"), "f x y");
    }

    #[test]
    fn temporaries_leave_let_right_hand_sides() {
        assert_eq!(anf("let y = inc (dec x) in y"), "let anf#0 = dec x in let y = inc anf#0 in y");
        assert_eq!(anf("\\x -> f (g x)"), "\\x -> let anf#0 = g x in f anf#0");
    }

    #[test]
    fn constants_and_conditions_are_named() {
        assert_eq!(anf("f 1"), "let anf#0 = 1 in f anf#0");
        assert_eq!(anf("if p x then 1 else 2"), "let anf#0 = p x in if anf#0 then 1 else 2");
    }

    #[test]
    fn idempotent() {
        let e = parse_expr("f (g (h x)) (let y = k (k y) in y)").unwrap();
        let mut gen = NameGen::new();
        let once = anf_normalize(&e, &mut gen);
        assert!(is_anf(&once));
        let twice = anf_normalize(&once, &mut gen);
        assert_eq!(once, twice);
    }
}
