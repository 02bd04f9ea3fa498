use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::{ArithOp, Pred, PredKind, RelOp, Sort};
use crate::name::Name;

/// Sorts of term variables and signatures of uninterpreted functions.
///
/// A variable mapped to `None` is in scope but function-typed; mentioning it
/// in a refinement is rejected.
#[derive(Clone, Debug, Default)]
pub struct SortEnv {
    vars: BTreeMap<Name, Option<Sort>>,
    funs: BTreeMap<Name, (Vec<Sort>, Sort)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortError {
    pub message: String,
}

impl fmt::Display for SortError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn err<T>(message: String) -> Result<T, SortError> {
    Err(SortError { message })
}

impl SortEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, x: Name, s: Sort) {
        self.vars.insert(x, Some(s));
    }

    pub fn bind_function(&mut self, x: Name) {
        self.vars.insert(x, None);
    }

    pub fn declare_fun(&mut self, f: Name, args: Vec<Sort>, ret: Sort) {
        self.funs.insert(f, (args, ret));
    }

    pub fn var(&self, x: &Name) -> Option<&Option<Sort>> {
        self.vars.get(x)
    }

    pub fn fun(&self, f: &Name) -> Option<&(Vec<Sort>, Sort)> {
        self.funs.get(f)
    }

    pub fn vars(&self) -> impl Iterator<Item = (&Name, &Option<Sort>)> {
        self.vars.iter()
    }

    pub fn funs(&self) -> impl Iterator<Item = (&Name, &(Vec<Sort>, Sort))> {
        self.funs.iter()
    }

    /// The sort of `p`, or the first offending sub-term.
    pub fn sort_of(&self, p: &Pred) -> Result<Sort, SortError> {
        let mut scope = self.clone();
        scope.infer(p)
    }

    /// Succeeds iff `p` is a well-sorted formula.
    pub fn check(&self, p: &Pred) -> Result<(), SortError> {
        match self.sort_of(p)? {
            Sort::Bool => Ok(()),
            s => err(format!("`{p}` has sort {s}, expected Bool")),
        }
    }

    pub fn well_sorted(&self, p: &Pred) -> bool {
        self.check(p).is_ok()
    }

    fn expect(&mut self, p: &Pred, want: &Sort) -> Result<(), SortError> {
        let got = self.infer(p)?;
        if &got == want {
            Ok(())
        } else {
            err(format!("`{p}` has sort {got}, expected {want}"))
        }
    }

    fn infer(&mut self, p: &Pred) -> Result<Sort, SortError> {
        match p.kind() {
            PredKind::Bool(_) => Ok(Sort::Bool),
            PredKind::Int(_) => Ok(Sort::Int),
            PredKind::Unit => Ok(Sort::Unit),
            PredKind::Var(x) => match self.vars.get(x) {
                Some(Some(s)) => Ok(s.clone()),
                Some(None) => err(format!("refinement mentions `{x}`, which has a function type")),
                None => err(format!("unbound variable `{x}` in refinement")),
            },
            PredKind::Neg(a) => {
                self.expect(a, &Sort::Int)?;
                Ok(Sort::Int)
            }
            PredKind::Arith(op, a, b) => {
                if *op == ArithOp::Mul && !matches!(a.kind(), PredKind::Int(_)) && !matches!(b.kind(), PredKind::Int(_))
                {
                    return err(format!("nonlinear multiplication `{p}`"));
                }
                self.expect(a, &Sort::Int)?;
                self.expect(b, &Sort::Int)?;
                Ok(Sort::Int)
            }
            PredKind::Rel(op, a, b) => {
                if matches!(op, RelOp::Eq | RelOp::Ne) {
                    let sa = self.infer(a)?;
                    self.expect(b, &sa)?;
                } else {
                    self.expect(a, &Sort::Int)?;
                    self.expect(b, &Sort::Int)?;
                }
                Ok(Sort::Bool)
            }
            PredKind::App(f, args) => {
                let Some((params, ret)) = self.funs.get(f).cloned() else {
                    return err(format!("unknown function `{f}`"));
                };
                if params.len() != args.len() {
                    return err(format!("`{f}` expects {} arguments, got {}", params.len(), args.len()));
                }
                for (a, s) in args.iter().zip(&params) {
                    self.expect(a, s)?;
                }
                Ok(ret)
            }
            PredKind::Not(a) => {
                self.expect(a, &Sort::Bool)?;
                Ok(Sort::Bool)
            }
            PredKind::And(a, b) | PredKind::Or(a, b) | PredKind::Imp(a, b) | PredKind::Iff(a, b) => {
                self.expect(a, &Sort::Bool)?;
                self.expect(b, &Sort::Bool)?;
                Ok(Sort::Bool)
            }
            PredKind::Exists(x, s, body) | PredKind::Forall(x, s, body) => {
                let saved = self.vars.insert(x.clone(), Some(s.clone()));
                let r = self.expect(body, &Sort::Bool);
                match saved {
                    Some(old) => self.vars.insert(x.clone(), old),
                    None => self.vars.remove(x),
                };
                r.map(|()| Sort::Bool)
            }
            PredKind::KApp(k, _) => err(format!("refinement-variable application {k} is not a well-formed refinement")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::KVar;
    use alloc::vec;

    fn le0(x: &str) -> Pred {
        Pred::rel(RelOp::Le, Pred::int(0), Pred::var(x))
    }

    #[test]
    fn int_comparison_is_well_sorted() {
        let mut env = SortEnv::new();
        env.bind("x".into(), Sort::Int);
        assert!(env.well_sorted(&le0("x")));
    }

    #[test]
    fn sort_clash_is_rejected() {
        let mut env = SortEnv::new();
        env.bind("x".into(), Sort::Bool);
        assert!(!env.well_sorted(&le0("x")));
    }

    #[test]
    fn kvar_application_is_never_well_formed() {
        let k = KVar::new("k".into(), vec![("y".into(), Sort::Int), ("v".into(), Sort::Int)]);
        let mut env = SortEnv::new();
        env.bind("y".into(), Sort::Int);
        env.bind("v".into(), Sort::Int);
        let e = env.check(&Pred::kapp(k, vec!["y".into(), "v".into()])).unwrap_err();
        assert!(e.message.contains("not a well-formed"));
    }

    #[test]
    fn function_typed_variable_gets_a_clear_diagnostic() {
        let mut env = SortEnv::new();
        env.bind_function("f".into());
        let e = env.check(&le0("f")).unwrap_err();
        assert!(e.message.contains("function type"), "{e}");
    }

    #[test]
    fn unbound_and_nonlinear_are_rejected() {
        let env = SortEnv::new();
        assert!(!env.well_sorted(&le0("x")));
        let mut env = SortEnv::new();
        env.bind("x".into(), Sort::Int);
        let sq = Pred::arith(ArithOp::Mul, Pred::var("x"), Pred::var("x"));
        assert!(!env.well_sorted(&Pred::eq(sq, Pred::int(4))));
        let lin = Pred::arith(ArithOp::Mul, Pred::int(2), Pred::var("x"));
        assert!(env.well_sorted(&Pred::eq(lin, Pred::int(4))));
    }

    #[test]
    fn quantifier_scopes_its_binder() {
        let env = SortEnv::new();
        let p = Pred::exists("x".into(), Sort::Int, le0("x"));
        assert!(env.well_sorted(&p));
    }

    #[test]
    fn uninterpreted_application() {
        let mut env = SortEnv::new();
        env.bind("x".into(), Sort::Int);
        env.declare_fun("f".into(), vec![Sort::Int], Sort::Int);
        let p = Pred::eq(Pred::app("f", vec![Pred::var("x")]), Pred::int(1));
        assert!(env.well_sorted(&p));
        let bad = Pred::eq(Pred::app("f", vec![Pred::tt()]), Pred::int(1));
        assert!(!env.well_sorted(&bad));
    }
}
