use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::{Pred, PredKind, Sort};
use crate::name::{Name, RESERVED};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkolemError {
    pub message: String,
}

impl fmt::Display for SkolemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Replace every existential in a hypothesis position by a universally
/// quantified variable bound at the nearest enclosing implication.
///
/// Validity is preserved. An existential in a goal position, or anywhere the
/// polarity is mixed (under `<=>`) or a universal sits in a hypothesis, is
/// rejected. Shared nodes are rewritten once and keep one set of skolems.
pub fn skolemize_hypotheses(p: &Pred) -> Result<Pred, SkolemError> {
    let mut s = Skolemizer { avoid: p.all_names(), next: 0, pos_memo: BTreeMap::new(), neg_memo: BTreeMap::new() };
    s.pos(p)
}

type Lifted = Vec<(Name, Sort)>;

/// Memo tables are keyed by node address and hold the key node itself, so
/// an address cannot be reused by a later node while the table lives. The
/// renamed bodies of existentials are temporaries, so this matters.
struct Skolemizer {
    avoid: BTreeSet<Name>,
    next: u64,
    pos_memo: BTreeMap<usize, (Pred, Pred)>,
    neg_memo: BTreeMap<usize, (Pred, (Pred, Lifted))>,
}

fn error<T>(msg: String) -> Result<T, SkolemError> {
    Err(SkolemError { message: msg })
}

fn wrap(vars: Lifted, body: Pred) -> Pred {
    let mut seen = BTreeSet::new();
    let vars: Vec<_> = vars.into_iter().filter(|(x, _)| seen.insert(x.clone())).collect();
    vars.into_iter().rev().fold(body, |acc, (x, s)| Pred::new(PredKind::Forall(x, s, acc)))
}

impl Skolemizer {
    fn fresh(&mut self, x: &Name) -> Name {
        loop {
            let n = Name::from(format!("{}{RESERVED}k{}", x.stem(), self.next));
            self.next += 1;
            if self.avoid.insert(n.clone()) {
                return n;
            }
        }
    }

    fn pos(&mut self, p: &Pred) -> Result<Pred, SkolemError> {
        if let Some((_, r)) = self.pos_memo.get(&p.addr()) {
            return Ok(r.clone());
        }
        let r = match p.kind() {
            PredKind::Imp(a, b) => {
                let (a2, lifted) = self.neg(a)?;
                let b2 = self.pos(b)?;
                let body = if a2.ptr_eq(a) && b2.ptr_eq(b) { p.clone() } else { Pred::imp(a2, b2) };
                wrap(lifted, body)
            }
            PredKind::Not(a) => {
                let (a2, lifted) = self.neg(a)?;
                let body = if a2.ptr_eq(a) { p.clone() } else { Pred::not(a2) };
                wrap(lifted, body)
            }
            PredKind::And(a, b) | PredKind::Or(a, b) => {
                let a2 = self.pos(a)?;
                let b2 = self.pos(b)?;
                if a2.ptr_eq(a) && b2.ptr_eq(b) {
                    p.clone()
                } else if matches!(p.kind(), PredKind::And(..)) {
                    Pred::and(a2, b2)
                } else {
                    Pred::or(a2, b2)
                }
            }
            PredKind::Forall(x, s, body) => {
                let b2 = self.pos(body)?;
                if b2.ptr_eq(body) {
                    p.clone()
                } else {
                    Pred::new(PredKind::Forall(x.clone(), s.clone(), b2))
                }
            }
            PredKind::Exists(..) => return error(format!("existential in goal position: {p}")),
            PredKind::Iff(..) if p.has_quantifier() => return error(format!("quantifier under <=>: {p}")),
            _ => p.clone(),
        };
        self.pos_memo.insert(p.addr(), (p.clone(), r.clone()));
        Ok(r)
    }

    fn neg(&mut self, p: &Pred) -> Result<(Pred, Lifted), SkolemError> {
        if let Some((_, r)) = self.neg_memo.get(&p.addr()) {
            return Ok(r.clone());
        }
        let r = match p.kind() {
            PredKind::Exists(x, s, body) => {
                let z = self.fresh(x);
                let renamed = body.subst1(x, &z);
                let (b2, mut lifted) = self.neg(&renamed)?;
                lifted.insert(0, (z, s.clone()));
                (b2, lifted)
            }
            PredKind::And(a, b) | PredKind::Or(a, b) => {
                let (a2, mut la) = self.neg(a)?;
                let (b2, lb) = self.neg(b)?;
                la.extend(lb);
                let q = if a2.ptr_eq(a) && b2.ptr_eq(b) {
                    p.clone()
                } else if matches!(p.kind(), PredKind::And(..)) {
                    Pred::and(a2, b2)
                } else {
                    Pred::or(a2, b2)
                };
                (q, la)
            }
            PredKind::Imp(a, b) => {
                if a.has_quantifier() {
                    return error(format!("quantifier in goal position: {a}"));
                }
                let (b2, lb) = self.neg(b)?;
                let q = if b2.ptr_eq(b) { p.clone() } else { Pred::imp(a.clone(), b2) };
                (q, lb)
            }
            PredKind::Not(_) | PredKind::Iff(..) | PredKind::Forall(..) if p.has_quantifier() => {
                return error(format!("cannot skolemize hypothesis: {p}"))
            }
            _ => (p.clone(), Vec::new()),
        };
        self.neg_memo.insert(p.addr(), (p.clone(), r.clone()));
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn app(f: &str, xs: &[&str]) -> Pred {
        Pred::app(f, xs.iter().map(|x| Pred::var(*x)).collect())
    }

    #[test]
    fn hypothesis_existential_becomes_universal() {
        let p = Pred::imp(Pred::exists("x".into(), Sort::Int, app("P", &["x"])), app("Q", &[]));
        let q = skolemize_hypotheses(&p).unwrap();
        match q.kind() {
            PredKind::Forall(z, Sort::Int, body) => {
                assert!(z.as_str() != "x");
                assert_eq!(*body, Pred::imp(app("P", &[z.as_str()]), app("Q", &[])));
            }
            _ => panic!("{q}"),
        }
    }

    #[test]
    fn quantifier_free_input_is_unchanged() {
        let p = Pred::imp(app("P", &[]), app("Q", &[]));
        let q = skolemize_hypotheses(&p).unwrap();
        assert!(q.ptr_eq(&p));
    }

    #[test]
    fn nested_under_outer_universal() {
        let p = Pred::forall(
            "a".into(),
            Sort::Int,
            Pred::imp(Pred::exists("b".into(), Sort::Int, app("R", &["a", "b"])), app("S", &["a"])),
        );
        let q = skolemize_hypotheses(&p).unwrap();
        assert_eq!(q.to_string(), "forall a:Int. forall b#k0:Int. R(a, b#k0) => S(a)");
    }

    #[test]
    fn goal_existential_is_an_error() {
        let p = Pred::imp(app("P", &[]), Pred::exists("x".into(), Sort::Int, app("Q", &["x"])));
        assert!(skolemize_hypotheses(&p).is_err());
    }

    #[test]
    fn skolem_names_avoid_existing_names() {
        let p = Pred::imp(
            Pred::and(Pred::exists("x".into(), Sort::Int, app("P", &["x"])), app("P", &["x#k0"])),
            app("Q", &[]),
        );
        let q = skolemize_hypotheses(&p).unwrap();
        assert!(q.to_string().starts_with("forall x#k1:Int."), "{q}");
    }

    #[test]
    fn every_renamed_body_is_kept() {
        // Nested existentials whose renamed bodies are rewritten and dropped
        // before their siblings are built; a memo keyed on bare addresses
        // would hand a later sibling an earlier one's result.
        let src = "forall a39:Int. 0 <= a39 => (forall v40:Int. (exists a33:Int. (exists a36:Int. \
                   (exists v38:Int. 0 <= v38 && a36 = v38) && (exists v37:Int. v37 = a36 - 1 && a33 = v37)) \
                   && (exists v34:Int. v34 = a33 + 1 && v40 = v34)) => 0 <= v40)";
        let p = crate::lang::parse_pred(src).unwrap();
        let q = skolemize_hypotheses(&p).unwrap();
        assert_eq!(q.atoms(), p.atoms(), "{q}");
        let text = q.to_string();
        assert!(text.contains("- 1") && text.contains("+ 1"), "{text}");
    }
}
