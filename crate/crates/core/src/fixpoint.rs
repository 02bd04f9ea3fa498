//! Predicate abstraction for cut variables.
//!
//! Each remaining κ starts as the conjunction of every well-sorted qualifier
//! instance over its parameters. Sweeps drop the conjuncts some defining
//! clause fails to establish until a sweep drops nothing; the final sweep is
//! thus a full re-check of every κ-headed clause under the result.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::constraint::{Assignment, FlatClause};
use crate::fusion::Failure;
use crate::logic::{KVar, Pred, PredKind, Renaming, Sort, SortEnv};
use crate::name::{Name, RESERVED};
use crate::oracle::{ValidityOracle, Verdict};

/// An atomic predicate template. A parameter sort of `None` matches any
/// sort.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Qualifier {
    pub name: Name,
    pub params: Vec<(Name, Option<Sort>)>,
    pub body: Pred,
}

impl fmt::Display for Qualifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "qualif {}(", self.name)?;
        for (i, (x, s)) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match s {
                Some(s) => write!(f, "{x}:{s}")?,
                None => write!(f, "{x}:_")?,
            }
        }
        write!(f, "): ({})", self.body)
    }
}

/// Every well-sorted instance of `quals` over the parameters of `k`, without
/// duplicates, in qualifier then parameter order.
pub fn instantiate(quals: &[Qualifier], k: &KVar, env: &SortEnv) -> Vec<Pred> {
    let mut scope = env.clone();
    for (z, s) in k.params() {
        scope.bind(z.clone(), s.clone());
    }
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for q in quals {
        let n = q.params.len();
        let m = k.arity();
        if m == 0 && n > 0 {
            continue;
        }
        let mut choice = alloc::vec![0usize; n];
        'outer: loop {
            let sorts_ok = q.params.iter().zip(&choice).all(|((_, want), &i)| match want {
                Some(s) => *s == k.params()[i].1,
                None => true,
            });
            if sorts_ok {
                let ren: Renaming =
                    q.params.iter().zip(&choice).map(|((x, _), &i)| (x.clone(), k.params()[i].0.clone())).collect();
                let p = q.body.subst(&ren);
                if scope.well_sorted(&p) && seen.insert(p.clone()) {
                    out.push(p);
                }
            }
            // Next choice in odometer order.
            for slot in (0..n).rev() {
                choice[slot] += 1;
                if choice[slot] < m {
                    continue 'outer;
                }
                choice[slot] = 0;
            }
            break;
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct FixpointResult {
    pub solution: Assignment,
    /// Concrete-headed clauses not valid under the solution.
    pub failures: Vec<Failure>,
    pub warnings: Vec<String>,
    pub sweeps: usize,
    pub queries: u64,
}

/// Weaken the qualifier conjunctions of every κ in `cs` to the greatest
/// fixpoint, then check the concrete-headed clauses.
pub fn solve<O: ValidityOracle + ?Sized>(
    cs: &[FlatClause],
    quals: &[Qualifier],
    env: &SortEnv,
    oracle: &mut O,
) -> FixpointResult {
    let mut kvars = BTreeSet::new();
    for c in cs {
        kvars.extend(c.kvars());
    }
    let mut conj: BTreeMap<KVar, Vec<Pred>> = kvars.iter().map(|k| (k.clone(), instantiate(quals, k, env))).collect();
    let (defining, checking): (Vec<&FlatClause>, Vec<&FlatClause>) = cs.iter().partition(|c| c.head_kvar().is_some());

    let mut warnings = Vec::new();
    let mut queries = 0u64;
    let mut sweeps = 0;
    loop {
        sweeps += 1;
        let sigma = to_assignment(&conj);
        // (κ, conjunct index) per query, in clause then conjunct order.
        let mut owners = Vec::new();
        let mut obligations = Vec::new();
        for c in &defining {
            let PredKind::KApp(k, args) = c.goal.kind() else { unreachable!() };
            let base = c.apply(&sigma);
            let ren: Renaming = k.params().iter().zip(args).map(|((z, _), y)| (z.clone(), y.clone())).collect();
            for (i, q) in conj[k].iter().enumerate() {
                owners.push((k.clone(), i));
                obligations.push(base.with_goal(q.subst(&ren)));
            }
        }
        queries += obligations.len() as u64;
        let verdicts = oracle.check_all(&obligations);
        let mut drop: BTreeMap<KVar, BTreeSet<usize>> = BTreeMap::new();
        for ((k, i), v) in owners.into_iter().zip(verdicts) {
            match v {
                Verdict::Valid => {}
                Verdict::Invalid(_) => {
                    drop.entry(k).or_default().insert(i);
                }
                Verdict::Unknown(why) => {
                    warnings.push(format!("dropping `{}` from {k}: solver gave up ({why})", conj[&k][i]));
                    drop.entry(k).or_default().insert(i);
                }
            }
        }
        if drop.is_empty() {
            break;
        }
        for (k, idx) in drop {
            let list = conj.get_mut(&k).expect("known kvar");
            let mut i = 0;
            list.retain(|_| {
                let keep = !idx.contains(&i);
                i += 1;
                keep
            });
        }
    }

    let solution = to_assignment(&conj);
    let obligations: Vec<FlatClause> = checking.iter().map(|c| c.apply(&solution)).collect();
    queries += obligations.len() as u64;
    let verdicts = oracle.check_all(&obligations);
    let failures = obligations
        .into_iter()
        .zip(verdicts)
        .filter(|(_, v)| !v.is_valid())
        .map(|(clause, verdict)| Failure { clause, verdict })
        .collect();
    FixpointResult { solution, failures, warnings, sweeps, queries }
}

fn to_assignment(conj: &BTreeMap<KVar, Vec<Pred>>) -> Assignment {
    let mut sigma = Assignment::new();
    for (k, qs) in conj {
        sigma.insert(k.clone(), Pred::conj(qs.iter().cloned()));
    }
    sigma
}

/// Qualifiers harvested from atomic refinements: each atom becomes a
/// template over its free variables, named apart and deduplicated up to
/// renaming. Atoms mentioning unknown or function-typed variables are
/// skipped.
pub fn scrape<'a>(atoms: impl IntoIterator<Item = (&'a Pred, &'a SortEnv)>) -> Vec<Qualifier> {
    let mut out: Vec<Qualifier> = Vec::new();
    let mut seen = BTreeSet::new();
    for (refinement, env) in atoms {
        for atom in refinement.conjuncts() {
            if matches!(atom.kind(), PredKind::Bool(_)) || atom.has_kvars() || atom.has_quantifier() {
                continue;
            }
            let vars = occurrence_order(&atom);
            let mut params = Vec::new();
            let mut ren = Renaming::new();
            let mut ok = true;
            for (i, x) in vars.iter().enumerate() {
                match env.var(x) {
                    Some(Some(s)) => {
                        let p = Name::from(format!("{RESERVED}q{i}"));
                        ren.insert(x.clone(), p.clone());
                        params.push((p, Some(s.clone())));
                    }
                    _ => ok = false,
                }
            }
            if !ok || params.is_empty() {
                continue;
            }
            let body = atom.subst(&ren);
            if seen.insert((body.clone(), params.clone())) {
                let name = Name::from(format!("Scraped{}", out.len()));
                out.push(Qualifier { name, params, body });
            }
        }
    }
    out
}

fn occurrence_order(p: &Pred) -> Vec<Name> {
    fn go(p: &Pred, out: &mut Vec<Name>) {
        match p.kind() {
            PredKind::Var(x) => {
                if !out.contains(x) {
                    out.push(x.clone());
                }
            }
            PredKind::Neg(a) | PredKind::Not(a) => go(a, out),
            PredKind::Arith(_, a, b)
            | PredKind::Rel(_, a, b)
            | PredKind::And(a, b)
            | PredKind::Or(a, b)
            | PredKind::Imp(a, b)
            | PredKind::Iff(a, b) => {
                go(a, out);
                go(b, out);
            }
            PredKind::App(_, args) => args.iter().for_each(|a| go(a, out)),
            _ => {}
        }
    }
    let mut out = Vec::new();
    go(p, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::RelOp;
    use alloc::string::ToString;
    use alloc::vec;

    fn q(params: &[(&str, Option<Sort>)], body: Pred) -> Qualifier {
        Qualifier { name: "Q".into(), params: params.iter().map(|(x, s)| (Name::new(x), s.clone())).collect(), body }
    }

    fn le(a: Pred, b: Pred) -> Pred {
        Pred::rel(RelOp::Le, a, b)
    }

    fn k_xv() -> KVar {
        KVar::new("k".into(), vec![("x".into(), Sort::Int), ("v".into(), Sort::Int)])
    }

    #[test]
    fn unary_qualifier_over_each_parameter() {
        let nat = q(&[("a", Some(Sort::Int))], le(Pred::int(0), Pred::var("a")));
        let got: Vec<_> = instantiate(&[nat], &k_xv(), &SortEnv::new()).iter().map(ToString::to_string).collect();
        assert_eq!(got, vec!["0 <= x", "0 <= v"]);
    }

    #[test]
    fn binary_wildcard_qualifier_takes_all_matches() {
        let rel = q(&[("a", None), ("b", None)], le(Pred::var("a"), Pred::var("b")));
        let got: BTreeSet<_> = instantiate(&[rel], &k_xv(), &SortEnv::new()).iter().map(ToString::to_string).collect();
        let want: BTreeSet<_> = ["x <= v", "v <= x", "x <= x", "v <= v"].into_iter().map(String::from).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn sort_filter_excludes_mismatches() {
        let nat = q(&[("a", None)], le(Pred::int(0), Pred::var("a")));
        let k = KVar::new("k".into(), vec![("b".into(), Sort::Bool)]);
        assert!(instantiate(&[nat], &k, &SortEnv::new()).is_empty());
    }

    #[test]
    fn scraping_generalizes_and_deduplicates() {
        let mut env = SortEnv::new();
        env.bind("x".into(), Sort::Int);
        env.bind("y".into(), Sort::Int);
        let a = Pred::and(le(Pred::int(0), Pred::var("x")), le(Pred::int(0), Pred::var("y")));
        let qs = scrape([(&a, &env)]);
        assert_eq!(qs.len(), 1);
        assert_eq!(qs[0].params.len(), 1);
    }
}
