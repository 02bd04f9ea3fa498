//! Elimination of refinement variables by their strongest scoped solutions,
//! and the satisfiability driver built on it.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::constraint::{cut_vars_with, Assignment, Bind, Constraint, DependencyGraph, FlatClause, Node, Position};
use crate::fixpoint::{self, Qualifier};
use crate::logic::{KVar, Pred, PredKind, SortEnv};
use crate::oracle::{ValidityOracle, Verdict};

/// The scope of `k` in `c`: the binders on the path to the smallest subtree
/// holding every occurrence of `k`, and that subtree. Descends into a
/// conjunction only through its single `k`-containing branch, and through a
/// binder only when its hypothesis does not mention `k`.
pub fn scope(k: &KVar, c: &Constraint) -> (Vec<Bind>, Constraint) {
    let mut memo = BTreeMap::new();
    let mut prefix = Vec::new();
    let mut cur = c.clone();
    if !mentions(k, &cur, &mut memo) {
        return (prefix, cur);
    }
    loop {
        let next = match cur.node() {
            Node::And(cs) => {
                let mut with = cs.iter().filter(|x| mentions(k, x, &mut memo));
                match (with.next(), with.next()) {
                    (Some(only), None) => only.clone(),
                    _ => break,
                }
            }
            Node::Forall(b, body) if !b.pred.mentions_kvar(k) => {
                prefix.push(b.clone());
                body.clone()
            }
            _ => break,
        };
        cur = next;
    }
    (prefix, cur)
}

fn mentions(k: &KVar, c: &Constraint, memo: &mut BTreeMap<usize, bool>) -> bool {
    if let Some(b) = memo.get(&c.addr()) {
        return *b;
    }
    let r = match c.node() {
        Node::Goal(p, _) => p.mentions_kvar(k),
        Node::And(cs) => cs.iter().any(|x| mentions(k, x, memo)),
        Node::Forall(b, body) => b.pred.mentions_kvar(k) || mentions(k, body, memo),
    };
    memo.insert(c.addr(), r);
    r
}

/// The disjunction, over the goals applying `k`, of the existentially
/// closed hypotheses above each goal, equating the parameters of `k` with
/// the goal's arguments. Other goals contribute `false`.
pub fn sol(k: &KVar, c: &Constraint) -> Pred {
    fn go(k: &KVar, c: &Constraint, memo: &mut BTreeMap<usize, Pred>) -> Pred {
        if let Some(p) = memo.get(&c.addr()) {
            return p.clone();
        }
        let p = match c.node() {
            Node::Goal(g, _) => Pred::disj(g.conjuncts().iter().filter_map(|q| match q.kind() {
                PredKind::KApp(k2, args) if k2 == k => Some(Pred::conj(
                    k.params().iter().zip(args).map(|((z, _), y)| Pred::eq(Pred::var(z.clone()), Pred::var(y.clone()))),
                )),
                _ => None,
            })),
            Node::And(cs) => Pred::disj(cs.iter().map(|x| go(k, x, memo))),
            Node::Forall(b, body) => {
                Pred::exists(b.name.clone(), b.sort.clone(), Pred::and(b.pred.clone(), go(k, body, memo)))
            }
        };
        memo.insert(c.addr(), p.clone());
        p
    }
    go(k, c, &mut BTreeMap::new())
}

/// The strongest solution of `k` relative to its scope; outer binders of the
/// scope stay free in the result.
pub fn strongest_scoped(k: &KVar, c: &Constraint) -> Pred {
    let (_, inner) = scope(k, c);
    sol(k, &inner)
}

/// The strongest solution computed from the whole constraint.
pub fn strongest_unscoped(k: &KVar, c: &Constraint) -> Pred {
    sol(k, c)
}

/// Remove `k` from `c`: hypotheses get its strongest solution, goals
/// applying it become `true`. `k` must not depend on itself.
pub fn elim_one(k: &KVar, c: &Constraint) -> Result<Constraint, SatError> {
    if DependencyGraph::of_constraint(c).has_edge(k, k) {
        return Err(SatError::Cyclic(alloc::vec![k.clone()]));
    }
    Ok(elim_one_unchecked(k, c, true))
}

/// As [`elim_one`] but with the solution computed from the whole constraint.
pub fn elim_one_unscoped(k: &KVar, c: &Constraint) -> Result<Constraint, SatError> {
    if DependencyGraph::of_constraint(c).has_edge(k, k) {
        return Err(SatError::Cyclic(alloc::vec![k.clone()]));
    }
    Ok(elim_one_unchecked(k, c, false))
}

fn elim_one_unchecked(k: &KVar, c: &Constraint, scoped: bool) -> Constraint {
    let body = if scoped { strongest_scoped(k, c) } else { strongest_unscoped(k, c) };
    let sigma = Assignment::singleton(k.clone(), body);
    let mut memo = BTreeMap::new();
    c.map_preds(&mut |pos, p| match pos {
        Position::Hyp => sigma.apply_memo(p, &mut memo),
        Position::Goal if p.mentions_kvar(k) => p.map_kapps(&mut |k2, _| (k2 == k).then(Pred::tt)),
        Position::Goal => p.clone(),
    })
}

/// Eliminate `ks` in order. The set must be acyclic in `c`.
pub fn elim(ks: &[KVar], c: &Constraint) -> Result<Constraint, SatError> {
    let set: BTreeSet<KVar> = ks.iter().cloned().collect();
    let g = DependencyGraph::of_constraint(c).restrict(&set);
    if !g.is_acyclic() {
        return Err(SatError::Cyclic(g.cyclic_components().into_iter().flatten().collect()));
    }
    Ok(ks.iter().fold(c.clone(), |acc, k| elim_one_unchecked(k, &acc, true)))
}

/// Which refinement variables are eliminated before the fixpoint runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Eliminate {
    /// Every variable; cyclic constraints are an error.
    All,
    /// Every variable except the cut set.
    #[default]
    Cuts,
    /// None; everything goes to the fixpoint.
    None,
}

#[derive(Clone, Debug)]
pub struct SatOptions {
    pub eliminate: Eliminate,
    /// Compute solutions relative to the scope (the default) or from the
    /// whole constraint.
    pub scoped: bool,
    /// Abort elimination once the constraint holds more atoms than this.
    pub atom_limit: u64,
    /// Extra variables to treat as cuts, in addition to the heuristic's.
    pub forced_cuts: BTreeSet<KVar>,
}

impl Default for SatOptions {
    fn default() -> Self {
        SatOptions { eliminate: Eliminate::Cuts, scoped: true, atom_limit: 1_000_000, forced_cuts: BTreeSet::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatError {
    /// These variables lie on dependency cycles but were to be eliminated.
    Cyclic(Vec<KVar>),
    /// Elimination grew the constraint past the atom limit.
    Fuse { atoms: u64, limit: u64, eliminated: usize },
}

impl fmt::Display for SatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SatError::Cyclic(ks) => {
                f.write_str("cyclic refinement variables cannot be eliminated:")?;
                for k in ks {
                    write!(f, " {k}")?;
                }
                Ok(())
            }
            SatError::Fuse { atoms, limit, eliminated } => write!(
                f,
                "elimination aborted after {eliminated} variables: {atoms} atoms exceeds the limit of {limit}"
            ),
        }
    }
}

/// A clause that could not be shown valid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub clause: FlatClause,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Safe,
    Unsafe(Vec<Failure>),
    Unknown(Vec<Failure>),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SatStats {
    pub kvars: usize,
    pub cuts: usize,
    pub eliminated: usize,
    pub clauses: u64,
    pub vc_atoms: u64,
    pub vc_clauses: u64,
    pub queries: u64,
    pub fixpoint_sweeps: usize,
}

#[derive(Clone, Debug)]
pub struct SatReport {
    pub outcome: Outcome,
    pub stats: SatStats,
    /// The constraint after elimination.
    pub vc: Constraint,
    /// Solution found for the cut variables.
    pub solution: Assignment,
    pub warnings: Vec<String>,
}

/// Elimination order and cut set chosen for `c`.
pub fn plan(c: &Constraint, opts: &SatOptions) -> Result<(Vec<KVar>, BTreeSet<KVar>), SatError> {
    let all = c.kvars();
    let g = DependencyGraph::of_constraint(c);
    let cuts = match opts.eliminate {
        Eliminate::All => {
            if !g.is_acyclic() {
                let comps = g.cyclic_components();
                return Err(SatError::Cyclic(comps.into_iter().flatten().collect()));
            }
            BTreeSet::new()
        }
        Eliminate::Cuts => {
            let forced = opts.forced_cuts.intersection(&all).cloned().collect();
            cut_vars_with(&g, forced)
        }
        Eliminate::None => all.clone(),
    };
    let rest: BTreeSet<KVar> = all.difference(&cuts).cloned().collect();
    let order = g.restrict(&rest).reverse_topological().expect("removing the cut set leaves an acyclic graph");
    Ok((order, cuts))
}

/// Eliminate the non-cut variables of `c`, then decide the remaining
/// clauses, by the fixpoint when cut variables remain.
pub fn sat<O: ValidityOracle + ?Sized>(
    c: &Constraint,
    quals: &[Qualifier],
    env: &SortEnv,
    opts: &SatOptions,
    oracle: &mut O,
) -> Result<SatReport, SatError> {
    let (order, cuts) = plan(c, opts)?;
    let mut stats = SatStats {
        kvars: c.kvars().len(),
        cuts: cuts.len(),
        eliminated: order.len(),
        clauses: c.clause_count(),
        ..SatStats::default()
    };
    let mut vc = c.clone();
    for (i, k) in order.iter().enumerate() {
        vc = elim_one_unchecked(k, &vc, opts.scoped);
        let atoms = vc.atoms();
        if atoms > opts.atom_limit {
            return Err(SatError::Fuse { atoms, limit: opts.atom_limit, eliminated: i + 1 });
        }
    }
    stats.vc_atoms = vc.atoms();
    let clauses = vc.flatten();
    stats.vc_clauses = clauses.len() as u64;

    let mut warnings = Vec::new();
    let (failures, solution) = if vc.kvars().is_empty() {
        stats.queries = clauses.len() as u64;
        let verdicts = oracle.check_all(&clauses);
        let failures = clauses
            .into_iter()
            .zip(verdicts)
            .filter(|(_, v)| !v.is_valid())
            .map(|(clause, verdict)| Failure { clause, verdict })
            .collect();
        (failures, Assignment::new())
    } else {
        let r = fixpoint::solve(&clauses, quals, env, oracle);
        stats.queries = r.queries;
        stats.fixpoint_sweeps = r.sweeps;
        warnings = r.warnings;
        (r.failures, r.solution)
    };
    let outcome = if failures.is_empty() {
        Outcome::Safe
    } else if failures.iter().any(|f| matches!(f.verdict, Verdict::Invalid(_))) {
        Outcome::Unsafe(failures)
    } else {
        Outcome::Unknown(failures)
    };
    Ok(SatReport { outcome, stats, vc, solution, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{RelOp, Sort};
    use crate::name::Name;
    use alloc::string::ToString;
    use alloc::vec;

    fn v(x: &str) -> Pred {
        Pred::var(x)
    }

    fn kx() -> KVar {
        KVar::new("k".into(), vec![("x".into(), Sort::Int)])
    }

    fn ka(k: &KVar, y: &str) -> Pred {
        Pred::kapp(k.clone(), vec![Name::new(y)])
    }

    fn all(b: &str, p: Pred, c: Constraint) -> Constraint {
        Constraint::forall(Bind::new(b, Sort::Int, p), c)
    }

    fn goal(p: Pred) -> Constraint {
        Constraint::goal(p, None)
    }

    #[test]
    fn sol_of_a_single_application() {
        let k = kx();
        assert_eq!(sol(&k, &goal(ka(&k, "a"))).to_string(), "x = a");
    }

    #[test]
    fn sol_of_a_conjunction_is_a_disjunction() {
        let k = kx();
        let c = Constraint::and2(goal(ka(&k, "a")), goal(ka(&k, "b")));
        assert_eq!(sol(&k, &c).to_string(), "x = a || x = b");
    }

    #[test]
    fn sol_quantifies_hypotheses() {
        let k = kx();
        let c = all("b", Pred::app("q", vec![v("b")]), Constraint::and2(goal(ka(&k, "a")), goal(ka(&k, "b"))));
        assert_eq!(sol(&k, &c).to_string(), "exists b:Int. q(b) && (x = a || x = b)");
    }

    #[test]
    fn sol_without_definitions_is_false() {
        let k = kx();
        assert!(sol(&k, &goal(v("g"))).is_false());
    }

    #[test]
    fn scope_keeps_binder_as_outer_context() {
        let k = kx();
        assert!(scope(&k, &goal(ka(&k, "y"))).0.is_empty());
        let c = all("y", v("p"), goal(ka(&k, "y")));
        let (prefix, inner) = scope(&k, &c);
        assert_eq!(prefix.len(), 1);
        assert_eq!(prefix[0].name.as_str(), "y");
        assert_eq!(inner, goal(ka(&k, "y")));
        assert_eq!(strongest_scoped(&k, &c).to_string(), "x = y");
    }

    #[test]
    fn scope_stops_at_mentioning_hypothesis_and_shared_conjunction() {
        let k = kx();
        let c = all("y", ka(&k, "y"), goal(v("g")));
        assert!(scope(&k, &c).1.ptr_eq(&c));
        let both = Constraint::and2(goal(ka(&k, "a")), all("y", ka(&k, "y"), goal(v("g"))));
        assert!(scope(&k, &both).1.ptr_eq(&both));
    }

    #[test]
    fn elim_one_replaces_uses_and_drops_definitions() {
        let k = kx();
        let c = Constraint::and2(all("v", v("p"), goal(ka(&k, "v"))), all("y", ka(&k, "y"), goal(v("g"))));
        let e = elim_one(&k, &c).unwrap();
        assert!(!e.mentions_kvar(&k));
        let cls = e.flatten();
        assert_eq!(cls.len(), 1);
        assert_eq!(cls[0].bodies()[0].to_string(), "exists v:Int. p && y = v");
    }

    #[test]
    fn elim_one_rejects_self_dependency() {
        let k = kx();
        let c = all("y", ka(&k, "y"), all("w", Pred::tt(), goal(ka(&k, "w"))));
        assert!(matches!(elim_one(&k, &c), Err(SatError::Cyclic(_))));
    }

    #[test]
    fn elim_of_nothing_is_identity() {
        let c = goal(Pred::rel(RelOp::Le, Pred::int(0), v("x")));
        assert!(elim(&[], &c).unwrap().ptr_eq(&c));
    }
}
