//! Brute-force semantics for boolean constraints and random generators,
//! for property tests.
//!
//! Every variable and κ-parameter has sort `Bool`, so satisfaction is
//! decidable by enumeration: binders range over both truth values and each
//! κ of arity `n` ranges over all `2^(2^n)` truth tables.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;

use crate::constraint::{defns, uses, Assignment, Bind, Constraint, DependencyGraph, FlatClause, Node};
use crate::fusion::{elim_one, sat, scope, strongest_scoped, Eliminate, Outcome, SatOptions};
use crate::logic::{skolemize_hypotheses, KVar, Pred, PredKind, RelOp, Sort, SortEnv};
use crate::name::Name;
use crate::oracle::{ValidityOracle, Verdict};

/// Truth tables for κ-variables, indexed by the argument bits (first
/// argument is the most significant).
pub type BoolSigma = BTreeMap<Name, Vec<bool>>;

type Env = BTreeMap<Name, bool>;

fn table_index(args: impl Iterator<Item = bool>) -> usize {
    args.fold(0, |acc, b| (acc << 1) | usize::from(b))
}

/// Truth value of a boolean formula. Panics on unbound names, non-boolean
/// terms or κ-variables missing from `sigma`.
pub fn eval_pred(p: &Pred, env: &Env, sigma: &BoolSigma) -> bool {
    match p.kind() {
        PredKind::Bool(b) => *b,
        PredKind::Var(x) => *env.get(x).unwrap_or_else(|| panic!("unbound {x}")),
        PredKind::Not(a) => !eval_pred(a, env, sigma),
        PredKind::And(a, b) => eval_pred(a, env, sigma) && eval_pred(b, env, sigma),
        PredKind::Or(a, b) => eval_pred(a, env, sigma) || eval_pred(b, env, sigma),
        PredKind::Imp(a, b) => !eval_pred(a, env, sigma) || eval_pred(b, env, sigma),
        PredKind::Iff(a, b) => eval_pred(a, env, sigma) == eval_pred(b, env, sigma),
        PredKind::Rel(RelOp::Eq, a, b) => eval_pred(a, env, sigma) == eval_pred(b, env, sigma),
        PredKind::Rel(RelOp::Ne, a, b) => eval_pred(a, env, sigma) != eval_pred(b, env, sigma),
        PredKind::Exists(x, _, body) | PredKind::Forall(x, _, body) => {
            let want = matches!(p.kind(), PredKind::Exists(..));
            let mut inner = env.clone();
            [false, true].into_iter().any(|v| {
                inner.insert(x.clone(), v);
                eval_pred(body, &inner, sigma) == want
            }) == want
        }
        PredKind::KApp(k, args) => {
            let table = sigma.get(k.name()).unwrap_or_else(|| panic!("no table for {k}"));
            table[table_index(args.iter().map(|a| *env.get(a).unwrap_or_else(|| panic!("unbound {a}"))))]
        }
        other => panic!("not a boolean formula: {other:?}"),
    }
}

pub fn eval_constraint(c: &Constraint, env: &Env, sigma: &BoolSigma) -> bool {
    match c.node() {
        Node::Goal(p, _) => eval_pred(p, env, sigma),
        Node::And(cs) => cs.iter().all(|c| eval_constraint(c, env, sigma)),
        Node::Forall(b, body) => {
            let mut inner = env.clone();
            [false, true].into_iter().all(|v| {
                inner.insert(b.name.clone(), v);
                !eval_pred(&b.pred, &inner, sigma) || eval_constraint(body, &inner, sigma)
            })
        }
    }
}

pub fn eval_clauses(cs: &[FlatClause], sigma: &BoolSigma) -> bool {
    cs.iter().all(|c| eval_constraint(&c.to_constraint(), &Env::new(), sigma))
}

/// Every assignment of truth tables to `ks`.
pub fn all_sigmas(ks: &BTreeSet<KVar>) -> Vec<BoolSigma> {
    let mut out = alloc::vec![BoolSigma::new()];
    for k in ks {
        let rows = 1usize << k.arity();
        let mut next = Vec::new();
        for s in &out {
            for bits in 0u64..(1u64 << rows) {
                let mut s = s.clone();
                s.insert(k.name().clone(), (0..rows).map(|r| bits >> r & 1 == 1).collect());
                next.push(s);
            }
        }
        out = next;
    }
    out
}

/// Some assignment makes `c` true.
pub fn brute_sat(c: &Constraint) -> bool {
    all_sigmas(&c.kvars()).iter().any(|s| eval_constraint(c, &Env::new(), s))
}

/// True under every valuation of its free variables; κ-free.
pub fn valid(p: &Pred) -> bool {
    let free: Vec<Name> = p.free_vars().into_iter().collect();
    let sigma = BoolSigma::new();
    (0u64..(1u64 << free.len())).all(|bits| {
        let env: Env = free.iter().enumerate().map(|(i, x)| (x.clone(), bits >> i & 1 == 1)).collect();
        eval_pred(p, &env, &sigma)
    })
}

/// Decides boolean κ-free clauses by enumerating their free variables.
#[derive(Clone, Copy, Debug, Default)]
pub struct TruthTable {
    pub queries: usize,
}

impl ValidityOracle for TruthTable {
    fn check(&mut self, clause: &FlatClause) -> Verdict {
        self.queries += 1;
        if valid(&clause.to_pred()) {
            Verdict::Valid
        } else {
            Verdict::Invalid(None)
        }
    }
}

/// Limits for [`random_constraint`].
#[derive(Clone, Copy, Debug)]
pub struct GenConfig {
    pub max_kvars: usize,
    pub max_arity: usize,
    pub max_binders: usize,
    pub max_nodes: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_kvars: 3, max_arity: 1, max_binders: 6, max_nodes: 10 }
    }
}

/// κ-variables `k0, k1, …` with boolean parameters `k<i>#p<j>`.
pub fn boolean_kvars<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Vec<KVar> {
    let n = rng.gen_range(1..=cfg.max_kvars);
    (0..n)
        .map(|i| {
            let arity = rng.gen_range(0..=cfg.max_arity);
            let params = (0..arity).map(|j| (Name::from(format!("k{i}#p{j}")), Sort::Bool)).collect();
            KVar::new(Name::from(format!("k{i}")), params)
        })
        .collect()
}

struct Gen<'a, R> {
    rng: &'a mut R,
    kvars: &'a [KVar],
    binders: usize,
    nodes: usize,
    cfg: GenConfig,
}

fn concrete<R: Rng>(rng: &mut R, scope: &[Name], depth: u32) -> Pred {
    let leaf = depth == 0 || rng.gen_bool(0.5);
    if leaf || scope.is_empty() {
        if scope.is_empty() || rng.gen_bool(0.2) {
            return Pred::boolean(rng.gen_bool(0.5));
        }
        let x = Pred::var(scope[rng.gen_range(0..scope.len())].clone());
        return if rng.gen_bool(0.4) { Pred::new(PredKind::Not(x)) } else { x };
    }
    let a = concrete(rng, scope, depth - 1);
    let b = concrete(rng, scope, depth - 1);
    match rng.gen_range(0..4) {
        0 => Pred::new(PredKind::And(a, b)),
        1 => Pred::new(PredKind::Or(a, b)),
        2 => Pred::new(PredKind::Imp(a, b)),
        _ => Pred::new(PredKind::Not(a)),
    }
}

impl<R: Rng> Gen<'_, R> {
    fn concrete(&mut self, scope: &[Name], depth: u32) -> Pred {
        concrete(self.rng, scope, depth)
    }

    fn kapp(&mut self, scope: &[Name]) -> Option<Pred> {
        let candidates: Vec<&KVar> = self.kvars.iter().filter(|k| k.arity() == 0 || !scope.is_empty()).collect();
        if candidates.is_empty() {
            return None;
        }
        let k = candidates[self.rng.gen_range(0..candidates.len())].clone();
        let args = (0..k.arity()).map(|_| scope[self.rng.gen_range(0..scope.len())].clone()).collect();
        Some(Pred::kapp(k, args))
    }

    fn hypothesis(&mut self, scope: &[Name]) -> Pred {
        match self.rng.gen_range(0..3) {
            0 => self.concrete(scope, 2),
            1 => self.kapp(scope).unwrap_or_else(|| self.concrete(scope, 1)),
            _ => {
                let a = self.kapp(scope).unwrap_or_else(Pred::tt);
                let b = self.concrete(scope, 1);
                Pred::new(PredKind::And(a, b))
            }
        }
    }

    fn goal(&mut self, scope: &[Name]) -> Constraint {
        let p = if self.rng.gen_bool(0.5) {
            self.kapp(scope).unwrap_or_else(|| self.concrete(scope, 2))
        } else {
            self.concrete(scope, 2)
        };
        Constraint::goal(p, None)
    }

    fn constraint(&mut self, scope: &mut Vec<Name>) -> Constraint {
        self.nodes += 1;
        let room = self.nodes + 2 <= self.cfg.max_nodes;
        let choice = if room { self.rng.gen_range(0..3) } else { 0 };
        match choice {
            1 if self.binders < self.cfg.max_binders => {
                let x = Name::from(format!("b{}", self.binders));
                self.binders += 1;
                scope.push(x.clone());
                let hyp = self.hypothesis(scope);
                let body = self.constraint(scope);
                scope.pop();
                Constraint::forall(Bind::new(x, Sort::Bool, hyp), body)
            }
            2 => {
                let a = self.constraint(scope);
                let b = self.constraint(scope);
                Constraint::and([a, b])
            }
            _ => self.goal(scope),
        }
    }
}

/// A random well-scoped boolean constraint over `kvars`. Binders are
/// named `b0, b1, …`, unique within the constraint.
pub fn random_constraint<R: Rng>(rng: &mut R, kvars: &[KVar], cfg: &GenConfig) -> Constraint {
    let mut g = Gen { rng, kvars, binders: 0, nodes: 0, cfg: *cfg };
    g.constraint(&mut Vec::new())
}

/// A random closed formula of nested guarded implications whose hypotheses
/// contain existentials (possibly under `&&`, `||` and nested `∃`).
pub fn random_vc_with_existentials<R: Rng>(rng: &mut R) -> Pred {
    fn hyp<R: Rng>(rng: &mut R, scope: &mut Vec<Name>, fresh: &mut usize, depth: u32) -> Pred {
        if depth == 0 || rng.gen_bool(0.3) {
            return concrete(rng, scope, 2);
        }
        match rng.gen_range(0..3) {
            0 => {
                let x = Name::from(format!("e{fresh}"));
                *fresh += 1;
                scope.push(x.clone());
                let body = hyp(rng, scope, fresh, depth - 1);
                scope.pop();
                Pred::new(PredKind::Exists(x, Sort::Bool, body))
            }
            1 => {
                let a = hyp(rng, scope, fresh, depth - 1);
                let b = hyp(rng, scope, fresh, depth - 1);
                Pred::new(PredKind::And(a, b))
            }
            _ => {
                let a = hyp(rng, scope, fresh, depth - 1);
                let b = hyp(rng, scope, fresh, depth - 1);
                Pred::new(PredKind::Or(a, b))
            }
        }
    }
    fn vc<R: Rng>(rng: &mut R, scope: &mut Vec<Name>, fresh: &mut usize, depth: u32) -> Pred {
        if depth == 0 || rng.gen_bool(0.25) {
            return concrete(rng, scope, 2);
        }
        match rng.gen_range(0..3) {
            0 => {
                let x = Name::from(format!("a{fresh}"));
                *fresh += 1;
                scope.push(x.clone());
                let body = vc(rng, scope, fresh, depth - 1);
                scope.pop();
                Pred::new(PredKind::Forall(x, Sort::Bool, body))
            }
            1 => {
                let h = hyp(rng, scope, fresh, 3);
                let g = vc(rng, scope, fresh, depth - 1);
                Pred::new(PredKind::Imp(h, g))
            }
            _ => {
                let a = vc(rng, scope, fresh, depth - 1);
                let b = vc(rng, scope, fresh, depth - 1);
                Pred::new(PredKind::And(a, b))
            }
        }
    }
    let mut fresh = 0;
    let h = hyp(rng, &mut Vec::new(), &mut fresh, 3);
    let x = Name::from("a_top");
    let mut scope = alloc::vec![x.clone()];
    let body = vc(rng, &mut scope, &mut fresh, 3);
    Pred::new(PredKind::Forall(x, Sort::Bool, Pred::new(PredKind::Imp(h, body))))
}

/// Result of a property check: the number of instances examined, or a
/// counterexample.
pub type PropResult = Result<usize, String>;

/// κ-variables of `c` that lie on no dependency cycle.
pub fn acyclic_kvars(c: &Constraint) -> Vec<KVar> {
    let g = DependencyGraph::of_constraint(c);
    let cyclic: BTreeSet<KVar> = g.cyclic_components().into_iter().flatten().collect();
    c.kvars().into_iter().filter(|k| !cyclic.contains(k)).collect()
}

fn instance<R: Rng>(rng: &mut R) -> Constraint {
    let cfg = GenConfig::default();
    let ks = boolean_kvars(rng, &cfg);
    random_constraint(rng, &ks, &cfg)
}

/// Draws constraints until `n` of them pass `keep`, running `check` on
/// each kept one. Gives up after `100 * n` draws.
fn over<R: Rng>(
    rng: &mut R,
    n: usize,
    keep: impl Fn(&Constraint) -> bool,
    mut check: impl FnMut(&Constraint) -> Result<(), String>,
) -> PropResult {
    let mut kept = 0;
    for _ in 0..100 * n {
        if kept == n {
            break;
        }
        let c = instance(rng);
        if keep(&c) {
            check(&c).map_err(|e| format!("{e}\nconstraint: {c}"))?;
            kept += 1;
        }
    }
    if kept < n {
        return Err(format!("only {kept} of {n} instances were generated"));
    }
    Ok(kept)
}

/// σ ⊨ c iff σ ⊨ flatten(c), for every σ.
pub fn flattening<R: Rng>(rng: &mut R, n: usize) -> PropResult {
    over(
        rng,
        n,
        |_| true,
        |c| {
            let fl = c.flatten();
            match all_sigmas(&c.kvars()).iter().find(|s| eval_constraint(c, &Env::new(), s) != eval_clauses(&fl, s)) {
                Some(s) => Err(format!("flattening disagrees under {s:?}")),
                None => Ok(()),
            }
        },
    )
}

/// For acyclic κ, defns and uses partition flatten(c), and σ ⊨ c iff σ
/// satisfies both parts.
pub fn partition<R: Rng>(rng: &mut R, n: usize) -> PropResult {
    over(
        rng,
        n,
        |c| !acyclic_kvars(c).is_empty(),
        |c| {
            let fl = c.flatten();
            for k in acyclic_kvars(c) {
                let (d, u) = (defns(&fl, &k), uses(&fl, &k));
                let mut both: Vec<FlatClause> = d.iter().chain(&u).cloned().collect();
                let mut all = fl.clone();
                both.sort_by_cached_key(|f| format!("{f:?}"));
                all.sort_by_cached_key(|f| format!("{f:?}"));
                if both != all || d.iter().any(|f| u.contains(f)) {
                    return Err(format!("defns/uses of {k} do not partition the clauses"));
                }
                for s in all_sigmas(&c.kvars()) {
                    if eval_constraint(c, &Env::new(), &s) != (eval_clauses(&d, &s) && eval_clauses(&u, &s)) {
                        return Err(format!("partition on {k} disagrees under {s:?}"));
                    }
                }
            }
            Ok(())
        },
    )
}

/// defns(c, κ) is unchanged by cutting c down to the scope of κ under its
/// prefix.
pub fn scoped_definitions<R: Rng>(rng: &mut R, n: usize) -> PropResult {
    over(
        rng,
        n,
        |c| !c.kvars().is_empty(),
        |c| {
            let fl = c.flatten();
            for k in c.kvars() {
                let (prefix, inner) = scope(&k, c);
                let rebuilt = prefix.into_iter().rev().fold(inner, |acc, b| Constraint::forall(b, acc));
                if defns(&fl, &k) != defns(&rebuilt.flatten(), &k) {
                    return Err(format!("scoping changes the definitions of {k}"));
                }
            }
            Ok(())
        },
    )
}

/// Every cut set of c still cuts c after eliminating an acyclic κ.
pub fn elim_acyclic<R: Rng>(rng: &mut R, n: usize) -> PropResult {
    over(
        rng,
        n,
        |c| !acyclic_kvars(c).is_empty(),
        |c| {
            let ks: Vec<KVar> = c.kvars().into_iter().collect();
            let g = DependencyGraph::of_constraint(c);
            for k in acyclic_kvars(c) {
                let g2 = DependencyGraph::of_constraint(&elim_one(&k, c).map_err(|e| e.to_string())?);
                for bits in 0u32..(1 << ks.len()) {
                    let cut: BTreeSet<KVar> =
                        ks.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, k)| k.clone()).collect();
                    if g.excluding(&cut).is_acyclic() && !g2.excluding(&cut).is_acyclic() {
                        return Err(format!("eliminating {k} makes {cut:?} stop cutting"));
                    }
                }
            }
            Ok(())
        },
    )
}

/// elim_one(κ, c) no longer mentions κ and is satisfiable exactly when c
/// is.
pub fn kvar_removal<R: Rng>(rng: &mut R, n: usize) -> PropResult {
    over(
        rng,
        n,
        |c| !acyclic_kvars(c).is_empty(),
        |c| {
            for k in acyclic_kvars(c) {
                let e = elim_one(&k, c).map_err(|e| e.to_string())?;
                if e.mentions_kvar(&k) {
                    return Err(format!("{k} survives its elimination: {e}"));
                }
                if brute_sat(c) != brute_sat(&e) {
                    return Err(format!("eliminating {k} changes satisfiability: {e}"));
                }
            }
            Ok(())
        },
    )
}

/// For every acyclic κ of a random constraint, the clauses of defns(c, κ)
/// with κ replaced by its strongest scoped solution. Other κ-variables
/// become uninterpreted predicates of the same name, so each formula must
/// be valid for every interpretation of them; the returned environment
/// declares them. Quantifiers are expanded, so the formulas are
/// quantifier-free.
pub fn strongest_solution_obligations<R: Rng>(rng: &mut R) -> (SortEnv, Vec<Pred>) {
    let c = instance(rng);
    let fl = c.flatten();
    let mut env = SortEnv::new();
    for k in c.kvars() {
        env.declare_fun(k.name().clone(), k.params().iter().map(|(_, s)| s.clone()).collect(), Sort::Bool);
    }
    let mut out = Vec::new();
    for k in acyclic_kvars(&c) {
        let sigma = Assignment::singleton(k.clone(), strongest_scoped(&k, &c));
        for d in defns(&fl, &k) {
            let p = d.apply(&sigma).to_pred();
            let p = p.map_kapps(&mut |k2, args| {
                Some(Pred::app(k2.name().clone(), args.iter().map(|a| Pred::var(a.clone())).collect()))
            });
            out.push(expand_bool_quantifiers(&p));
        }
    }
    (env, out)
}

/// Full elimination followed by truth-table validity decides exactly the
/// satisfiable acyclic constraints.
pub fn elimination_agrees_with_brute_force<R: Rng>(rng: &mut R, n: usize) -> PropResult {
    over(
        rng,
        n,
        |c| DependencyGraph::of_constraint(c).is_acyclic(),
        |c| {
            let opts = SatOptions { eliminate: Eliminate::All, ..SatOptions::default() };
            let report = sat(c, &[], &SortEnv::new(), &opts, &mut TruthTable::default()).map_err(|e| e.to_string())?;
            let safe = matches!(report.outcome, Outcome::Safe);
            if safe != brute_sat(c) {
                return Err(format!("elimination says {safe}, brute force says {}", !safe));
            }
            Ok(())
        },
    )
}

/// Skolemizing hypothesis existentials preserves truth-table validity.
pub fn skolemization_preserves_validity<R: Rng>(rng: &mut R, n: usize) -> PropResult {
    let mut kept = 0;
    for _ in 0..100 * n {
        if kept == n {
            break;
        }
        let p = random_vc_with_existentials(rng);
        if !has_exists(&p) {
            continue;
        }
        let q = skolemize_hypotheses(&p).map_err(|e| format!("{e} in {p}"))?;
        if has_exists(&q) {
            return Err(format!("an existential survives: {q}"));
        }
        if valid(&p) != valid(&q) {
            return Err(format!("validity changes: {p} became {q}"));
        }
        kept += 1;
    }
    if kept < n {
        return Err(format!("only {kept} of {n} instances were generated"));
    }
    Ok(kept)
}

/// An equivalent quantifier-free formula: `∃b. p` becomes
/// `p[b:=false] ∨ p[b:=true]` and `∀` the conjunction. Every quantifier
/// must range over `Bool` and no κ-application may remain.
pub fn expand_bool_quantifiers(p: &Pred) -> Pred {
    match p.kind() {
        PredKind::Exists(x, Sort::Bool, body) | PredKind::Forall(x, Sort::Bool, body) => {
            let body = expand_bool_quantifiers(body);
            let (f, t) = (instantiate(&body, x, false), instantiate(&body, x, true));
            if matches!(p.kind(), PredKind::Exists(..)) {
                Pred::new(PredKind::Or(f, t))
            } else {
                Pred::new(PredKind::And(f, t))
            }
        }
        PredKind::Exists(..) | PredKind::Forall(..) => panic!("non-boolean quantifier in {p}"),
        _ => map_children(p, &mut expand_bool_quantifiers),
    }
}

/// `p[x:=v]`.
fn instantiate(p: &Pred, x: &Name, v: bool) -> Pred {
    match p.kind() {
        PredKind::Var(y) if y == x => Pred::boolean(v),
        PredKind::Exists(y, ..) | PredKind::Forall(y, ..) if y == x => p.clone(),
        PredKind::KApp(_, args) if args.contains(x) => panic!("κ-application in {p}"),
        _ => map_children(p, &mut |q| instantiate(q, x, v)),
    }
}

fn map_children(p: &Pred, f: &mut dyn FnMut(&Pred) -> Pred) -> Pred {
    let kind = match p.kind() {
        PredKind::Bool(_) | PredKind::Int(_) | PredKind::Unit | PredKind::Var(_) | PredKind::KApp(..) => {
            return p.clone()
        }
        PredKind::Neg(a) => PredKind::Neg(f(a)),
        PredKind::Not(a) => PredKind::Not(f(a)),
        PredKind::Arith(op, a, b) => PredKind::Arith(*op, f(a), f(b)),
        PredKind::Rel(op, a, b) => PredKind::Rel(*op, f(a), f(b)),
        PredKind::And(a, b) => PredKind::And(f(a), f(b)),
        PredKind::Or(a, b) => PredKind::Or(f(a), f(b)),
        PredKind::Imp(a, b) => PredKind::Imp(f(a), f(b)),
        PredKind::Iff(a, b) => PredKind::Iff(f(a), f(b)),
        PredKind::App(g, args) => PredKind::App(g.clone(), args.iter().map(&mut *f).collect()),
        PredKind::Exists(x, s, body) => PredKind::Exists(x.clone(), s.clone(), f(body)),
        PredKind::Forall(x, s, body) => PredKind::Forall(x.clone(), s.clone(), f(body)),
    };
    Pred::new(kind)
}

fn has_exists(p: &Pred) -> bool {
    match p.kind() {
        PredKind::Exists(..) => true,
        PredKind::Forall(_, _, a) | PredKind::Not(a) | PredKind::Neg(a) => has_exists(a),
        PredKind::And(a, b)
        | PredKind::Or(a, b)
        | PredKind::Imp(a, b)
        | PredKind::Iff(a, b)
        | PredKind::Rel(_, a, b)
        | PredKind::Arith(_, a, b) => has_exists(a) || has_exists(b),
        PredKind::App(_, args) => args.iter().any(has_exists),
        PredKind::Bool(_) | PredKind::Int(_) | PredKind::Unit | PredKind::Var(_) | PredKind::KApp(..) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sigma_enumeration_counts_truth_tables() {
        let k0 = KVar::new("a".into(), alloc::vec![]);
        let k1 = KVar::new("b".into(), alloc::vec![("b#p0".into(), Sort::Bool)]);
        let ks: BTreeSet<KVar> = [k0, k1].into_iter().collect();
        assert_eq!(all_sigmas(&ks).len(), 2 * 4);
    }

    #[test]
    fn quantifier_expansion_preserves_validity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let p = random_vc_with_existentials(&mut rng);
            let q = expand_bool_quantifiers(&p);
            assert!(!q.has_quantifier(), "{q}");
            assert_eq!(valid(&p), valid(&q), "{p}");
        }
    }

    #[test]
    fn excluded_middle_is_valid() {
        let x = Pred::var("x");
        assert!(valid(&Pred::new(PredKind::Or(x.clone(), Pred::new(PredKind::Not(x.clone()))))));
        assert!(!valid(&x));
    }

    #[test]
    fn generated_constraints_are_well_scoped() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let ks = boolean_kvars(&mut rng, &GenConfig::default());
            let c = random_constraint(&mut rng, &ks, &GenConfig::default());
            // Evaluation panics on unbound names.
            let _ = brute_sat(&c);
        }
    }
}
