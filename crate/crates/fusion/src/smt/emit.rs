//! SMT-LIB2 rendering of validity queries.
//!
//! A query asserts the negation of a κ-free formula. Universals in goal
//! position and existentials in hypothesis position are the outermost
//! existentials of that negation, so each becomes a fresh constant: this is
//! skolemization of the hypotheses done while rendering. Any other
//! quantifier is rejected. Every binder occurrence gets its own constant, so
//! shadowing and sibling binders never alias. A subformula reached twice
//! with its free variables resolved to the same constants is rendered once
//! and abbreviated by a `define-fun`, which keeps shared formulas shared.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use fusion_core::constraint::{Constraint, FlatClause, Node};
use fusion_core::logic::{ArithOp, Pred, PredKind, RelOp, Sort, SortEnv};
use fusion_core::Name;

use crate::sexp::symbol;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EmitError {
    #[error("outside the refinement logic: {0}")]
    Unsupported(String),
    #[error("unbound variable `{0}`")]
    Unbound(Name),
    #[error("unsolved refinement variable in `{0}`")]
    KVar(String),
}

/// Declarations, abbreviations and the formula whose validity is asked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub decls: Vec<String>,
    pub defs: Vec<String>,
    pub formula: String,
}

pub const LOGIC: &str = "QF_UFLIA";

impl Query {
    /// Commands asserting the negated formula, without `check-sat`.
    pub fn commands(&self) -> String {
        let mut s = String::new();
        for d in self.decls.iter().chain(&self.defs) {
            s.push_str(d);
            s.push('\n');
        }
        s.push_str(&format!("(assert (not {}))\n", self.formula));
        s
    }

    /// A standalone script: `unsat` means the formula is valid.
    pub fn script(&self) -> String {
        format!("(set-logic {LOGIC})\n{}(check-sat)\n", self.commands())
    }
}

/// The query for one flat clause.
pub fn clause_query(clause: &FlatClause, env: &SortEnv) -> Result<Query, EmitError> {
    validity_query(&clause.to_pred(), env)
}

/// A whole κ-free constraint as one validity script.
pub fn emit_smtlib(vc: &Constraint, env: &SortEnv) -> Result<String, EmitError> {
    Ok(validity_query(&constraint_pred(vc), env)?.script())
}

/// The formula a constraint denotes, sharing the images of shared nodes.
pub fn constraint_pred(c: &Constraint) -> Pred {
    fn go(c: &Constraint, memo: &mut HashMap<usize, Pred>) -> Pred {
        if let Some(p) = memo.get(&c.addr()) {
            return p.clone();
        }
        let p = match c.node() {
            Node::Goal(p, _) => p.clone(),
            Node::And(cs) => Pred::conj(cs.iter().map(|c| go(c, memo)).collect::<Vec<_>>()),
            Node::Forall(b, body) => {
                Pred::forall(b.name.clone(), b.sort.clone(), Pred::imp(b.pred.clone(), go(body, memo)))
            }
        };
        memo.insert(c.addr(), p.clone());
        p
    }
    go(c, &mut HashMap::new())
}

pub fn validity_query(p: &Pred, env: &SortEnv) -> Result<Query, EmitError> {
    let mut e = Emitter::new(env);
    let (formula, sort) = e.run(p)?;
    if sort != Sort::Bool {
        return Err(EmitError::Unsupported(format!("`{p}` is not a formula")));
    }
    Ok(e.finish(formula))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Polarity {
    Pos,
    Neg,
    Mixed,
}

impl Polarity {
    fn flip(self) -> Self {
        match self {
            Polarity::Pos => Polarity::Neg,
            Polarity::Neg => Polarity::Pos,
            Polarity::Mixed => Polarity::Mixed,
        }
    }
}

/// Symbols of the core and integer theories that a user name must not
/// shadow.
const RESERVED: &[&str] = &[
    "true", "false", "not", "and", "or", "xor", "=>", "=", "distinct", "ite", "let", "forall", "exists", "match",
    "par", "as", "_", "!", "div", "mod", "abs", "to_real", "to_int", "is_int", "unit", "Int", "Bool", "Unit", "Real",
];

fn mangle(x: &str) -> String {
    if RESERVED.contains(&x) {
        format!("{x}!v")
    } else {
        x.to_owned()
    }
}

/// Text sink; the counting pass renders into a disabled one.
struct Out {
    buf: String,
    on: bool,
}

impl Out {
    fn new(on: bool) -> Self {
        Out { buf: String::new(), on }
    }

    fn push(&mut self, s: &str) {
        if self.on {
            self.buf.push_str(s);
        }
    }
}

/// A subformula under a polarity, with its free variables resolved.
type Key = (usize, Polarity, Vec<String>);

#[derive(Clone, Copy, PartialEq, Eq)]
enum Pass {
    /// Counts occurrences of each key and allocates binder constants.
    Count,
    /// Writes text, abbreviating keys that occur more than once.
    Write,
}

/// Renders in two identical traversals so that text is produced once, in
/// one buffer, in time linear in its length. Both passes descend into a
/// key only at its first occurrence, so they visit binders in the same
/// order and the second pass replays the constants the first allocated.
struct Emitter<'e> {
    env: &'e SortEnv,
    pass: Pass,
    used: BTreeSet<String>,
    /// Last numeric suffix tried per base name.
    suffix: HashMap<String, usize>,
    consts: Vec<(String, Sort)>,
    free: BTreeMap<Name, (String, Sort)>,
    funs: BTreeSet<Name>,
    sorts: BTreeSet<Name>,
    unit: bool,
    defs: Vec<String>,
    /// Constants of the bound variables in scope, innermost last.
    scope: HashMap<Name, Vec<(String, Sort)>>,
    free_vars: HashMap<usize, Rc<[Name]>>,
    /// Binder constants in visiting order, and the replay position.
    binders: Vec<String>,
    replayed: usize,
    counts: HashMap<Key, (u32, Sort)>,
    abbrevs: HashMap<Key, String>,
}

impl<'e> Emitter<'e> {
    fn new(env: &'e SortEnv) -> Self {
        Emitter {
            env,
            pass: Pass::Count,
            used: BTreeSet::new(),
            suffix: HashMap::new(),
            consts: Vec::new(),
            free: BTreeMap::new(),
            funs: BTreeSet::new(),
            sorts: BTreeSet::new(),
            unit: false,
            defs: Vec::new(),
            scope: HashMap::new(),
            free_vars: HashMap::new(),
            binders: Vec::new(),
            replayed: 0,
            counts: HashMap::new(),
            abbrevs: HashMap::new(),
        }
    }

    /// Renders `p` twice and returns the text of the second pass.
    fn run(&mut self, p: &Pred) -> Result<(String, Sort), EmitError> {
        self.render(p, Polarity::Pos, &mut Out::new(false))?;
        self.pass = Pass::Write;
        let mut out = Out::new(true);
        let sort = self.render(p, Polarity::Pos, &mut out)?;
        Ok((out.buf, sort))
    }

    /// Free variables of `p`, memoized per node. Nodes are subterms of the
    /// rendered formula, which outlives the emitter, so addresses are stable.
    fn fv(&mut self, p: &Pred) -> Rc<[Name]> {
        if let Some(r) = self.free_vars.get(&p.addr()) {
            return r.clone();
        }
        let mut set = BTreeSet::new();
        match p.kind() {
            PredKind::Var(x) => {
                set.insert(x.clone());
            }
            PredKind::KApp(_, xs) => set.extend(xs.iter().cloned()),
            PredKind::Exists(x, _, body) | PredKind::Forall(x, _, body) => {
                set.extend(self.fv(body).iter().filter(|y| *y != x).cloned());
            }
            PredKind::Neg(a) | PredKind::Not(a) => set.extend(self.fv(a).iter().cloned()),
            PredKind::Arith(_, a, b)
            | PredKind::Rel(_, a, b)
            | PredKind::And(a, b)
            | PredKind::Or(a, b)
            | PredKind::Imp(a, b)
            | PredKind::Iff(a, b) => {
                set.extend(self.fv(a).iter().cloned());
                set.extend(self.fv(b).iter().cloned());
            }
            PredKind::App(_, args) => {
                for a in args {
                    set.extend(self.fv(a).iter().cloned());
                }
            }
            PredKind::Bool(_) | PredKind::Int(_) | PredKind::Unit => {}
        }
        let r: Rc<[Name]> = set.into_iter().collect();
        self.free_vars.insert(p.addr(), r.clone());
        r
    }

    /// Renders `body` with `x` bound to a fresh constant.
    fn bind(&mut self, x: &Name, s: &Sort, body: &Pred, pol: Polarity, out: &mut Out) -> Result<Sort, EmitError> {
        let sym = match self.pass {
            Pass::Count => {
                let sym = self.declare(x, s);
                self.binders.push(sym.clone());
                sym
            }
            Pass::Write => {
                self.replayed += 1;
                self.binders[self.replayed - 1].clone()
            }
        };
        self.scope.entry(x.clone()).or_default().push((sym, s.clone()));
        let r = self.render(body, pol, out);
        self.scope.get_mut(x).and_then(Vec::pop);
        r
    }

    fn sort_name(&mut self, s: &Sort) -> String {
        match s {
            Sort::Int => "Int".into(),
            Sort::Bool => "Bool".into(),
            Sort::Unit => {
                self.unit = true;
                "Unit".into()
            }
            Sort::Uninterp(n) => {
                self.sorts.insert(n.clone());
                symbol(&format!("{n}!s"))
            }
        }
    }

    fn declare(&mut self, x: &Name, s: &Sort) -> String {
        let base = mangle(x.as_str());
        let mut sym = base.clone();
        while !self.used.insert(sym.clone()) {
            let i = self.suffix.entry(base.clone()).or_insert(0);
            *i += 1;
            sym = format!("{base}!{i}");
        }
        self.sort_name(s);
        self.consts.push((sym.clone(), s.clone()));
        symbol(&sym)
    }

    fn var(&mut self, x: &Name) -> Result<(String, Sort), EmitError> {
        if let Some((sym, s)) = self.scope.get(x).and_then(|v| v.last()) {
            return Ok((sym.clone(), s.clone()));
        }
        if let Some(r) = self.free.get(x) {
            return Ok(r.clone());
        }
        match self.env.var(x) {
            Some(Some(s)) => {
                let s = s.clone();
                let sym = self.declare(x, &s);
                self.free.insert(x.clone(), (sym.clone(), s.clone()));
                Ok((sym, s))
            }
            Some(None) => Err(EmitError::Unsupported(format!("function-typed variable `{x}` in a refinement"))),
            None => Err(EmitError::Unbound(x.clone())),
        }
    }

    fn render(&mut self, p: &Pred, pol: Polarity, out: &mut Out) -> Result<Sort, EmitError> {
        let leaf = matches!(p.kind(), PredKind::Bool(_) | PredKind::Int(_) | PredKind::Unit | PredKind::Var(_));
        if leaf {
            return self.render_node(p, pol, out);
        }
        let mut resolved = Vec::new();
        for x in self.fv(p).iter() {
            resolved.push(self.var(x)?.0);
        }
        let key = (p.addr(), pol, resolved);
        match self.pass {
            Pass::Count => {
                if let Some((n, sort)) = self.counts.get_mut(&key) {
                    *n += 1;
                    return Ok(sort.clone());
                }
                let sort = self.render_node(p, pol, out)?;
                self.counts.insert(key, (1, sort.clone()));
                Ok(sort)
            }
            Pass::Write => {
                let (n, sort) = self.counts[&key].clone();
                if let Some(name) = self.abbrevs.get(&key) {
                    out.push(name);
                    return Ok(sort);
                }
                if n == 1 {
                    return self.render_node(p, pol, out);
                }
                let mut body = Out::new(true);
                self.render_node(p, pol, &mut body)?;
                let name = format!("share!{}", self.defs.len());
                let sort_s = self.sort_name(&sort);
                self.defs.push(format!("(define-fun {name} () {sort_s} {})", body.buf));
                out.push(&name);
                self.abbrevs.insert(key, name);
                Ok(sort)
            }
        }
    }

    fn render_node(&mut self, p: &Pred, pol: Polarity, out: &mut Out) -> Result<Sort, EmitError> {
        Ok(match p.kind() {
            PredKind::Bool(b) => {
                out.push(if *b { "true" } else { "false" });
                Sort::Bool
            }
            PredKind::Int(n) => {
                out.push(&int_literal(*n));
                Sort::Int
            }
            PredKind::Unit => {
                self.unit = true;
                out.push("unit");
                Sort::Unit
            }
            PredKind::Var(x) => {
                let (sym, s) = self.var(x)?;
                out.push(&sym);
                s
            }
            PredKind::Neg(a) => {
                out.push("(- ");
                self.render(a, pol, out)?;
                out.push(")");
                Sort::Int
            }
            PredKind::Arith(op, a, b) => {
                if *op == ArithOp::Mul && !is_literal(a) && !is_literal(b) {
                    return Err(EmitError::Unsupported(format!("nonlinear multiplication `{p}`")));
                }
                self.binary(op.symbol(), a, pol, b, pol, out)?;
                Sort::Int
            }
            PredKind::Rel(RelOp::Ne, a, b) => {
                out.push("(not ");
                self.binary("=", a, pol, b, pol, out)?;
                out.push(")");
                Sort::Bool
            }
            PredKind::Rel(op, a, b) => {
                self.binary(op.symbol(), a, pol, b, pol, out)?;
                Sort::Bool
            }
            PredKind::App(f, args) => {
                let (_, ret) = self
                    .env
                    .fun(f)
                    .cloned()
                    .ok_or_else(|| EmitError::Unsupported(format!("undeclared function `{f}`")))?;
                self.funs.insert(f.clone());
                let f = symbol(&mangle(f.as_str()));
                if args.is_empty() {
                    out.push(&f);
                    return Ok(ret);
                }
                out.push("(");
                out.push(&f);
                for a in args {
                    out.push(" ");
                    self.render(a, pol, out)?;
                }
                out.push(")");
                ret
            }
            PredKind::Not(a) => {
                out.push("(not ");
                self.render(a, pol.flip(), out)?;
                out.push(")");
                Sort::Bool
            }
            PredKind::And(a, b) => {
                self.binary("and", a, pol, b, pol, out)?;
                Sort::Bool
            }
            PredKind::Or(a, b) => {
                self.binary("or", a, pol, b, pol, out)?;
                Sort::Bool
            }
            PredKind::Imp(a, b) => {
                self.binary("=>", a, pol.flip(), b, pol, out)?;
                Sort::Bool
            }
            PredKind::Iff(a, b) => {
                self.binary("=", a, Polarity::Mixed, b, Polarity::Mixed, out)?;
                Sort::Bool
            }
            PredKind::Forall(x, s, body) if pol == Polarity::Pos => self.bind(x, s, body, pol, out)?,
            PredKind::Exists(x, s, body) if pol == Polarity::Neg => self.bind(x, s, body, pol, out)?,
            PredKind::Forall(..) | PredKind::Exists(..) => {
                return Err(EmitError::Unsupported(format!("quantifier in a mixed or negative position: `{p}`")));
            }
            PredKind::KApp(..) => return Err(EmitError::KVar(p.to_string())),
        })
    }

    fn binary(
        &mut self,
        op: &str,
        a: &Pred,
        pa: Polarity,
        b: &Pred,
        pb: Polarity,
        out: &mut Out,
    ) -> Result<(), EmitError> {
        out.push("(");
        out.push(op);
        out.push(" ");
        self.render(a, pa, out)?;
        out.push(" ");
        self.render(b, pb, out)?;
        out.push(")");
        Ok(())
    }

    fn finish(mut self, formula: String) -> Query {
        let mut decls = Vec::new();
        for s in &self.sorts {
            decls.push(format!("(declare-sort {} 0)", symbol(&format!("{s}!s"))));
        }
        if self.unit {
            decls.push("(declare-sort Unit 0)".into());
            decls.push("(declare-const unit Unit)".into());
        }
        let funs: Vec<Name> = self.funs.iter().cloned().collect();
        for f in funs {
            let (args, ret) = self.env.fun(&f).cloned().expect("checked when rendered");
            let args: Vec<String> = args.iter().map(|s| self.sort_name(s)).collect();
            let ret = self.sort_name(&ret);
            decls.push(format!("(declare-fun {} ({}) {ret})", symbol(&mangle(f.as_str())), args.join(" ")));
        }
        for (c, s) in std::mem::take(&mut self.consts) {
            let sort = self.sort_name(&s);
            decls.push(format!("(declare-const {} {sort})", symbol(&c)));
            if s == Sort::Unit {
                decls.push(format!("(assert (= {} unit))", symbol(&c)));
            }
        }
        Query { decls, defs: self.defs, formula }
    }
}

fn int_literal(n: i64) -> String {
    if n < 0 {
        format!("(- {})", (n as i128).abs())
    } else {
        n.to_string()
    }
}

fn is_literal(p: &Pred) -> bool {
    match p.kind() {
        PredKind::Int(_) => true,
        PredKind::Neg(a) => is_literal(a),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fusion_core::constraint::Bind;
    use fusion_core::lang::parse_pred;

    fn pred(s: &str) -> Pred {
        parse_pred(s).unwrap()
    }

    fn int_env(xs: &[&str]) -> SortEnv {
        let mut env = SortEnv::new();
        for x in xs {
            env.bind((*x).into(), Sort::Int);
        }
        env
    }

    #[test]
    fn universal_becomes_a_constant() {
        let q = validity_query(&pred("forall x:Int. 0 <= x => 0 <= x + 1"), &SortEnv::new()).unwrap();
        assert_eq!(q.decls, ["(declare-const x Int)"]);
        assert_eq!(q.formula, "(=> (<= 0 x) (<= 0 (+ x 1)))");
    }

    #[test]
    fn shadowed_binders_get_distinct_constants() {
        let q =
            validity_query(&pred("forall x:Int. 0 <= x => (forall x:Int. x = 1 => x < 5)"), &SortEnv::new()).unwrap();
        assert_eq!(q.decls, ["(declare-const x Int)", "(declare-const x!1 Int)"]);
        assert_eq!(q.formula, "(=> (<= 0 x) (=> (= x!1 1) (< x!1 5)))");
    }

    #[test]
    fn hypothesis_existentials_are_skolemized() {
        let q = validity_query(&pred("(exists y:Int. y = z + 1) => 0 <= z"), &int_env(&["z"])).unwrap();
        assert!(!q.commands().contains("exists"), "{}", q.commands());
        assert_eq!(q.decls.len(), 2);
    }

    #[test]
    fn goal_existential_and_kvars_are_rejected() {
        let e = validity_query(&pred("exists y:Int. y = 0"), &SortEnv::new()).unwrap_err();
        assert!(matches!(e, EmitError::Unsupported(_)), "{e}");
        let e = validity_query(&pred("x * y = 0"), &int_env(&["x", "y"])).unwrap_err();
        assert!(e.to_string().contains("nonlinear"), "{e}");
        let e = validity_query(&pred("q = 0"), &SortEnv::new()).unwrap_err();
        assert_eq!(e, EmitError::Unbound("q".into()));
    }

    #[test]
    fn negative_literals_and_reserved_names() {
        let q = validity_query(&pred("and = -3"), &int_env(&["and"])).unwrap();
        assert_eq!(q.formula, "(= and!v (- 3))");
    }

    #[test]
    fn generated_names_are_quoted() {
        let v = fusion_core::NameGen::new().fresh("v");
        let body =
            Pred::imp(Pred::eq(Pred::var(v.clone()), Pred::int(0)), Pred::eq(Pred::var(v.clone()), Pred::int(0)));
        let q = validity_query(&Pred::forall(v.clone(), Sort::Int, body), &SortEnv::new()).unwrap();
        assert_eq!(q.decls, [format!("(declare-const |{v}| Int)")]);
    }

    #[test]
    fn repeated_subformulas_are_abbreviated() {
        let shared = pred("0 <= x && x <= 10");
        let p = Pred::imp(shared.clone(), Pred::and(shared.clone(), Pred::or(shared, pred("x = 3"))));
        let q = validity_query(&p, &int_env(&["x"])).unwrap();
        assert_eq!(q.defs, ["(define-fun share!0 () Bool (and (<= 0 x) (<= x 10)))"]);
        assert!(q.formula.contains("share!0"));
    }

    #[test]
    fn uninterpreted_functions_and_unit() {
        let mut env = SortEnv::new();
        env.declare_fun("len".into(), vec![Sort::Uninterp("List".into())], Sort::Int);
        env.bind("xs".into(), Sort::Uninterp("List".into()));
        env.bind("u".into(), Sort::Unit);
        let q = validity_query(&pred("0 <= len(xs) && u = ()"), &env).unwrap();
        let text = q.script();
        assert!(text.contains("(declare-sort List!s 0)"), "{text}");
        assert!(text.contains("(declare-fun len (List!s) Int)"), "{text}");
        assert!(text.contains("(assert (= u unit))"), "{text}");
    }

    #[test]
    fn constraints_render_with_their_binders() {
        let c =
            Constraint::forall(Bind::new("x", Sort::Int, pred("0 <= x")), Constraint::goal(pred("0 <= x + 1"), None));
        let script = emit_smtlib(&c, &SortEnv::new()).unwrap();
        assert_eq!(
            script,
            "(set-logic QF_UFLIA)\n(declare-const x Int)\n(assert (not (=> (<= 0 x) (<= 0 (+ x 1)))))\n(check-sat)\n"
        );
    }

    #[test]
    fn emission_is_deterministic() {
        let p = pred("forall a:Int. forall b:Int. a < b => (exists c:Int. c = a + 1 && c <= b) => a + 1 <= b");
        let a = validity_query(&p, &SortEnv::new()).unwrap();
        let b = validity_query(&p, &SortEnv::new()).unwrap();
        assert_eq!(a.script(), b.script());
    }

    #[test]
    fn shared_existentials_stay_shared_across_binders() {
        // The same hypothesis reached under two unrelated binders is rendered
        // once, since its free variable resolves identically.
        let h = pred("exists a:Int. a = n + 1 && 0 <= a");
        let p = Pred::conj([
            Pred::forall("u".into(), Sort::Int, Pred::imp(h.clone(), pred("0 <= n + 1"))),
            Pred::forall("w".into(), Sort::Int, Pred::imp(h, pred("1 <= n + 2"))),
        ]);
        let q = validity_query(&p, &int_env(&["n"])).unwrap();
        assert_eq!(q.defs.len(), 1, "{}", q.script());
        assert_eq!(q.decls.iter().filter(|d| d.contains("|a") || d.contains(" a ")).count(), 1, "{:?}", q.decls);
    }

    #[test]
    fn distinct_existentials_with_one_name_get_distinct_constants() {
        let p = pred("(exists a:Int. a = 1) && (exists a:Int. a = 2) => false");
        let q = validity_query(&p, &SortEnv::new()).unwrap();
        assert_eq!(q.decls, ["(declare-const a Int)", "(declare-const a!1 Int)"]);
    }
}
