//! A textual format for constraints, read by `fusion solve` and written by
//! `--dump-constraints`.
//!
//! A file is a sequence of s-expressions:
//!
//! ```text
//! (fun len (List) Int)              ; uninterpreted function
//! (var g Int)                       ; global constant
//! (kvar |k#3| ((|z#1| Int) (v Int)))
//! (cut |k#3|)                       ; forced cut
//! (constraint C)                    ; several are conjoined
//! ```
//!
//! Constraints are `(and C*)`, `(forall ((x S) P) C)` or a predicate, which
//! may carry a source location as `(! P :span "3:5-3:9")`. Predicates use
//! SMT-LIB operators plus `iff`, `(kapp k x*)`, `unit`, and quantifiers
//! `(forall ((x S)) P)` and `(exists ((x S)) P)` over one variable. A
//! variable whose name collides with a keyword is written `(var x)`, and an
//! uninterpreted function whose name does, `(app f a*)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use fusion_core::constraint::{Bind, Constraint, Node};
use fusion_core::logic::{ArithOp, KVar, Pred, PredKind, RelOp, Sort, SortEnv};
use fusion_core::{Name, Span};

use crate::sexp::{self, symbol, Sexp};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error(transparent)]
    Syntax(#[from] sexp::SexpError),
    #[error("in form {form}: {message}")]
    Form { form: usize, message: String },
}

/// Everything needed to solve a constraint without its source program.
#[derive(Clone, Debug)]
pub struct ConstraintFile {
    pub env: SortEnv,
    pub kvars: Vec<KVar>,
    pub cuts: BTreeSet<KVar>,
    pub constraint: Constraint,
}

/// Atoms with a fixed meaning in predicate position.
const KEYWORDS: &[&str] = &[
    "true", "false", "unit", "and", "or", "not", "=>", "iff", "=", "distinct", "<", "<=", ">", ">=", "+", "-", "*",
    "kapp", "forall", "exists", "var", "app", "!",
];

pub fn write(file: &ConstraintFile) -> String {
    let mut out = String::new();
    for (f, (args, ret)) in file.env.funs() {
        let args: Vec<String> = args.iter().map(sort).collect();
        let _ = writeln!(out, "(fun {} ({}) {})", symbol(f.as_str()), args.join(" "), sort(ret));
    }
    // Function-typed globals cannot occur in refinements and are left out.
    for (x, s) in file.env.vars() {
        if let Some(s) = s {
            let _ = writeln!(out, "(var {} {})", symbol(x.as_str()), sort(s));
        }
    }
    for k in &file.kvars {
        let params: Vec<String> =
            k.params().iter().map(|(z, s)| format!("({} {})", symbol(z.as_str()), sort(s))).collect();
        let _ = writeln!(out, "(kvar {} ({}))", symbol(k.name().as_str()), params.join(" "));
    }
    for k in &file.cuts {
        let _ = writeln!(out, "(cut {})", symbol(k.name().as_str()));
    }
    out.push_str("(constraint\n");
    write_constraint(&mut out, &file.constraint, 1);
    out.push_str(")\n");
    out
}

fn sort(s: &Sort) -> String {
    match s {
        Sort::Uninterp(n) => symbol(n.as_str()),
        other => other.to_string(),
    }
}

fn write_constraint(out: &mut String, c: &Constraint, depth: usize) {
    let pad = "  ".repeat(depth);
    match c.node() {
        Node::Goal(p, None) => {
            let _ = writeln!(out, "{pad}{}", pred_sexp(p));
        }
        Node::Goal(p, Some(s)) => {
            let _ =
                writeln!(out, "{pad}(! {} :span \"{}:{}-{}:{}\")", pred_sexp(p), s.line, s.col, s.end_line, s.end_col);
        }
        Node::And(cs) => {
            let _ = writeln!(out, "{pad}(and");
            for c in cs {
                write_constraint(out, c, depth + 1);
            }
            let _ = writeln!(out, "{pad})");
        }
        Node::Forall(b, body) => {
            let _ =
                writeln!(out, "{pad}(forall (({} {}) {})", symbol(b.name.as_str()), sort(&b.sort), pred_sexp(&b.pred));
            write_constraint(out, body, depth + 1);
            let _ = writeln!(out, "{pad})");
        }
    }
}

fn atom(s: impl Into<String>) -> Sexp {
    Sexp::Atom(s.into())
}

fn list(xs: impl IntoIterator<Item = Sexp>) -> Sexp {
    Sexp::List(xs.into_iter().collect())
}

fn var_sexp(x: &Name) -> Sexp {
    let s = x.as_str();
    if KEYWORDS.contains(&s) || s.starts_with(|c: char| c.is_ascii_digit()) {
        list([atom("var"), atom(s)])
    } else {
        atom(s)
    }
}

pub fn pred_sexp(p: &Pred) -> Sexp {
    let op = |o: &str, args: &[&Pred]| list(std::iter::once(atom(o)).chain(args.iter().map(|a| pred_sexp(a))));
    match p.kind() {
        PredKind::Bool(b) => atom(b.to_string()),
        PredKind::Int(n) if *n < 0 => list([atom("-"), atom((*n as i128).abs().to_string())]),
        PredKind::Int(n) => atom(n.to_string()),
        PredKind::Unit => atom("unit"),
        PredKind::Var(x) => var_sexp(x),
        PredKind::Neg(a) => op("-", &[a]),
        PredKind::Arith(o, a, b) => op(o.symbol(), &[a, b]),
        PredKind::Rel(RelOp::Ne, a, b) => op("distinct", &[a, b]),
        PredKind::Rel(o, a, b) => op(o.symbol(), &[a, b]),
        PredKind::App(f, args) => {
            let mut xs = Vec::new();
            if KEYWORDS.contains(&f.as_str()) {
                xs.push(atom("app"));
            }
            xs.push(atom(f.as_str()));
            xs.extend(args.iter().map(pred_sexp));
            list(xs)
        }
        PredKind::Not(a) => op("not", &[a]),
        PredKind::And(a, b) => op("and", &[a, b]),
        PredKind::Or(a, b) => op("or", &[a, b]),
        PredKind::Imp(a, b) => op("=>", &[a, b]),
        PredKind::Iff(a, b) => op("iff", &[a, b]),
        PredKind::Exists(x, s, body) | PredKind::Forall(x, s, body) => {
            let q = if matches!(p.kind(), PredKind::Exists(..)) { "exists" } else { "forall" };
            list([atom(q), list([list([atom(x.as_str()), atom(sort(s))])]), pred_sexp(body)])
        }
        PredKind::KApp(k, args) => list(
            std::iter::once(atom("kapp"))
                .chain(std::iter::once(atom(k.name().as_str())))
                .chain(args.iter().map(var_sexp)),
        ),
    }
}

struct Reader {
    env: SortEnv,
    kvars: BTreeMap<Name, KVar>,
    order: Vec<KVar>,
}

type R<T> = Result<T, String>;

impl Reader {
    fn sort(s: &Sexp) -> R<Sort> {
        match s.atom() {
            Some("Int") => Ok(Sort::Int),
            Some("Bool") => Ok(Sort::Bool),
            Some("Unit") => Ok(Sort::Unit),
            Some(n) => Ok(Sort::Uninterp(n.into())),
            None => Err(format!("expected a sort, found `{s}`")),
        }
    }

    fn name(s: &Sexp) -> R<Name> {
        s.atom().map(Name::from).ok_or_else(|| format!("expected a name, found `{s}`"))
    }

    fn kvar(&self, s: &Sexp) -> R<KVar> {
        let n = Self::name(s)?;
        self.kvars.get(&n).cloned().ok_or_else(|| format!("undeclared refinement variable `{n}`"))
    }

    fn pred(&mut self, s: &Sexp) -> R<Pred> {
        match s {
            Sexp::Atom(a) => Ok(match a.as_str() {
                "true" => Pred::tt(),
                "false" => Pred::ff(),
                "unit" => Pred::unit(),
                _ if a.starts_with(|c: char| c.is_ascii_digit()) => {
                    Pred::int(a.parse().map_err(|_| format!("bad integer `{a}`"))?)
                }
                _ => Pred::var(a.as_str()),
            }),
            Sexp::Str(_) => Err(format!("unexpected string {s}")),
            Sexp::List(xs) => {
                let head = s.head().ok_or_else(|| format!("expected an operator in `{s}`"))?;
                let args = &xs[1..];
                let ps = |r: &mut Self| args.iter().map(|a| r.pred(a)).collect::<R<Vec<Pred>>>();
                let two = |ps: Vec<Pred>| -> R<(Pred, Pred)> {
                    match <[Pred; 2]>::try_from(ps) {
                        Ok([a, b]) => Ok((a, b)),
                        Err(_) => Err(format!("`{head}` takes two arguments in `{s}`")),
                    }
                };
                Ok(match head {
                    "var" => match args {
                        [x] => Pred::var(Self::name(x)?),
                        _ => return Err(format!("malformed `{s}`")),
                    },
                    "-" => match ps(self)?.as_slice() {
                        [a] => match a.kind() {
                            PredKind::Int(n) => Pred::int(-n),
                            _ => Pred::neg(a.clone()),
                        },
                        [a, b] => Pred::arith(ArithOp::Sub, a.clone(), b.clone()),
                        _ => return Err(format!("malformed `{s}`")),
                    },
                    "+" | "*" => {
                        let (a, b) = two(ps(self)?)?;
                        Pred::arith(if head == "+" { ArithOp::Add } else { ArithOp::Mul }, a, b)
                    }
                    "=" | "distinct" | "<" | "<=" | ">" | ">=" => {
                        let (a, b) = two(ps(self)?)?;
                        let op = match head {
                            "=" => RelOp::Eq,
                            "distinct" => RelOp::Ne,
                            "<" => RelOp::Lt,
                            "<=" => RelOp::Le,
                            ">" => RelOp::Gt,
                            _ => RelOp::Ge,
                        };
                        Pred::rel(op, a, b)
                    }
                    "not" => match ps(self)?.as_slice() {
                        [a] => Pred::not(a.clone()),
                        _ => return Err(format!("malformed `{s}`")),
                    },
                    "and" => Pred::conj(ps(self)?),
                    "or" => Pred::disj(ps(self)?),
                    "=>" => {
                        let (a, b) = two(ps(self)?)?;
                        Pred::imp(a, b)
                    }
                    "iff" => {
                        let (a, b) = two(ps(self)?)?;
                        Pred::iff(a, b)
                    }
                    "forall" | "exists" => {
                        let (x, srt, body) = match args {
                            [bs, body] => match bs.list() {
                                Some([b]) => match b.list() {
                                    Some([x, srt]) => (Self::name(x)?, Self::sort(srt)?, body),
                                    _ => return Err(format!("malformed binder in `{s}`")),
                                },
                                _ => return Err(format!("quantifiers bind one variable: `{s}`")),
                            },
                            _ => return Err(format!("malformed `{s}`")),
                        };
                        let body = self.pred(body)?;
                        if head == "forall" {
                            Pred::forall(x, srt, body)
                        } else {
                            Pred::exists(x, srt, body)
                        }
                    }
                    "kapp" => {
                        let (k, xs) = args.split_first().ok_or_else(|| format!("malformed `{s}`"))?;
                        let k = self.kvar(k)?;
                        let xs = xs
                            .iter()
                            .map(|x| match x.head() {
                                Some("var") => Self::name(&x.list().expect("has a head")[1]),
                                _ => Self::name(x),
                            })
                            .collect::<R<Vec<Name>>>()?;
                        if xs.len() != k.arity() {
                            return Err(format!("`{}` takes {} arguments in `{s}`", k.name(), k.arity()));
                        }
                        Pred::kapp(k, xs)
                    }
                    "app" => {
                        let (f, rest) = args.split_first().ok_or_else(|| format!("malformed `{s}`"))?;
                        let args = rest.iter().map(|a| self.pred(a)).collect::<R<Vec<_>>>()?;
                        Pred::app(Self::name(f)?, args)
                    }
                    f => Pred::app(f, ps(self)?),
                })
            }
        }
    }

    fn constraint(&mut self, s: &Sexp) -> R<Constraint> {
        match (s.head(), s.list()) {
            (Some("and"), Some(xs)) => {
                let cs = xs[1..].iter().map(|c| self.constraint(c)).collect::<R<Vec<_>>>()?;
                Ok(Constraint::and(cs))
            }
            // A one-element binder list is a quantified goal instead.
            (Some("forall"), Some([_, b, body])) if matches!(b.list(), Some([Sexp::List(_), _])) => {
                let (x, srt, p) = match b.list() {
                    Some([Sexp::List(xs), p]) if matches!(xs.as_slice(), [_, _]) => {
                        (Self::name(&xs[0])?, Self::sort(&xs[1])?, p)
                    }
                    _ => return Err(format!("a binder is `((x Sort) P)`, found `{b}`")),
                };
                let p = self.pred(p)?;
                Ok(Constraint::forall(Bind::new(x, srt, p), self.constraint(body)?))
            }
            (Some("!"), Some([_, p, key, Sexp::Str(span)])) if key.atom() == Some(":span") => {
                let span = parse_span(span).ok_or_else(|| format!("bad span \"{span}\""))?;
                Ok(Constraint::goal(self.pred(p)?, Some(span)))
            }
            _ => Ok(Constraint::goal(self.pred(s)?, None)),
        }
    }
}

fn parse_span(s: &str) -> Option<Span> {
    let (a, b) = s.split_once('-')?;
    let pos = |p: &str| -> Option<(u32, u32)> {
        let (l, c) = p.split_once(':')?;
        Some((l.trim().parse().ok()?, c.trim().parse().ok()?))
    };
    let ((l, c), (el, ec)) = (pos(a)?, pos(b)?);
    Some(Span::new(l, c, el, ec))
}

pub fn read(src: &str) -> Result<ConstraintFile, FormatError> {
    let forms = sexp::parse_all(src)?;
    let mut r = Reader { env: SortEnv::new(), kvars: BTreeMap::new(), order: Vec::new() };
    let mut cuts = BTreeSet::new();
    let mut parts = Vec::new();
    for (i, form) in forms.iter().enumerate() {
        let err = |message: String| FormatError::Form { form: i + 1, message };
        let args = form.list().map(|xs| &xs[1..]).unwrap_or_default();
        match (form.head(), args) {
            (Some("fun"), [f, Sexp::List(ss), ret]) => {
                let ss = ss.iter().map(Reader::sort).collect::<R<Vec<_>>>().map_err(err)?;
                let ret = Reader::sort(ret).map_err(err)?;
                r.env.declare_fun(Reader::name(f).map_err(err)?, ss, ret);
            }
            (Some("var"), [x, s]) => {
                let x = Reader::name(x).map_err(err)?;
                if s.atom() == Some("_") {
                    r.env.bind_function(x);
                } else {
                    let s = Reader::sort(s).map_err(err)?;
                    r.env.bind(x, s);
                }
            }
            (Some("kvar"), [k, Sexp::List(ps)]) => {
                let k = Reader::name(k).map_err(err)?;
                let mut params = Vec::new();
                for p in ps {
                    match p.list() {
                        Some([z, s]) => params.push((Reader::name(z).map_err(err)?, Reader::sort(s).map_err(err)?)),
                        _ => return Err(err(format!("a parameter is `(z Sort)`, found `{p}`"))),
                    }
                }
                let mut seen = BTreeSet::new();
                if let Some((z, _)) = params.iter().find(|(z, _)| !seen.insert(z.clone())) {
                    return Err(err(format!("repeated parameter `{z}`")));
                }
                if r.kvars.contains_key(&k) {
                    return Err(err(format!("`{k}` is declared twice")));
                }
                let kv = KVar::new(k.clone(), params);
                r.order.push(kv.clone());
                r.kvars.insert(k, kv);
            }
            (Some("cut"), [k]) => {
                cuts.insert(r.kvar(k).map_err(err)?);
            }
            (Some("constraint"), [c]) => parts.push(r.constraint(c).map_err(err)?),
            _ => return Err(err(format!("unrecognized form `{form}`"))),
        }
    }
    Ok(ConstraintFile { env: r.env, kvars: r.order, cuts, constraint: Constraint::and(parts) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use fusion_core::lang::parse_pred;

    fn pred(s: &str) -> Pred {
        parse_pred(s).unwrap()
    }

    fn sample() -> ConstraintFile {
        let k = KVar::new("k#1".into(), vec![("z#0".into(), Sort::Int), ("v".into(), Sort::Int)]);
        let mut env = SortEnv::new();
        env.declare_fun("len".into(), vec![Sort::Uninterp("List".into())], Sort::Int);
        env.bind("g".into(), Sort::Int);
        env.bind_function("f".into());
        let c = Constraint::forall(
            Bind::new("x", Sort::Int, pred("0 <= x && x != -2")),
            Constraint::and([
                Constraint::forall(
                    Bind::new("y", Sort::Int, Pred::kapp(k.clone(), vec!["x".into(), "y".into()])),
                    Constraint::goal(pred("0 <= y"), Some(Span::new(3, 5, 3, 9))),
                ),
                Constraint::goal(Pred::kapp(k.clone(), vec!["x".into(), "g".into()]), None),
                Constraint::goal(pred("exists t:Int. t = x - 1 || (g * 2 > t <=> true)"), None),
            ]),
        );
        let cuts = [k.clone()].into_iter().collect();
        ConstraintFile { env, kvars: vec![k], cuts, constraint: c }
    }

    #[test]
    fn write_read_round_trip() {
        let f = sample();
        let text = write(&f);
        let back = read(&text).unwrap();
        assert_eq!(back.constraint, f.constraint);
        assert_eq!(back.kvars, f.kvars);
        assert_eq!(back.kvars[0].params(), f.kvars[0].params());
        assert_eq!(back.cuts, f.cuts);
        assert_eq!(write(&back), text);
    }

    #[test]
    fn spans_survive() {
        let text = write(&sample());
        assert!(text.contains(":span \"3:5-3:9\""), "{text}");
    }

    #[test]
    fn keyword_names_are_escaped() {
        let p = Pred::eq(Pred::var("unit"), Pred::app("and", vec![Pred::int(1)]));
        let s = pred_sexp(&p);
        assert_eq!(s.to_string(), "(= (var unit) (app and 1))");
    }

    #[test]
    fn errors_name_the_form() {
        let e = read("(var x Int)\n(constraint (kapp k x))").unwrap_err();
        assert_eq!(e.to_string(), "in form 2: undeclared refinement variable `k`");
        let e = read("(kvar k ((a Int) (a Int)))").unwrap_err();
        assert!(e.to_string().contains("repeated parameter"), "{e}");
        let e = read("(kvar k ((a Int))) (constraint (kapp k a a))").unwrap_err();
        assert!(e.to_string().contains("takes 1 arguments"), "{e}");
        assert!(matches!(read("(constraint"), Err(FormatError::Syntax(_))));
    }

    #[test]
    fn hand_written_files_parse() {
        let src = "
            ; x is a natural, so x + 1 is positive
            (constraint (forall ((x Int) (<= 0 x)) (< 0 (+ x 1))))";
        let f = read(src).unwrap();
        assert_eq!(f.constraint.flatten().len(), 1);
        assert_eq!(f.constraint.flatten()[0].goal, pred("0 < x + 1"));
    }
}
