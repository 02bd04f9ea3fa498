//! The source language: syntax, parsing, elaboration, normalization and the
//! bundled prelude of primitive signatures.

mod anf;
mod elab;
mod env;
mod lexer;
mod parser;
mod syntax;

use alloc::string::String;
use core::fmt;

pub use anf::{anf_normalize, is_anf, is_temp};
pub use elab::{elaborate, Def, Elaborated};
pub use env::TypeEnv;
pub use parser::{parse_expr, parse_pred, parse_program, parse_type, COMPOSE, CONS, NIL};
pub use syntax::{is_operator, pretty, BaseTy, Const, Expr, ExprKind, Item, Program, RType, UType, UfDecl};

use crate::logic::Pred;
use crate::name::NameGen;
use crate::span::Span;

/// A syntax or elaboration error at a source position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LangError {
    pub span: Span,
    pub message: String,
}

impl LangError {
    pub fn new(span: Span, message: String) -> Self {
        LangError { span, message }
    }
}

impl fmt::Display for LangError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

/// Source of the bundled prelude.
pub const PRELUDE: &str = include_str!("prelude.lf");

/// The prelude followed by `src`, elaborated as one program.
pub fn elaborate_source(src: &str, gen: &mut NameGen) -> Result<Elaborated, LangError> {
    let mut prog = parse_program(PRELUDE).expect("prelude parses");
    let user = parse_program(src)?;
    prog.items.extend(user.items);
    elaborate(&prog, gen)
}

/// Signatures of every prelude constant.
pub fn load_prelude() -> TypeEnv {
    elaborate_source("", &mut NameGen::new()).expect("prelude elaborates").type_env()
}

/// The singleton type of a literal.
pub fn const_type(c: &Const) -> RType {
    let v = Pred::var("v");
    match c {
        Const::Int(n) => RType::base("v", BaseTy::Int, Pred::eq(v, Pred::int(*n))),
        Const::Bool(b) => RType::base("v", BaseTy::Bool, Pred::iff(v, Pred::boolean(*b))),
        Const::Unit => RType::trivial(BaseTy::Unit),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::Name;
    use alloc::string::ToString;

    #[test]
    fn prelude_arithmetic_signatures() {
        let env = load_prelude();
        let plus = env.lookup(&Name::new("+")).unwrap().to_string();
        assert_eq!(plus, "x:{v:Int | true} -> y:{v:Int | true} -> {v:Int | v = x + y}");
        let div = env.lookup(&Name::new("/")).unwrap().to_string();
        assert_eq!(div, "x:{v:Int | true} -> y:{v:Int | v != 0} -> {v:Int | true}");
        let assert_ = env.lookup(&Name::new("assert")).unwrap();
        assert!(assert_.to_string().starts_with("arg#"), "{assert_}");
        assert!(assert_.to_string().ends_with(":{v:Bool | v} -> {v:Unit | true}"), "{assert_}");
    }

    #[test]
    fn prelude_library_signatures() {
        let env = load_prelude();
        for f in ["inc", "dec", "nil", "cons", "last", "map", "compose", "id"] {
            assert!(env.contains(&Name::new(f)), "{f} missing");
        }
        assert_eq!(env.lookup(&Name::new("inc")).unwrap().to_string(), "x:{v:Int | true} -> {v:Int | v = x + 1}");
        assert!(env.lookup(&Name::new("compose")).unwrap().to_string().starts_with("forall b. forall c. forall a."));
    }

    #[test]
    fn literal_is_a_singleton() {
        assert_eq!(const_type(&Const::Int(7)).to_string(), "{v:Int | v = 7}");
    }
}
